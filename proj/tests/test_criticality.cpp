#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sublab/checks.hpp"
#include "sublab/criticality.hpp"

using namespace sublab;

namespace {

SchrodingerOperator scalar(double a) {
  MatrixXd K(1, 1);
  K << a;
  return schrodinger_from_dense(K, VectorXd::Ones(1));
}

// sup{t : K+ - t D- is positive semidefinite}, by bisection on Cholesky success
double lambda_by_bisection(const MatrixXd& Kp, const VectorXd& minus) {
  double lo = 0.0, hi = 1.0;
  auto psd = [&](double t) {
    MatrixXd B = Kp - t * MatrixXd(minus.asDiagonal());
    B.diagonal().array() += 1e-13 * Kp.diagonal().cwiseAbs().maxCoeff();
    return Eigen::LLT<MatrixXd>(B).info() == Eigen::Success;
  };
  while (psd(hi)) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (psd(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

const BernsteinEntry kId = catalog_lookup("linear", {{"b", 1.0}});

}  // namespace

TEST(Criticality, SingleNodeTrichotomy) {
  auto sp = single_node(2.0);
  const double expect[] = {2.0, 1.0, 2.0 / 3.0};
  const Verdict verdict[] = {Verdict::Subcritical, Verdict::Critical, Verdict::Supercritical};
  for (int w = 1; w <= 3; ++w) {
    SignedMeasure mu = SignedMeasure::zero(1);
    mu.minus(0) = w;
    auto c = classify_schrodinger(sp, mu);
    EXPECT_NEAR(c.lambda_mu, expect[w - 1], 1e-12);
    EXPECT_EQ(c.verdict, verdict[w - 1]);
    EXPECT_NEAR(c.gamma_mu, 2.0 - w, 1e-14);
    EXPECT_EQ(c.evidence.at("gamma_sign_consistent"), "true");
  }
}

TEST(Criticality, NoNegativePart) {
  auto sp = single_node(2.0);
  auto b = bottom_of_spectrum(sp, SignedMeasure::zero(1));
  EXPECT_TRUE(std::isinf(b.lambda_mu));
  EXPECT_EQ(classify_schrodinger(sp, SignedMeasure::zero(1)).verdict, Verdict::Subcritical);
}

TEST(Criticality, LambdaMatchesBisection) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    int n = 4 + t % 9;
    auto sp = random_space(rng, n, true);
    SignedMeasure mu = SignedMeasure::zero(n);
    for (int i = 0; i < n; ++i) {
      if (u(rng) < 0.5) mu.minus(i) = u(rng);
      if (u(rng) < 0.3) mu.plus(i) = u(rng);
    }
    mu.minus(t % n) += 0.5;
    MatrixXd Kp = MatrixXd(sp.form_matrix()) + MatrixXd(mu.plus.asDiagonal());
    double oracle = lambda_by_bisection(Kp, mu.minus);
    auto b = bottom_of_spectrum(sp, mu);
    EXPECT_NEAR(b.lambda_mu, oracle, 1e-9 * oracle) << "instance " << t;
    EXPECT_EQ(b.lambda_mu >= 1.0, b.gamma_mu >= -1e-12) << "instance " << t;
  }
}

TEST(Criticality, SuperharmonicScalar) {
  auto d = decompose(scalar(2.0));
  auto r = superharmonic_h(d, kId, VectorXd::Constant(1, 3.0));
  EXPECT_NEAR(r.h(0), 1.0, 1e-15);
  EXPECT_LE(r.max_violation, 0.0);
  auto ht = h_transform(d, kId, r.h);
  EXPECT_NEAR(ht.row_sum_max, -2.0, 1e-14);
  EXPECT_FALSE(ht.conservative);

  auto d0 = decompose(scalar(0.0));
  auto r0 = superharmonic_h(d0, kId, VectorXd::Ones(1));
  EXPECT_NEAR(r0.h(0), 1.0, 1e-15);
  EXPECT_NEAR(r0.max_violation, 0.0, 1e-15);
  EXPECT_TRUE(h_transform(d0, kId, r0.h).conservative);
}

TEST(Criticality, SuperharmonicRefusals) {
  EXPECT_THROW(superharmonic_h(decompose(scalar(-1.0)), kId, VectorXd::Ones(1)), SupercriticalRefusal);
  EXPECT_THROW(superharmonic_h(decompose(scalar(1.0)), kId, VectorXd::Zero(1)), std::invalid_argument);
  GridSpec g;
  g.dim = 1;
  g.n = 5;
  auto sp = build_space(g);
  auto d = decompose(schrodinger_matrix(sp, SignedMeasure::zero(5)));
  // a spike at one end is not superharmonic
  VectorXd bump = VectorXd::Constant(5, 0.1);
  bump(0) = 5.0;
  EXPECT_THROW(h_transform(d, kId, bump), std::runtime_error);
}

TEST(Criticality, RandomHTransformsAreMarkov) {
  std::mt19937_64 rng(99);
  auto entries = default_catalog();
  for (int t = 0; t < 30; ++t) {
    bool kernel = t % 2 == 0;
    int n = 3 + t % 10;
    auto sp = random_space(rng, n, !kernel);
    auto d = decompose(schrodinger_matrix(sp, SignedMeasure::zero(n)));
    for (const auto& e : entries) {
      auto sh = superharmonic_h(d, e, VectorXd::Ones(n), kernel);
      EXPECT_EQ(sh.from_kernel, kernel);
      auto r = h_transform(d, e, sh.h);
      EXPECT_GE(r.offdiag_min, -1e-12) << e.name;
      EXPECT_LE(r.row_sum_max, 1e-12) << e.name;
      EXPECT_EQ(r.conservative, kernel) << e.name;
    }
  }
}

TEST(Criticality, FamilyFolding) {
  FamilyOptions o;
  auto conv = detail::fold_family({10, 20, 40}, {1.0, 1.0 + 1e-5, 1.0 + 1.1e-5}, {0.3, 0.2, 0.1}, o);
  EXPECT_EQ(conv.verdict, Verdict::Subcritical);
  EXPECT_TRUE(conv.conclusive);
  auto grow = detail::fold_family({10, 20, 40}, {1.0, 2.0, 4.0}, {0.3, 0.2, 0.1}, o);
  EXPECT_EQ(grow.verdict, Verdict::Critical);
  EXPECT_NEAR(grow.slope, 1.0, 1e-12);
  auto slow = detail::fold_family({10, 20, 40}, {1.0, 1.05, 1.1}, {0.3, 0.2, 0.1}, o);
  EXPECT_EQ(slow.verdict, Verdict::Subcritical);
  EXPECT_FALSE(slow.conclusive);
  auto inf = detail::fold_family({10, 20, 40}, {kInf, kInf, kInf}, {0, 0, 0}, o);
  EXPECT_EQ(inf.verdict, Verdict::Critical);
  EXPECT_TRUE(inf.conclusive);
}

TEST(Criticality, SubordinatedFamilies) {
  std::vector<FamilyMember> fam;
  for (int n : {5, 9, 17, 33}) {
    GridSpec g;
    g.dim = 1;
    g.n = n;
    auto sp = build_space(g);
    VectorXd e = VectorXd::Zero(n);
    e(n / 2) = 1.0;
    fam.push_back({n, schrodinger_matrix(sp, SignedMeasure::zero(n)), e});
  }
  // 1D Dirichlet paths: centre Green function grows linearly in n
  auto c = classify_subordinated(fam, kId);
  EXPECT_EQ(c.verdict, Verdict::Critical);
  EXPECT_GT(c.slope, 0.8);
  auto fam2 = fam;
  fam2.pop_back();
  fam2.pop_back();
  EXPECT_THROW(classify_subordinated(fam2, kId), std::invalid_argument);

  auto sp = single_node(2.0);
  SignedMeasure mu = SignedMeasure::zero(1);
  mu.minus(0) = 3.0;
  std::vector<FamilyMember> bad(3, {1, schrodinger_matrix(sp, mu), VectorXd::Ones(1)});
  EXPECT_EQ(classify_subordinated(bad, kId).verdict, Verdict::Supercritical);
}

TEST(Criticality, AsymptoticTable) {
  struct Row {
    BernsteinEntry e;
    Verdict v;
  };
  std::vector<Row> rows = {
      {catalog_lookup("gamma", {{"a", 1.0}, {"c", 1.0}}), Verdict::Critical},
      {catalog_lookup("relativistic", {{"alpha", 1.0}, {"m", 1.0}}), Verdict::Critical},
      {catalog_lookup("bessel"), Verdict::Critical},
      {catalog_lookup("stable", {{"beta", 1.0}}), Verdict::Subcritical},
      {catalog_lookup("stable", {{"beta", 1.9}}), Verdict::Subcritical},
      {catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 0.5}, {"sign", 1.0}}), Verdict::Subcritical},
      {catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 0.5}, {"sign", -1.0}}), Verdict::Subcritical},
      {catalog_lookup("bessel_squared"), Verdict::Subcritical},
  };
  for (const auto& r : rows) EXPECT_EQ(asymptotic_criticality(1.0, r.e).verdict, r.v) << r.e.name;
  EXPECT_EQ(asymptotic_criticality(0.5, catalog_lookup("stable", {{"beta", 1.0}})).verdict, Verdict::Critical);
  EXPECT_THROW(asymptotic_criticality(0.0, rows[0].e), std::invalid_argument);
  EXPECT_THROW(asymptotic_criticality(1.0, catalog_lookup("compound_poisson")), AsymptoticsOnly);
}

TEST(Criticality, RangeMembership) {
  GridSpec g;
  g.dim = 1;
  g.n = 6;
  g.boundary = Boundary::free;
  auto sp = build_space(g);
  auto d = decompose(schrodinger_matrix(sp, SignedMeasure::zero(6)));
  auto half = catalog_lookup("stable", {{"beta", 1.0}});
  EXPECT_FALSE(range_membership(d, half, VectorXd::Ones(6)).member);
  VectorXd f = VectorXd::LinSpaced(6, -1.0, 1.0);
  auto r = range_membership(d, half, f);
  ASSERT_TRUE(r.member);
  EXPECT_NEAR(d.norm2(r.witness), r.green, 1e-12 * r.green);
  // Phi(A)^{1/2} applied to the witness returns f
  VectorXd back = apply_function(d, [](double l) { return std::pow(l, 0.25); }, r.witness);
  EXPECT_LE((back - f).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Criticality, WindowConstant) {
  auto d = decompose(scalar(2.0));
  EXPECT_NEAR(subcritical_window_constant(d, kId, VectorXd::Ones(1)), 2.0, 1e-14);
  EXPECT_TRUE(std::isinf(subcritical_window_constant(d, kId, VectorXd::Zero(1))));
  EXPECT_EQ(subcritical_window_constant(decompose(scalar(0.0)), kId, VectorXd::Ones(1)), 0.0);
}
