#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sublab/checks.hpp"
#include "sublab/lattice.hpp"

using namespace sublab;

namespace {

GridSpec grid(int dim, int n, Boundary b = Boundary::dirichlet, double h = 1.0) {
  GridSpec g;
  g.dim = dim;
  g.n = n;
  g.h = h;
  g.boundary = b;
  return g;
}

// reference energy straight from the edge list: sum over unordered pairs plus killing
double brute_energy(const DiscreteSpace& sp, const VectorXd& f) {
  MatrixXd C(sp.conductance);
  double e = 0.0;
  for (int x = 0; x < sp.size(); ++x) {
    for (int y = 0; y < sp.size(); ++y) e += 0.5 * C(x, y) * (f(x) - f(y)) * (f(x) - f(y));
    e += sp.killing(x) * f(x) * f(x);
  }
  return e;
}

}  // namespace

TEST(Lattice, SingleNode) {
  auto sp = build_space(grid(1, 1));
  ASSERT_EQ(sp.size(), 1);
  EXPECT_EQ(sp.killing(0), 2.0);
  EXPECT_EQ(sp.mass(0), 1.0);
  VectorXd f(1);
  f << 3.0;
  EXPECT_DOUBLE_EQ(sp.energy(f), 18.0);
}

TEST(Lattice, PathStencil) {
  auto sp = build_space(grid(1, 3));
  MatrixXd S(sp.form_matrix());
  MatrixXd expect(3, 3);
  expect << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  EXPECT_LE((S - expect).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Lattice, SpacingScalesWeights) {
  auto sp = build_space(grid(3, 3, Boundary::dirichlet, 0.5));
  EXPECT_DOUBLE_EQ(sp.mass(0), 0.125);
  EXPECT_DOUBLE_EQ(sp.conductance.coeff(0, 1), 0.5);
  auto sp2 = build_space(grid(1, 4, Boundary::dirichlet, 0.5));
  EXPECT_DOUBLE_EQ(sp2.conductance.coeff(0, 1), 2.0);
}

TEST(Lattice, ConstantEnergyIsTotalKilling) {
  for (int dim = 1; dim <= 3; ++dim) {
    auto free = build_space(grid(dim, 4, Boundary::free));
    auto dir = build_space(grid(dim, 4));
    VectorXd one = VectorXd::Ones(free.size());
    EXPECT_NEAR(free.energy(one), 0.0, 1e-14);
    EXPECT_NEAR(dir.energy(one), dir.killing.sum(), 1e-12);
    EXPECT_GT(dir.energy(one), 0.0);
    // 2 dim n^{dim-1} cut edges
    EXPECT_NEAR(dir.killing.sum(), 2.0 * dim * std::pow(4, dim - 1), 1e-12);
  }
}

TEST(Lattice, EnergyMatchesBruteForce) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  auto sp = build_space(grid(2, 5));
  for (int t = 0; t < 20; ++t) {
    VectorXd f(sp.size());
    for (int i = 0; i < f.size(); ++i) f(i) = nd(rng);
    EXPECT_NEAR(sp.energy(f), brute_energy(sp, f), 1e-10 * brute_energy(sp, f));
    EXPECT_NEAR(f.dot(sp.form_matrix() * f), brute_energy(sp, f), 1e-10 * brute_energy(sp, f));
  }
}

TEST(Lattice, RejectsBadGrids) {
  EXPECT_THROW(build_space(grid(1, 0)), std::invalid_argument);
  EXPECT_THROW(build_space(grid(1, 3, Boundary::dirichlet, 0.0)), std::invalid_argument);
  EXPECT_THROW(build_space(grid(4, 3)), std::invalid_argument);
}

TEST(Lattice, GluedGridsShareOneNode) {
  GlueSpec g2{grid(2, 5), {}, {}};
  auto sp = build_space(grid(3, 5), g2);
  EXPECT_EQ(sp.size(), 125 + 25 - 1);
  EXPECT_TRUE(sp.connected());
  GlueSpec g3{grid(3, 5), {}, {}};
  auto sp3 = build_space(grid(3, 5), g3);
  EXPECT_EQ(sp3.size(), 249);
  EXPECT_TRUE(sp3.connected());
  EXPECT_DOUBLE_EQ(sp.mass(sp.junction), 2.0);
}

TEST(Lattice, GluedFormIsSumOfParts) {
  GlueSpec glue{grid(2, 3), {}, {}};
  auto sp = build_space(grid(3, 3), glue);
  auto a = build_space(grid(3, 3));
  auto b = build_space(grid(2, 3));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    VectorXd f(sp.size());
    for (int i = 0; i < f.size(); ++i) f(i) = nd(rng);
    VectorXd fa(a.size()), fb(b.size());
    for (int i = 0; i < a.size(); ++i) fa(i) = f(sp.find(a.coords[i], 0));
    for (int i = 0; i < b.size(); ++i) fb(i) = f(sp.find(b.coords[i], 1));
    EXPECT_NEAR(sp.energy(f), a.energy(fa) + b.energy(fb), 1e-10);
  }
}

TEST(Lattice, GlueNeedsGridPoint) {
  GlueSpec glue{grid(2, 3), {0.5, 0.0}, {}};
  EXPECT_THROW(build_space(grid(2, 3), glue), std::invalid_argument);
}

TEST(Lattice, MeasureExamples) {
  auto one = build_space(grid(1, 1));
  auto mu = attach_measure(one, MeasureSpec::uniform(1.0), Sign::minus);
  EXPECT_EQ(mu.minus(0), 1.0);
  EXPECT_EQ(mu.plus(0), 0.0);

  auto cube = build_space(grid(3, 5));
  VectorXd w = measure_weights(cube, MeasureSpec::radial(1.0, 2.0));
  EXPECT_DOUBLE_EQ(w(cube.find({1.0, 0.0, 0.0})), 1.0);
  EXPECT_DOUBLE_EQ(w(cube.find({1.0, 1.0, 1.0})), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(w(cube.origin()), 4.0);  // radius floored at h/2

  auto sq = build_space(grid(2, 5));
  VectorXd hp = measure_weights(sq, MeasureSpec::plane(1.0, 1.0));
  EXPECT_DOUBLE_EQ(hp(sq.find({2.0, 0.0})), 0.5);
  EXPECT_EQ(hp(sq.find({2.0, 1.0})), 0.0);
  EXPECT_EQ((hp.array() > 0.0).count(), 5);
}

TEST(Lattice, MeasureErrors) {
  auto sq = build_space(grid(2, 3));
  auto far = MeasureSpec::radial(1.0, 2.0);
  far.center = {5.0, 0.0};
  EXPECT_THROW(measure_weights(sq, far), std::invalid_argument);
  EXPECT_THROW(measure_weights(sq, MeasureSpec::radial(1.0, -1.0)), std::invalid_argument);
  EXPECT_THROW(measure_weights(sq, MeasureSpec::custom({1.0})), std::invalid_argument);
}

TEST(Lattice, SingleNodeOperator) {
  auto sp = build_space(grid(1, 1));
  for (double w : {0.5, 2.0, 3.0}) {
    SignedMeasure mu = SignedMeasure::zero(1);
    mu.minus(0) = w;
    auto op = schrodinger_matrix(sp, mu);
    EXPECT_NEAR(op.matrix()(0, 0), 2.0 - w, 1e-15);
    EXPECT_NEAR(op.psd_certificate, 2.0 - w, 1e-14);
    EXPECT_EQ(op.negative, w > 2.0);
  }
}

TEST(Lattice, PathCertificate) {
  auto sp = build_space(grid(1, 3));
  auto op = schrodinger_matrix(sp, SignedMeasure::zero(3));
  EXPECT_NEAR(op.psd_certificate, 2.0 - std::sqrt(2.0), 1e-13);
  EXPECT_FALSE(op.negative);
}

TEST(Lattice, CancellingMeasure) {
  auto sp = build_space(grid(2, 4));
  SignedMeasure mu = SignedMeasure::zero(sp.size());
  mu.plus.setConstant(0.7);
  mu.minus.setConstant(0.7);
  auto a = schrodinger_matrix(sp, mu);
  auto b = schrodinger_matrix(sp, SignedMeasure::zero(sp.size()));
  EXPECT_LE((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  mu.canonicalize();
  EXPECT_TRUE(mu.plus_is_zero());
  EXPECT_TRUE(mu.minus_is_zero());
}

TEST(Lattice, FormMatchesEnergyWithMeasure) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto sp = build_space(grid(2, 6));
  SignedMeasure mu = SignedMeasure::zero(sp.size());
  for (int i = 0; i < sp.size(); ++i) {
    mu.plus(i) = u(rng);
    mu.minus(i) = u(rng);
  }
  auto op = schrodinger_matrix(sp, mu);
  MatrixXd MA = sp.mass.asDiagonal() * op.matrix();
  EXPECT_LE((MA - MA.transpose()).cwiseAbs().maxCoeff(), 1e-14);
  for (int t = 0; t < 100; ++t) {
    VectorXd f(sp.size());
    for (int i = 0; i < f.size(); ++i) f(i) = nd(rng);
    double expect = brute_energy(sp, f) + (mu.plus - mu.minus).dot(f.cwiseAbs2());
    double got = (sp.mass.array() * op.apply(f).array() * f.array()).sum();
    EXPECT_NEAR(got, expect, 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST(Lattice, DisconnectedSpaceIsRejected) {
  auto sp = build_space(grid(1, 3));
  sp.conductance.setZero();
  EXPECT_FALSE(sp.connected());
  EXPECT_THROW(schrodinger_matrix(sp, SignedMeasure::zero(3)), std::invalid_argument);
}

TEST(Lattice, CooExport) {
  auto sp = build_space(grid(1, 2));
  auto op = schrodinger_matrix(sp, SignedMeasure::zero(2));
  std::ostringstream os;
  op.export_coo(os);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  int i, j, rows = 0;
  double v, sum = 0.0;
  while (is >> i >> j >> v) {
    ++rows;
    sum += v;
  }
  EXPECT_EQ(rows, 4);
  EXPECT_DOUBLE_EQ(sum, 2.0);  // two cut edges
}

TEST(Lattice, KatoNorm) {
  auto one = build_space(grid(1, 1));
  VectorXd mu = VectorXd::Ones(1);
  EXPECT_NEAR(kato_norm(one, mu, 2.0), 0.25, 1e-15);

  auto free = build_space(grid(2, 4, Boundary::free));
  auto dir = build_space(grid(2, 4));
  for (double a : {0.1, 1.0, 10.0}) {
    EXPECT_NEAR(kato_norm(free, free.mass, a), 1.0 / a, 1e-12 / a);
    EXPECT_LT(kato_norm(dir, dir.mass, a), 1.0 / a);
  }
  EXPECT_THROW(kato_norm(one, mu, 0.0), std::invalid_argument);
  EXPECT_THROW(kato_norm(one, VectorXd::Constant(1, -1.0), 1.0), std::invalid_argument);
}

TEST(Lattice, KatoProfileDecreases) {
  auto sp = build_space(grid(2, 5));
  VectorXd mu = measure_weights(sp, MeasureSpec::radial(1.0, 2.0));
  auto p = kato_profile(sp, mu);
  EXPECT_TRUE(p.strictly_decreasing);
  EXPECT_LT(p.decay_exponent, 0.0);
}

TEST(Lattice, StollmannVoigtEqualityOnOneNode) {
  auto one = build_space(grid(1, 1));
  VectorXd mu = VectorXd::Ones(1), f = VectorXd::Ones(1);
  auto r = stollmann_voigt_check(one, mu, f, 2.0);
  EXPECT_NEAR(r.lhs, 1.0, 1e-15);
  EXPECT_NEAR(r.rhs, 1.0, 1e-15);
  EXPECT_NEAR(r.slack, 0.0, 1e-15);
  auto z = stollmann_voigt_check(one, mu, VectorXd::Zero(1), 2.0);
  EXPECT_EQ(z.slack, 0.0);
}

TEST(Lattice, StollmannVoigtRandom) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    int n = 3 + t % 10;
    auto sp = random_space(rng, n, t % 2 == 0);
    VectorXd mu(n), f(n);
    for (int i = 0; i < n; ++i) {
      mu(i) = u(rng);
      f(i) = 2.0 * u(rng) - 1.0;
    }
    double a = std::pow(10.0, 3.0 * u(rng) - 1.0);
    // independent resolvent by dense solve
    MatrixXd A = MatrixXd(sp.form_matrix()) + a * MatrixXd(sp.mass.asDiagonal());
    VectorXd v = A.ldlt().solve(mu);
    auto r = stollmann_voigt_check(sp, mu, f, a);
    EXPECT_NEAR(r.kato, v.maxCoeff(), 1e-12 * v.maxCoeff());
    EXPECT_GE(r.slack, -1e-12);
  }
}
