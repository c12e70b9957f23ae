#include <cmath>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <gtest/gtest.h>

#include "sublab/bernstein.hpp"
#include "sublab/checks.hpp"

using namespace sublab;

namespace {

const std::vector<double> kGrid = {0.1, 1.0, 10.0, 100.0};

std::vector<BernsteinEntry> everything() {
  auto v = default_catalog();
  v.push_back(catalog_lookup("stable", {{"beta", 0.5}}));
  v.push_back(catalog_lookup("stable", {{"beta", 1.5}}));
  v.push_back(catalog_lookup("relativistic", {{"alpha", 1.5}, {"m", 2.0}}));
  v.push_back(catalog_lookup("gamma", {{"a", 2.0}, {"c", 0.5}}));
  v.push_back(catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 0.5}, {"sign", 1.0}}));
  v.push_back(catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 0.5}, {"sign", -1.0}}));
  return v;
}

}  // namespace

TEST(Bernstein, StableClosedForm) {
  auto e = catalog_lookup("stable", {{"beta", 1.0}});
  EXPECT_DOUBLE_EQ(phi_eval(e, 4.0), 2.0);
  EXPECT_NEAR(phi_eval(e, 1.0, PhiMode::levy_quadrature), 1.0, 1e-8);
}

TEST(Bernstein, VanishesAtZero) {
  for (const auto& e : everything()) {
    EXPECT_EQ(phi_eval(e, 0.0), 0.0) << e.name;
    if (e.has_levy()) EXPECT_EQ(phi_eval(e, 0.0, PhiMode::levy_quadrature), 0.0) << e.name;
  }
}

TEST(Bernstein, ClosedFormsMatchTextbookExpressions) {
  for (double l : kGrid) {
    auto rel = catalog_lookup("relativistic", {{"alpha", 1.5}, {"m", 2.0}});
    EXPECT_NEAR(rel.phi(l), std::pow(l + std::pow(2.0, 2.0 / 1.5), 0.75) - 2.0, 1e-12 * (1 + l));
    auto ig = catalog_lookup("inverse_gaussian", {{"a", 1.5}, {"c", 2.0}});
    EXPECT_NEAR(ig.phi(l), 1.5 * (std::sqrt(2.0 * l + 4.0) - 2.0), 1e-12 * (1 + l));
    auto bes = catalog_lookup("bessel");
    EXPECT_NEAR(bes.phi(l), std::acosh(1.0 + l), 1e-12 * (1 + l));
    auto bes2 = catalog_lookup("bessel_squared");
    EXPECT_NEAR(bes2.phi(l), std::pow(std::acosh(1.0 + l), 2), 1e-11 * (1 + l));
    auto cp = catalog_lookup("compound_poisson", {{"a", 2.0}, {"c", 3.0}});
    EXPECT_NEAR(cp.phi(l), 2.0 * l / (l + 3.0), 1e-14);
  }
}

TEST(Bernstein, LevyQuadratureMatchesClosedForm) {
  for (const auto& e : everything()) {
    if (!e.has_levy()) continue;
    for (double l : kGrid) {
      double closed = phi_eval(e, l);
      double quad = phi_eval(e, l, PhiMode::levy_quadrature);
      EXPECT_LE(std::abs(closed - quad), 1e-6) << e.name << " lambda=" << l;
    }
  }
}

TEST(Bernstein, GammaLevyIntegralIsFrullani) {
  // independent evaluation of int (1-e^{-ls}) e^{-s}/s ds = log(1+l)
  boost::math::quadrature::exp_sinh<double> es;
  for (double l : kGrid) {
    double oracle = es.integrate([l](double s) { return -std::expm1(-l * s) * std::exp(-s) / s; });
    EXPECT_NEAR(oracle, std::log1p(l), 1e-9);
    auto e = catalog_lookup("gamma", {{"a", 1.0}, {"c", 1.0}});
    EXPECT_NEAR(phi_eval(e, l, PhiMode::levy_quadrature), oracle, 1e-8);
  }
}

TEST(Bernstein, Concavity) {
  std::vector<double> ls;
  for (int i = -6; i <= 12; ++i) ls.push_back(std::pow(10.0, 0.5 * i));
  for (const auto& e : everything())
    for (std::size_t i = 0; i + 2 < ls.size(); ++i) {
      double l1 = ls[i], l2 = ls[i + 1], l3 = ls[i + 2];
      double w = (l3 - l2) / (l3 - l1);
      double chord = w * e.phi(l1) + (1 - w) * e.phi(l3);
      EXPECT_GE(e.phi(l2), chord - 1e-12 * std::abs(chord)) << e.name << " at " << l2;
      EXPECT_GE(e.phi(l2), e.phi(l1)) << e.name;
    }
}

TEST(Bernstein, StablePotentialDensity) {
  auto e = catalog_lookup("stable", {{"beta", 1.0}});
  EXPECT_NEAR(potential_density(e, 1.0), 1.0 / std::sqrt(M_PI), 1e-15);
  EXPECT_NEAR(potential_laplace(e, 2.0), std::pow(2.0, -0.5), 1e-6);
}

TEST(Bernstein, PotentialLaplaceIdentity) {
  for (const auto& e : everything()) {
    if (!e.has_potential()) continue;
    for (double l : kGrid) {
      double inv = 1.0 / e.phi(l);
      EXPECT_LE(std::abs(potential_laplace(e, l) - inv), 1e-6 * std::max(1.0, inv)) << e.name << " lambda=" << l;
    }
  }
}

TEST(Bernstein, GammaPotentialDensityComparableToOne) {
  auto e = catalog_lookup("gamma", {{"a", 1.0}, {"c", 1.0}});
  for (double s : {1e2, 3e2, 1e3, 3e3, 1e4}) {
    double u = potential_density(e, s);
    EXPECT_GT(u, 0.5) << s;
    EXPECT_LT(u, 2.0) << s;
  }
}

TEST(Bernstein, StableTransitionDensity) {
  auto e = catalog_lookup("stable", {{"beta", 1.0}});
  EXPECT_NEAR(transition_density(e, 2.0, 1.0), std::exp(-1.0) / std::sqrt(M_PI), 1e-15);
  boost::math::quadrature::exp_sinh<double> es;
  auto eta = [&](double s) { return transition_density(e, 1.0, s); };
  EXPECT_NEAR(es.integrate(eta), 1.0, 1e-6);
  EXPECT_NEAR(es.integrate([&](double s) { return std::exp(-s) * eta(s); }), std::exp(-1.0), 1e-6);
  EXPECT_EQ(transition_density(e, 1.0, 1e-300), 0.0);
}

TEST(Bernstein, GammaTransitionLaplace) {
  auto e = catalog_lookup("gamma", {{"a", 1.0}, {"c", 1.0}});
  boost::math::quadrature::exp_sinh<double> es;
  double t = 1.5, l = 2.0;
  double q = es.integrate([&](double s) { return std::exp(-l * s) * transition_density(e, t, s); });
  EXPECT_NEAR(q, std::exp(-t * e.phi(l)), 1e-9);
}

TEST(Bernstein, FirstMomentFlagMatchesTruncatedMoments) {
  for (const auto& e : everything()) {
    if (!e.has_levy()) continue;
    auto moment = [&](double T) {
      return integrate_log([&](double s) { return s * e.levy_density(s); }, 1e-150, T).value;
    };
    double m1 = moment(10.0), m2 = moment(100.0), m3 = moment(1000.0);
    bool settles = (m3 - m2) <= 0.01 * std::max(m2, 1e-300) && (m3 - m2) <= (m2 - m1) + 1e-300;
    if (m3 == 0.0) settles = true;
    EXPECT_EQ(settles, e.first_moment_finite) << e.name;
  }
}

TEST(Bernstein, AsymptoticsOnlyEntries) {
  auto b = catalog_lookup("bessel");
  try {
    potential_density(b, 1.0);
    FAIL() << "expected AsymptoticsOnly";
  } catch (const AsymptoticsOnly& ex) {
    ASSERT_TRUE(ex.tail_exponent().has_value());
    EXPECT_EQ(*ex.tail_exponent(), 1.0);
  }
  auto b2 = catalog_lookup("bessel_squared");
  try {
    potential_density(b2, 1.0);
    FAIL() << "expected AsymptoticsOnly";
  } catch (const AsymptoticsOnly& ex) {
    EXPECT_EQ(*ex.tail_exponent(), 0.5);
  }
  EXPECT_THROW(phi_eval(b, 1.0, PhiMode::levy_quadrature), std::invalid_argument);
  EXPECT_THROW(potential_laplace(catalog_lookup("compound_poisson"), 1.0), AsymptoticsOnly);
}

TEST(Bernstein, RejectsBadInput) {
  EXPECT_THROW(catalog_lookup("nope"), std::invalid_argument);
  EXPECT_THROW(catalog_lookup("stable", {{"beta", 2.0}}), std::invalid_argument);
  EXPECT_THROW(catalog_lookup("stable"), std::invalid_argument);
  EXPECT_THROW(catalog_lookup("gamma", {{"a", 1.0}, {"z", 1.0}}), std::invalid_argument);
  EXPECT_THROW(catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 1.5}, {"sign", -1.0}}), std::invalid_argument);
  auto e = catalog_lookup("stable", {{"beta", 1.0}});
  EXPECT_THROW(phi_eval(e, -1.0), std::invalid_argument);
  EXPECT_THROW(transition_density(e, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(transition_density(e, 1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(transition_density(catalog_lookup("bessel"), 1.0, 1.0), std::invalid_argument);
}

TEST(Bernstein, Flags) {
  // every catalog entry has drift or Levy mass accumulating at 0
  for (const auto& e : everything()) EXPECT_TRUE(e.ib_flag) << e.name;
  EXPECT_EQ(catalog_lookup("linear").drift, 1.0);
  EXPECT_FALSE(catalog_lookup("stable", {{"beta", 1.0}}).first_moment_finite);
  EXPECT_TRUE(catalog_lookup("bessel_squared").first_moment_finite);
  std::string d = catalog_lookup("gamma", {{"a", 2.0}, {"c", 3.0}}).describe();
  EXPECT_NE(d.find("name=gamma"), std::string::npos);
  EXPECT_NE(d.find("a=2"), std::string::npos);
  EXPECT_NE(d.find("tail_exponent=1"), std::string::npos);
}
