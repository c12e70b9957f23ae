#pragma once
// Random instances and the invariant battery behind `sublab check`.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bernstein.hpp"
#include "criticality.hpp"
#include "hardy.hpp"
#include "lattice.hpp"
#include "spectral.hpp"
#include "wave.hpp"

namespace sublab {

// Connected weighted graph on n nodes: a random spanning tree plus extra edges.
// Without killing the operator has the constants in its kernel.
inline DiscreteSpace random_space(std::mt19937_64& rng, int n, bool with_killing) {
  std::uniform_real_distribution<double> w(0.1, 2.0), ms(0.5, 2.0), u(0.0, 1.0);
  DiscreteSpace sp;
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 1; i < n; ++i) {
    int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
    double c = w(rng);
    trip.emplace_back(i, j, c);
    trip.emplace_back(j, i, c);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 2; j < n; ++j)
      if (u(rng) < 0.15) {
        double c = w(rng);
        trip.emplace_back(i, j, c);
        trip.emplace_back(j, i, c);
      }
  sp.conductance.resize(n, n);
  sp.conductance.setFromTriplets(trip.begin(), trip.end());
  sp.killing = VectorXd::Zero(n);
  if (with_killing) {
    sp.killing(std::uniform_int_distribution<int>(0, n - 1)(rng)) = w(rng);
    for (int i = 0; i < n; ++i)
      if (u(rng) < 0.2) sp.killing(i) += w(rng);
  }
  sp.mass.resize(n);
  for (int i = 0; i < n; ++i) sp.mass(i) = ms(rng);
  sp.coords.assign(n, std::vector<double>{});
  for (int i = 0; i < n; ++i) sp.coords[i] = {static_cast<double>(i)};
  sp.component.assign(n, 0);
  return sp;
}

// One entry per family with a closed Phi, default parameters.
inline std::vector<BernsteinEntry> default_catalog() {
  return {catalog_lookup("stable", {{"beta", 1.0}}),
          catalog_lookup("compound_poisson", {{"a", 1.0}, {"c", 1.0}}),
          catalog_lookup("gamma", {{"a", 1.0}, {"c", 1.0}}),
          catalog_lookup("inverse_gaussian", {{"a", 1.0}, {"c", 1.0}}),
          catalog_lookup("relativistic", {{"alpha", 1.0}, {"m", 1.0}}),
          catalog_lookup("bessel"),
          catalog_lookup("bessel_squared"),
          catalog_lookup("linear", {{"b", 1.0}})};
}

// Single node with killing k and reference mass 1.
inline DiscreteSpace single_node(double k) {
  GridSpec g;
  g.dim = 1;
  g.n = 1;
  g.form_scale = k / 2.0;
  return build_space(g);
}

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double threshold = 0.0;
  std::string detail;
};

namespace detail {
inline CheckResult finish(std::string name, double worst, double threshold, bool ok, std::string detail = {}) {
  return {std::move(name), ok, worst, threshold, std::move(detail)};
}

inline SpectralDecomposition path_decomposition(int n) {
  GridSpec g;
  g.dim = 1;
  g.n = n;
  auto sp = build_space(g);
  return decompose(schrodinger_matrix(sp, SignedMeasure::zero(sp.size())));
}
}  // namespace detail

inline CheckResult check_trichotomy() {
  auto sp = single_node(2.0);
  double worst = 0.0;
  const double expect[] = {2.0, 1.0, 2.0 / 3.0};
  const Verdict verdicts[] = {Verdict::Subcritical, Verdict::Critical, Verdict::Supercritical};
  bool ok = true;
  for (int w = 1; w <= 3; ++w) {
    SignedMeasure mu = SignedMeasure::zero(1);
    mu.minus(0) = w;
    auto c = classify_schrodinger(sp, mu);
    worst = std::max(worst, std::abs(c.lambda_mu - expect[w - 1]));
    ok = ok && c.verdict == verdicts[w - 1];
  }
  return detail::finish("trichotomy_single_node", worst, 1e-12, ok && worst <= 1e-12);
}

inline CheckResult check_levy_khintchine() {
  auto d = detail::path_decomposition(6);
  VectorXd f = VectorXd::LinSpaced(6, 1.0, 2.0), g = VectorXd::Ones(6);
  double worst = 0.0;
  std::string names;
  for (const auto& e : default_catalog()) {
    if (!e.has_levy()) continue;
    worst = std::max(worst, okura_residual(d, e, f, g));
    names += e.name + " ";
  }
  return detail::finish("levy_khintchine_form", worst, 1e-6, worst <= 1e-6, names);
}

inline CheckResult check_subordination_identity() {
  auto d = detail::path_decomposition(6);
  auto e = catalog_lookup("stable", {{"beta", 1.0}});
  VectorXd g = VectorXd::Ones(6);
  double worst = 0.0;
  for (double t : {0.1, 1.0, 10.0}) worst = std::max(worst, subordination_residual(d, e, t, g));
  return detail::finish("subordination_identity", worst, 1e-6, worst <= 1e-6);
}

inline CheckResult check_potential_laplace() {
  double worst = 0.0;
  for (const auto& e : default_catalog()) {
    if (!e.has_potential()) continue;
    for (double l : {0.5, 1.0, 4.0}) {
      double inv = 1.0 / e.phi(l);
      worst = std::max(worst, std::abs(potential_laplace(e, l) - inv) / inv);
    }
  }
  return detail::finish("potential_laplace_identity", worst, 1e-6, worst <= 1e-6);
}

inline CheckResult check_energy(int side = 10) {
  GridSpec gs;
  gs.dim = 2;
  gs.n = side;
  auto sp = build_space(gs);
  auto d = decompose(schrodinger_matrix(sp, SignedMeasure::zero(sp.size())));
  auto e = catalog_lookup("stable", {{"beta", 1.0}});
  VectorXd g = VectorXd::LinSpaced(sp.size(), 0.5, 1.5);
  std::vector<double> times;
  for (int i = 0; i < 1000; ++i) times.push_back(0.05 * i * (1.0 + 0.001 * i));
  auto tr = solve_wave(d, e, g, times);
  double worst = *std::max_element(tr.energy_residuals.begin(), tr.energy_residuals.end()) / tr.g_norm2;
  return detail::finish("energy_conservation", worst, 1e-10, worst <= 1e-10);
}

inline CheckResult check_wave_bound() {
  GridSpec gs;
  gs.dim = 1;
  gs.n = 7;
  auto sp = build_space(gs);
  auto d = decompose(schrodinger_matrix(sp, SignedMeasure::zero(sp.size())));
  VectorXd g = VectorXd::Ones(sp.size());
  double worst = -kInf;
  bool ok = true;
  for (const auto& e : default_catalog()) {
    auto tr = solve_wave(d, e, g, wave_time_grid(d, e, 3, 100, 200));
    auto b = boundedness_verdict(tr);
    worst = std::max(worst, b.sup - tr.range_seminorm);
    ok = ok && b.bounded && b.within_seminorm;
  }
  return detail::finish("wave_sup_below_seminorm", worst, 1e-10, ok);
}

inline CheckResult check_transmutation(int n = 30) {
  GridSpec gs;
  gs.dim = 1;
  gs.n = n;
  auto sp = build_space(gs);
  auto d = decompose(schrodinger_matrix(sp, SignedMeasure::zero(sp.size())));
  VectorXd g = VectorXd::LinSpaced(n, 1.0, 2.0);
  WaveEvaluator ev(d, g);
  auto id = catalog_lookup("linear", {{"b", 1.0}});
  VectorXd phi = phi_values(d, id);
  double worst = 0.0;
  for (double t : {0.01, 0.1, 1.0, 10.0, 100.0}) {
    VectorXd h = transmutation_heat(ev, t);
    VectorXd ref = heat_matrix(d, phi, t) * g;
    worst = std::max(worst, std::sqrt(d.norm2(h - ref) / d.norm2(g)));
  }
  return detail::finish("transmutation_heat", worst, 1e-6, worst <= 1e-6);
}

inline CheckResult check_h_transforms(std::uint64_t seed, int count = 100) {
  std::mt19937_64 rng(seed);
  auto entries = default_catalog();
  double worst_off = kInf, worst_row = -kInf;
  bool ok = true;
  int failures = 0;
  for (int i = 0; i < count; ++i) {
    bool kernel = i % 2 == 0;
    int n = std::uniform_int_distribution<int>(3, 15)(rng);
    auto sp = random_space(rng, n, !kernel);
    auto d = decompose(schrodinger_matrix(sp, SignedMeasure::zero(n)));
    VectorXd g = VectorXd::Ones(n);
    for (const auto& e : entries) {
      auto sh = superharmonic_h(d, e, g, kernel);
      auto r = h_transform(d, e, sh.h);
      worst_off = std::min(worst_off, r.offdiag_min);
      worst_row = std::max(worst_row, r.row_sum_max);
      bool good = r.offdiag_min >= -1e-12 && r.row_sum_max <= 1e-12 && r.conservative == kernel;
      if (!good) ++failures;
      ok = ok && good;
    }
  }
  std::ostringstream os;
  os << "offdiag_min=" << worst_off << " row_sum_max=" << worst_row << " failures=" << failures;
  return detail::finish("h_transform_markov", worst_row, 1e-12, ok, os.str());
}

inline CheckResult check_stollmann_voigt(std::uint64_t seed, int count = 200) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = kInf;
  bool ok = true;
  for (int i = 0; i < count; ++i) {
    int n = std::uniform_int_distribution<int>(3, 15)(rng);
    auto sp = random_space(rng, n, i % 3 != 0);
    VectorXd mu(n), f(n);
    for (int k = 0; k < n; ++k) {
      mu(k) = u(rng) < 0.5 ? 0.0 : 2.0 * u(rng);
      f(k) = 2.0 * u(rng) - 1.0;
    }
    mu(std::uniform_int_distribution<int>(0, n - 1)(rng)) += 0.5;
    double alpha = std::pow(10.0, 4.0 * u(rng) - 2.0);
    auto r = stollmann_voigt_check(sp, mu, f, alpha);
    auto prof = kato_profile(sp, mu);
    worst = std::min(worst, r.slack);
    ok = ok && r.slack >= -1e-12 && prof.strictly_decreasing;
  }
  return detail::finish("stollmann_voigt", worst, -1e-12, ok);
}

inline CheckResult check_asymptotic_table() {
  struct Row {
    BernsteinEntry e;
    Verdict v;
  };
  std::vector<Row> rows = {
      {catalog_lookup("gamma", {{"a", 1.0}, {"c", 1.0}}), Verdict::Critical},
      {catalog_lookup("relativistic", {{"alpha", 1.0}, {"m", 1.0}}), Verdict::Critical},
      {catalog_lookup("bessel"), Verdict::Critical},
      {catalog_lookup("stable", {{"beta", 0.5}}), Verdict::Subcritical},
      {catalog_lookup("stable", {{"beta", 1.5}}), Verdict::Subcritical},
      {catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 0.5}, {"sign", 1.0}}), Verdict::Subcritical},
      {catalog_lookup("log_power", {{"delta", 1.0}, {"beta", 0.5}, {"sign", -1.0}}), Verdict::Subcritical},
      {catalog_lookup("bessel_squared"), Verdict::Subcritical},
  };
  int bad = 0;
  for (const auto& r : rows)
    if (asymptotic_criticality(1.0, r.e).verdict != r.v) ++bad;
  return detail::finish("asymptotic_table", bad, 0, bad == 0);
}

inline std::vector<CheckResult> run_battery(std::uint64_t seed) {
  return {check_trichotomy(),
          check_levy_khintchine(),
          check_subordination_identity(),
          check_potential_laplace(),
          check_energy(),
          check_wave_bound(),
          check_transmutation(),
          check_h_transforms(seed),
          check_stollmann_voigt(seed + 1),
          check_asymptotic_table()};
}

}  // namespace sublab
