#pragma once
// Catalog of Bernstein functions: closed forms, Levy densities, potential
// densities and subordinator transition densities.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "quadrature.hpp"

namespace sublab {

using Params = std::map<std::string, double>;

class AsymptoticsOnly : public std::runtime_error {
 public:
  AsymptoticsOnly(const std::string& what, std::optional<double> rho)
      : std::runtime_error(what), rho_(rho) {}
  std::optional<double> tail_exponent() const { return rho_; }

 private:
  std::optional<double> rho_;
};

struct BernsteinEntry {
  std::string name;
  Params params;
  double drift = 0.0;
  std::function<double(double)> phi;
  std::function<double(double)> levy_density;  // empty: not available
  double levy_support_inf = 0.0;
  std::function<double(double)> potential_density;
  std::function<double(double)> potential_cdf;  // U((0,eps])
  std::optional<double> potential_tail_exponent;
  std::function<double(double, double)> transition_density;
  bool ib_flag = false;
  bool first_moment_finite = false;

  bool has_levy() const { return static_cast<bool>(levy_density); }
  bool has_potential() const { return static_cast<bool>(potential_density); }
  bool has_transition() const { return static_cast<bool>(transition_density); }
  std::string describe() const;
};

namespace detail {

inline double param(const Params& p, const std::string& key, std::optional<double> def,
                    const std::string& family) {
  auto it = p.find(key);
  if (it != p.end()) return it->second;
  if (def) return *def;
  throw std::invalid_argument(family + ": missing parameter '" + key + "'");
}

inline void check_keys(const Params& p, std::initializer_list<const char*> allowed,
                       const std::string& family) {
  for (auto& [k, v] : p) {
    bool ok = false;
    for (auto* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument(family + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw std::invalid_argument(family + ": parameter '" + k + "' not finite");
  }
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// (1/(a s)) int_0^inf (cs)^tau e^{-cs} / Gamma(tau) dtau
inline double gamma_potential_density(double a, double c, double s) {
  double x = c * s;
  if (x > 1e9) return c / a;
  auto f = [x](double tau) {
    if (tau <= 0.0) return 0.0;
    return tau * boost::math::gamma_p_derivative(tau + 1.0, x);
  };
  std::vector<double> br{0.0};
  double w = 1.0 / std::max(1.0, std::abs(std::log(x)));
  for (double t = w; t < 1.0; t *= 4.0) br.push_back(t);
  br.push_back(1.0);
  double sx = std::sqrt(x);
  for (double k : {-12.0, -6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0, 12.0}) {
    double t = x + k * sx;
    if (t > 1.0) br.push_back(t);
  }
  br.push_back(x + 15.0 * sx + 40.0);
  auto q = integrate(f, br, Tolerance{1e-15, 1e-12});
  return q.value / (a * s);
}

// (1/a) int_0^inf P(tau, c eps) dtau
inline double gamma_potential_cdf(double a, double c, double eps) {
  double x = c * eps;
  auto f = [x](double tau) {
    if (tau <= 0.0) return 1.0;
    return boost::math::gamma_p(tau, x);
  };
  std::vector<double> br{0.0};
  double w = 1.0 / std::max(1.0, std::abs(std::log(x)));
  for (double t = w; t < 1.0; t *= 4.0) br.push_back(t);
  br.push_back(1.0);
  double sx = std::sqrt(x);
  for (double k : {-6.0, 0.0, 6.0}) {
    double t = x + k * sx;
    if (t > 1.0) br.push_back(t);
  }
  br.push_back(x + 15.0 * sx + 40.0);
  auto q = integrate(f, br, Tolerance{1e-15, 1e-12});
  return q.value / a;
}

// e^{-k s}/(m s) sum_{n>=1} (k s)^{a n}/Gamma(a n), k = m^{1/a}
inline double relativistic_potential_density(double a, double m, double s) {
  double kappa = std::pow(m, 1.0 / a);
  double x = kappa * s;
  if (x > 40.0) return std::pow(kappa, 1.0 - a) / a;
  double lx = std::log(x), lm = std::log(m), ls = std::log(s);
  double sum = 0.0;
  for (int n = 1; n < 100000; ++n) {
    double an = a * n;
    double t = std::exp(an * lx - std::lgamma(an) - x - lm - ls);
    sum += t;
    if (an > x + 1.0 && t < 1e-17 * sum) break;
  }
  return sum;
}

// (1/m) sum_{n>=1} P(a n, k eps)
inline double relativistic_potential_cdf(double a, double m, double eps) {
  double kappa = std::pow(m, 1.0 / a);
  double x = kappa * eps;
  double sum = 0.0;
  for (int n = 1; n < 1000000; ++n) {
    double an = a * n;
    double t = boost::math::gamma_p(an, x);
    sum += t;
    if (an > x + 1.0 && t < 1e-17 * sum) break;
  }
  return sum / m;
}

}  // namespace detail

inline std::vector<std::string> catalog_names() {
  return {"stable",     "compound_poisson", "gamma", "inverse_gaussian", "relativistic",
          "log_power",  "bessel",           "bessel_squared", "linear"};
}

inline BernsteinEntry catalog_lookup(const std::string& name, const Params& params = {}) {
  using detail::param;
  using detail::require;
  const double inf = std::numeric_limits<double>::infinity();
  BernsteinEntry e;
  e.name = name;
  if (name == "stable") {
    detail::check_keys(params, {"beta"}, name);
    double beta = param(params, "beta", std::nullopt, name);
    require(beta > 0.0 && beta < 2.0, "stable: beta must lie in (0,2)");
    double a = beta / 2.0;
    double cnu = a / std::tgamma(1.0 - a);
    double ga = std::tgamma(a), ga1 = std::tgamma(a + 1.0);
    e.params = {{"beta", beta}};
    e.phi = [a](double l) { return l == 0.0 ? 0.0 : std::pow(l, a); };
    e.levy_density = [a, cnu](double s) { return cnu * std::pow(s, -1.0 - a); };
    e.potential_density = [a, ga](double s) { return std::pow(s, a - 1.0) / ga; };
    e.potential_cdf = [a, ga1](double eps) { return std::pow(eps, a) / ga1; };
    e.potential_tail_exponent = a;
    if (beta == 1.0) {
      const double c = 1.0 / (2.0 * std::sqrt(M_PI));
      e.transition_density = [c](double t, double s) {
        return c * t * std::exp(-1.5 * std::log(s) - t * t / (4.0 * s));
      };
    }
    e.first_moment_finite = false;
  } else if (name == "compound_poisson") {
    detail::check_keys(params, {"a", "c"}, name);
    double a = param(params, "a", 1.0, name), c = param(params, "c", 1.0, name);
    require(a > 0.0 && c > 0.0, "compound_poisson: need a>0, c>0");
    e.params = {{"a", a}, {"c", c}};
    e.phi = [a, c](double l) { return a * l / (l + c); };
    e.levy_density = [a, c](double s) { return a * c * std::exp(-c * s); };
    e.first_moment_finite = true;
  } else if (name == "gamma") {
    detail::check_keys(params, {"a", "c"}, name);
    double a = param(params, "a", 1.0, name), c = param(params, "c", 1.0, name);
    require(a > 0.0 && c > 0.0, "gamma: need a>0, c>0");
    e.params = {{"a", a}, {"c", c}};
    e.phi = [a, c](double l) { return a * std::log1p(l / c); };
    e.levy_density = [a, c](double s) { return a * std::exp(-c * s) / s; };
    e.potential_density = [a, c](double s) { return detail::gamma_potential_density(a, c, s); };
    e.potential_cdf = [a, c](double eps) { return detail::gamma_potential_cdf(a, c, eps); };
    e.potential_tail_exponent = 1.0;
    e.transition_density = [a, c](double t, double s) {
      return c * boost::math::gamma_p_derivative(a * t, c * s);
    };
    e.first_moment_finite = true;
  } else if (name == "inverse_gaussian") {
    detail::check_keys(params, {"a", "c"}, name);
    double a = param(params, "a", 1.0, name), c = param(params, "c", 1.0, name);
    require(a > 0.0 && c > 0.0, "inverse_gaussian: need a>0, c>0");
    e.params = {{"a", a}, {"c", c}};
    e.phi = [a, c](double l) {
      // a(sqrt(2l+c^2)-c) without cancellation
      return a * 2.0 * l / (std::sqrt(2.0 * l + c * c) + c);
    };
    const double k = a / std::sqrt(2.0 * M_PI);
    e.levy_density = [k, c](double s) { return k * std::pow(s, -1.5) * std::exp(-0.5 * c * c * s); };
    e.first_moment_finite = true;
  } else if (name == "relativistic") {
    detail::check_keys(params, {"alpha", "m"}, name);
    double alpha = param(params, "alpha", std::nullopt, name);
    double m = param(params, "m", 1.0, name);
    require(alpha > 0.0 && alpha < 2.0, "relativistic: alpha must lie in (0,2)");
    require(m > 0.0, "relativistic: need m>0");
    double a = alpha / 2.0;
    double kappa = std::pow(m, 1.0 / a);
    double cnu = a / std::tgamma(1.0 - a);
    e.params = {{"alpha", alpha}, {"m", m}};
    e.phi = [a, m, kappa](double l) { return m * std::expm1(a * std::log1p(l / kappa)); };
    e.levy_density = [a, cnu, kappa](double s) {
      return cnu * std::exp(-kappa * s) * std::pow(s, -1.0 - a);
    };
    e.potential_density = [a, m](double s) { return detail::relativistic_potential_density(a, m, s); };
    e.potential_cdf = [a, m](double eps) { return detail::relativistic_potential_cdf(a, m, eps); };
    e.potential_tail_exponent = 1.0;
    e.first_moment_finite = true;
  } else if (name == "log_power") {
    detail::check_keys(params, {"delta", "beta", "sign"}, name);
    double delta = param(params, "delta", std::nullopt, name);
    double beta = param(params, "beta", std::nullopt, name);
    double sign = param(params, "sign", std::nullopt, name);
    require(sign == 1.0 || sign == -1.0, "log_power: sign must be +1 or -1");
    require(delta > 0.0 && delta < 2.0, "log_power: delta must lie in (0,2)");
    if (sign > 0)
      require(beta > 0.0 && beta < 2.0 - delta, "log_power(+): need 0<beta<2-delta");
    else
      require(beta > 0.0 && beta < delta, "log_power(-): need 0<beta<delta");
    e.params = {{"delta", delta}, {"beta", beta}, {"sign", sign}};
    double ex = sign * beta / 2.0;
    e.phi = [delta, ex](double l) {
      return l == 0.0 ? 0.0 : std::pow(l, delta / 2.0) * std::pow(std::log1p(l), ex);
    };
    e.potential_tail_exponent = (delta + sign * beta) / 2.0;
    e.first_moment_finite = false;
  } else if (name == "bessel") {
    detail::check_keys(params, {}, name);
    e.phi = [](double l) { return std::log1p(l + std::sqrt(l * (l + 2.0))); };
    e.potential_tail_exponent = 1.0;
    e.first_moment_finite = false;
  } else if (name == "bessel_squared") {
    detail::check_keys(params, {}, name);
    e.phi = [](double l) {
      double v = std::log1p(l + std::sqrt(l * (l + 2.0)));
      return v * v;
    };
    e.potential_tail_exponent = 0.5;
    e.first_moment_finite = true;
  } else if (name == "linear") {
    detail::check_keys(params, {"b"}, name);
    double b = param(params, "b", 1.0, name);
    require(b > 0.0, "linear: need b>0");
    e.params = {{"b", b}};
    e.drift = b;
    e.phi = [b](double l) { return b * l; };
    e.levy_density = [](double) { return 0.0; };
    e.levy_support_inf = inf;
    e.first_moment_finite = true;
  } else {
    throw std::invalid_argument("unknown Bernstein function '" + name + "'");
  }
  e.ib_flag = e.drift > 0.0 || e.levy_support_inf == 0.0;
  return e;
}

enum class PhiMode { closed, levy_quadrature };

inline double phi_eval(const BernsteinEntry& e, double lambda, PhiMode mode = PhiMode::closed,
                       Tolerance tol = {}) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("phi_eval: lambda must be >= 0");
  if (lambda == 0.0) return 0.0;
  if (mode == PhiMode::closed) return e.phi(lambda);
  if (!e.has_levy())
    throw std::invalid_argument("phi_eval: '" + e.name + "' has no Levy density");
  auto f = [&](double s) { return -std::expm1(-lambda * s) * e.levy_density(s); };
  auto q = integrate_levy(f, tol);
  return e.drift * lambda + q.value;
}

inline double potential_density(const BernsteinEntry& e, double s) {
  if (!e.has_potential()) {
    std::ostringstream os;
    os << "'" << e.name << "': potential density is asymptotics-only";
    if (e.potential_tail_exponent) os << " (tail exponent " << *e.potential_tail_exponent << ")";
    throw AsymptoticsOnly(os.str(), e.potential_tail_exponent);
  }
  if (!(s > 0.0)) throw std::invalid_argument("potential_density: s must be > 0");
  return e.potential_density(s);
}

inline double transition_density(const BernsteinEntry& e, double t, double s) {
  if (!e.has_transition())
    throw std::invalid_argument("'" + e.name + "' has no closed transition density");
  if (!(t > 0.0) || !(s > 0.0))
    throw std::invalid_argument("transition_density: need t>0 and s>0");
  return e.transition_density(t, s);
}

// int_0^inf e^{-lambda s} u(s) ds; the piece below eps0 comes from U(eps0).
inline double potential_laplace(const BernsteinEntry& e, double lambda, Tolerance tol = {}) {
  potential_density(e, 1.0);  // throws when absent
  double eps0 = 1e-12 / std::max(1.0, lambda);
  double head = e.potential_cdf(eps0);
  auto f = [&](double s) { return std::exp(-lambda * s) * e.potential_density(s); };
  auto q = integrate_log(f, eps0, std::numeric_limits<double>::infinity(), 1.0, tol);
  return head + q.value;
}

inline std::string BernsteinEntry::describe() const {
  std::ostringstream os;
  os.precision(15);
  os << "name=" << name << " params={";
  bool first = true;
  for (auto& [k, v] : params) {
    os << (first ? "" : ",") << k << "=" << v;
    first = false;
  }
  os << "} drift=" << drift << " ib=" << (ib_flag ? "true" : "false")
     << " first_moment_finite=" << (first_moment_finite ? "true" : "false")
     << " levy_density=" << (has_levy() ? "yes" : "no")
     << " potential_density=" << (has_potential() ? "yes" : "no")
     << " transition_density=" << (has_transition() ? "yes" : "no") << " tail_exponent=";
  if (potential_tail_exponent)
    os << *potential_tail_exponent;
  else
    os << "absent";
  return os.str();
}

}  // namespace sublab
