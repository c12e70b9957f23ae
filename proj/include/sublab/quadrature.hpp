#pragma once
// Adaptive Gauss-Kronrod integration on intervals and on the half line.
// Panels are evaluated with Boost's 21-point rule; the driver below keeps a
// global error budget so absolute and relative tolerances can be mixed.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sublab {

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  int panels = 0;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double error)
      : std::runtime_error(what), value_(value), error_(error) {}
  double value() const { return value_; }
  double error_estimate() const { return error_; }

 private:
  double value_;
  double error_;
};

namespace detail {

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk_panel(F& f, double a, double b) {
  double err = 0.0, l1 = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      f, a, b, 0, 0.0, &err, &l1);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite integrand on [" << a << ", " << b << "]";
    throw QuadratureError(os.str(), v, std::numeric_limits<double>::infinity());
  }
  return {a, b, v, err, l1};
}

}  // namespace detail

// Integrates f over [a,b] split at the given breakpoints.
// Converged when total error <= max(abs, rel*|I|, 50*eps*L1).
template <class F>
QuadResult integrate(F f, std::vector<double> breaks, Tolerance tol = {},
                     int max_panels = 4000) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  if (breaks.size() < 2) return {};
  std::priority_queue<detail::Panel> heap;
  double value = 0.0, error = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    auto p = detail::gk_panel(f, breaks[i], breaks[i + 1]);
    value += p.value;
    error += p.error;
    l1 += p.l1;
    heap.push(p);
  }
  const double eps = std::numeric_limits<double>::epsilon();
  auto target = [&] {
    return std::max({tol.abs, tol.rel * std::abs(value), 50.0 * eps * l1});
  };
  while (error > target()) {
    if (static_cast<int>(heap.size()) >= max_panels) {
      std::ostringstream os;
      os << "quadrature did not converge: value " << value << ", error estimate "
         << error << " (target " << target() << ")";
      throw QuadratureError(os.str(), value, error);
    }
    auto worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("quadrature panel collapsed", value, error);
    }
    auto left = detail::gk_panel(f, worst.a, mid);
    auto right = detail::gk_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  // recompute sums to shed accumulated update error
  value = 0.0;
  error = 0.0;
  l1 = 0.0;
  int n = static_cast<int>(heap.size());
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  return {value, error, l1, n};
}

template <class F>
QuadResult integrate(F f, double a, double b, Tolerance tol = {}) {
  return integrate(f, std::vector<double>{a, b}, tol);
}

// Default log-coordinate breakpoints (x = log(s/scale)).
inline std::vector<double> log_breaks(double lo = -700.0, double hi = 700.0) {
  static const double pts[] = {-700, -300, -150, -80, -40, -20, -10, -5, -2, 0,
                               2,    5,    10,   20,  40,  80,  150, 300, 700};
  std::vector<double> out{lo};
  for (double p : pts)
    if (p > lo && p < hi) out.push_back(p);
  out.push_back(hi);
  return out;
}

// int_{s_lo}^{s_hi} f(s) ds with s = scale*e^x. Points where s over/underflows
// contribute zero.
template <class F>
QuadResult integrate_log(F f, double s_lo, double s_hi, double scale = 1.0,
                         Tolerance tol = {}) {
  if (!(s_lo > 0.0) || !(s_hi > s_lo) || !(scale > 0.0))
    throw std::invalid_argument("integrate_log: need 0 < s_lo < s_hi, scale > 0");
  double lo = std::log(s_lo / scale);
  double hi = std::isinf(s_hi) ? 700.0 : std::log(s_hi / scale);
  lo = std::max(lo, -700.0);
  hi = std::min(hi, 700.0);
  if (!(hi > lo)) return {};
  auto g = [&](double x) {
    double s = scale * std::exp(x);
    if (!(s > 1e-300) || !(s < 1e300)) return 0.0;
    double v = f(s) * s;
    return v;
  };
  return integrate(g, log_breaks(lo, hi), tol);
}

// int_0^inf f(s) ds in log coordinates.
template <class F>
QuadResult integrate_half_line(F f, double scale = 1.0, Tolerance tol = {}) {
  return integrate_log(f, scale * std::exp(-700.0), std::numeric_limits<double>::infinity(),
                       scale, tol);
}

// Levy integrals: s^{-1-a} densities overflow below ~1e-150, where the
// compensated integrand is negligible anyway.
template <class F>
QuadResult integrate_levy(F f, Tolerance tol = {}) {
  return integrate_log(f, 1e-150, std::numeric_limits<double>::infinity(), 1.0, tol);
}

struct DecadeResult {
  double value = 0.0;
  bool diverged = false;
  bool converged = false;
  double last_s = 0.0;
  std::vector<double> partials;  // partial integral after each decade
};

// head + int_{start}^{...} f(s) ds, one decade at a time.
// Stops once s*|f(s)| at the decade end drops below tail_rel*partial.
// At the cap, the integral is declared divergent if each of the last three
// decades added more than growth_rel of the previous partial.
template <class F>
DecadeResult integrate_decades(F f, double head, double start, double cap,
                               Tolerance tol = {}, double tail_rel = 1e-14,
                               double growth_rel = 0.01) {
  DecadeResult r;
  r.value = head;
  double a = start;
  while (true) {
    double b = a * 10.0;
    auto q = integrate_log(f, a, b, a, tol);
    r.value += q.value;
    r.partials.push_back(r.value);
    r.last_s = b;
    double tail = b * std::abs(f(b));
    if (tail < tail_rel * std::abs(r.value) || (r.value == 0.0 && tail == 0.0)) {
      r.converged = true;
      return r;
    }
    if (b >= cap) break;
    a = b;
  }
  auto& p = r.partials;
  if (p.size() >= 4) {
    bool growing = true;
    for (std::size_t i = p.size() - 3; i < p.size(); ++i) {
      double prev = p[i - 1];
      if (!(p[i] - prev > growth_rel * std::abs(prev))) growing = false;
    }
    if (growing) {
      r.diverged = true;
      r.value = std::numeric_limits<double>::infinity();
    }
  }
  return r;
}

}  // namespace sublab
