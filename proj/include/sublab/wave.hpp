#pragma once
// Spectral solutions of w'' = -Phi(A) w, w(0) = 0, w'(0) = g; energy law,
// range norms, boundedness detection and the Hadamard transmutation back to
// the heat semigroup.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "bernstein.hpp"
#include "quadrature.hpp"
#include "spectral.hpp"

namespace sublab {

struct WaveTrace {
  std::vector<double> times;
  std::vector<VectorXd> states;  // empty unless requested
  std::vector<double> l2_norms;
  std::vector<double> energy_residuals;
  double range_norm = kInf;
  double range_seminorm = kInf;
  double g_norm2 = 0.0;
  double period = 2.0 * M_PI;  // 2 pi / sqrt(smallest positive Phi)
};

struct RangeNorms {
  double seminorm = kInf;  // |u|_m for the minimal preimage u
  double norm = kInf;      // sqrt(<Phi(A)u,u>_m + |u|_m^2)
};

inline RangeNorms range_norms(const SpectralDecomposition& d, const VectorXd& phi, const VectorXd& c, double g2) {
  RangeNorms r;
  double u2 = 0.0, pu = 0.0;
  for (int k = 0; k < d.size(); ++k) {
    double c2 = c(k) * c(k);
    if (phi(k) == 0.0) {
      if (c2 > kOverlapRel * g2) return r;
      continue;
    }
    u2 += c2 / phi(k);
    pu += c2;
  }
  r.seminorm = std::sqrt(u2);
  r.norm = std::sqrt(pu + u2);
  return r;
}

inline WaveTrace solve_wave(const SpectralDecomposition& d, const BernsteinEntry& e, const VectorXd& g,
                            const std::vector<double>& times, bool keep_states = false) {
  VectorXd phi = phi_values(d, e);  // refuses supercritical operators
  VectorXd c = d.coefficients(g);
  VectorXd root = phi.array().sqrt();
  WaveTrace tr;
  tr.g_norm2 = d.norm2(g);
  auto rn = range_norms(d, phi, c, tr.g_norm2);
  tr.range_seminorm = rn.seminorm;
  tr.range_norm = rn.norm;
  double pmin = kInf;
  for (int k = 0; k < d.size(); ++k)
    if (phi(k) > 0.0) pmin = std::min(pmin, phi(k));
  if (std::isfinite(pmin)) tr.period = 2.0 * M_PI / std::sqrt(pmin);
  VectorXd s(d.size()), cs(d.size());
  for (double t : times) {
    if (t < 0.0) throw std::invalid_argument("solve_wave: times must be >= 0");
    for (int k = 0; k < d.size(); ++k) {
      if (phi(k) == 0.0) {
        s(k) = t;
        cs(k) = 1.0;
      } else {
        s(k) = std::sin(t * root(k)) / root(k);
        cs(k) = std::cos(t * root(k));
      }
    }
    VectorXd w = d.synthesize(c.cwiseProduct(s));
    VectorXd v = d.synthesize(c.cwiseProduct(cs));
    VectorXd wc = d.coefficients(w);
    double kinetic = d.norm2(v);
    double potential = (phi.array() * wc.array().square()).sum();
    tr.times.push_back(t);
    tr.l2_norms.push_back(std::sqrt(d.norm2(w)));
    tr.energy_residuals.push_back(std::abs(kinetic + potential - tr.g_norm2));
    if (keep_states) tr.states.push_back(std::move(w));
  }
  return tr;
}

// Dense linear grid over two fundamental periods, then log-spaced samples
// up to `decades` decades beyond it.
inline std::vector<double> wave_time_grid(const SpectralDecomposition& d, const BernsteinEntry& e, int decades = 4,
                                          int per_decade = 200, int dense_points = 400) {
  VectorXd phi = phi_values(d, e);
  double pmin = kInf;
  for (int k = 0; k < d.size(); ++k)
    if (phi(k) > 0.0) pmin = std::min(pmin, phi(k));
  double period = std::isfinite(pmin) ? 2.0 * M_PI / std::sqrt(pmin) : 2.0 * M_PI;
  std::vector<double> t;
  double t_dense = 2.0 * period;
  for (int i = 0; i <= dense_points; ++i) t.push_back(t_dense * i / dense_points);
  double t0 = std::max(1.0, t_dense);
  double t1 = t_dense * std::pow(10.0, decades);
  int count = static_cast<int>(std::ceil(per_decade * std::log10(t1 / t0)));
  for (int i = 1; i <= count; ++i) t.push_back(t0 * std::pow(t1 / t0, static_cast<double>(i) / count));
  return t;
}

struct Boundedness {
  bool bounded = false;
  double sup = 0.0;
  double rate = 0.0;       // fitted envelope exponent
  double increment = 0.0;  // relative running-max growth over the last decade
  bool within_seminorm = true;
};

inline Boundedness boundedness_verdict(const WaveTrace& tr, double stable_increment = 1e-6,
                                       double bounded_rate = 0.05) {
  if (tr.times.size() < 3) throw std::invalid_argument("boundedness_verdict: trace too short");
  double t_end = tr.times.back();
  if (t_end < 1e3 * tr.period) {
    std::ostringstream os;
    os << "boundedness_verdict: trace too short (t_end " << t_end << " < 1e3 periods of " << tr.period << ")";
    throw std::invalid_argument(os.str());
  }
  Boundedness b;
  double run = 0.0, run_at_decade = 0.0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    run = std::max(run, tr.l2_norms[i]);
    if (tr.times[i] <= t_end / 10.0) run_at_decade = run;
  }
  b.sup = run;
  b.increment = run > 0.0 ? (run - run_at_decade) / run : 0.0;
  // upper envelope over log windows (10 per decade) in the last two decades
  std::vector<double> wt, wv;
  double lo = t_end / 100.0;
  const int windows = 20;
  for (int w = 0; w < windows; ++w) {
    double a = lo * std::pow(100.0, static_cast<double>(w) / windows);
    double z = lo * std::pow(100.0, static_cast<double>(w + 1) / windows);
    double mx = 0.0, tm = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      if (tr.times[i] > a && tr.times[i] <= z && tr.l2_norms[i] > mx) {
        mx = tr.l2_norms[i];
        tm = tr.times[i];
      }
    if (mx > 0.0) {
      wt.push_back(tm);
      wv.push_back(mx);
    }
  }
  b.rate = wt.size() >= 2 ? loglog_slope(wt, wv) : 0.0;
  b.bounded = b.increment < stable_increment || b.rate < bounded_rate;
  if (std::isfinite(tr.range_seminorm)) b.within_seminorm = b.sup <= tr.range_seminorm + 1e-10;
  return b;
}

// Wave propagator for A itself (Phi = identity), in spectral coordinates.
class WaveEvaluator {
 public:
  WaveEvaluator(const SpectralDecomposition& d, const VectorXd& g) : d_(d), c_(d.coefficients(g)) {
    if (d.size() && d.values(0) < 0.0)
      throw SupercriticalRefusal("WaveEvaluator: negative eigenvalue", d.values(0));
    root_ = d.values.array().sqrt();
    g_norm2_ = d.norm2(g);
  }

  // coefficients of w(sigma) = sin(sigma sqrt A)/sqrt A g
  VectorXd spectral_state(double sigma) const {
    VectorXd s(d_.size());
    for (int k = 0; k < d_.size(); ++k)
      s(k) = root_(k) == 0.0 ? c_(k) * sigma : c_(k) * std::sin(sigma * root_(k)) / root_(k);
    return s;
  }
  VectorXd state(double sigma) const { return d_.synthesize(spectral_state(sigma)); }

  const SpectralDecomposition& decomposition() const { return d_; }
  const VectorXd& coefficients() const { return c_; }
  double max_root() const { return d_.size() ? root_.maxCoeff() : 0.0; }
  double g_norm2() const { return g_norm2_; }

 private:
  const SpectralDecomposition& d_;
  VectorXd c_;
  VectorXd root_;
  double g_norm2_ = 0.0;
};

// (2 sqrt(pi) t^{3/2})^{-1} int_0^inf sigma e^{-sigma^2/(4t)} w(sigma) dsigma,
// with sigma = 2 sqrt(t) x and the trapezoid rule on x in [0, x_max].
inline VectorXd transmutation_heat(const WaveEvaluator& ev, double t, double x_max = 8.0, double tail_tol = 1e-6) {
  if (!(t > 0.0)) throw std::invalid_argument("transmutation_heat: t must be > 0");
  const double st = std::sqrt(t);
  const double freq = 2.0 * st * ev.max_root();
  const double hx0 = std::min(0.25, 2.0 * M_PI / (freq + 14.0));
  const int nodes = static_cast<int>(std::ceil(x_max / hx0));
  const double hx = x_max / nodes;
  VectorXd acc = VectorXd::Zero(ev.coefficients().size());
  for (int i = 1; i <= nodes; ++i) {
    double x = i * hx;
    double w = (i == nodes ? 0.5 : 1.0) * hx * x * std::exp(-x * x);
    acc += w * ev.spectral_state(2.0 * st * x);
  }
  acc *= 2.0 / (std::sqrt(M_PI) * st);
  // Gaussian mass beyond x_max; every mode obeys |sin(sigma r)/r| <= sigma
  double cn = std::sqrt(ev.coefficients().squaredNorm());
  double grow = 2.0 * st * x_max;
  double tail = 2.0 / (std::sqrt(M_PI) * st) * 0.5 * std::exp(-x_max * x_max) * cn * grow * 2.0;
  if (tail > tail_tol * std::sqrt(ev.g_norm2())) {
    std::ostringstream os;
    os << "transmutation_heat: sigma tail not negligible (estimate " << tail << ")";
    throw QuadratureError(os.str(), 0.0, tail);
  }
  return ev.decomposition().synthesize(acc);
}

// Gamma(beta)^{-1} int_0^inf |e^{-(t/2)A} g|_m^2 t^{beta-1} dt with the heat
// vectors rebuilt from wave states.
inline double wave_to_green(const WaveEvaluator& ev, double beta, Tolerance tol = {}) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("wave_to_green: beta must lie in (0,1)");
  const auto& d = ev.decomposition();
  double lmax = std::max(ev.max_root() * ev.max_root(), 1.0);
  double start = 1e-6 / lmax;
  double head = ev.g_norm2() * std::pow(start, beta) / beta;
  auto f = [&](double t) {
    VectorXd h = transmutation_heat(ev, 0.5 * t);
    return d.norm2(h) * std::pow(t, beta - 1.0);
  };
  double lpos = d.min_positive();
  double cap = std::isfinite(lpos) ? std::max(1e4 / lpos, 1e3) : 1e4;
  auto r = integrate_decades(f, head, start, cap, tol);
  if (r.diverged || !std::isfinite(r.value)) return kInf;
  return r.value / std::tgamma(beta);
}

}  // namespace sublab
