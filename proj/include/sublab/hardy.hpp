#pragma once
// Hardy and trace-Hardy constants and the lattice scenario families built
// around them.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "criticality.hpp"
#include "lattice.hpp"
#include "spectral.hpp"

namespace sublab {

enum class HardyKind { hardy, trace_hardy };
enum class Profile { power, ground_state };

inline std::string to_string(HardyKind k) { return k == HardyKind::hardy ? "hardy" : "trace_hardy"; }

// Constants for the form (1/2)|grad f|^2 resp. its fractional analogue.
inline double hardy_constant(HardyKind kind, int d, double alpha) {
  using boost::math::tgamma;
  using boost::math::tgamma_ratio;
  if (kind == HardyKind::hardy) {
    if (!(alpha > 0.0 && alpha <= 2.0 && alpha < d))
      throw std::invalid_argument("hardy_constant: need 0 < alpha <= 2 and alpha < d");
    if (alpha == 2.0) return (d - 2.0) * (d - 2.0) / 8.0;  // Gamma(x+1) = x Gamma(x)
    double r = tgamma_ratio((d + alpha) / 4.0, (d - alpha) / 4.0);
    return std::pow(2.0, alpha - 1.0) * r * r;
  }
  if (alpha == 2.0) {
    if (d < 3) throw std::invalid_argument("hardy_constant: trace case with alpha = 2 needs d >= 3");
    double r = tgamma_ratio(d / 4.0, (d - 2.0) / 4.0);
    return r * r;
  }
  if (!(alpha > 1.0 && alpha < std::min(static_cast<double>(d), 2.0) && d >= 2))
    throw std::invalid_argument("hardy_constant: fractional trace case needs 1 < alpha < min(d, 2), d >= 2");
  double r = tgamma_ratio((d + alpha - 2.0) / 4.0, (d - alpha) / 4.0);
  return std::pow(2.0, alpha) * std::sqrt(M_PI) * r * r * tgamma(alpha / 2.0) / tgamma((alpha - 1.0) / 2.0);
}

struct ScenarioSpec {
  HardyKind kind = HardyKind::hardy;
  int dim = 3;
  double alpha = 2.0;
  std::optional<double> p;  // weight exponent; required when alpha < 2 (hardy kind)
  double h = 1.0;
  double eps = 0.5;  // centre regularization in units of h
  double form_scale = 0.5;
  Profile profile = Profile::power;
};

struct ScenarioInstance {
  int n = 0;
  double lambda = 0.0;
  DiscreteSpace space;
  SignedMeasure mu;
  SchrodingerOperator op;
  VectorXd g;  // indicator of the centre node
};

class HardyScenario {
 public:
  explicit HardyScenario(ScenarioSpec s) : spec_(std::move(s)) {
    if (spec_.dim < 1 || spec_.dim > 3) throw std::invalid_argument("scenario: dim must be 1..3");
    double base = hardy_constant(spec_.kind, spec_.dim, spec_.alpha);
    // (s A)^{a/2} = 2 s^{a/2} * ((1/2)(-Delta))^{a/2}-normalized constant
    lambda_star_ = 2.0 * std::pow(spec_.form_scale, spec_.alpha / 2.0) * base;
    if (spec_.p) {
      p_ = *spec_.p;
    } else if (spec_.kind == HardyKind::trace_hardy) {
      p_ = spec_.alpha - 1.0;
    } else if (spec_.alpha == 2.0) {
      p_ = 2.0;
    } else {
      throw std::invalid_argument("scenario: weight exponent p is required when alpha < 2");
    }
    if (!(p_ >= 0.0) || !std::isfinite(p_)) throw std::invalid_argument("scenario: p must be finite and >= 0");
    if (spec_.profile == Profile::ground_state &&
        (spec_.kind != HardyKind::hardy || spec_.alpha != 2.0 || spec_.dim < 3))
      throw std::invalid_argument("scenario: ground_state profile needs hardy kind, alpha = 2, d >= 3");
  }

  const ScenarioSpec& spec() const { return spec_; }
  double lambda_star() const { return lambda_star_; }
  double p() const { return p_; }

  DiscreteSpace space(int n) const {
    if (n < 1 || n % 2 == 0) throw std::invalid_argument("scenario: size must be odd so the centre is a node");
    GridSpec g;
    g.dim = spec_.dim;
    g.n = n;
    g.h = spec_.h;
    g.boundary = Boundary::dirichlet;
    g.form_scale = spec_.form_scale;
    g.half_space = spec_.kind == HardyKind::trace_hardy;
    return build_space(g);
  }

  // Negative part of mu at coupling lambda, plus any positive remainder.
  SignedMeasure measure(const DiscreteSpace& sp, double lambda) const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("scenario: coupling must be >= 0");
    SignedMeasure mu = SignedMeasure::zero(sp.size());
    if (spec_.profile == Profile::ground_state) {
      VectorXd v = ground_state_potential(sp) * (lambda / lambda_star_);
      mu.minus = v.cwiseMax(0.0);
      mu.plus = (-v).cwiseMax(0.0);
      return mu;
    }
    MeasureSpec ms = spec_.kind == HardyKind::hardy ? MeasureSpec::radial(lambda, p_, spec_.eps)
                                                    : MeasureSpec::plane(lambda, p_, -1, spec_.eps);
    mu.minus = measure_weights(sp, ms);
    return mu;
  }

  VectorXd centre_indicator(const DiscreteSpace& sp) const {
    VectorXd g = VectorXd::Zero(sp.size());
    g(centre(sp)) = 1.0;
    return g;
  }

  // Form matrix of the unperturbed base operator; dense when alpha < 2.
  SchrodingerOperator base(const DiscreteSpace& sp) const {
    SchrodingerOperator op;
    op.K = sp.form_matrix();
    op.m = sp.mass;
    if (spec_.alpha != 2.0) {
      auto d = decompose(op);
      VectorXd pw = d.values.cwiseMax(0.0).array().pow(spec_.alpha / 2.0);
      VectorXd mq = d.m;
      MatrixXd MQ = mq.asDiagonal() * d.vectors;
      MatrixXd K = MQ * pw.asDiagonal() * MQ.transpose();
      op.dense = 0.5 * (K + K.transpose());
      op.K = op.dense->sparseView();
    }
    return op;
  }

  // base + D+ - D-, without the eigenvalue certificate
  static SchrodingerOperator perturb(const SchrodingerOperator& base, const VectorXd& plus, const VectorXd& minus) {
    SchrodingerOperator op = base;
    if (op.dense) {
      op.dense->diagonal() += plus - minus;
      op.K = op.dense->sparseView();
    } else {
      for (int i = 0; i < op.size(); ++i) op.K.coeffRef(i, i) += plus(i) - minus(i);
      op.K.makeCompressed();
    }
    return op;
  }

  ScenarioInstance instance(int n, double lambda, int dense_limit = 1500) const {
    ScenarioInstance s;
    s.n = n;
    s.lambda = lambda;
    s.space = space(n);
    s.mu = measure(s.space, lambda);
    s.op = perturb(base(s.space), s.mu.plus, s.mu.minus);
    certify(s.op, s.mu.minus, dense_limit);
    s.g = centre_indicator(s.space);
    return s;
  }

  // lambda(mu) at coupling lambda; exactly lambda(mu_1) / lambda.
  double bottom(int n, double lambda, int dense_limit = 1500) const {
    auto sp = space(n);
    auto mu = measure(sp, 1.0);
    auto plus = perturb(base(sp), mu.plus, VectorXd::Zero(sp.size()));
    return lambda_of(plus, mu.minus, dense_limit) / lambda;
  }

  // Coupling where lambda(mu) = 1 on the size-n grid.
  double critical_coupling(int n, int dense_limit = 1500) const { return bottom(n, 1.0, dense_limit); }

  Classification classify(int n, double lambda, double tol = 1e-9, int dense_limit = 1500) const {
    auto sp = space(n);
    auto mu = measure(sp, lambda);
    auto b = base(sp);
    auto plus = perturb(b, mu.plus, VectorXd::Zero(sp.size()));
    auto full = perturb(b, mu.plus, mu.minus);
    certify(full, mu.minus, dense_limit);
    return classify_from(lambda_of(plus, mu.minus, dense_limit), full, tol, dense_limit);
  }

  std::vector<FamilyMember> family(const std::vector<int>& sizes, const std::function<double(int)>& coupling,
                                   int dense_limit = 1500) const {
    std::vector<FamilyMember> out;
    for (int n : sizes) {
      auto s = instance(n, coupling(n), dense_limit);
      out.push_back({n, std::move(s.op), std::move(s.g)});
    }
    return out;
  }

 private:
  int centre(const DiscreteSpace& sp) const {
    int c = sp.origin(0);
    if (c < 0) throw std::runtime_error("scenario: centre node not found");
    return c;
  }

  // V = (S h)/h for h = (|x|^2 + (eps h)^2)^{-(d-2)/4}, using the full
  // lattice neighbourhood of every node (boundary killing equals the cut edges).
  VectorXd ground_state_potential(const DiscreteSpace& sp) const {
    const int d = spec_.dim;
    const double hs = spec_.h;
    const double reg = spec_.eps * hs;
    const double c = spec_.form_scale * std::pow(hs, d - 2);
    auto prof = [&](std::vector<double> x) {
      double r2 = reg * reg;
      for (double v : x) r2 += v * v;
      return std::pow(r2, -(d - 2.0) / 4.0);
    };
    VectorXd v(sp.size());
    for (int i = 0; i < sp.size(); ++i) {
      const auto& x = sp.coords[i];
      double hx = prof(x);
      double acc = 0.0;
      for (int a = 0; a < d; ++a)
        for (int s : {-1, 1}) {
          auto y = x;
          y[a] += s * hs;
          acc += c * (hx - prof(y));
        }
      v(i) = acc / hx;
    }
    return v;
  }

  ScenarioSpec spec_;
  double lambda_star_ = 0.0;
  double p_ = 2.0;
};

// Two-point extrapolation assuming value(n) = limit + C n^{-order}.
inline double richardson(const std::vector<int>& sizes, const std::vector<double>& values, double order = 1.0) {
  if (sizes.size() < 2 || sizes.size() != values.size())
    throw std::invalid_argument("richardson: need >= 2 matching points");
  std::size_t k = sizes.size();
  double n1 = sizes[k - 2], n2 = sizes[k - 1];
  double w1 = std::pow(n1, order), w2 = std::pow(n2, order);
  return (w2 * values[k - 1] - w1 * values[k - 2]) / (w2 - w1);
}

}  // namespace sublab
