#pragma once
// Functional calculus on m-orthonormal eigensystems: Phi(A), heat and
// resolvent actions, Green quadratic forms and the subordination identities.

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bernstein.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"

namespace sublab {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SupercriticalRefusal : public std::runtime_error {
 public:
  SupercriticalRefusal(const std::string& what, double eigenvalue)
      : std::runtime_error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

struct SpectralDecomposition {
  VectorXd values;   // ascending
  MatrixXd vectors;  // columns q_k with q_j^T M q_k = delta_jk
  VectorXd m;
  double norm = 0.0;  // max |lambda_k|
  int kernel_dim = 0;

  int size() const { return static_cast<int>(values.size()); }

  // <g, q_k>_m for all k
  VectorXd coefficients(const VectorXd& g) const {
    return vectors.transpose() * (m.array() * g.array()).matrix();
  }
  VectorXd synthesize(const VectorXd& c) const { return vectors * c; }
  double norm2(const VectorXd& g) const { return (m.array() * g.array().square()).sum(); }
  double min_positive() const {
    for (int k = 0; k < size(); ++k)
      if (values(k) > 0.0) return values(k);
    return std::numeric_limits<double>::infinity();
  }
};

inline constexpr int kDefaultBudget = 4000;
inline constexpr double kZeroRel = 1e-12;
inline constexpr double kOverlapRel = 1e-12;

inline SpectralDecomposition decompose(const SchrodingerOperator& op, int budget = kDefaultBudget) {
  if (op.size() > budget) {
    std::ostringstream os;
    os << "decompose: " << op.size() << " nodes exceed the dense budget of " << budget
       << "; use the Krylov paths (green_form_krylov, bottom_of_spectrum)";
    throw BudgetExceeded(os.str());
  }
  VectorXd s = op.m.array().rsqrt();
  MatrixXd B = s.asDiagonal() * op.dense_form() * s.asDiagonal();
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(B);
  if (es.info() != Eigen::Success) throw std::runtime_error("decompose: eigensolver failed");
  SpectralDecomposition d;
  d.values = es.eigenvalues();
  d.vectors = s.asDiagonal() * es.eigenvectors();
  d.m = op.m;
  d.norm = d.values.cwiseAbs().maxCoeff();
  const double zero = kZeroRel * std::max(d.norm, op.scale);
  for (int k = 0; k < d.size(); ++k)
    if (std::abs(d.values(k)) <= zero) {
      d.values(k) = 0.0;
      ++d.kernel_dim;
    }
  return d;
}

inline VectorXd apply_function(const SpectralDecomposition& d, const std::function<double(double)>& fn,
                               const VectorXd& g) {
  VectorXd c = d.coefficients(g);
  for (int k = 0; k < d.size(); ++k) {
    double v = fn(d.values(k));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "apply_function: function is not finite at eigenvalue " << d.values(k);
      throw std::domain_error(os.str());
    }
    c(k) *= v;
  }
  return d.synthesize(c);
}

// Phi(lambda_k) with Phi(0) = 0 exactly; refuses negative spectrum.
inline VectorXd phi_values(const SpectralDecomposition& d, const BernsteinEntry& e) {
  VectorXd p(d.size());
  for (int k = 0; k < d.size(); ++k) {
    double l = d.values(k);
    if (l < 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "negative eigenvalue " << l << ": operator is supercritical";
      throw SupercriticalRefusal(os.str(), l);
    }
    p(k) = l == 0.0 ? 0.0 : e.phi(l);
    if (!(p(k) >= 0.0)) throw std::domain_error("Phi returned a negative or NaN value");
  }
  return p;
}

// Phi(A) as a node-space matrix: Q diag(Phi) Q^T M.
inline MatrixXd phi_matrix(const SpectralDecomposition& d, const BernsteinEntry& e) {
  VectorXd p = phi_values(d, e);
  return d.vectors * p.asDiagonal() * d.vectors.transpose() * d.m.asDiagonal();
}

inline MatrixXd heat_matrix(const SpectralDecomposition& d, const VectorXd& phi, double t) {
  VectorXd e = (-t * phi.array()).exp();
  return d.vectors * e.asDiagonal() * d.vectors.transpose() * d.m.asDiagonal();
}

enum class GreenMode { spectral, time_domain };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// <g, Phi(A)^{-1} g>_m, or +inf when g sees the kernel.
inline double green_form(const SpectralDecomposition& d, const BernsteinEntry& e, const VectorXd& g,
                         GreenMode mode = GreenMode::spectral, Tolerance tol = {}) {
  VectorXd c = d.coefficients(g);
  VectorXd c2 = c.array().square();
  double g2 = d.norm2(g);
  VectorXd p = phi_values(d, e);
  if (mode == GreenMode::spectral) {
    double s = 0.0;
    for (int k = 0; k < d.size(); ++k) {
      if (p(k) == 0.0) {
        if (c2(k) > kOverlapRel * g2) return kInf;
        continue;
      }
      s += c2(k) / p(k);
    }
    return s;
  }
  potential_density(e, 1.0);  // throws when only asymptotics are known
  double lmax = std::max(d.norm, 1.0);
  double start = 1e-6 / lmax;
  double head = g2 * e.potential_cdf(start);
  auto f = [&](double s) {
    double h = 0.0;
    for (int k = 0; k < d.size(); ++k) h += c2(k) * std::exp(-s * d.values(k));
    return h * e.potential_density(s);
  };
  double lpos = d.min_positive();
  double cap = std::isfinite(lpos) ? std::max(1e4 / lpos, 1e3) : 1e12;
  auto r = integrate_decades(f, head, start, cap, tol);
  return r.value;
}

// CSV rows (lambda_k, <g,q_k>_m^2).
inline void write_spectrum_csv(std::ostream& os, const SpectralDecomposition& d, const VectorXd& g) {
  VectorXd c = d.coefficients(g);
  os.precision(15);
  os << "lambda,weight\n";
  for (int k = 0; k < d.size(); ++k) os << d.values(k) << "," << c(k) * c(k) << "\n";
}

// |<Phi(A)f,g> - (b<Af,g> + int <f - e^{-sA}f, g> nu(ds))|
inline double okura_residual(const SpectralDecomposition& d, const BernsteinEntry& e, const VectorXd& f,
                             const VectorXd& g, Tolerance tol = {}) {
  if (!e.has_levy()) throw std::invalid_argument("okura_residual: '" + e.name + "' has no Levy density");
  VectorXd p = phi_values(d, e);
  VectorXd a = d.coefficients(f).cwiseProduct(d.coefficients(g));
  double lhs = a.dot(p);
  double drift = e.drift * a.dot(d.values);
  auto integrand = [&](double s) {
    double v = 0.0;
    for (int k = 0; k < d.size(); ++k) v += a(k) * -std::expm1(-s * d.values(k));
    return v * e.levy_density(s);
  };
  double levy = 0.0;
  if (e.levy_support_inf == 0.0) levy = integrate_levy(integrand, tol).value;
  return std::abs(lhs - (drift + levy));
}

// ||e^{-t Phi(A)} g - int e^{-sA} g eta_t(ds)||_m, mode by mode.
inline double subordination_residual(const SpectralDecomposition& d, const BernsteinEntry& e, double t,
                                     const VectorXd& g, Tolerance tol = {1e-12, 1e-10}) {
  if (!e.has_transition())
    throw std::invalid_argument("subordination_residual: '" + e.name + "' has no transition density");
  if (!(t > 0.0)) throw std::invalid_argument("subordination_residual: t must be > 0");
  VectorXd p = phi_values(d, e);
  VectorXd c = d.coefficients(g);
  double r2 = 0.0;
  for (int k = 0; k < d.size(); ++k) {
    double l = d.values(k);
    auto f = [&](double s) { return std::exp(-s * l) * e.transition_density(t, s); };
    double q = integrate_half_line(f, 1.0, tol).value;
    double diff = std::exp(-t * p(k)) - q;
    r2 += c(k) * c(k) * diff * diff;
  }
  return std::sqrt(r2);
}

struct KrylovGreen {
  std::vector<double> values;  // one per entry, +inf when not finite
  int steps = 0;
  bool converged = false;
  double smallest_ritz = 0.0;
};

// Gauss quadrature of <g, Phi(A)^{-1} g>_m from a Lanczos run on
// M^{-1/2} K M^{-1/2} started at M^{1/2} g. Intended for positive definite A.
inline KrylovGreen green_form_krylov(const SchrodingerOperator& op, const std::vector<BernsteinEntry>& entries,
                                     const VectorXd& g, double rtol = 1e-10, int max_steps = 600) {
  VectorXd s = op.m.array().rsqrt();
  VectorXd r = op.m.array().sqrt();
  MatVec mv = [&](const VectorXd& v) -> VectorXd {
    VectorXd x = op.apply_form((s.array() * v.array()).matrix());
    return (s.array() * x.array()).matrix();
  };
  Lanczos lz(mv, (r.array() * g.array()).matrix());
  KrylovGreen out;
  out.values.assign(entries.size(), kInf);
  std::vector<double> prev(entries.size(), 0.0);
  int stable = 0;
  VectorXd nodes, weights;
  for (int k = 0; k < max_steps; ++k) {
    bool more = lz.step();
    if (more && k % 5 != 4 && k + 1 < max_steps) continue;
    lz.ritz(nodes, weights);
    out.smallest_ritz = nodes(0);
    bool ok = true;
    for (std::size_t j = 0; j < entries.size(); ++j) {
      double v = 0.0;
      for (int i = 0; i < nodes.size(); ++i) {
        if (!(nodes(i) > 0.0)) {
          v = kInf;
          break;
        }
        v += weights(i) / entries[j].phi(nodes(i));
      }
      ok = ok && std::isfinite(v) && std::abs(v - prev[j]) <= rtol * std::abs(v);
      prev[j] = v;
      out.values[j] = v;
    }
    stable = ok ? stable + 1 : 0;
    out.steps = lz.steps();
    if (!more || stable >= 3) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace sublab
