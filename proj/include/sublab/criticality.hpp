#pragma once
// Subcritical / critical / supercritical classification of Schrodinger forms
// and of their subordinated versions; Doob h-transforms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "bernstein.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "spectral.hpp"

namespace sublab {

enum class Verdict { Subcritical, Critical, Supercritical };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Subcritical: return "Subcritical";
    case Verdict::Critical: return "Critical";
    case Verdict::Supercritical: return "Supercritical";
  }
  return "?";
}

struct Classification {
  Verdict verdict = Verdict::Subcritical;
  double lambda_mu = kInf;
  double gamma_mu = 0.0;
  bool conclusive = true;
  std::map<std::string, std::string> evidence;
  // family diagnostics (subordinated classification)
  std::vector<double> sizes;
  std::vector<double> greens;
  std::vector<double> phi_min;
  double slope = 0.0;
  double last_increment = 0.0;
};

namespace detail {
inline std::string num(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}
}  // namespace detail

// lambda(mu) from K+ = S + D+ and the negative part: the smallest eigenvalue of
// the pencil (Schur complement of K+ on supp mu-, D-).
inline double lambda_of(const SchrodingerOperator& plus, const VectorXd& minus, int dense_limit = 1500) {
  const int n = plus.size();
  std::vector<int> supp;
  for (int i = 0; i < n; ++i)
    if (minus(i) > 0.0) supp.push_back(i);
  if (supp.empty()) return kInf;
  const int p = static_cast<int>(supp.size());
  // constants annihilate the form: nothing can keep mu-(f^2) away from zero
  double ones_form = plus.form(VectorXd::Ones(n));
  double diag_scale = plus.is_dense() ? plus.dense->diagonal().cwiseAbs().sum()
                                      : VectorXd(plus.K.diagonal()).cwiseAbs().sum();
  if (std::abs(ones_form) <= 1e-13 * diag_scale) return 0.0;
  VectorXd sq(p);
  for (int j = 0; j < p; ++j) sq(j) = std::sqrt(minus(supp[j]));
  if (plus.is_dense() || n <= dense_limit) {
    MatrixXd Kp = plus.dense_form();
    Eigen::LLT<MatrixXd> llt(Kp);
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXd E = MatrixXd::Zero(n, p);
    for (int j = 0; j < p; ++j) E(supp[j], j) = sq(j);
    MatrixXd Y = llt.matrixL().solve(E);
    MatrixXd W = Y.transpose() * Y;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(W, Eigen::EigenvaluesOnly);
    double rho = es.eigenvalues()(p - 1);
    return rho > 0.0 ? 1.0 / rho : kInf;
  }
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(plus.K);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) return 0.0;
  MatVec op = [&](const VectorXd& v) -> VectorXd {
    VectorXd x = VectorXd::Zero(n);
    for (int j = 0; j < p; ++j) x(supp[j]) = sq(j) * v(j);
    VectorXd y = ldlt.solve(x);
    VectorXd out(p);
    for (int j = 0; j < p; ++j) out(j) = sq(j) * y(supp[j]);
    return out;
  };
  auto r = lanczos_largest(op, p, 1e-13, 600);
  return 1.0 / r.value;
}

struct BottomOfSpectrum {
  double lambda_mu = kInf;
  double gamma_mu = 0.0;
};

inline BottomOfSpectrum bottom_of_spectrum(const DiscreteSpace& sp, const SignedMeasure& mu,
                                           int dense_limit = 1500) {
  SignedMeasure plus{mu.plus, VectorXd::Zero(sp.size())};
  auto plus_op = schrodinger_matrix(sp, plus, dense_limit);
  auto full = schrodinger_matrix(sp, mu, dense_limit);
  return {lambda_of(plus_op, mu.minus, dense_limit), full.psd_certificate};
}

inline Verdict trichotomy(double lambda_mu, double tol) {
  if (lambda_mu > 1.0 + tol) return Verdict::Subcritical;
  if (lambda_mu < 1.0 - tol) return Verdict::Supercritical;
  return Verdict::Critical;
}

inline Classification classify_from(double lambda_mu, const SchrodingerOperator& full, double tol,
                                    int dense_limit = 1500) {
  Classification c;
  c.lambda_mu = lambda_mu;
  c.gamma_mu = full.psd_certificate;
  c.verdict = trichotomy(lambda_mu, tol);
  c.evidence["lambda_mu"] = detail::num(lambda_mu);
  c.evidence["gamma_mu"] = detail::num(c.gamma_mu);
  bool consistent = (lambda_mu >= 1.0 - tol) == (c.gamma_mu >= -tol * std::max(1.0, std::abs(c.gamma_mu)));
  c.evidence["gamma_sign_consistent"] = consistent ? "true" : "false";
  if (full.size() <= dense_limit) {
    VectorXd s = full.m.array().rsqrt();
    MatrixXd B = s.asDiagonal() * full.dense_form() * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(B, Eigen::EigenvaluesOnly);
    double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    int kdim = 0;
    for (int k = 0; k < es.eigenvalues().size(); ++k)
      if (std::abs(es.eigenvalues()(k)) <= tol * scale) ++kdim;
    c.evidence["kernel_dim"] = std::to_string(kdim);
  }
  return c;
}

inline Classification classify_schrodinger(const DiscreteSpace& sp, const SignedMeasure& mu, double tol = 1e-9,
                                           int dense_limit = 1500) {
  SignedMeasure plus{mu.plus, VectorXd::Zero(sp.size())};
  auto plus_op = schrodinger_matrix(sp, plus, dense_limit);
  auto full = schrodinger_matrix(sp, mu, dense_limit);
  return classify_from(lambda_of(plus_op, mu.minus, dense_limit), full, tol, dense_limit);
}

struct SuperharmonicResult {
  VectorXd h;
  double max_violation = 0.0;  // max_x,t (T_t h - h)(x)
  bool from_kernel = false;
};

namespace detail {
inline double superharmonic_violation(const SpectralDecomposition& d, const VectorXd& phi, const VectorXd& h,
                                      std::initializer_list<double> times = {0.1, 1.0, 10.0}) {
  VectorXd c = d.coefficients(h);
  double worst = -kInf;
  for (double t : times) {
    VectorXd th = d.synthesize((c.array() * (-t * phi.array()).exp()).matrix());
    worst = std::max(worst, (th - h).maxCoeff());
  }
  return worst;
}
}  // namespace detail

// h = (I + Phi(A))^{-1} g, or the positive kernel vector when requested.
inline SuperharmonicResult superharmonic_h(const SpectralDecomposition& d, const BernsteinEntry& e, const VectorXd& g,
                                           bool prefer_kernel = false) {
  VectorXd phi = phi_values(d, e);  // refuses negative spectrum
  SuperharmonicResult r;
  if (prefer_kernel && d.kernel_dim > 0) {
    if (d.kernel_dim > 1) throw std::runtime_error("superharmonic_h: kernel is not one-dimensional");
    VectorXd q = d.vectors.col(0);
    if (q.sum() < 0.0) q = -q;
    q /= q.maxCoeff();
    r.h = q;
    r.from_kernel = true;
  } else {
    if ((g.array() <= 0.0).any()) throw std::invalid_argument("superharmonic_h: g must be strictly positive");
    VectorXd c = d.coefficients(g);
    r.h = d.synthesize((c.array() / (1.0 + phi.array())).matrix());
  }
  r.max_violation = detail::superharmonic_violation(d, phi, r.h);
  return r;
}

struct HTransformReport {
  VectorXd h;
  MatrixXd generator;  // H^{-1} (-Phi(A)) H
  double offdiag_min = 0.0;
  double row_sum_max = 0.0;
  double row_sum_min = 0.0;
  bool conservative = false;
};

inline HTransformReport h_transform(const SpectralDecomposition& d, const BernsteinEntry& e, const VectorXd& h,
                                    double tol = 1e-12) {
  if ((h.array() <= 0.0).any()) throw std::invalid_argument("h_transform: h must be strictly positive");
  VectorXd phi = phi_values(d, e);
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  double viol = detail::superharmonic_violation(d, phi, h);
  if (viol > tol * scale) {
    std::ostringstream os;
    os.precision(6);
    os << "h_transform: h is not superharmonic (max violation " << viol << ")";
    throw std::runtime_error(os.str());
  }
  HTransformReport r;
  r.h = h;
  MatrixXd P = d.vectors * phi.asDiagonal() * d.vectors.transpose() * d.m.asDiagonal();
  r.generator = -(h.cwiseInverse().asDiagonal() * P * h.asDiagonal());
  const int n = d.size();
  r.offdiag_min = n > 1 ? kInf : 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) r.offdiag_min = std::min(r.offdiag_min, r.generator(i, j));
  VectorXd rows = r.generator.rowwise().sum();
  r.row_sum_max = rows.maxCoeff();
  r.row_sum_min = rows.minCoeff();
  r.conservative = rows.cwiseAbs().maxCoeff() <= tol;
  return r;
}

struct FamilyMember {
  int n = 0;
  SchrodingerOperator op;
  VectorXd g;
};

struct FamilyOptions {
  double cauchy_tol = 1e-3;    // last relative increment
  double slope_tol = 0.02;     // log-log slope counted as converged
  double growth_slope = 0.2;   // log-log slope counted as divergent
  int budget = kDefaultBudget;
  double negative_tol = 1e-12;
};

namespace detail {
inline Classification fold_family(const std::vector<double>& sizes, const std::vector<double>& greens,
                                  const std::vector<double>& phimin, const FamilyOptions& o) {
  Classification c;
  c.sizes = sizes;
  c.greens = greens;
  c.phi_min = phimin;
  std::ostringstream seq;
  seq.precision(15);
  for (std::size_t i = 0; i < greens.size(); ++i) seq << (i ? " " : "") << greens[i];
  c.evidence["green_sequence"] = seq.str();
  bool any_inf = std::any_of(greens.begin(), greens.end(), [](double v) { return !std::isfinite(v); });
  if (any_inf) {
    c.verdict = Verdict::Critical;
    c.conclusive = std::all_of(greens.begin(), greens.end(), [](double v) { return !std::isfinite(v); });
    c.evidence["kernel_overlap"] = "true";
    c.slope = kInf;
    c.last_increment = kInf;
    return c;
  }
  c.slope = loglog_slope(sizes, greens);
  double last = greens.back(), prev = greens[greens.size() - 2];
  c.last_increment = std::abs(last - prev) / std::abs(last);
  bool phi_to_zero = true;
  for (std::size_t i = 1; i < phimin.size(); ++i) phi_to_zero = phi_to_zero && phimin[i] < phimin[i - 1];
  c.evidence["slope"] = num(c.slope);
  c.evidence["last_increment"] = num(c.last_increment);
  c.evidence["phi_min_decreasing"] = phi_to_zero ? "true" : "false";
  if (c.last_increment < o.cauchy_tol && c.slope < o.slope_tol) {
    c.verdict = Verdict::Subcritical;
  } else if (c.slope > o.growth_slope && phi_to_zero) {
    c.verdict = Verdict::Critical;
  } else {
    c.conclusive = false;
    c.verdict = c.slope > o.growth_slope ? Verdict::Critical : Verdict::Subcritical;
  }
  c.evidence["conclusive"] = c.conclusive ? "true" : "false";
  return c;
}
}  // namespace detail

// One classification per entry; members are decomposed (or run through
// Lanczos) once and shared by all entries.
inline std::vector<Classification> classify_subordinated(const std::vector<FamilyMember>& family,
                                                         const std::vector<BernsteinEntry>& entries,
                                                         const FamilyOptions& o = {}) {
  if (family.size() < 3) throw std::invalid_argument("classify_subordinated: need at least 3 sizes");
  const std::size_t ne = entries.size();
  std::vector<std::vector<double>> greens(ne), phimin(ne);
  std::vector<double> sizes;
  for (const auto& mem : family) {
    if (mem.op.psd_certificate < -o.negative_tol * std::max(1.0, std::abs(mem.op.psd_certificate))) {
      std::vector<Classification> out(ne);
      for (auto& c : out) {
        c.verdict = Verdict::Supercritical;
        c.gamma_mu = mem.op.psd_certificate;
        c.evidence["negative_eigenvalue"] = detail::num(mem.op.psd_certificate);
        c.evidence["size"] = std::to_string(mem.n);
      }
      return out;
    }
    sizes.push_back(mem.n);
    if (mem.op.size() <= o.budget) {
      auto d = decompose(mem.op, o.budget);
      for (std::size_t j = 0; j < ne; ++j) {
        greens[j].push_back(green_form(d, entries[j], mem.g));
        phimin[j].push_back(d.values(0) == 0.0 ? 0.0 : entries[j].phi(std::max(d.values(0), 0.0)));
      }
    } else {
      auto kg = green_form_krylov(mem.op, entries, mem.g);
      double lmin = std::max(mem.op.psd_certificate, 0.0);
      for (std::size_t j = 0; j < ne; ++j) {
        greens[j].push_back(kg.values[j]);
        phimin[j].push_back(lmin == 0.0 ? 0.0 : entries[j].phi(lmin));
      }
    }
  }
  std::vector<Classification> out;
  for (std::size_t j = 0; j < ne; ++j) {
    auto c = detail::fold_family(sizes, greens[j], phimin[j], o);
    c.gamma_mu = family.back().op.psd_certificate;
    c.evidence["entry"] = entries[j].name;
    out.push_back(std::move(c));
  }
  return out;
}

inline Classification classify_subordinated(const std::vector<FamilyMember>& family, const BernsteinEntry& entry,
                                            const FamilyOptions& o = {}) {
  return classify_subordinated(family, std::vector<BernsteinEntry>{entry}, o).front();
}

// theta: on-diagonal heat decay exponent of the h-transformed semigroup.
inline Classification asymptotic_criticality(double theta, const BernsteinEntry& e) {
  if (!(theta > 0.0)) throw std::invalid_argument("asymptotic_criticality: theta must be > 0");
  if (!e.potential_tail_exponent)
    throw AsymptoticsOnly("asymptotic_criticality: '" + e.name + "' has no potential tail exponent", std::nullopt);
  double rho = *e.potential_tail_exponent;
  Classification c;
  c.verdict = rho >= theta ? Verdict::Critical : Verdict::Subcritical;
  c.evidence["theta"] = detail::num(theta);
  c.evidence["rho"] = detail::num(rho);
  c.evidence["tail_integral"] = rho >= theta ? "divergent" : "convergent";
  return c;
}

struct RangeMembership {
  bool member = false;
  double green = kInf;
  VectorXd witness;  // minimal-norm u with Phi(A)^{1/2} u = f
};

inline RangeMembership range_membership(const SpectralDecomposition& d, const BernsteinEntry& e, const VectorXd& f) {
  RangeMembership r;
  r.green = green_form(d, e, f);
  r.member = std::isfinite(r.green);
  if (!r.member) return r;
  VectorXd phi = phi_values(d, e);
  VectorXd c = d.coefficients(f);
  for (int k = 0; k < d.size(); ++k) c(k) = phi(k) > 0.0 ? c(k) / std::sqrt(phi(k)) : 0.0;
  r.witness = d.synthesize(c);
  return r;
}

// Largest delta with delta * sum_x W_x f(x)^2 m_x <= <Phi(A) f, f>_m.
inline double subcritical_window_constant(const SpectralDecomposition& d, const BernsteinEntry& e,
                                          const VectorXd& window) {
  VectorXd phi = phi_values(d, e);
  std::vector<int> idx;
  for (int i = 0; i < d.size(); ++i)
    if (window(i) > 0.0) idx.push_back(i);
  if (idx.empty()) return kInf;
  for (int k = 0; k < d.size(); ++k)
    if (phi(k) == 0.0) return 0.0;
  const int p = static_cast<int>(idx.size());
  MatrixXd Qw(p, d.size());
  for (int j = 0; j < p; ++j) Qw.row(j) = d.vectors.row(idx[j]) * std::sqrt(window(idx[j]) * d.m(idx[j]));
  MatrixXd W = Qw * phi.cwiseInverse().asDiagonal() * Qw.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(W, Eigen::EigenvaluesOnly);
  return 1.0 / es.eigenvalues()(p - 1);
}

}  // namespace sublab
