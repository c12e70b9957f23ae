#pragma once
// Symmetric eigen utilities: dense pencils, Lanczos for extremes, and the
// Lanczos/Gauss quadrature used for quadratic forms of large operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace sublab {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using MatVec = std::function<VectorXd(const VectorXd&)>;

// Lanczos with full reorthogonalization started from v0.
class Lanczos {
 public:
  Lanczos(MatVec op, const VectorXd& v0) : op_(std::move(op)) {
    double nv = v0.norm();
    if (!(nv > 0.0)) throw std::invalid_argument("Lanczos: zero start vector");
    start_norm2_ = nv * nv;
    basis_.push_back(v0 / nv);
  }

  // One more step; false once the Krylov space is exhausted.
  bool step() {
    if (done_) return false;
    const VectorXd& q = basis_.back();
    VectorXd w = op_(q);
    double a = q.dot(w);
    alpha_.push_back(a);
    w -= a * q;
    if (basis_.size() > 1) w -= beta_.back() * basis_[basis_.size() - 2];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis_) w -= b.dot(w) * b;
    double b = w.norm();
    scale_ = std::max({scale_, std::abs(a), b});
    if (b <= 1e-13 * scale_ || static_cast<int>(basis_.size()) == static_cast<int>(q.size())) {
      done_ = true;
      return false;
    }
    beta_.push_back(b);
    basis_.push_back(w / b);
    return true;
  }

  int steps() const { return static_cast<int>(alpha_.size()); }
  bool exhausted() const { return done_; }

  // Ritz values and Gauss weights (scaled by |v0|^2).
  void ritz(VectorXd& nodes, VectorXd& weights, double* last_residual = nullptr) const {
    int k = steps();
    auto es = tridiagonal(k);
    nodes = es.eigenvalues();
    weights = es.eigenvectors().row(0).transpose().array().square() * start_norm2_;
    if (last_residual) {
      double bk = (static_cast<int>(beta_.size()) >= k && !done_) ? beta_[k - 1] : 0.0;
      *last_residual = std::abs(bk * es.eigenvectors()(k - 1, k - 1));
    }
  }

  // Largest Ritz pair residual |beta_k y_k|.
  void largest(double& theta, double& residual) const {
    int k = steps();
    auto es = tridiagonal(k);
    theta = es.eigenvalues()(k - 1);
    double bk = (static_cast<int>(beta_.size()) >= k && !done_) ? beta_[k - 1] : 0.0;
    residual = std::abs(bk * es.eigenvectors()(k - 1, k - 1));
  }

 private:
  Eigen::SelfAdjointEigenSolver<MatrixXd> tridiagonal(int k) const {
    VectorXd diag = Eigen::Map<const VectorXd>(alpha_.data(), k);
    VectorXd sub(std::max(k - 1, 0));
    for (int i = 0; i + 1 < k; ++i) sub(i) = beta_[i];
    Eigen::SelfAdjointEigenSolver<MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    return es;
  }

  MatVec op_;
  std::vector<VectorXd> basis_;
  std::vector<double> alpha_, beta_;
  double start_norm2_ = 0.0;
  double scale_ = 0.0;
  bool done_ = false;
};

inline VectorXd seeded_start(int n, std::uint64_t seed = 0x5eed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

struct ExtremeResult {
  double value = 0.0;
  double residual = 0.0;
  int steps = 0;
  bool converged = false;
};

inline ExtremeResult lanczos_largest(const MatVec& op, int n, double tol = 1e-12,
                                     int max_steps = 400, std::uint64_t seed = 0x5eed) {
  Lanczos lz(op, seeded_start(n, seed));
  ExtremeResult r;
  for (int k = 0; k < max_steps; ++k) {
    bool more = lz.step();
    if (!more || k % 5 == 4 || k + 1 == max_steps) {
      lz.largest(r.value, r.residual);
      r.steps = lz.steps();
      if (!more || r.residual <= tol * std::abs(r.value)) {
        r.converged = true;
        return r;
      }
    }
  }
  return r;
}

// Smallest eigenvalue of the pencil (K, diag(m)), m > 0.
inline double smallest_pencil_eigenvalue_dense(const MatrixXd& K, const VectorXd& m) {
  VectorXd s = m.array().rsqrt();
  MatrixXd B = s.asDiagonal() * K * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(B, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double smallest_pencil_eigenvalue_sparse(const SparseMatrix& K, const VectorXd& m,
                                                double tol = 1e-12) {
  const int n = static_cast<int>(m.size());
  VectorXd s = m.array().rsqrt();
  VectorXd r = m.array().sqrt();
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(K);
  bool pd = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();
  if (pd) {
    MatVec op = [&](const VectorXd& v) -> VectorXd {
      VectorXd x = ldlt.solve((r.array() * v.array()).matrix());
      return (r.array() * x.array()).matrix();
    };
    auto res = lanczos_largest(op, n, tol, 600);
    return 1.0 / res.value;
  }
  MatVec op = [&](const VectorXd& v) -> VectorXd {
    VectorXd x = K * (s.array() * v.array()).matrix();
    return -(s.array() * x.array()).matrix();
  };
  auto res = lanczos_largest(op, n, 1e-10, 800);
  return -res.value;
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace sublab
