#pragma once
// Finite-difference grids as weighted graphs, signed node measures and the
// Schrodinger forms built from them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "linalg.hpp"

namespace sublab {

enum class Boundary { dirichlet, free };

struct GridSpec {
  int dim = 1;
  int n = 1;
  double h = 1.0;
  Boundary boundary = Boundary::dirichlet;
  double form_scale = 1.0;  // multiplies every conductance and killing weight
  bool half_space = false;  // last axis runs over 0..(n-1)h, free at x_d = 0
};

struct GlueSpec {
  GridSpec grid;
  std::vector<double> junction_self;   // point of the first grid; empty = origin
  std::vector<double> junction_other;  // point of the second grid; empty = origin
};

struct DiscreteSpace {
  std::vector<std::vector<double>> coords;
  std::vector<int> component;
  SparseMatrix conductance;
  VectorXd killing;
  VectorXd mass;
  std::vector<GridSpec> grids;
  int junction = -1;
  std::vector<double> junction_other;  // junction coordinates in the second grid

  // coordinates of node i as seen from grid `comp`
  const std::vector<double>& point(int i, int comp) const {
    return (comp == 1 && i == junction) ? junction_other : coords[i];
  }

  int size() const { return static_cast<int>(mass.size()); }

  // S = diag(C 1 + k) - C
  SparseMatrix form_matrix() const {
    VectorXd deg = conductance * VectorXd::Ones(size());
    SparseMatrix S = -conductance;
    for (int i = 0; i < size(); ++i) S.coeffRef(i, i) += deg(i) + killing(i);
    S.makeCompressed();
    return S;
  }

  double energy(const VectorXd& f) const {
    double e = 0.0;
    for (int k = 0; k < conductance.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(conductance, k); it; ++it)
        if (it.row() < it.col()) {
          double d = f(it.row()) - f(it.col());
          e += it.value() * d * d;
        }
    return e + (killing.array() * f.array().square()).sum();
  }

  bool connected() const {
    const int n = size();
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
      int x = q.front();
      q.pop();
      for (SparseMatrix::InnerIterator it(conductance, x); it; ++it)
        if (it.value() > 0.0 && !seen[it.row()]) {
          seen[it.row()] = 1;
          ++count;
          q.push(static_cast<int>(it.row()));
        }
    }
    return count == n;
  }

  // Node of the given component with these coordinates, or -1.
  int find(const std::vector<double>& x, int comp = 0) const {
    double h = grids.at(comp).h;
    for (int i = 0; i < size(); ++i) {
      bool in = component[i] == comp || (i == junction && comp == 1);
      const auto& p = point(i, comp);
      if (!in || p.size() != x.size()) continue;
      bool eq = true;
      for (std::size_t a = 0; a < x.size(); ++a)
        eq = eq && std::abs(p[a] - x[a]) < 1e-9 * h;
      if (eq) return i;
    }
    return -1;
  }

  int origin(int comp = 0) const {
    return find(std::vector<double>(grids.at(comp).dim, 0.0), comp);
  }
};

namespace detail {

inline double axis_coord(const GridSpec& g, int axis, int j) {
  if (g.half_space && axis == g.dim - 1) return j * g.h;
  return (j - 0.5 * (g.n - 1)) * g.h;
}

struct GridBuild {
  std::vector<std::vector<double>> coords;
  std::vector<Eigen::Triplet<double>> edges;  // local indices, i<j
  std::vector<double> killing;
  double mass;
};

inline GridBuild build_grid(const GridSpec& g) {
  if (g.dim < 1 || g.dim > 3) throw std::invalid_argument("build_space: dim must be 1..3");
  if (g.n < 1) throw std::invalid_argument("build_space: n must be >= 1");
  if (!(g.h > 0.0)) throw std::invalid_argument("build_space: spacing must be > 0");
  if (!(g.form_scale > 0.0)) throw std::invalid_argument("build_space: form_scale must be > 0");
  GridBuild b;
  int total = 1;
  for (int a = 0; a < g.dim; ++a) total *= g.n;
  const double c = g.form_scale * std::pow(g.h, g.dim - 2);
  b.mass = std::pow(g.h, g.dim);
  b.coords.resize(total);
  b.killing.assign(total, 0.0);
  std::vector<int> stride(g.dim, 1);
  for (int a = g.dim - 2; a >= 0; --a) stride[a] = stride[a + 1] * g.n;
  for (int i = 0; i < total; ++i) {
    std::vector<double> x(g.dim);
    for (int a = 0; a < g.dim; ++a) {
      int j = (i / stride[a]) % g.n;
      x[a] = axis_coord(g, a, j);
      if (j + 1 < g.n)
        b.edges.emplace_back(i, i + stride[a], c);
      else if (g.boundary == Boundary::dirichlet)
        b.killing[i] += c;
      if (j == 0 && g.boundary == Boundary::dirichlet && !(g.half_space && a == g.dim - 1))
        b.killing[i] += c;
    }
    b.coords[i] = std::move(x);
  }
  return b;
}

inline int local_index(const GridSpec& g, const GridBuild& b, std::vector<double> x) {
  if (x.empty()) x.assign(g.dim, 0.0);
  if (static_cast<int>(x.size()) != g.dim)
    throw std::invalid_argument("glue: junction point has wrong dimension");
  for (std::size_t i = 0; i < b.coords.size(); ++i) {
    bool eq = true;
    for (int a = 0; a < g.dim; ++a) eq = eq && std::abs(b.coords[i][a] - x[a]) < 1e-9 * g.h;
    if (eq) return static_cast<int>(i);
  }
  throw std::invalid_argument("glue: junction point is not a grid node");
}

}  // namespace detail

inline DiscreteSpace build_space(const GridSpec& spec, const std::optional<GlueSpec>& glue = {}) {
  auto a = detail::build_grid(spec);
  DiscreteSpace sp;
  sp.grids.push_back(spec);
  const int na = static_cast<int>(a.coords.size());
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> kill = a.killing;
  std::vector<double> mass(na, a.mass);
  sp.coords = a.coords;
  sp.component.assign(na, 0);
  for (auto& t : a.edges) trip.push_back(t);
  if (glue) {
    auto b = detail::build_grid(glue->grid);
    sp.grids.push_back(glue->grid);
    int ja = detail::local_index(spec, a, glue->junction_self);
    int jb = detail::local_index(glue->grid, b, glue->junction_other);
    sp.junction = ja;
    sp.junction_other = b.coords[jb];
    std::vector<int> map(b.coords.size());
    int next = na;
    for (std::size_t i = 0; i < b.coords.size(); ++i) {
      if (static_cast<int>(i) == jb) {
        map[i] = ja;
        kill[ja] += b.killing[i];
        mass[ja] += b.mass;
      } else {
        map[i] = next++;
        sp.coords.push_back(b.coords[i]);
        sp.component.push_back(1);
        kill.push_back(b.killing[i]);
        mass.push_back(b.mass);
      }
    }
    for (auto& t : b.edges) trip.emplace_back(map[t.row()], map[t.col()], t.value());
  }
  const int n = static_cast<int>(mass.size());
  std::vector<Eigen::Triplet<double>> sym;
  for (auto& t : trip) {
    sym.emplace_back(t.row(), t.col(), t.value());
    sym.emplace_back(t.col(), t.row(), t.value());
  }
  sp.conductance.resize(n, n);
  sp.conductance.setFromTriplets(sym.begin(), sym.end());
  sp.killing = Eigen::Map<VectorXd>(kill.data(), n);
  sp.mass = Eigen::Map<VectorXd>(mass.data(), n);
  return sp;
}

struct SignedMeasure {
  VectorXd plus;
  VectorXd minus;

  static SignedMeasure zero(int n) { return {VectorXd::Zero(n), VectorXd::Zero(n)}; }

  void canonicalize() {
    VectorXd overlap = plus.cwiseMin(minus);
    plus -= overlap;
    minus -= overlap;
  }
  bool minus_is_zero() const { return (minus.array() == 0.0).all(); }
  bool plus_is_zero() const { return (plus.array() == 0.0).all(); }
};

enum class Sign { plus, minus };

struct MeasureSpec {
  enum class Kind { radial_power, hyperplane, uniform, custom } kind = Kind::uniform;
  double lambda = 1.0;
  double p = 2.0;
  std::vector<double> center;  // radial; empty = origin
  double eps = 0.5;            // center radius regularized to eps*h
  int axis = -1;               // hyperplane; -1 = last axis
  int component = 0;
  std::vector<double> weights;  // custom

  static MeasureSpec radial(double lambda, double p, double eps = 0.5) {
    MeasureSpec s;
    s.kind = Kind::radial_power;
    s.lambda = lambda;
    s.p = p;
    s.eps = eps;
    return s;
  }
  static MeasureSpec plane(double lambda, double p, int axis = -1, double eps = 0.5) {
    MeasureSpec s;
    s.kind = Kind::hyperplane;
    s.lambda = lambda;
    s.p = p;
    s.axis = axis;
    s.eps = eps;
    return s;
  }
  static MeasureSpec uniform(double lambda) {
    MeasureSpec s;
    s.kind = Kind::uniform;
    s.lambda = lambda;
    return s;
  }
  static MeasureSpec custom(std::vector<double> w) {
    MeasureSpec s;
    s.kind = Kind::custom;
    s.weights = std::move(w);
    return s;
  }
};

inline VectorXd measure_weights(const DiscreteSpace& sp, const MeasureSpec& spec) {
  const int n = sp.size();
  VectorXd w = VectorXd::Zero(n);
  if (spec.kind == MeasureSpec::Kind::custom) {
    if (static_cast<int>(spec.weights.size()) != n)
      throw std::invalid_argument("attach_measure: custom weights have wrong length");
    for (int i = 0; i < n; ++i) {
      if (!(spec.weights[i] >= 0.0)) throw std::invalid_argument("attach_measure: negative weight");
      w(i) = spec.weights[i];
    }
    return w;
  }
  if (!(spec.lambda >= 0.0)) throw std::invalid_argument("attach_measure: lambda must be >= 0");
  if (spec.kind == MeasureSpec::Kind::uniform) return spec.lambda * sp.mass;
  if (!(spec.p >= 0.0)) throw std::invalid_argument("attach_measure: p must be >= 0");
  const GridSpec& g = sp.grids.at(spec.component);
  const double floor = spec.eps * g.h;
  auto in_comp = [&](int i) {
    return sp.component[i] == spec.component || (i == sp.junction && spec.component == 1);
  };
  if (spec.kind == MeasureSpec::Kind::radial_power) {
    std::vector<double> c = spec.center.empty() ? std::vector<double>(g.dim, 0.0) : spec.center;
    if (static_cast<int>(c.size()) != g.dim)
      throw std::invalid_argument("attach_measure: center has wrong dimension");
    for (int a = 0; a < g.dim; ++a) {
      double lo = detail::axis_coord(g, a, 0), hi = detail::axis_coord(g, a, g.n - 1);
      if (c[a] < lo - 1e-12 || c[a] > hi + 1e-12)
        throw std::invalid_argument("attach_measure: center outside grid hull");
    }
    for (int i = 0; i < n; ++i) {
      if (!in_comp(i)) continue;
      const auto& x = sp.point(i, spec.component);
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) r2 += (x[a] - c[a]) * (x[a] - c[a]);
      double r = std::max(std::sqrt(r2), floor);
      double m = (i == sp.junction) ? std::pow(g.h, g.dim) : sp.mass(i);
      w(i) = spec.lambda * std::pow(r, -spec.p) * m;
    }
    return w;
  }
  // hyperplane slice x_axis = 0
  int axis = spec.axis < 0 ? g.dim - 1 : spec.axis;
  if (axis >= g.dim) throw std::invalid_argument("attach_measure: axis out of range");
  const double area = std::pow(g.h, g.dim - 1);
  for (int i = 0; i < n; ++i) {
    if (!in_comp(i)) continue;
    const auto& x = sp.point(i, spec.component);
    if (std::abs(x[axis]) > 1e-9 * g.h) continue;
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a)
      if (a != axis) r2 += x[a] * x[a];
    double r = std::max(std::sqrt(r2), floor);
    w(i) = spec.lambda * std::pow(r, -spec.p) * area;
  }
  return w;
}

inline SignedMeasure attach_measure(const DiscreteSpace& sp, const MeasureSpec& spec, Sign sign,
                                    std::optional<SignedMeasure> base = {}) {
  SignedMeasure mu = base ? *base : SignedMeasure::zero(sp.size());
  if (mu.plus.size() != sp.size() || mu.minus.size() != sp.size())
    throw std::invalid_argument("attach_measure: base measure has wrong size");
  VectorXd w = measure_weights(sp, spec);
  if (sign == Sign::plus)
    mu.plus += w;
  else
    mu.minus += w;
  return mu;
}

// Form matrix K = S + D+ - D- together with the reference measure.
struct SchrodingerOperator {
  SparseMatrix K;
  std::optional<MatrixXd> dense;  // set when the base form is dense
  VectorXd m;
  double psd_certificate = 0.0;
  bool negative = false;
  double scale = 0.0;  // max_x (|K_xx| + 2 mu-_x) / m_x, the size of the pieces before cancellation

  int size() const { return static_cast<int>(m.size()); }
  bool is_dense() const { return dense.has_value(); }

  MatrixXd dense_form() const { return dense ? *dense : MatrixXd(K); }

  VectorXd apply_form(const VectorXd& f) const { return dense ? VectorXd(*dense * f) : VectorXd(K * f); }

  // (A f)(x) = m_x^{-1} (K f)(x)
  VectorXd apply(const VectorXd& f) const { return apply_form(f).cwiseQuotient(m); }

  double form(const VectorXd& f) const { return f.dot(apply_form(f)); }

  MatrixXd matrix() const { return m.cwiseInverse().asDiagonal() * dense_form(); }

  void export_coo(std::ostream& os) const {
    os.precision(17);
    os << "# row col value\n";
    if (dense) {
      for (int j = 0; j < dense->cols(); ++j)
        for (int i = 0; i < dense->rows(); ++i)
          if ((*dense)(i, j) != 0.0) os << i << " " << j << " " << (*dense)(i, j) << "\n";
    } else {
      for (int k = 0; k < K.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(K, k); it; ++it)
          os << it.row() << " " << it.col() << " " << it.value() << "\n";
    }
  }
};

inline double pencil_certificate(const SchrodingerOperator& op, int dense_limit = 1500) {
  if (op.dense || op.size() <= dense_limit)
    return smallest_pencil_eigenvalue_dense(op.dense_form(), op.m);
  return smallest_pencil_eigenvalue_sparse(op.K, op.m);
}

// Sets scale, the certificate and the sign flag; eigenvalues within
// 1e-12 * scale of zero count as zero.
inline void certify(SchrodingerOperator& op, const VectorXd& minus, int dense_limit = 1500) {
  VectorXd diag = op.dense ? VectorXd(op.dense->diagonal()) : VectorXd(op.K.diagonal());
  op.scale = ((diag.cwiseAbs() + 2.0 * minus).array() / op.m.array()).maxCoeff();
  op.psd_certificate = pencil_certificate(op, dense_limit);
  if (std::abs(op.psd_certificate) <= 1e-12 * op.scale) op.psd_certificate = 0.0;
  op.negative = op.psd_certificate < 0.0;
}

inline SchrodingerOperator schrodinger_matrix(const DiscreteSpace& sp, const SignedMeasure& mu,
                                              int dense_limit = 1500) {
  if (!sp.connected()) throw std::invalid_argument("schrodinger_matrix: space is not connected");
  SchrodingerOperator op;
  op.K = sp.form_matrix();
  for (int i = 0; i < sp.size(); ++i) op.K.coeffRef(i, i) += mu.plus(i) - mu.minus(i);
  op.K.makeCompressed();
  op.m = sp.mass;
  certify(op, mu.minus, dense_limit);
  return op;
}

// Operator from an explicit symmetric form matrix (dense base forms).
inline SchrodingerOperator schrodinger_from_dense(const MatrixXd& K, const VectorXd& m) {
  if (K.rows() != K.cols() || K.rows() != m.size())
    throw std::invalid_argument("schrodinger_from_dense: size mismatch");
  SchrodingerOperator op;
  op.dense = 0.5 * (K + K.transpose());
  op.K = op.dense->sparseView();
  op.m = m;
  certify(op, VectorXd::Zero(m.size()));
  return op;
}

inline const VectorXd& one_signed(const SignedMeasure& mu) {
  bool p = !mu.plus_is_zero(), n = !mu.minus_is_zero();
  if (p && n) throw std::invalid_argument("measure must be one-signed");
  return p ? mu.plus : mu.minus;
}

// max_x (R_alpha mu)(x), where (alpha M + S) v = mu.
inline double kato_norm(const DiscreteSpace& sp, const VectorXd& mu, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("kato_norm: alpha must be > 0");
  if ((mu.array() < 0.0).any()) throw std::invalid_argument("kato_norm: measure must be >= 0");
  SparseMatrix A = sp.form_matrix();
  for (int i = 0; i < sp.size(); ++i) A.coeffRef(i, i) += alpha * sp.mass(i);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("kato_norm: singular resolvent system");
  VectorXd v = ldlt.solve(mu);
  return v.maxCoeff();
}

inline double kato_norm(const DiscreteSpace& sp, const SignedMeasure& mu, double alpha) {
  return kato_norm(sp, one_signed(mu), alpha);
}

struct KatoProfile {
  std::vector<double> alphas;
  std::vector<double> norms;
  bool strictly_decreasing = true;
  double decay_exponent = 0.0;  // slope of log norm vs log alpha
};

inline KatoProfile kato_profile(const DiscreteSpace& sp, const VectorXd& mu,
                                std::vector<double> alphas = {1.0, 10.0, 100.0, 1000.0}) {
  KatoProfile p;
  p.alphas = alphas;
  for (double a : alphas) p.norms.push_back(kato_norm(sp, mu, a));
  for (std::size_t i = 1; i < p.norms.size(); ++i)
    p.strictly_decreasing = p.strictly_decreasing && p.norms[i] < p.norms[i - 1];
  bool positive = std::all_of(p.norms.begin(), p.norms.end(), [](double v) { return v > 0.0; });
  if (positive && alphas.size() >= 2) p.decay_exponent = loglog_slope(p.alphas, p.norms);
  return p;
}

struct SlackReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double kato = 0.0;
};

inline SlackReport stollmann_voigt_check(const DiscreteSpace& sp, const VectorXd& mu,
                                         const VectorXd& f, double alpha) {
  SlackReport r;
  r.kato = kato_norm(sp, mu, alpha);
  r.lhs = (mu.array() * f.array().square()).sum();
  r.rhs = r.kato * (sp.energy(f) + alpha * (sp.mass.array() * f.array().square()).sum());
  r.slack = r.rhs - r.lhs;
  return r;
}

}  // namespace sublab
