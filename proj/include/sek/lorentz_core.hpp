#pragma once

// Dense covariant tensors over an N-dimensional Lorentzian vector space with
// signature (-,+,...,+).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sek/error.hpp"

namespace sek {

inline constexpr int kMaxDim = 6;
inline constexpr int kMaxRank = 8;

/// Relative tolerance for causal classification of vectors.
inline constexpr double kTolClass = 1e-10;
/// Relative tolerance for algebraic identities.
inline constexpr double kTolAlg = 1e-9;

using Vector = std::vector<double>;
using Matrix = Eigen::MatrixXd;

inline std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

/// Row-major decode of a flat index into a multi-index.
inline void unflatten(std::size_t flat, int dim, std::span<int> idx) {
  for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
    idx[k] = static_cast<int>(flat % dim);
    flat /= dim;
  }
}

inline std::size_t flatten(std::span<const int> idx, int dim) {
  std::size_t f = 0;
  for (int i : idx) f = f * dim + static_cast<std::size_t>(i);
  return f;
}

/// Sign of a permutation given as a sequence of distinct integers (0 if repeated).
inline int permutation_sign(std::span<const int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      if (p[i] == p[j]) return 0;
      if (p[i] > p[j]) sign = -sign;
    }
  return sign;
}

class LorentzFrame;
using FrameRef = std::shared_ptr<const LorentzFrame>;

class LorentzFrame {
 public:
  int dim() const { return dim_; }
  double g(int a, int b) const { return metric_(a, b); }
  double ginv(int a, int b) const { return inverse_(a, b); }
  const Matrix& metric() const { return metric_; }
  const Matrix& inverse() const { return inverse_; }
  double sqrt_abs_det() const { return sqrt_abs_det_; }
  int orientation() const { return orientation_; }
  const Vector& future_axis() const { return future_axis_; }

  /// g(u, v) for contravariant u, v.
  double dot(std::span<const double> u, std::span<const double> v) const {
    double s = 0;
    for (int a = 0; a < dim_; ++a)
      for (int b = 0; b < dim_; ++b) s += u[a] * metric_(a, b) * v[b];
    return s;
  }

  double metric_scale() const { return metric_.cwiseAbs().maxCoeff(); }

  bool same_as(const LorentzFrame& o) const {
    return dim_ == o.dim_ && orientation_ == o.orientation_ && metric_ == o.metric_;
  }

 private:
  friend FrameRef make_frame(int, std::optional<Matrix>, std::optional<Vector>, int);

  int dim_ = 0;
  Matrix metric_;
  Matrix inverse_;
  double sqrt_abs_det_ = 1.0;
  int orientation_ = 1;
  Vector future_axis_;
};

/// Validated frame. Defaults: metric diag(-1,1,...,1), future axis e0.
inline FrameRef make_frame(int dim, std::optional<Matrix> metric = std::nullopt,
                           std::optional<Vector> future_axis = std::nullopt,
                           int orientation = 1) {
  if (dim < 2 || dim > kMaxDim)
    throw Error(Errc::DimensionOutOfRange, "dimension must be in 2.." + std::to_string(kMaxDim));
  if (orientation != 1 && orientation != -1)
    throw Error(Errc::BadParams, "orientation must be +1 or -1");

  Matrix g = Matrix::Identity(dim, dim);
  g(0, 0) = -1.0;
  if (metric) {
    if (metric->rows() != dim || metric->cols() != dim)
      throw Error(Errc::ShapeMismatch, "metric must be dim x dim");
    g = *metric;
  }
  const double scale = g.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw Error(Errc::DegenerateMetric, "zero metric");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(Errc::NotSymmetric, "metric is not symmetric");
  g = 0.5 * (g + g.transpose());

  const double det = g.determinant();
  if (std::abs(det) <= 1e-12 * std::pow(scale, dim))
    throw Error(Errc::DegenerateMetric, "metric determinant vanishes");

  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  int neg = 0;
  for (int i = 0; i < dim; ++i)
    if (es.eigenvalues()(i) < 0) ++neg;
  if (neg != 1)
    throw Error(Errc::WrongSignature, "metric must have exactly one negative eigenvalue");

  Vector u(dim, 0.0);
  u[0] = 1.0;
  if (future_axis) {
    if (static_cast<int>(future_axis->size()) != dim)
      throw Error(Errc::ShapeMismatch, "future axis must have dim components");
    u = *future_axis;
  }

  auto frame = std::shared_ptr<LorentzFrame>(new LorentzFrame());
  frame->dim_ = dim;
  frame->metric_ = g;
  frame->inverse_ = g.inverse();
  frame->sqrt_abs_det_ = std::sqrt(std::abs(det));
  frame->orientation_ = orientation;
  frame->future_axis_ = u;

  double umax = 0;
  for (double x : u) umax = std::max(umax, std::abs(x));
  if (!(frame->dot(u, u) < -kTolClass * umax * umax * scale))
    throw Error(Errc::NonTimelikeFutureAxis, "future axis is not timelike");
  return frame;
}

inline FrameRef make_frame(int dim, const std::vector<double>& metric_row_major) {
  if (metric_row_major.size() != ipow(dim, 2))
    throw Error(Errc::ShapeMismatch, "metric must have dim*dim components");
  Matrix g(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) g(a, b) = metric_row_major[a * dim + b];
  return make_frame(dim, g);
}

inline FrameRef minkowski(int dim) { return make_frame(dim); }

/// Dense rank-m array of covariant components, row-major. Immutable.
class Tensor {
 public:
  Tensor(FrameRef frame, int rank)
      : frame_(std::move(frame)), rank_(rank) {
    check_shape();
    comps_.assign(ipow(dim(), rank_), 0.0);
  }

  Tensor(FrameRef frame, int rank, std::vector<double> components)
      : frame_(std::move(frame)), rank_(rank), comps_(std::move(components)) {
    check_shape();
    if (comps_.size() != ipow(dim(), rank_))
      throw Error(Errc::ShapeMismatch, "component count must equal dim^rank");
  }

  static Tensor scalar(FrameRef frame, double value) { return Tensor(std::move(frame), 0, {value}); }

  const FrameRef& frame_ref() const { return frame_; }
  const LorentzFrame& frame() const { return *frame_; }
  int dim() const { return frame_->dim(); }
  int rank() const { return rank_; }
  std::size_t size() const { return comps_.size(); }
  std::span<const double> components() const { return comps_; }
  double operator[](std::size_t flat) const { return comps_[flat]; }

  template <class... I>
  double operator()(I... idx) const {
    const int arr[] = {static_cast<int>(idx)...};
    return comps_[flatten(std::span<const int>(arr, sizeof...(I)), dim())];
  }

  double at(std::span<const int> idx) const { return comps_[flatten(idx, dim())]; }

  double max_abs() const {
    double m = 0;
    for (double x : comps_) m = std::max(m, std::abs(x));
    return m;
  }

  double scalar_value() const { return comps_.at(0); }

  friend Tensor operator+(const Tensor& a, const Tensor& b) { return a.zip(b, 1.0); }
  friend Tensor operator-(const Tensor& a, const Tensor& b) { return a.zip(b, -1.0); }
  friend Tensor operator*(double s, const Tensor& t) {
    std::vector<double> c(t.comps_);
    for (double& x : c) x *= s;
    return Tensor(t.frame_, t.rank_, std::move(c));
  }
  friend Tensor operator-(const Tensor& t) { return -1.0 * t; }

 private:
  void check_shape() const {
    if (!frame_) throw Error(Errc::BadParams, "tensor needs a frame");
    if (rank_ < 0 || rank_ > kMaxRank)
      throw Error(Errc::RankOutOfRange, "rank must be in 0.." + std::to_string(kMaxRank));
  }

  Tensor zip(const Tensor& b, double sb) const {
    if (!frame_->same_as(*b.frame_)) throw Error(Errc::FrameMismatch, "tensors live in different frames");
    if (rank_ != b.rank_) throw Error(Errc::RankMismatch, "ranks differ");
    std::vector<double> c(comps_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += sb * b.comps_[i];
    return Tensor(frame_, rank_, std::move(c));
  }

  FrameRef frame_;
  int rank_;
  std::vector<double> comps_;
};

/// max |a - b| over components.
inline double max_abs_diff(const Tensor& a, const Tensor& b) { return (a - b).max_abs(); }

/// ||a - b||_inf / max(||b||_inf, floor).
inline double rel_diff(const Tensor& a, const Tensor& b, double floor = 1e-300) {
  return max_abs_diff(a, b) / std::max(b.max_abs(), floor);
}

inline void check_same_frame(const Tensor& a, const Tensor& b) {
  if (!a.frame().same_as(b.frame())) throw Error(Errc::FrameMismatch, "tensors live in different frames");
}

// ---------------------------------------------------------------------------
// Construction helpers

inline Tensor metric_tensor(const FrameRef& f) {
  const int n = f->dim();
  std::vector<double> c(ipow(n, 2));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) c[a * n + b] = f->g(a, b);
  return Tensor(f, 2, std::move(c));
}

inline Tensor covector(const FrameRef& f, Vector comps) { return Tensor(f, 1, std::move(comps)); }

/// Coordinate 1-form dx^a.
inline Tensor basis_covector(const FrameRef& f, int a) {
  Vector c(f->dim(), 0.0);
  c.at(a) = 1.0;
  return Tensor(f, 1, std::move(c));
}

/// Covariant components g_ab v^b of a contravariant vector.
inline Tensor lower_vector(const FrameRef& f, std::span<const double> v) {
  const int n = f->dim();
  Vector c(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) c[a] += f->g(a, b) * v[b];
  return Tensor(f, 1, std::move(c));
}

/// Contravariant components g^ab w_b of a 1-form.
inline Vector raise_covector(const Tensor& w) {
  if (w.rank() != 1) throw Error(Errc::RankMismatch, "expected a 1-form");
  const int n = w.dim();
  Vector v(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) v[a] += w.frame().ginv(a, b) * w[b];
  return v;
}

inline Tensor outer(const Tensor& a, const Tensor& b) {
  check_same_frame(a, b);
  std::vector<double> c(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i * b.size() + j] = a[i] * b[j];
  return Tensor(a.frame_ref(), a.rank() + b.rank(), std::move(c));
}

inline Tensor outer(std::span<const Tensor> factors) {
  if (factors.empty()) throw Error(Errc::BadParams, "empty outer product");
  Tensor t = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) t = outer(t, factors[i]);
  return t;
}

/// Result slot k carries source slot order[k].
inline Tensor permute_slots(const Tensor& t, std::span<const int> order) {
  const int m = t.rank();
  const int n = t.dim();
  if (static_cast<int>(order.size()) != m) throw Error(Errc::ArityMismatch, "permutation length != rank");
  std::vector<int> seen(m, 0);
  for (int s : order) {
    if (s < 0 || s >= m || seen[s]++) throw Error(Errc::InvalidStructure, "not a permutation");
  }
  std::vector<double> c(t.size());
  std::vector<int> idx(m), src(m);
  for (std::size_t f = 0; f < t.size(); ++f) {
    unflatten(f, n, idx);
    for (int k = 0; k < m; ++k) src[order[k]] = idx[k];
    c[f] = t.at(src);
  }
  return Tensor(t.frame_ref(), m, std::move(c));
}

inline Tensor swap_slots(const Tensor& t, int i, int j) {
  std::vector<int> order(t.rank());
  std::iota(order.begin(), order.end(), 0);
  std::swap(order.at(i), order.at(j));
  return permute_slots(t, order);
}

/// R_{..a..} = sum_b M(a,b) T_{..b..} acting on one slot.
inline Tensor apply_to_slot(const Tensor& t, int slot, const Matrix& m) {
  if (slot < 0 || slot >= t.rank()) throw Error(Errc::SlotOutOfRange, "slot out of range");
  const int n = t.dim();
  const std::size_t inner = ipow(n, t.rank() - slot - 1);
  const std::size_t outer_count = ipow(n, slot);
  std::vector<double> c(t.size(), 0.0);
  for (std::size_t o = 0; o < outer_count; ++o)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double w = m(a, b);
        if (w == 0.0) continue;
        const std::size_t dst = (o * n + a) * inner;
        const std::size_t src = (o * n + b) * inner;
        for (std::size_t i = 0; i < inner; ++i) c[dst + i] += w * t[src + i];
      }
  return Tensor(t.frame_ref(), t.rank(), std::move(c));
}

/// Raise one slot with g^{-1}. The returned array is contravariant in that slot.
inline Tensor metric_dual(const Tensor& t, int slot) { return apply_to_slot(t, slot, t.frame().inverse()); }

/// Inverse of metric_dual.
inline Tensor metric_lower(const Tensor& t, int slot) { return apply_to_slot(t, slot, t.frame().metric()); }

inline Tensor raise_all(const Tensor& t) {
  Tensor r = t;
  for (int s = 0; s < t.rank(); ++s) r = metric_dual(r, s);
  return r;
}

/// Insert a contravariant vector into one slot; rank drops by one.
inline Tensor contract_vector(const Tensor& t, int slot, std::span<const double> v) {
  if (slot < 0 || slot >= t.rank()) throw Error(Errc::SlotOutOfRange, "slot out of range");
  const int n = t.dim();
  if (static_cast<int>(v.size()) != n) throw Error(Errc::ShapeMismatch, "vector has wrong length");
  const std::size_t inner = ipow(n, t.rank() - slot - 1);
  const std::size_t outer_count = ipow(n, slot);
  std::vector<double> c(outer_count * inner, 0.0);
  for (std::size_t o = 0; o < outer_count; ++o)
    for (int a = 0; a < n; ++a) {
      if (v[a] == 0.0) continue;
      const std::size_t src = (o * n + a) * inner;
      for (std::size_t i = 0; i < inner; ++i) c[o * inner + i] += v[a] * t[src + i];
    }
  return Tensor(t.frame_ref(), t.rank() - 1, std::move(c));
}

/// T(v_1, ..., v_r).
inline double evaluate(const Tensor& t, std::span<const Vector> vectors) {
  if (static_cast<int>(vectors.size()) != t.rank()) throw Error(Errc::ArityMismatch, "need one vector per slot");
  Tensor r = t;
  for (int k = t.rank() - 1; k >= 0; --k) r = contract_vector(r, k, vectors[k]);
  return r.scalar_value();
}

/// T1 (i)x(j) T2: contraction through g^{-1} of slot i of T1 with slot j of T2.
/// Result slots: T1's remaining slots, then T2's remaining slots.
inline Tensor contract_ij(const Tensor& t1, int i, const Tensor& t2, int j) {
  check_same_frame(t1, t2);
  if (i < 0 || i >= t1.rank() || j < 0 || j >= t2.rank())
    throw Error(Errc::SlotOutOfRange, "contraction slot out of range");
  const int n = t1.dim();
  const int r = t1.rank(), s = t2.rank();
  if (r + s - 2 > kMaxRank) throw Error(Errc::RankOutOfRange, "contraction result exceeds rank cap");

  std::vector<int> o1;
  for (int k = 0; k < r; ++k)
    if (k != i) o1.push_back(k);
  o1.push_back(i);
  std::vector<int> o2{j};
  for (int k = 0; k < s; ++k)
    if (k != j) o2.push_back(k);

  const Tensor a = permute_slots(t1, o1);
  const Tensor b = metric_dual(permute_slots(t2, o2), 0);
  const Eigen::Index rows = static_cast<Eigen::Index>(ipow(n, r - 1));
  const Eigen::Index cols = static_cast<Eigen::Index>(ipow(n, s - 1));
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> am(a.components().data(), rows, n);
  Eigen::Map<const RowMat> bm(b.components().data(), n, cols);
  RowMat prod = am * bm;
  return Tensor(t1.frame_ref(), r + s - 2, std::vector<double>(prod.data(), prod.data() + prod.size()));
}

/// Complete contraction of all slots in order, through g^{-1}.
inline double inner_full(const Tensor& b1, const Tensor& b2) {
  check_same_frame(b1, b2);
  if (b1.rank() != b2.rank()) throw Error(Errc::RankMismatch, "inner_full needs equal ranks");
  const Tensor r = raise_all(b2);
  double s = 0;
  for (std::size_t k = 0; k < b1.size(); ++k) s += b1[k] * r[k];
  return s;
}

/// Trace g^{ab} T_ab of a rank-2 tensor.
inline double trace(const Tensor& t) {
  if (t.rank() != 2) throw Error(Errc::RankMismatch, "trace needs rank 2");
  double s = 0;
  const int n = t.dim();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += t.frame().ginv(a, b) * t(a, b);
  return s;
}

inline bool is_symmetric2(const Tensor& t, double rel_tol = kTolAlg) {
  if (t.rank() != 2) return false;
  return max_abs_diff(t, swap_slots(t, 0, 1)) <= rel_tol * std::max(t.max_abs(), 1e-300);
}

/// Canonical volume form, eta_{01..N-1} = orientation * sqrt|det g|.
inline Tensor volume_form(const FrameRef& f) {
  const int n = f->dim();
  std::vector<double> c(ipow(n, n), 0.0);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const double v = f->orientation() * f->sqrt_abs_det();
  do {
    c[flatten(perm, n)] = permutation_sign(perm) * v;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Tensor(f, n, std::move(c));
}

/// Components A(e_a, e_b, ...) in a new basis {e_a} given as contravariant vectors.
inline Tensor components_in_basis(const Tensor& t, const std::vector<Vector>& basis) {
  const int n = t.dim();
  Matrix m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = basis.at(a).at(b);
  Tensor r = t;
  for (int s = 0; s < t.rank(); ++s) r = apply_to_slot(r, s, m);
  return r;
}

/// g-orthonormal basis: e_0 is the normalised future axis, the rest Gram-Schmidt
/// of the coordinate axes.
inline std::vector<Vector> orthonormal_basis(const LorentzFrame& f) {
  const int n = f.dim();
  std::vector<Vector> basis;
  Vector u = f.future_axis();
  const double nu = std::sqrt(-f.dot(u, u));
  for (double& x : u) x /= nu;
  basis.push_back(u);

  std::vector<int> order;
  for (int a = 1; a < n; ++a) order.push_back(a);
  order.push_back(0);
  for (int a : order) {
    if (static_cast<int>(basis.size()) == n) break;
    Vector v(n, 0.0);
    v[a] = 1.0;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const double sgn = k == 0 ? -1.0 : 1.0;
      const double c = sgn * f.dot(v, basis[k]);
      for (int b = 0; b < n; ++b) v[b] -= c * basis[k][b];
    }
    const double q = f.dot(v, v);
    double vmax = 0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    if (q <= 1e-8 * f.metric_scale() || vmax < 1e-8) continue;
    const double nv = std::sqrt(q);
    for (double& x : v) x /= nv;
    basis.push_back(v);
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Causal character of vectors

enum class CausalKind { timelike, null, spacelike, zero };
enum class TimeOrientation { future, past, none };

struct CausalClass {
  CausalKind kind;
  TimeOrientation orientation;
  friend bool operator==(const CausalClass&, const CausalClass&) = default;
};

inline std::string to_string(CausalKind k) {
  switch (k) {
    case CausalKind::timelike: return "timelike";
    case CausalKind::null: return "null";
    case CausalKind::spacelike: return "spacelike";
    case CausalKind::zero: return "zero";
  }
  return "?";
}

inline std::string to_string(TimeOrientation o) {
  switch (o) {
    case TimeOrientation::future: return "future";
    case TimeOrientation::past: return "past";
    case TimeOrientation::none: return "n/a";
  }
  return "?";
}

inline CausalClass classify_vector(const LorentzFrame& f, std::span<const double> v) {
  if (static_cast<int>(v.size()) != f.dim()) throw Error(Errc::ShapeMismatch, "vector has wrong length");
  double vmax = 0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (vmax == 0.0) return {CausalKind::zero, TimeOrientation::none};
  const double q = f.dot(v, v);
  const double scale = vmax * vmax * f.metric_scale();
  if (q > kTolClass * scale) return {CausalKind::spacelike, TimeOrientation::none};
  const CausalKind kind = q < -kTolClass * scale ? CausalKind::timelike : CausalKind::null;
  const double tilt = f.dot(v, f.future_axis());
  return {kind, tilt < 0 ? TimeOrientation::future : TimeOrientation::past};
}

inline CausalClass classify_vector(const FrameRef& f, std::span<const double> v) { return classify_vector(*f, v); }

}  // namespace sek
