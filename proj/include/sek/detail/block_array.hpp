#pragma once

// Compressed storage for r-fold forms: each antisymmetric block of degree d is
// indexed by its strictly increasing index tuples (C(N, d) of them), so Hodge
// duals and the odot product work on independent components only.

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#include "sek/lorentz_core.hpp"

namespace sek::detail {

/// k-subsets of {0..n-1} as bitmasks in lexicographic order of their tuples.
struct Combos {
  int n = 0;
  int k = 0;
  std::vector<std::uint32_t> masks;
  std::vector<std::vector<int>> tuples;
  std::array<int, 64> index{};

  int size() const { return static_cast<int>(masks.size()); }
};

inline std::vector<int> mask_to_tuple(std::uint32_t mask) {
  std::vector<int> t;
  for (int b = 0; mask; ++b, mask >>= 1)
    if (mask & 1u) t.push_back(b);
  return t;
}

inline Combos make_combos(int n, int k) {
  Combos c;
  c.n = n;
  c.k = k;
  c.index.fill(-1);
  for (std::uint32_t m = 0; m < (1u << n); ++m)
    if (std::popcount(m) == k) c.tuples.push_back(mask_to_tuple(m));
  std::sort(c.tuples.begin(), c.tuples.end());
  for (const auto& t : c.tuples) {
    std::uint32_t m = 0;
    for (int b : t) m |= 1u << b;
    c.index[m] = static_cast<int>(c.masks.size());
    c.masks.push_back(m);
  }
  return c;
}

/// det of the (rows x cols) submatrix of m.
inline double minor_det(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) return 1.0;
  Matrix s(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) s(i, j) = m(rows[i], cols[j]);
  return s.determinant();
}

/// Matrix G^{IK} = det(g^{-1}[I, K]) over increasing k-tuples; raises all
/// indices of an antisymmetric k-form in compressed storage.
inline Matrix inverse_metric_minors(const LorentzFrame& f, const Combos& c) {
  Matrix g(c.size(), c.size());
  for (int i = 0; i < c.size(); ++i)
    for (int j = 0; j < c.size(); ++j) g(i, j) = minor_det(f.inverse(), c.tuples[i], c.tuples[j]);
  return g;
}

/// Hodge star on compressed d-forms: (*w)_J = sum_I w^I eta_{I J}.
inline Matrix hodge_matrix(const LorentzFrame& f, int degree) {
  const int n = f.dim();
  const Combos src = make_combos(n, degree);
  const Combos dst = make_combos(n, n - degree);
  const Matrix raise = inverse_metric_minors(f, src);
  const double eta = f.orientation() * f.sqrt_abs_det();
  const std::uint32_t full = (1u << n) - 1u;
  Matrix h = Matrix::Zero(dst.size(), src.size());
  for (int j = 0; j < dst.size(); ++j) {
    const int comp = src.index[full & ~dst.masks[j]];
    std::vector<int> seq = src.tuples[comp];
    seq.insert(seq.end(), dst.tuples[j].begin(), dst.tuples[j].end());
    const double s = eta * permutation_sign(seq);
    for (int k = 0; k < src.size(); ++k) h(j, k) = s * raise(comp, k);
  }
  return h;
}

struct BlockArray {
  FrameRef frame;
  std::vector<int> degrees;
  std::vector<int> shape;  // C(N, d_i)
  std::vector<double> data;

  int folds() const { return static_cast<int>(degrees.size()); }
};

inline std::vector<int> combo_shape(int n, const std::vector<int>& degrees) {
  std::vector<int> s;
  for (int d : degrees) s.push_back(make_combos(n, d).size());
  return s;
}

inline std::size_t shape_size(const std::vector<int>& s) {
  std::size_t p = 1;
  for (int x : s) p *= static_cast<std::size_t>(x);
  return p;
}

/// Read the independent components of a block-contiguous tensor.
inline BlockArray to_block_array(const Tensor& contiguous, const std::vector<int>& degrees) {
  const int n = contiguous.dim();
  BlockArray b{contiguous.frame_ref(), degrees, combo_shape(n, degrees), {}};
  std::vector<Combos> combos;
  for (int d : degrees) combos.push_back(make_combos(n, d));
  b.data.resize(shape_size(b.shape));
  std::vector<int> ci(degrees.size()), idx;
  for (std::size_t flat = 0; flat < b.data.size(); ++flat) {
    std::size_t f = flat;
    for (int i = static_cast<int>(degrees.size()) - 1; i >= 0; --i) {
      ci[i] = static_cast<int>(f % b.shape[i]);
      f /= b.shape[i];
    }
    idx.clear();
    for (std::size_t i = 0; i < degrees.size(); ++i)
      idx.insert(idx.end(), combos[i].tuples[ci[i]].begin(), combos[i].tuples[ci[i]].end());
    b.data[flat] = contiguous.at(idx);
  }
  return b;
}

/// Expand to a dense block-contiguous tensor.
inline Tensor to_dense(const BlockArray& b) {
  const int n = b.frame->dim();
  int rank = 0;
  for (int d : b.degrees) rank += d;
  std::vector<Combos> combos;
  for (int d : b.degrees) combos.push_back(make_combos(n, d));
  std::vector<double> c(ipow(n, rank), 0.0);
  std::vector<int> idx(rank);
  for (std::size_t flat = 0; flat < c.size(); ++flat) {
    unflatten(flat, n, idx);
    int sign = 1;
    std::size_t pos = 0;
    int off = 0;
    for (std::size_t i = 0; i < b.degrees.size() && sign != 0; ++i) {
      std::span<const int> slots(idx.data() + off, b.degrees[i]);
      sign *= permutation_sign(slots);
      std::uint32_t m = 0;
      for (int s : slots) m |= 1u << s;
      pos = pos * b.shape[i] + (sign != 0 ? combos[i].index[m] : 0);
      off += b.degrees[i];
    }
    if (sign != 0) c[flat] = sign * b.data[pos];
  }
  return Tensor(b.frame, rank, std::move(c));
}

/// Multiply mode `mode` of an array of the given shape by m (rows = new extent).
inline std::vector<double> mode_product(const std::vector<double>& data, const std::vector<int>& shape,
                                        int mode, const Matrix& m) {
  std::size_t outer = 1, inner = 1;
  for (int i = 0; i < mode; ++i) outer *= shape[i];
  for (std::size_t i = mode + 1; i < shape.size(); ++i) inner *= shape[i];
  const int src_ext = shape[mode];
  const int dst_ext = static_cast<int>(m.rows());
  std::vector<double> out(outer * dst_ext * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (int a = 0; a < dst_ext; ++a)
      for (int b = 0; b < src_ext; ++b) {
        const double w = m(a, b);
        if (w == 0.0) continue;
        const double* src = data.data() + (o * src_ext + b) * inner;
        double* dst = out.data() + (o * dst_ext + a) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
      }
  return out;
}

inline BlockArray dualize(const BlockArray& b, int block) {
  const int n = b.frame->dim();
  const int d = b.degrees.at(block);
  BlockArray r = b;
  r.data = mode_product(b.data, b.shape, block, hodge_matrix(*b.frame, d));
  r.degrees[block] = n - d;
  r.shape[block] = make_combos(n, n - d).size();
  return r;
}

inline constexpr double kOdotWorkLimit = 4e7;

/// Interior-contraction table of one block: for a leading index a and an
/// increasing (d-1)-tuple I, the position of {a} u I and the sorting sign.
struct LeadExpansion {
  std::vector<int> pos;  // [a * rest + I], -1 when a is in I
  std::vector<int> sign;
  int rest = 0;
};

inline LeadExpansion lead_expansion(int n, int degree) {
  const Combos rest = make_combos(n, degree - 1);
  const Combos full = make_combos(n, degree);
  LeadExpansion e;
  e.rest = rest.size();
  e.pos.assign(n * e.rest, -1);
  e.sign.assign(n * e.rest, 0);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < rest.size(); ++i) {
      if (rest.masks[i] & (1u << a)) continue;
      int below = 0;
      for (int x : rest.tuples[i])
        if (x < a) ++below;
      e.pos[a * e.rest + i] = full.index[rest.masks[i] | (1u << a)];
      e.sign[a * e.rest + i] = (below % 2) ? -1 : 1;
    }
  return e;
}

/// Rows: leading indices (a_1..a_r); columns: increasing rest tuples (I_1..I_r).
inline Matrix lead_matrix(const BlockArray& b, const std::vector<LeadExpansion>& ex) {
  const int n = b.frame->dim();
  const int r = b.folds();
  const std::size_t rows = ipow(n, r);
  std::size_t cols = 1;
  for (const auto& e : ex) cols *= e.rest;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::vector<int> a(r), ri(r);
  for (std::size_t row = 0; row < rows; ++row) {
    unflatten(row, n, a);
    for (std::size_t col = 0; col < cols; ++col) {
      std::size_t c = col;
      for (int i = r - 1; i >= 0; --i) {
        ri[i] = static_cast<int>(c % ex[i].rest);
        c /= ex[i].rest;
      }
      int sign = 1;
      std::size_t pos = 0;
      for (int i = 0; i < r; ++i) {
        const int k = a[i] * ex[i].rest + ri[i];
        if (ex[i].pos[k] < 0) {
          sign = 0;
          break;
        }
        sign *= ex[i].sign[k];
        pos = pos * b.shape[i] + ex[i].pos[k];
      }
      if (sign != 0) m(row, col) = sign * b.data[pos];
    }
  }
  return m;
}

/// (A odot B) with argument slots interleaved (x1, y1, x2, y2, ...). The
/// 1/(n_i - 1)! weights cancel against the (n_i - 1)! multiplicity of the
/// full contraction restricted to increasing tuples.
inline Tensor odot_blocks(const BlockArray& a, const BlockArray& b) {
  if (a.degrees != b.degrees) throw Error(Errc::StructureMismatch, "block degrees differ");
  const int n = a.frame->dim();
  const int r = a.folds();
  std::vector<LeadExpansion> ex;
  std::vector<int> rest_shape;
  for (int d : a.degrees) {
    ex.push_back(lead_expansion(n, d));
    rest_shape.push_back(ex.back().rest);
  }
  const double work = static_cast<double>(ipow(n, r)) * static_cast<double>(shape_size(rest_shape));
  if (work > kOdotWorkLimit) throw Error(Errc::ResourceLimit, "odot product too large for dense evaluation");

  const Matrix am = lead_matrix(a, ex);
  Matrix bm = lead_matrix(b, ex);
  // Raise the rest indices of B block by block (acting on columns).
  for (int i = 0; i < r; ++i) {
    const Matrix g = inverse_metric_minors(*a.frame, make_combos(n, a.degrees[i] - 1));
    std::vector<int> shape{static_cast<int>(bm.rows())};
    shape.insert(shape.end(), rest_shape.begin(), rest_shape.end());
    std::vector<double> flat(bm.size());
    for (Eigen::Index row = 0; row < bm.rows(); ++row)
      for (Eigen::Index col = 0; col < bm.cols(); ++col) flat[row * bm.cols() + col] = bm(row, col);
    flat = mode_product(flat, shape, i + 1, g);
    for (Eigen::Index row = 0; row < bm.rows(); ++row)
      for (Eigen::Index col = 0; col < bm.cols(); ++col) bm(row, col) = flat[row * bm.cols() + col];
  }
  const Matrix prod = am * bm.transpose();

  std::vector<double> c(ipow(n, 2 * r));
  std::vector<int> ai(r), bi(r), out(2 * r);
  for (Eigen::Index row = 0; row < prod.rows(); ++row) {
    unflatten(row, n, ai);
    for (Eigen::Index col = 0; col < prod.cols(); ++col) {
      unflatten(col, n, bi);
      for (int i = 0; i < r; ++i) {
        out[2 * i] = ai[i];
        out[2 * i + 1] = bi[i];
      }
      c[flatten(out, n)] = prod(row, col);
    }
  }
  return Tensor(a.frame, 2 * r, std::move(c));
}

}  // namespace sek::detail
