#pragma once

// r-fold (n_1, ..., n_r)-forms and their basic superenergy tensors.

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "sek/detail/block_array.hpp"
#include "sek/lorentz_core.hpp"

namespace sek {

inline constexpr int kMaxFolds = 4;

/// Block degrees plus the slot permutation that makes blocks contiguous:
/// slot k of the permuted tensor is slot permutation[k] of the original.
struct BlockStructure {
  std::vector<int> degrees;
  std::vector<int> permutation;

  int folds() const { return static_cast<int>(degrees.size()); }
  friend bool operator==(const BlockStructure&, const BlockStructure&) = default;
};

/// A tensor together with a validated block structure.
class FoldedForm {
 public:
  FoldedForm(Tensor tensor, BlockStructure structure, double rel_tol = kTolAlg);

  const Tensor& tensor() const { return tensor_; }
  const BlockStructure& structure() const { return structure_; }
  int folds() const { return structure_.folds(); }
  const std::vector<int>& degrees() const { return structure_.degrees; }

  /// The permuted tensor with contiguous blocks.
  const Tensor& contiguous() const { return contiguous_; }

 private:
  Tensor tensor_;
  BlockStructure structure_;
  Tensor contiguous_;
};

/// Selects which blocks get dualized; P = 1 + sum_i 2^i bits[i].
struct DualIndex {
  std::vector<int> bits;

  int P() const {
    int p = 1;
    for (std::size_t i = 0; i < bits.size(); ++i) p += bits[i] << i;
    return p;
  }

  static DualIndex from_P(int P, int folds) {
    if (P < 1 || P > (1 << folds)) throw Error(Errc::BadParams, "dual index out of range");
    DualIndex d;
    for (int i = 0; i < folds; ++i) d.bits.push_back(((P - 1) >> i) & 1);
    return d;
  }
};

struct SuperenergyTensor {
  Tensor tensor;
  int folds;
};

namespace detail {

inline bool swap_antisymmetric(const Tensor& t, int i, int j, double abs_tol) {
  return (t + swap_slots(t, i, j)).max_abs() <= abs_tol;
}

inline void check_within_blocks(const Tensor& contiguous, const std::vector<int>& degrees, double abs_tol) {
  int off = 0;
  for (int d : degrees) {
    for (int k = off; k + 1 < off + d; ++k)
      if (!swap_antisymmetric(contiguous, k, k + 1, abs_tol))
        throw Error(Errc::InvalidStructure, "tensor is not antisymmetric within a declared block");
    off += d;
  }
}

}  // namespace detail

inline FoldedForm::FoldedForm(Tensor tensor, BlockStructure structure, double rel_tol)
    : tensor_(std::move(tensor)), structure_(std::move(structure)), contiguous_(tensor_) {
  const int m = tensor_.rank();
  const int n = tensor_.dim();
  if (structure_.permutation.empty() && m > 0) {
    structure_.permutation.resize(m);
    std::iota(structure_.permutation.begin(), structure_.permutation.end(), 0);
  }
  int total = 0;
  for (int d : structure_.degrees) {
    if (d < 1 || d > n) throw Error(Errc::InvalidStructure, "block degree must be in 1..N");
    total += d;
  }
  if (total != m) throw Error(Errc::InvalidStructure, "block degrees must sum to the rank");
  contiguous_ = permute_slots(tensor_, structure_.permutation);
  detail::check_within_blocks(contiguous_, structure_.degrees, rel_tol * tensor_.max_abs());
}

/// Minimal block structure: slots i, j are linked when swapping them negates
/// A; connected components are the blocks, ordered by their smallest slot.
inline BlockStructure detect_blocks(const Tensor& a, double rel_tol = kTolAlg) {
  const int m = a.rank();
  if (m == 0) throw Error(Errc::RankZero, "block detection needs rank >= 1");
  const double scale = a.max_abs();
  if (scale == 0.0) throw Error(Errc::ZeroTensor, "block structure of the zero tensor is ambiguous");

  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (detail::swap_antisymmetric(a, i, j, rel_tol * scale)) parent[find(j)] = find(i);

  BlockStructure s;
  std::vector<bool> done(m, false);
  for (int i = 0; i < m; ++i) {
    if (done[i]) continue;
    const int root = find(i);
    int d = 0;
    for (int j = i; j < m; ++j)
      if (find(j) == root) {
        s.permutation.push_back(j);
        done[j] = true;
        ++d;
      }
    s.degrees.push_back(d);
  }
  return s;
}

/// Detected structure, or (1, ..., 1) for the zero tensor.
inline FoldedForm fold(const Tensor& a) {
  if (a.rank() > 0 && a.max_abs() == 0.0) return FoldedForm(a, BlockStructure{std::vector<int>(a.rank(), 1), {}});
  return FoldedForm(a, detect_blocks(a));
}

/// Vector i goes into the first slot of block i.
inline Tensor interior_contraction(const FoldedForm& a, std::span<const Vector> vectors) {
  if (static_cast<int>(vectors.size()) != a.folds()) throw Error(Errc::ArityMismatch, "need one vector per block");
  Tensor t = a.contiguous();
  int start = 0;
  for (int i = 0; i < a.folds(); ++i) {
    t = contract_vector(t, start - i, vectors[i]);
    start += a.degrees()[i];
  }
  return t;
}

/// Multiple Hodge dual *_P A. Dualized blocks go from degree n to N - n.
inline FoldedForm hodge_dual(const FoldedForm& a, const DualIndex& p) {
  if (static_cast<int>(p.bits.size()) != a.folds()) throw Error(Errc::ArityMismatch, "one bit per block");
  if (p.P() == 1) return a;
  auto b = detail::to_block_array(a.contiguous(), a.degrees());
  for (int i = 0; i < a.folds(); ++i)
    if (p.bits[i]) b = detail::dualize(b, i);
  return FoldedForm(detail::to_dense(b), BlockStructure{b.degrees, {}});
}

inline Tensor odot(const FoldedForm& a, const FoldedForm& b) {
  check_same_frame(a.tensor(), b.tensor());
  if (a.degrees() != b.degrees()) throw Error(Errc::StructureMismatch, "odot needs identical block degrees");
  return detail::odot_blocks(detail::to_block_array(a.contiguous(), a.degrees()),
                             detail::to_block_array(b.contiguous(), b.degrees()));
}

/// T{f eta} = -f^2 g / 2.
inline Tensor superenergy_nform(double f, const FrameRef& frame) { return (-0.5 * f * f) * metric_tensor(frame); }

inline SuperenergyTensor superenergy(const FoldedForm& a) {
  const int n = a.tensor().dim();
  const int r = a.folds();
  if (r > kMaxFolds) throw Error(Errc::FoldTooLarge, "at most 4 folds are supported");
  if (r == 1 && a.degrees()[0] == n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    const double f = a.contiguous().at(idx) / (a.tensor().frame().orientation() * a.tensor().frame().sqrt_abs_det());
    return {superenergy_nform(f, a.tensor().frame_ref()), 1};
  }
  for (int d : a.degrees())
    if (d == n) throw Error(Errc::UnsupportedNBlock, "degree-N blocks are only supported for single N-forms");

  const auto base = detail::to_block_array(a.contiguous(), a.degrees());
  std::vector<double> acc(ipow(n, 2 * r), 0.0);
  for (int p = 1; p <= (1 << r); ++p) {
    auto dual = base;
    for (int i = 0; i < r; ++i)
      if (((p - 1) >> i) & 1) dual = detail::dualize(dual, i);
    const Tensor term = detail::odot_blocks(dual, dual);
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += term[k];
  }
  for (double& x : acc) x *= 0.5;
  return {Tensor(a.tensor().frame_ref(), 2 * r, std::move(acc)), r};
}

inline SuperenergyTensor superenergy(const Tensor& a) {
  if (a.rank() == 0) throw Error(Errc::RankZero, "superenergy needs rank >= 1");
  if (a.max_abs() == 0.0 && a.rank() > kMaxFolds) throw Error(Errc::FoldTooLarge, "at most 4 folds are supported");
  return superenergy(fold(a));
}

/// Rank-2 superenergy of a p-form by the closed expression
/// T(x,y) = [g(i_x W, i_y W) - g(W,W) g(x,y) / 2p] / (p-1)!.
inline Tensor superenergy_pform_closed(const Tensor& omega) {
  const int p = omega.rank();
  const int n = omega.dim();
  if (p < 1) throw Error(Errc::RankZero, "need a p-form with p >= 1");
  const double tol = kTolAlg * omega.max_abs();
  for (int k = 0; k + 1 < p; ++k)
    if (!detail::swap_antisymmetric(omega, k, k + 1, tol))
      throw Error(Errc::NotAntisymmetric, "input is not a p-form");

  Tensor raised = omega;
  for (int s = 1; s < p; ++s) raised = metric_dual(raised, s);
  const std::size_t rest = ipow(n, p - 1);
  double fact = 1;
  for (int k = 2; k < p; ++k) fact *= k;
  const double norm = inner_full(omega, omega);

  std::vector<double> c(ipow(n, 2));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double s = 0;
      for (std::size_t i = 0; i < rest; ++i) s += omega[a * rest + i] * raised[b * rest + i];
      c[a * n + b] = (s - norm * omega.frame().g(a, b) / (2.0 * p)) / fact;
    }
  return Tensor(omega.frame_ref(), 2, std::move(c));
}

/// w_1 ^ ... ^ w_p of 1-forms, (w_1 ^ ... ^ w_p)_{a_1..a_p} = det[w_i(a_j)].
inline Tensor wedge(std::span<const Tensor> forms) {
  if (forms.empty()) throw Error(Errc::BadParams, "empty wedge product");
  const int p = static_cast<int>(forms.size());
  const int n = forms[0].dim();
  for (const auto& w : forms) {
    if (w.rank() != 1) throw Error(Errc::RankMismatch, "wedge expects 1-forms");
    check_same_frame(w, forms[0]);
  }
  std::vector<double> c(ipow(n, p), 0.0);
  std::vector<int> idx(p);
  Matrix m(p, p);
  for (std::size_t f = 0; f < c.size(); ++f) {
    unflatten(f, n, idx);
    if (permutation_sign(idx) == 0) continue;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) m(i, j) = forms[i][idx[j]];
    c[f] = m.determinant();
  }
  return Tensor(forms[0].frame_ref(), p, std::move(c));
}

inline Tensor wedge(const Tensor& a, const Tensor& b) {
  const Tensor fs[] = {a, b};
  return wedge(fs);
}

}  // namespace sek
