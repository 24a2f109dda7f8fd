#pragma once

// Eigen-analysis of a symmetric rank-2 tensor T relative to the metric:
// eigenvectors u with T(., u) = lambda g(., u), i.e. of the mixed form g^{-1} T.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sek/lorentz_core.hpp"

namespace sek::detail {

/// Relative gap below which neighbouring eigenvalues are treated as one.
inline constexpr double kEigenClusterGap = 1e-7;

struct Eigenspace {
  double lambda;
  Matrix basis;  // N x d, Euclidean-orthonormal columns
};

inline std::vector<Eigenspace> real_eigenspaces(const Tensor& t, double rel_gap = kEigenClusterGap) {
  const LorentzFrame& f = t.frame();
  const int n = f.dim();
  Matrix tm(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) tm(a, b) = t(a, b);
  const Matrix mixed = f.inverse() * tm;
  const double scale = std::max(mixed.cwiseAbs().maxCoeff(), 1e-300);

  Eigen::EigenSolver<Matrix> es(mixed, false);
  std::vector<double> reals;
  for (int i = 0; i < n; ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) <= rel_gap * scale) reals.push_back(ev.real());
  }
  std::sort(reals.begin(), reals.end());

  std::vector<Eigenspace> spaces;
  std::size_t i = 0;
  while (i < reals.size()) {
    std::size_t j = i + 1;
    double sum = reals[i];
    while (j < reals.size() && reals[j] - reals[j - 1] <= rel_gap * scale) sum += reals[j++];
    const double lambda = sum / static_cast<double>(j - i);
    const Matrix shifted = mixed - lambda * Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int nullity = 0;
    for (int k = 0; k < n; ++k)
      if (sv(k) <= rel_gap * scale) ++nullity;
    if (nullity > 0) spaces.push_back({lambda, svd.matrixV().rightCols(nullity)});
    i = j;
  }
  return spaces;
}

/// Orthonormal eigenframe of a Segre-type [1,1...1] tensor.
struct LorentzEigenframe {
  std::vector<Vector> basis;  // basis[0] future timelike, the rest spacelike; all unit
  double mu = 0;              // T(e0, e0)
  std::vector<double> p;      // T(e_i, e_i), ascending
};

inline void canonical_sign(Vector& v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[best]) + 1e-12) best = k;
  if (v[best] < 0)
    for (double& x : v) x = -x;
}

/// Diagonalize T in a g-orthonormal basis; nullopt unless T has real eigenvalues,
/// a complete eigenbasis and a timelike eigenvector.
inline std::optional<LorentzEigenframe> lorentz_diagonalize(const Tensor& t) {
  const LorentzFrame& f = t.frame();
  const int n = f.dim();
  const double gscale = f.metric_scale();
  std::vector<Vector> timelike, spacelike;
  for (const auto& sp : real_eigenspaces(t)) {
    const Matrix gram = sp.basis.transpose() * f.metric() * sp.basis;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    for (int k = 0; k < gram.rows(); ++k) {
      const double nu = es.eigenvalues()(k);
      if (std::abs(nu) <= 1e-8 * gscale) return std::nullopt;  // null direction in an eigenspace
      const Eigen::VectorXd v = sp.basis * es.eigenvectors().col(k) / std::sqrt(std::abs(nu));
      Vector vv(v.data(), v.data() + n);
      (nu < 0 ? timelike : spacelike).push_back(std::move(vv));
    }
  }
  if (timelike.size() != 1 || static_cast<int>(spacelike.size()) != n - 1) return std::nullopt;

  LorentzEigenframe ef;
  Vector e0 = timelike[0];
  if (f.dot(e0, f.future_axis()) > 0)
    for (double& x : e0) x = -x;
  ef.basis.push_back(e0);
  for (auto& v : spacelike) canonical_sign(v);

  std::vector<std::pair<double, Vector>> sp;
  for (auto& v : spacelike) {
    const Vector vs[] = {v, v};
    sp.emplace_back(evaluate(t, vs), v);
  }
  std::stable_sort(sp.begin(), sp.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [val, v] : sp) {
    ef.p.push_back(val);
    ef.basis.push_back(v);
  }
  const Vector e00[] = {e0, e0};
  ef.mu = evaluate(t, e00);

  // Certificate: the basis must be g-orthonormal and diagonalize T.
  const double tscale = std::max(t.max_abs(), 1e-300);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      const double gab = f.dot(ef.basis[a], ef.basis[b]);
      const double want = a != b ? 0.0 : (a == 0 ? -1.0 : 1.0);
      if (std::abs(gab - want) > 1e-8) return std::nullopt;
      if (a != b) {
        const Vector ab[] = {ef.basis[a], ef.basis[b]};
        if (std::abs(evaluate(t, ab)) > 1e-8 * tscale) return std::nullopt;
      }
    }
  return ef;
}

}  // namespace sek::detail
