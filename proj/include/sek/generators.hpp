#pragma once

// Seeded random generators for frames, forms and test tensors.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sek/detail/block_array.hpp"
#include "sek/folded_forms.hpp"
#include "sek/lorentz_core.hpp"

namespace sek::gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline double normal(Rng& rng) { return std::normal_distribution<double>()(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Matrix minkowski_matrix(int n) {
  Matrix eta = Matrix::Identity(n, n);
  eta(0, 0) = -1;
  return eta;
}

/// Random proper orthochronous Lorentz transformation in orthonormal coordinates.
inline Matrix random_lorentz(int n, Rng& rng, double max_rapidity = 1.2) {
  const int m = n - 1;
  Matrix q = Matrix::Identity(n, n);
  if (m >= 1) {
    Matrix gauss(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) gauss(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(gauss);
    Matrix rot = qr.householderQ();
    if (rot.determinant() < 0) rot.col(0) *= -1;
    q.bottomRightCorner(m, m) = rot;
  }
  Eigen::VectorXd dir(m);
  for (int i = 0; i < m; ++i) dir(i) = normal(rng);
  dir.normalize();
  const double eta = uniform(rng, 0, max_rapidity);
  Matrix boost = Matrix::Identity(n, n);
  boost(0, 0) = std::cosh(eta);
  for (int i = 0; i < m; ++i) {
    boost(0, i + 1) = boost(i + 1, 0) = std::sinh(eta) * dir(i);
    for (int j = 0; j < m; ++j) boost(i + 1, j + 1) += (std::cosh(eta) - 1) * dir(i) * dir(j);
  }
  return boost * q;
}

/// Random Lorentzian metric g = M^T eta M with future axis M^{-1} e0.
inline FrameRef random_frame(int n, Rng& rng, double spread = 0.3) {
  Matrix m = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) += spread * uniform(rng, -1, 1);
  m = random_lorentz(n, rng, 0.5) * m;
  const Matrix g = m.transpose() * minkowski_matrix(n) * m;
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(n);
  e0(0) = 1;
  const Eigen::VectorXd axis = m.lu().solve(e0);
  return make_frame(n, 0.5 * (g + g.transpose()), Vector(axis.data(), axis.data() + n),
                    uniform(rng, 0, 1) < 0.5 ? 1 : -1);
}

/// Orthonormal basis of f, then a random Lorentz transformation of it.
inline std::vector<Vector> random_orthonormal_basis(const LorentzFrame& f, Rng& rng, double max_rapidity = 1.2) {
  const auto base = orthonormal_basis(f);
  const int n = f.dim();
  const Matrix l = random_lorentz(n, rng, max_rapidity);
  std::vector<Vector> out(n, Vector(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) out[a][c] += l(b, a) * base[b][c];
  return out;
}

/// Coframe theta^a with theta^a(e_b) = delta^a_b.
inline std::vector<Tensor> coframe(const FrameRef& f, const std::vector<Vector>& basis) {
  std::vector<Tensor> out;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    const Tensor w = lower_vector(f, basis[a]);
    out.push_back(a == 0 ? -w : w);
  }
  return out;
}

inline Tensor random_covector(const FrameRef& f, Rng& rng) {
  Vector c(f->dim());
  for (double& x : c) x = uniform(rng, -1, 1);
  return covector(f, c);
}

/// Random block-antisymmetric tensor with the given contiguous block degrees.
inline Tensor random_folded(const FrameRef& f, const std::vector<int>& degrees, Rng& rng) {
  const int n = f->dim();
  detail::BlockArray b{f, degrees, detail::combo_shape(n, degrees), {}};
  b.data.resize(detail::shape_size(b.shape));
  for (double& x : b.data) x = uniform(rng, -1, 1);
  return detail::to_dense(b);
}

inline Tensor random_pform(const FrameRef& f, int p, Rng& rng) { return random_folded(f, {p}, rng); }

/// Random future null vector e0 + w in the given orthonormal basis, scaled by s.
inline Vector random_null(const std::vector<Vector>& basis, Rng& rng, double s = 1) {
  const int n = static_cast<int>(basis.size());
  Vector w(n - 1);
  double norm = 0;
  for (double& x : w) {
    x = normal(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  Vector k(n, 0.0);
  for (int a = 0; a < n; ++a) {
    k[a] = basis[0][a];
    for (int i = 0; i < n - 1; ++i) k[a] += w[i] / norm * basis[i + 1][a];
    k[a] *= s;
  }
  return k;
}

}  // namespace sek::gen
