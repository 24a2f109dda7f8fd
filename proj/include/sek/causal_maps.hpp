#pragma once

// Pointwise causal relations between Lorentzian metrics and generalized
// symmetries, decided through the DP- cone of rank-2 tensors.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sek/causal_cones.hpp"
#include "sek/detail/lorentz_eigen.hpp"
#include "sek/folded_forms.hpp"
#include "sek/lorentz_core.hpp"

namespace sek {

struct PullbackPoint {
  FrameRef base_frame;
  Tensor candidate;                 // phi* h, or a deformation L
  std::optional<Matrix> jacobian;   // phi' at the point
};

namespace detail {

/// Numerical rank test: smallest singular value below 1e-12 of the largest.
inline bool rank_deficient(const Matrix& m) {
  const Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(0) == 0 || s(s.size() - 1) <= 1e-12 * s(0);
}

}  // namespace detail

/// (phi* h)_{bc} = J^a_b h_{ad} J^d_c, with J(a, b) = d phi^a / d x^b.
inline Tensor pullback_metric(const FrameRef& base, const Matrix& jacobian, const Tensor& h) {
  const int n = base->dim();
  if (jacobian.rows() != n || jacobian.cols() != n || h.dim() != n || h.rank() != 2)
    throw Error(Errc::ShapeMismatch, "jacobian and target tensor must be N x N");
  if (detail::rank_deficient(jacobian)) throw Error(Errc::SingularJacobian, "jacobian is not invertible");
  Matrix hm(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) hm(a, b) = h(a, b);
  const Matrix p = jacobian.transpose() * hm * jacobian;
  std::vector<double> c(n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) c[a * n + b] = 0.5 * (p(a, b) + p(b, a));
  return Tensor(base, 2, std::move(c));
}

/// e^{2f} with phg = e^{2f} g, if phg is a positive multiple of the metric.
inline std::optional<double> conformal_factor(const Tensor& phg, double tol = kTolAlg) {
  detail::require_symmetric(phg);
  const double c = trace(phg) / phg.dim();
  const double norm = phg.max_abs();
  if (norm == 0 || c <= 0) return std::nullopt;
  if (max_abs_diff(phg, c * metric_tensor(phg.frame_ref())) > tol * norm) return std::nullopt;
  return c;
}

/// Null eigenvectors of phg relative to g, normalised to -g(k, u) = 1 with u the unit future axis.
inline std::vector<Vector> canonical_null_directions(const Tensor& phg) {
  detail::require_symmetric(phg);
  const LorentzFrame& f = phg.frame();
  const int n = f.dim();
  const Vector u = orthonormal_basis(f)[0];
  const double gscale = f.metric_scale();
  std::vector<Vector> out;
  auto push = [&](Vector k) {
    const double s = -f.dot(k, u);
    if (std::abs(s) < 1e-14) return;
    for (double& x : k) x /= s;
    out.push_back(std::move(k));
  };
  for (const auto& sp : detail::real_eigenspaces(phg)) {
    const Matrix gram = sp.basis.transpose() * f.metric() * sp.basis;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    std::vector<Vector> neg, pos;
    for (int k = 0; k < gram.rows(); ++k) {
      const double nu = es.eigenvalues()(k);
      const Eigen::VectorXd v = sp.basis * es.eigenvectors().col(k);
      if (std::abs(nu) <= 1e-8 * gscale) {
        push(Vector(v.data(), v.data() + n));
        continue;
      }
      const Eigen::VectorXd w = v / std::sqrt(std::abs(nu));
      (nu < 0 ? neg : pos).emplace_back(w.data(), w.data() + n);
    }
    if (neg.size() != 1 || pos.empty()) continue;
    const Vector& t = neg[0];
    for (std::size_t j = 0; j < pos.size(); ++j)
      for (double s : j == 0 ? std::vector<double>{1.0, -1.0} : std::vector<double>{1.0}) {
        Vector k(t);
        for (int a = 0; a < n; ++a) k[a] += s * pos[j][a];
        push(std::move(k));
      }
  }
  if (static_cast<int>(out.size()) > n) out.resize(n);
  return out;
}

struct CausalRelVerdict {
  bool properly_related = false;
  bool orientation_flipped = false;
  int canonical_null_count = 0;
  std::optional<double> conformal_factor;
  std::optional<std::vector<Vector>> witness;
  DPVerdict dp;
};

/// Jacobian and target frame, used only to detect an orientation flip.
struct MapData {
  Matrix jacobian;
  FrameRef target;
};

inline CausalRelVerdict check_proper_causal(const Tensor& phg, const std::optional<MapData>& map = std::nullopt) {
  detail::require_symmetric(phg);
  const LorentzFrame& f = phg.frame();
  const int n = f.dim();
  Matrix m(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m(a, b) = phg(a, b);
  if (detail::rank_deficient(m)) throw Error(Errc::DegenerateCandidate, "candidate tensor is degenerate");

  CausalRelVerdict v;
  v.dp = check_dp2_exact(phg, DPSign::minus);
  v.properly_related = v.dp.member;
  v.witness = v.dp.witness;
  if (map) {
    const Vector e0 = orthonormal_basis(f)[0];
    Vector img(n, 0.0);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) img[a] += map->jacobian(a, b) * e0[b];
    v.orientation_flipped = map->target->dot(img, map->target->future_axis()) > 0;
  }
  v.canonical_null_count = static_cast<int>(canonical_null_directions(phg).size());
  v.conformal_factor = conformal_factor(phg);
  return v;
}

struct SymmetryVerdict {
  bool feasible = false;
  std::optional<double> psi_max;  // feasible set is (-inf, psi_max]
  std::optional<bool> psi_admitted;
  DPMethod method = DPMethod::exact_eigen;
  std::optional<std::vector<Vector>> witness;  // null k with L(k,k) > 0 when infeasible
};

namespace detail {

inline bool symmetry_holds(const Tensor& l, double psi) {
  const Tensor x = l - (2 * psi) * metric_tensor(l.frame_ref());
  return check_dp2_exact(x, DPSign::minus).member;
}

}  // namespace detail

/// Feasibility of L - 2 psi g in DP-. Exact in the eigenframe of a diagonalizable L:
/// feasible iff l0 + li <= 0 for all i, with psi_max = min_i (li - l0) / 4.
inline SymmetryVerdict check_generalized_symmetry(const Tensor& l, std::optional<double> psi = std::nullopt,
                                                  std::size_t count = kDefaultNullCount,
                                                  std::uint64_t seed = kDefaultSeed) {
  detail::require_symmetric(l);
  const LorentzFrame& f = l.frame();
  const double scale = std::max(l.max_abs(), 1e-300);
  SymmetryVerdict v;

  if (const auto ef = detail::lorentz_diagonalize(l)) {
    v.method = DPMethod::exact_eigen;
    double worst = -1e300, pm = 1e300;
    std::size_t wi = 0;
    for (std::size_t i = 0; i < ef->p.size(); ++i) {
      if (ef->mu + ef->p[i] > worst) {
        worst = ef->mu + ef->p[i];
        wi = i;
      }
      pm = std::min(pm, (ef->p[i] - ef->mu) / 4);
    }
    v.feasible = worst <= kTolClass * scale;
    if (v.feasible) {
      v.psi_max = pm;
    } else {
      Vector k(ef->basis[0]);
      for (std::size_t a = 0; a < k.size(); ++a) k[a] += ef->basis[wi + 1][a];
      v.witness = std::vector<Vector>{k};
    }
  } else {
    v.method = DPMethod::sampled;
    const auto basis = orthonormal_basis(f);
    const auto omegas = detail::sphere_points(f.dim() - 1, count, seed);
    std::vector<Vector> ks;
    for (const auto& w : omegas) ks.push_back(detail::null_from_omega(basis, w));

    // L(k, k) <= 0 on every null k.
    std::size_t worst = 0;
    std::vector<double> diag(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const Vector kk[] = {ks[i], ks[i]};
      diag[i] = evaluate(l, kk);
      if (diag[i] > diag[worst]) worst = i;
    }
    auto [dmin, kw] = detail::refine_null_tuple(basis, {omegas[worst]}, [&](const std::vector<Vector>& t) {
      const Vector kk[] = {t[0], t[0]};
      return -evaluate(l, kk);
    });
    if (-dmin > kTolClass * scale * 4) {
      v.feasible = false;
      v.witness = kw;
    } else {
      // psi <= inf L(k,k') / (2 g(k,k')) over pairs with g(k,k') < 0.
      auto ratio = [&](const std::vector<Vector>& t) {
        const double gkk = f.dot(t[0], t[1]);
        if (gkk > -1e-9) return 1e300;
        const Vector kk[] = {t[0], t[1]};
        return evaluate(l, kk) / (2 * gkk);
      };
      double best = 1e300;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = 0; i < ks.size(); ++i)
        for (std::size_t j = i + 1; j < ks.size(); ++j) {
          const double r = ratio({ks[i], ks[j]});
          if (r < best) {
            best = r;
            bi = i;
            bj = j;
          }
        }
      auto [refined, pair] = detail::refine_null_tuple(basis, {omegas[bi], omegas[bj]}, ratio);
      double cand = std::min(best, refined);
      // Step down until the exact or sampled cone test confirms membership.
      double step = std::max(1e-12, 1e-9 * std::abs(cand));
      bool ok = false;
      for (int it = 0; it < 80 && !(ok = detail::symmetry_holds(l, cand)); ++it) {
        cand -= step;
        step *= 2;
      }
      v.feasible = ok;
      if (ok) v.psi_max = cand + 0.0;
    }
  }
  if (psi) v.psi_admitted = v.feasible && detail::symmetry_holds(l, *psi);
  return v;
}

struct BuiltinParams {
  int dim = 4;
  double q = 1;                  // minkowski_stretch
  double a = 1, adot = 0;        // robertson_walker
  std::optional<Vector> ell;     // kerr_schild null covector, default dx0 + dx1
  double amplitude = -1;         // kerr_schild
};

inline PullbackPoint builtin_example(const std::string& name, const BuiltinParams& p = {}) {
  const int n = p.dim;
  if (name == "minkowski_stretch") {
    if (p.q <= 0) throw Error(Errc::BadParams, "q must be positive");
    const FrameRef f = minkowski(n);
    Matrix j = Matrix::Identity(n, n);
    j(0, 0) = p.q;
    return {f, pullback_metric(f, j, metric_tensor(f)), j};
  }
  if (name == "robertson_walker") {
    if (p.a <= 0) throw Error(Errc::BadParams, "scale factor must be positive");
    Matrix g = Matrix::Identity(n, n) * (p.a * p.a);
    g(0, 0) = -1;
    const FrameRef f = make_frame(n, g);
    const Tensor xi = basis_covector(f, 0);
    return {f, (2 * p.adot / p.a) * (metric_tensor(f) + outer(xi, xi)), std::nullopt};
  }
  if (name == "kerr_schild") {
    const FrameRef f = minkowski(n);
    Vector l = p.ell.value_or([&] {
      Vector d(n, 0.0);
      d[0] = d[1] = 1;
      return d;
    }());
    if (static_cast<int>(l.size()) != n) throw Error(Errc::BadParams, "ell has the wrong length");
    const Tensor lt = covector(f, l);
    const Vector up = raise_covector(lt);
    double ln = 0;
    for (double x : l) ln = std::max(ln, std::abs(x));
    if (ln == 0 || std::abs(f->dot(up, up)) > 1e-12 * ln * ln) throw Error(Errc::BadParams, "ell must be null");
    return {f, p.amplitude * outer(lt, lt), std::nullopt};
  }
  throw Error(Errc::UnknownExample, "unknown example '" + name + "'");
}

}  // namespace sek
