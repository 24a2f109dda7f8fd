#pragma once

// Dominant-property cones DP+ and DP-: exact rank-2 decision, sampled decision
// for general rank, rank-2 decomposition into simple forms, null factorization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/erf.hpp>

#include "sek/detail/lorentz_eigen.hpp"
#include "sek/folded_forms.hpp"
#include "sek/lorentz_core.hpp"

namespace sek {

enum class DPSign { plus, minus };
enum class DPMethod { exact_eigen, sampled };

inline std::string to_string(DPSign s) { return s == DPSign::plus ? "plus" : "minus"; }
inline std::string to_string(DPMethod m) { return m == DPMethod::exact_eigen ? "exact_eigen" : "sampled"; }

inline constexpr std::uint64_t kDefaultSeed = 20240611;
inline constexpr std::size_t kTupleCap = 1000000;
inline constexpr std::size_t kDefaultNullCount = 256;

struct DPVerdict {
  bool member = true;
  DPSign sign = DPSign::plus;
  DPMethod method = DPMethod::sampled;
  double margin = 0;
  std::optional<std::vector<Vector>> witness;
  std::optional<double> witness_value;  // sign * T(witness), unscaled
  std::size_t samples_used = 0;
};

namespace detail {

inline double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

inline constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13};

inline double normal_quantile(double u) { return std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0); }

/// Unit vectors in R^m: axis set, Halton-through-normal-quantile, seeded Gaussian tail.
inline std::vector<Vector> sphere_points(int m, std::size_t count, std::uint64_t seed) {
  std::vector<Vector> out;
  for (int i = 0; i < m && out.size() < count; ++i)
    for (int s : {1, -1}) {
      if (out.size() == count) break;
      Vector v(m, 0.0);
      v[i] = s;
      out.push_back(v);
    }
  const std::size_t remaining = count - out.size();
  const std::size_t halton = remaining / 2;
  auto push_normalized = [&](Vector v) {
    double n = 0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n < 1e-12) return false;
    for (double& x : v) x /= n;
    out.push_back(std::move(v));
    return true;
  };
  for (std::uint64_t i = 1; out.size() < count - (remaining - halton); ++i) {
    Vector v(m);
    for (int d = 0; d < m; ++d) v[d] = normal_quantile(radical_inverse(i, kPrimes[d]));
    push_normalized(std::move(v));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  while (out.size() < count) {
    Vector v(m);
    for (double& x : v) x = nd(rng);
    push_normalized(std::move(v));
  }
  return out;
}

inline Vector null_from_omega(const std::vector<Vector>& basis, const Vector& omega) {
  Vector k = basis[0];
  for (std::size_t i = 0; i < omega.size(); ++i)
    for (std::size_t a = 0; a < k.size(); ++a) k[a] += omega[i] * basis[i + 1][a];
  return k;
}

inline std::vector<double> angles_of(const Vector& w) {
  const int m = static_cast<int>(w.size());
  std::vector<double> th;
  for (int k = 0; k + 1 < m; ++k) {
    double tail = 0;
    for (int j = k + 1; j < m; ++j) tail += w[j] * w[j];
    th.push_back(k + 2 == m ? std::atan2(w[m - 1], w[m - 2]) : std::atan2(std::sqrt(tail), w[k]));
  }
  return th;
}

inline Vector omega_of(const std::vector<double>& th, int m) {
  Vector w(m);
  double s = 1;
  for (int k = 0; k + 1 < m; ++k) {
    w[k] = s * std::cos(th[k]);
    s *= std::sin(th[k]);
  }
  w[m - 1] = s;
  return w;
}

/// T evaluated on every r-tuple from `ks`; index of tuple (i_1..i_r) is row-major.
inline std::vector<double> evaluate_grid(const Tensor& t, const std::vector<Vector>& ks) {
  const int n = t.dim();
  const int r = t.rank();
  const int cnt = static_cast<int>(ks.size());
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat kmat(cnt, n);
  for (int i = 0; i < cnt; ++i)
    for (int a = 0; a < n; ++a) kmat(i, a) = ks[i][a];
  std::vector<double> cur(t.components().begin(), t.components().end());
  std::size_t lead = 1;
  for (int s = 0; s < r; ++s) {
    const std::size_t rest = ipow(n, r - s - 1);
    std::vector<double> next(lead * cnt * rest);
    for (std::size_t l = 0; l < lead; ++l) {
      Eigen::Map<const RowMat> blk(cur.data() + l * n * rest, n, static_cast<Eigen::Index>(rest));
      Eigen::Map<RowMat> dst(next.data() + l * cnt * rest, cnt, static_cast<Eigen::Index>(rest));
      dst.noalias() = kmat * blk;
    }
    cur.swap(next);
    lead *= cnt;
  }
  return cur;
}

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

/// Coordinate-wise golden-section descent on the sphere angles of a tuple of
/// null vectors e0 + w_i; returns the best value and the tuple attaining it.
inline std::pair<double, std::vector<Vector>> refine_null_tuple(
    const std::vector<Vector>& basis, const std::vector<Vector>& omegas,
    const std::function<double(const std::vector<Vector>&)>& objective, int iterations = 50) {
  const int m = static_cast<int>(basis.size()) - 1;
  auto tuple_of = [&](const std::vector<std::vector<double>>& th) {
    std::vector<Vector> ks;
    for (const auto& a : th) ks.push_back(null_from_omega(basis, omega_of(a, m)));
    return ks;
  };
  std::vector<Vector> init;
  for (const auto& w : omegas) init.push_back(null_from_omega(basis, w));
  double best = objective(init);
  if (m < 2) return {best, init};

  std::vector<std::vector<double>> th;
  for (const auto& w : omegas) th.push_back(angles_of(w));
  bool moved = false;
  double delta = 0.3;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t s = 0; s < th.size(); ++s)
      for (std::size_t j = 0; j < th[s].size(); ++j) {
        auto trial = th;
        const double x = golden_min(
            [&](double a) {
              trial[s][j] = a;
              return objective(tuple_of(trial));
            },
            th[s][j] - delta, th[s][j] + delta, 24);
        trial[s][j] = x;
        const double fx = objective(tuple_of(trial));
        if (fx < best - 1e-14 * std::max(1.0, std::abs(best))) {
          best = fx;
          th = std::move(trial);
          moved = true;
        }
      }
    delta *= 0.85;
  }
  return {best, moved ? tuple_of(th) : init};
}

}  // namespace detail

/// Future null vectors e0 + w with w unit in the frame's orthonormal spatial basis.
inline std::vector<Vector> sample_null(const LorentzFrame& f, std::size_t count, std::uint64_t seed = kDefaultSeed) {
  if (count < 1) throw Error(Errc::BadParams, "count must be >= 1");
  const auto basis = orthonormal_basis(f);
  std::vector<Vector> out;
  for (const auto& w : detail::sphere_points(f.dim() - 1, count, seed)) out.push_back(detail::null_from_omega(basis, w));
  return out;
}

inline std::vector<Vector> sample_null(const FrameRef& f, std::size_t count, std::uint64_t seed = kDefaultSeed) {
  return sample_null(*f, count, seed);
}

/// count is the number of null directions; the tuple grid is capped at 1e6.
inline DPVerdict check_dp_sampled(const Tensor& t, DPSign sign, std::size_t count = kDefaultNullCount,
                                  std::uint64_t seed = kDefaultSeed, double tol = kTolClass) {
  if (t.rank() < 1) throw Error(Errc::RankZero, "dominant property needs rank >= 1");
  const LorentzFrame& f = t.frame();
  const int n = f.dim();
  const int r = t.rank();
  const double sg = sign == DPSign::plus ? 1.0 : -1.0;
  const auto cap_count = static_cast<std::size_t>(std::floor(std::pow(double(kTupleCap), 1.0 / r) + 1e-9));
  const std::size_t cnt = std::max<std::size_t>(1, std::min(count, cap_count));

  const auto basis = orthonormal_basis(f);
  const auto omegas = detail::sphere_points(n - 1, cnt, seed);
  std::vector<Vector> ks;
  double kmax = 0;
  for (const auto& w : omegas) {
    ks.push_back(detail::null_from_omega(basis, w));
    double l1 = 0;
    for (double x : ks.back()) l1 += std::abs(x);
    kmax = std::max(kmax, l1);
  }
  const double scale = std::max(t.max_abs() * std::pow(kmax, r), 1e-300);

  const auto vals = detail::evaluate_grid(t, ks);
  std::size_t arg = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (sg * vals[i] < sg * vals[arg]) arg = i;

  DPVerdict v;
  v.sign = sign;
  v.method = DPMethod::sampled;
  v.samples_used = vals.size();
  double best = sg * vals[arg];
  v.margin = best / scale;
  if (best >= -tol * scale) return v;

  std::vector<int> idx(r);
  unflatten(arg, static_cast<int>(cnt), idx);
  std::vector<Vector> start;
  for (int s = 0; s < r; ++s) start.push_back(omegas[idx[s]]);
  auto [refined, w] = detail::refine_null_tuple(basis, start, [&](const std::vector<Vector>& tuple) {
    return sg * evaluate(t, tuple);
  });
  best = std::min(best, refined);
  v.member = false;
  v.margin = std::min(v.margin, best / scale);
  v.witness = std::move(w);
  v.witness_value = best;
  return v;
}

namespace detail {

inline void require_symmetric(const Tensor& t) {
  if (t.rank() != 2 || !is_symmetric2(t)) throw Error(Errc::NotSymmetric, "expected a symmetric rank-2 tensor");
}

}  // namespace detail

/// Exact decision for diagonalizable symmetric rank-2 tensors, sampled otherwise.
inline DPVerdict check_dp2_exact(const Tensor& t, DPSign sign, double tol = kTolClass) {
  detail::require_symmetric(t);
  const Tensor x = sign == DPSign::plus ? t : -t;
  const auto ef = detail::lorentz_diagonalize(x);
  if (!ef) return check_dp_sampled(t, sign, kDefaultNullCount, kDefaultSeed, tol);

  DPVerdict v;
  v.sign = sign;
  v.method = DPMethod::exact_eigen;
  std::size_t worst = 0;
  double pmax = 0;
  for (std::size_t i = 0; i < ef->p.size(); ++i)
    if (std::abs(ef->p[i]) > pmax) {
      pmax = std::abs(ef->p[i]);
      worst = i;
    }
  const double denom = std::max(std::abs(ef->mu), pmax);
  v.margin = denom == 0 ? 0.0 : (ef->mu - pmax) / denom;
  v.member = v.margin >= -tol;
  if (!v.member) {
    const Vector& e0 = ef->basis[0];
    const Vector& ei = ef->basis[worst + 1];
    const double s = ef->p[worst] > 0 ? -1.0 : 1.0;
    Vector k(e0), k2(e0);
    for (std::size_t a = 0; a < k.size(); ++a) {
      k[a] += ei[a];
      k2[a] += s * ei[a];
    }
    v.witness = std::vector<Vector>{k, k2};
    v.witness_value = ef->mu + s * ef->p[worst];
  }
  return v;
}

/// (T^2)_{ab} = T_{ac} g^{cd} T_{db}.
inline Tensor square_sym2(const Tensor& t) {
  detail::require_symmetric(t);
  const Tensor sq = contract_ij(t, 1, t, 0);
  return 0.5 * (sq + swap_slots(sq, 0, 1));
}

struct SimpleTerm {
  int p;
  Tensor form;    // sqrt(weight) * e^0 ^ ... ^ e^{p-1}
  double weight;  // alpha_p
};

struct SimpleFormDecomposition {
  std::vector<SimpleTerm> terms;
  std::vector<Vector> eigenframe;  // e_0 timelike, then spatial by ascending eigenvalue
  double residual = 0;             // relative reassembly error
};

/// Coframe 1-form dual to eigenframe vector i: e^0 = -g(e_0, .), e^i = g(e_i, .).
inline Tensor eigen_coframe(const FrameRef& f, const std::vector<Vector>& frame, int i) {
  Tensor w = lower_vector(f, frame[i]);
  return i == 0 ? -w : w;
}

inline SimpleFormDecomposition decompose_dp2(const Tensor& t) {
  detail::require_symmetric(t);
  const auto ef = detail::lorentz_diagonalize(t);
  if (!ef) throw Error(Errc::NotDiagonalizable, "exact decomposition needs Segre type [1,1...1]");
  const auto verdict = check_dp2_exact(t, DPSign::plus);
  if (!verdict.member) throw Error(Errc::NotDominant, "tensor is not in DP+");

  const int n = t.dim();
  const auto& p = ef->p;
  std::vector<double> alpha(n);
  alpha[0] = ef->mu + p[0];
  for (int j = 1; j + 1 < n; ++j) alpha[j] = p[j] - p[j - 1];
  alpha[n - 1] = ef->mu - p[n - 2];

  const double scale = std::max(t.max_abs(), 1e-300);
  SimpleFormDecomposition out;
  out.eigenframe = ef->basis;
  std::vector<Tensor> coframe;
  for (int i = 0; i < n; ++i) coframe.push_back(eigen_coframe(t.frame_ref(), ef->basis, i));

  Tensor sum(t.frame_ref(), 2);
  for (int k = 0; k < n; ++k) {
    const double a = std::max(alpha[k], 0.0);
    if (a <= 1e-14 * scale) continue;
    const std::span<const Tensor> factors(coframe.data(), k + 1);
    Tensor form = std::sqrt(a) * (k == 0 ? coframe[0] : wedge(factors));
    sum = sum + superenergy_pform_closed(form);
    out.terms.push_back({k + 1, std::move(form), a});
  }
  out.residual = max_abs_diff(sum, t) / scale;
  if (out.residual > kTolAlg) throw Error(Errc::NotDiagonalizable, "decomposition failed to reassemble");
  return out;
}

/// Null 1-forms k_1..k_p with k_1 ^ ... ^ k_p equal to a term's form (p >= 2).
inline std::vector<Tensor> null_factors(const SimpleTerm& term, const FrameRef& f, const std::vector<Vector>& frame) {
  if (term.p < 2) throw Error(Errc::BadParams, "null factor form needs p >= 2");
  const Tensor e0 = eigen_coframe(f, frame, 0);
  const Tensor e1 = eigen_coframe(f, frame, 1);
  std::vector<Tensor> ks;
  ks.push_back((-0.5 * std::sqrt(term.weight)) * (e0 + e1));
  ks.push_back(e0 - e1);
  for (int j = 2; j < term.p; ++j) ks.push_back(e0 + eigen_coframe(f, frame, j));
  return ks;
}

/// A p-form is simple iff the map v -> i_v W has rank p.
inline bool is_simple(const Tensor& form, double rel_tol = kTolAlg) {
  const int p = form.rank();
  const int n = form.dim();
  if (p <= 1) return true;
  const std::size_t rest = ipow(n, p - 1);
  Matrix m(n, static_cast<Eigen::Index>(rest));
  for (int a = 0; a < n; ++a)
    for (std::size_t i = 0; i < rest; ++i) m(a, i) = form[a * rest + i];
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0) return true;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++rank;
  return rank == p;
}

struct NullFactorization {
  double coefficient;           // T = coefficient * k_1 (x) ... (x) k_r
  std::vector<Tensor> factors;  // null, normalized so k(e_0) = +1
};

inline std::optional<NullFactorization> null_factor_test(const Tensor& t, double rel_tol = kTolAlg) {
  const int r = t.rank();
  const int n = t.dim();
  if (r < 1) throw Error(Errc::RankZero, "null factor test needs rank >= 1");
  const double norm = t.max_abs();
  if (norm == 0) return std::nullopt;

  std::vector<Vector> raw;
  Eigen::VectorXd rest = Eigen::Map<const Eigen::VectorXd>(t.components().data(), t.size());
  double coef = 1;
  for (int s = 0; s + 1 < r; ++s) {
    const Eigen::Index cols = rest.size() / n;
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMat m = Eigen::Map<const RowMat>(rest.data(), n, cols);
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 1 && sv(1) > rel_tol * sv(0)) return std::nullopt;
    const Eigen::VectorXd u = svd.matrixU().col(0);
    raw.emplace_back(u.data(), u.data() + n);
    coef *= sv(0);
    rest = svd.matrixV().col(0);
  }
  raw.emplace_back(rest.data(), rest.data() + n);

  const LorentzFrame& f = t.frame();
  const Vector u = orthonormal_basis(f)[0];
  NullFactorization out{coef, {}};
  for (auto& k : raw) {
    double ku = 0, kk = 0, k2 = 0;
    for (int a = 0; a < n; ++a) {
      ku += k[a] * u[a];
      k2 += k[a] * k[a];
      for (int b = 0; b < n; ++b) kk += f.ginv(a, b) * k[a] * k[b];
    }
    if (std::abs(kk) > rel_tol * k2 * f.inverse().cwiseAbs().maxCoeff()) return std::nullopt;
    if (std::abs(ku) < 1e-12 * std::sqrt(k2)) return std::nullopt;
    for (double& x : k) x /= ku;
    out.coefficient *= ku;
    out.factors.push_back(covector(t.frame_ref(), k));
  }
  const Tensor rebuilt = out.coefficient * outer(out.factors);
  if (max_abs_diff(rebuilt, t) > rel_tol * norm * 10) return std::nullopt;
  return out;
}

}  // namespace sek
