#pragma once

// Algebraic Rainich-type conditions on symmetric rank-2 tensors, plus
// generators of the corresponding energy-momentum tensors.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sek/causal_cones.hpp"
#include "sek/folded_forms.hpp"
#include "sek/lorentz_core.hpp"

namespace sek {

namespace detail {

struct Proportionality {
  double c;
  double residual;  // ||X - c g|| / max(||X||, ref)
};

inline Proportionality proportional_to_metric(const Tensor& x, double ref = 0) {
  const double c = trace(x) / x.dim();
  const double norm = std::max(x.max_abs(), ref);
  if (norm == 0) return {0.0, 0.0};
  return {c, max_abs_diff(x, c * metric_tensor(x.frame_ref())) / norm};
}

/// Natural size of tr T for tolerance purposes.
inline double trace_scale(const Tensor& t) {
  return std::max(t.dim() * t.frame().inverse().cwiseAbs().maxCoeff() * t.max_abs(), 1e-300);
}

/// Natural size of T^2 = T g^{-1} T.
inline double square_scale(const Tensor& t) { return trace_scale(t) * t.max_abs(); }

}  // namespace detail

struct PFormResult {
  int sign;  // +1 or -1: sign * T is in DP+
  int p;
  double residual;  // ||T^2 - g|| / ||g||
};

/// T^2 = g exactly when T = +-T{W_p} for a normalised simple p-form; tr(sT) = N - 2p.
inline std::optional<PFormResult> pform_test(const Tensor& t, double tol = kTolAlg) {
  detail::require_symmetric(t);
  const int n = t.dim();
  const Tensor g = metric_tensor(t.frame_ref());
  const double res = max_abs_diff(square_sym2(t), g) / t.frame().metric_scale();
  if (res > tol) return std::nullopt;
  int s = 0;
  if (check_dp2_exact(t, DPSign::plus).member)
    s = 1;
  else if (check_dp2_exact(t, DPSign::minus).member)
    s = -1;
  else
    return std::nullopt;
  const double pr = (n - s * trace(t)) / 2.0;
  const double p = std::round(pr);
  if (std::abs(pr - p) > 1e-6 || p < 1 || p > n - 1) return std::nullopt;
  return PFormResult{s, static_cast<int>(p), res};
}

struct MaxwellResult {
  bool accepted;
  double c;                // G^2 = c g
  double square_residual;  // relative deviation from proportionality
  double trace_residual;   // |tr G| / trace scale
};

inline MaxwellResult is_maxwell4(const Tensor& gt, double tol = kTolAlg) {
  if (gt.dim() != 4) throw Error(Errc::WrongDimension, "Maxwell test is specific to N = 4; use pform_test");
  detail::require_symmetric(gt);
  const auto prop = detail::proportional_to_metric(square_sym2(gt), detail::square_scale(gt));
  const double tr = std::abs(trace(gt)) / detail::trace_scale(gt);
  const bool ok = prop.residual <= tol && prop.c >= -tol * gt.max_abs() * gt.max_abs() && tr <= tol;
  return {ok, prop.c, prop.residual, tr};
}

enum class ScalarCharacter { timelike, spacelike, null };

inline std::string to_string(ScalarCharacter c) {
  switch (c) {
    case ScalarCharacter::timelike: return "timelike";
    case ScalarCharacter::spacelike: return "spacelike";
    case ScalarCharacter::null: return "null";
  }
  return "?";
}

struct ScalarFieldResult {
  std::optional<double> beta;  // absent for the null character
  ScalarCharacter character;
  double residual;
};

/// T^2 = c g (c >= 0) and tr T = beta sqrt(tr T^2 / N), beta = +-(N-2).
inline std::optional<ScalarFieldResult> is_scalar_field(const Tensor& t, double tol = kTolAlg) {
  detail::require_symmetric(t);
  const int n = t.dim();
  if (t.max_abs() == 0) return std::nullopt;
  const Tensor sq = square_sym2(t);
  const auto prop = detail::proportional_to_metric(sq, detail::square_scale(t));
  if (prop.residual > tol) return std::nullopt;
  const double tscale = detail::trace_scale(t);
  const double t1 = trace(t);
  const double t2 = trace(sq);
  if (std::abs(t1) <= tol * tscale && std::abs(t2) <= tol * tscale * tscale)
    return ScalarFieldResult{std::nullopt, ScalarCharacter::null, prop.residual};
  if (prop.c < 0 || n == 2) return std::nullopt;  // N = 2: beta = 0 does not separate the characters
  const double beta = t1 / std::sqrt(t2 / n);
  const double target = n - 2;
  if (std::abs(beta - target) <= 1e-8 * target) return ScalarFieldResult{beta, ScalarCharacter::timelike, prop.residual};
  if (std::abs(beta + target) <= 1e-8 * target) return ScalarFieldResult{beta, ScalarCharacter::spacelike, prop.residual};
  return std::nullopt;
}

struct FluidParams {
  double lambda;
  double mu;
  double residual;
};

/// T^2 = -2 lambda T + (mu^2 - lambda^2) g, tr T = (N-2) mu - N lambda, lambda >= 0, mu > 0.
inline std::vector<FluidParams> is_perfect_fluid(const Tensor& t, double tol = kTolAlg) {
  detail::require_symmetric(t);
  const int n = t.dim();
  std::vector<FluidParams> out;
  const double norm = t.max_abs();
  if (norm == 0) return out;
  const Tensor sq = square_sym2(t);
  const Tensor g = metric_tensor(t.frame_ref());
  const double t1 = trace(t);
  const double t2 = trace(sq);

  std::vector<std::pair<double, double>> candidates;
  if (n == 2) {
    const double lambda = -t1 / 2;
    const double mu2 = (t2 + 2 * lambda * t1) / 2 + lambda * lambda;
    if (mu2 > 0) candidates.emplace_back(lambda, std::sqrt(mu2));
  } else {
    const double a = 4.0 * n * (n - 1);
    const double b = 8.0 * (n - 1) * t1;
    const double c = n * t1 * t1 - double(n - 2) * (n - 2) * t2;
    double disc = b * b - 4 * a * c;
    if (disc < 0 && disc > -1e-9 * b * b - 1e-9 * std::abs(4 * a * c)) disc = 0;
    if (disc >= 0) {
      const double sq_disc = std::sqrt(disc);
      for (double lambda : {(-b + sq_disc) / (2 * a), (-b - sq_disc) / (2 * a)}) {
        candidates.emplace_back(lambda, (t1 + n * lambda) / (n - 2));
        if (sq_disc == 0) break;
      }
    }
  }

  const double tscale = detail::trace_scale(t);
  const bool dominant = check_dp2_exact(t, DPSign::plus).member;
  for (auto [lambda, mu] : candidates) {
    if (std::abs(lambda) <= tol * tscale) lambda = 0;
    if (lambda < 0 || mu <= tol * tscale || !dominant) continue;
    const Tensor lhs = sq + (2 * lambda) * t - (mu * mu - lambda * lambda) * g;
    const double scale = std::max({sq.max_abs(), lambda * norm, std::abs(mu * mu - lambda * lambda) * g.max_abs(), 1e-300});
    const double res = lhs.max_abs() / scale;
    const double tres = std::abs(t1 - ((n - 2) * mu - n * lambda)) / tscale;
    if (res <= tol && tres <= tol) out.push_back({lambda, mu, std::max(res, tres)});
  }
  return out;
}

struct DustResult {
  double rho;
  double residual;
};

/// T^2 = (tr T) T with tr T < 0; rho = -tr T.
inline std::optional<DustResult> is_dust(const Tensor& t, double tol = kTolAlg) {
  detail::require_symmetric(t);
  const double norm = t.max_abs();
  if (norm == 0) return std::nullopt;
  const double t1 = trace(t);
  if (t1 >= -tol * detail::trace_scale(t)) return std::nullopt;
  const Tensor sq = square_sym2(t);
  const double res = max_abs_diff(sq, t1 * t) / std::max(sq.max_abs(), detail::square_scale(t));
  if (res > tol || !check_dp2_exact(t, DPSign::plus).member) return std::nullopt;
  return DustResult{-t1, res};
}

// ---------------------------------------------------------------------------
// Generators

enum class EMKind { maxwell, scalar, fluid, dust };

struct EMParams {
  std::optional<Tensor> form;      // maxwell: 2-form F; scalar: gradient d(phi)
  double rho = 0;                  // fluid, dust
  double pressure = 0;             // fluid
  std::optional<Vector> velocity;  // contravariant; defaults to the future axis
};

inline Tensor build_fluid(const FrameRef& f, double rho, double pressure, std::optional<Vector> velocity = std::nullopt) {
  if (rho < std::abs(pressure)) throw Error(Errc::BadParams, "fluid needs rho >= |p|");
  Vector u = velocity.value_or(f->future_axis());
  if (static_cast<int>(u.size()) != f->dim()) throw Error(Errc::BadParams, "velocity has the wrong length");
  const double uu = f->dot(u, u);
  if (uu >= 0) throw Error(Errc::BadParams, "velocity must be timelike");
  const double s = (f->dot(u, f->future_axis()) < 0 ? 1.0 : -1.0) / std::sqrt(-uu);
  for (double& x : u) x *= s;
  const Tensor ul = lower_vector(f, u);
  return (rho + pressure) * outer(ul, ul) + pressure * metric_tensor(f);
}

inline Tensor build_em(EMKind kind, const EMParams& params, const FrameRef& f) {
  switch (kind) {
    case EMKind::maxwell:
      if (!params.form || params.form->rank() != 2) throw Error(Errc::BadParams, "maxwell needs a 2-form");
      return superenergy_pform_closed(*params.form);
    case EMKind::scalar:
      if (!params.form || params.form->rank() != 1) throw Error(Errc::BadParams, "scalar needs a gradient 1-form");
      return superenergy_pform_closed(*params.form);
    case EMKind::fluid:
      return build_fluid(f, params.rho, params.pressure, params.velocity);
    case EMKind::dust:
      if (params.rho <= 0) throw Error(Errc::BadParams, "dust needs rho > 0");
      return build_fluid(f, params.rho, 0.0, params.velocity);
  }
  throw Error(Errc::BadParams, "unknown kind");
}

// ---------------------------------------------------------------------------
// Aggregate classification

enum class EMKindResult { pform, maxwell, scalar, perfect_fluid, dust, unknown };

inline std::string to_string(EMKindResult k) {
  switch (k) {
    case EMKindResult::pform: return "pform";
    case EMKindResult::maxwell: return "maxwell";
    case EMKindResult::scalar: return "scalar";
    case EMKindResult::perfect_fluid: return "perfect_fluid";
    case EMKindResult::dust: return "dust";
    case EMKindResult::unknown: return "unknown";
  }
  return "?";
}

struct EMClassification {
  EMKindResult kind = EMKindResult::unknown;
  std::optional<PFormResult> pform;
  std::optional<double> maxwell_c;
  std::optional<ScalarFieldResult> scalar;
  std::vector<FluidParams> fluid;
  std::optional<DustResult> dust;
  std::vector<EMKindResult> matches;  // every accepting test, in precedence order
  std::map<std::string, double> residuals;
};

/// Runs every test; `kind` is the first match in the order
/// pform, maxwell, scalar, dust, perfect_fluid.
inline EMClassification classify_em(const Tensor& t, double tol = kTolAlg) {
  detail::require_symmetric(t);
  EMClassification c;
  if ((c.pform = pform_test(t, tol))) {
    c.matches.push_back(EMKindResult::pform);
    c.residuals["square_minus_g"] = c.pform->residual;
  }
  if (t.dim() == 4) {
    const auto m = is_maxwell4(t, tol);
    if (m.accepted) {
      c.maxwell_c = m.c;
      c.matches.push_back(EMKindResult::maxwell);
      c.residuals["square_prop_g"] = m.square_residual;
      c.residuals["trace"] = m.trace_residual;
    }
  }
  if ((c.scalar = is_scalar_field(t, tol))) {
    c.matches.push_back(EMKindResult::scalar);
    c.residuals["scalar_square_prop_g"] = c.scalar->residual;
  }
  if ((c.dust = is_dust(t, tol))) {
    c.matches.push_back(EMKindResult::dust);
    c.residuals["dust_identity"] = c.dust->residual;
  }
  c.fluid = is_perfect_fluid(t, tol);
  if (!c.fluid.empty()) {
    c.matches.push_back(EMKindResult::perfect_fluid);
    double r = 0;
    for (const auto& fp : c.fluid) r = std::max(r, fp.residual);
    c.residuals["fluid_identity"] = r;
  }
  if (!c.matches.empty()) c.kind = c.matches.front();
  return c;
}

}  // namespace sek
