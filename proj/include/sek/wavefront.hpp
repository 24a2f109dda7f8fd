#pragma once

// Transport of discontinuities along the generators of a null hypersurface and
// the cut integrals they conserve.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include "sek/folded_forms.hpp"
#include "sek/lorentz_core.hpp"

namespace sek {

using ScalarFn = std::function<double(double)>;

inline constexpr double kOdeRelTol = 1e-10;

struct GeneratorRecord {
  std::vector<double> t_grid;
  std::vector<double> theta;                 // expansion samples
  std::vector<double> psi;                   // non-affinity samples
  std::vector<std::vector<double>> killing;  // n(zeta_i) samples, i = 1..4
  double c2_init = 0;                        // |c|^2 at t_grid[0]
  double w_init = 0;                         // |B|^2 + |f|^2 at t_grid[0]
  double measure_init = 1;                   // cut measure weight at t_grid[0]
  std::optional<std::vector<double>> b_fraction;  // share of |B|^2 in w, if a mixing model is supplied

  // Optional exact coefficient laws; when set they replace interpolation of the samples.
  ScalarFn theta_fn;
  ScalarFn psi_fn;
};

struct GeneratorBundle {
  std::vector<GeneratorRecord> generators;
};

namespace detail {

inline double interp(const std::vector<double>& t, const std::vector<double>& y, double x) {
  if (x <= t.front()) return y.front();
  if (x >= t.back()) return y.back();
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
  const double s = (x - t[i]) / (t[i + 1] - t[i]);
  return y[i] + s * (y[i + 1] - y[i]);
}

inline void validate(const GeneratorRecord& g, int killing_needed = 0) {
  const std::size_t m = g.t_grid.size();
  if (m < 2) throw Error(Errc::InvalidBundle, "t_grid needs at least two points");
  for (std::size_t i = 1; i < m; ++i)
    if (!(g.t_grid[i] > g.t_grid[i - 1])) throw Error(Errc::InvalidBundle, "t_grid must be strictly increasing");
  if (g.theta.size() != m || g.psi.size() != m) throw Error(Errc::InvalidBundle, "sample arrays must match t_grid");
  for (const auto& k : g.killing)
    if (k.size() != m) throw Error(Errc::InvalidBundle, "killing samples must match t_grid");
  if (g.b_fraction && g.b_fraction->size() != m) throw Error(Errc::InvalidBundle, "b_fraction must match t_grid");
  if (static_cast<int>(g.killing.size()) < killing_needed)
    throw Error(Errc::InvalidBundle, "not enough killing contractions");
  if (g.c2_init < 0 || g.w_init < 0) throw Error(Errc::NegativeInitial, "initial densities must be nonnegative");
  if (!(g.measure_init > 0)) throw Error(Errc::InvalidBundle, "measure_init must be positive");
}

inline ScalarFn theta_of(const GeneratorRecord& g) {
  if (g.theta_fn) return g.theta_fn;
  return [&g](double t) { return interp(g.t_grid, g.theta, t); };
}

inline ScalarFn psi_of(const GeneratorRecord& g) {
  if (g.psi_fn) return g.psi_fn;
  return [&g](double t) { return interp(g.t_grid, g.psi, t); };
}

/// Solves dy/dt = rate(t) y from y(t_grid[0]) = y0 and reports y at `times`
/// (sorted, inside the grid); integration also stops at every grid point.
inline std::vector<double> solve_linear(const GeneratorRecord& g, const ScalarFn& rate, double y0,
                                        const std::vector<double>& times) {
  if (y0 == 0) return std::vector<double>(times.size(), 0.0);
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 1>;
  std::vector<double> stops = g.t_grid;
  stops.insert(stops.end(), times.begin(), times.end());
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  std::map<double, double> at;
  State y{y0};
  auto sys = [&](const State& x, State& dxdt, double t) { dxdt[0] = rate(t) * x[0]; };
  auto obs = [&](const State& x, double t) { at[t] = x[0]; };
  auto stepper = ode::make_controlled(1e-16 * std::abs(y0), kOdeRelTol, ode::runge_kutta_dopri5<State>());
  const double dt = (stops.back() - stops.front()) / 1000.0;
  ode::integrate_times(stepper, sys, y, stops.begin(), stops.end(), dt, obs);
  std::vector<double> out;
  for (double t : times) out.push_back(at.at(t));
  return out;
}

/// exp(int_{t0}^{t} rate) at each time, by Gauss-Kronrod per grid segment.
inline std::vector<double> closed_form_factor(const GeneratorRecord& g, const ScalarFn& rate,
                                              const std::vector<double>& times) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  std::vector<double> out;
  for (double t : times) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < g.t_grid.size() && g.t_grid[i] < t; ++i) {
      const double b = std::min(t, g.t_grid[i + 1]);
      s += GK::integrate(rate, g.t_grid[i], b, 5, 1e-14);
    }
    out.push_back(std::exp(s));
  }
  return out;
}

}  // namespace detail

struct TransportResult {
  std::vector<double> t;
  std::vector<double> values;       // adaptive ODE solution
  std::vector<double> closed_form;  // y0 exp(-int rate) cross-check
  double max_rel_diff = 0;
};

namespace detail {

inline TransportResult transport(const GeneratorRecord& g, const ScalarFn& rate, double y0) {
  TransportResult r;
  r.t = g.t_grid;
  r.values = solve_linear(g, rate, y0, g.t_grid);
  const auto cf = closed_form_factor(g, rate, g.t_grid);
  for (std::size_t i = 0; i < cf.size(); ++i) {
    r.closed_form.push_back(y0 * cf[i]);
    const double d = std::abs(r.values[i] - r.closed_form[i]);
    if (d > 0) r.max_rel_diff = std::max(r.max_rel_diff, d / std::abs(r.closed_form[i]));
  }
  return r;
}

}  // namespace detail

/// d|c|^2/dt = -(theta + 2 psi) |c|^2.
inline TransportResult transport_em(const GeneratorRecord& g) {
  detail::validate(g);
  const auto th = detail::theta_of(g), ps = detail::psi_of(g);
  return detail::transport(g, [&](double t) { return -(th(t) + 2 * ps(t)); }, g.c2_init);
}

/// dw/dt = -(theta + 4 psi) w with w = |B|^2 + |f|^2.
inline TransportResult transport_grav(const GeneratorRecord& g) {
  detail::validate(g);
  const auto th = detail::theta_of(g), ps = detail::psi_of(g);
  return detail::transport(g, [&](double t) { return -(th(t) + 4 * ps(t)); }, g.w_init);
}

/// d(mu)/dt = theta mu.
inline TransportResult cut_measure_evolve(const GeneratorRecord& g) {
  detail::validate(g);
  const auto th = detail::theta_of(g);
  return detail::transport(g, th, g.measure_init);
}

enum class IntegralKind { em, grav };

struct CutIntegrals {
  std::vector<double> cuts;
  std::vector<double> values;
  double max_rel_spread = 0;
  // Only with a mixing model (b_fraction on every generator) and kind = grav.
  std::optional<std::vector<double>> b_only;
  std::optional<std::vector<double>> f_only;
};

inline double rel_spread(const std::vector<double>& v) {
  if (v.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  return *hi == *lo ? 0.0 : (*hi - *lo) / std::max(std::abs(mean), 1e-300);
}

inline CutIntegrals conserved_integrals(const GeneratorBundle& b, const std::vector<double>& cuts, IntegralKind kind) {
  const int nk = kind == IntegralKind::em ? 2 : 4;
  if (b.generators.empty()) throw Error(Errc::InvalidBundle, "empty bundle");
  bool mixing = kind == IntegralKind::grav;
  for (const auto& g : b.generators) {
    detail::validate(g, nk);
    const double span = g.t_grid.back() - g.t_grid.front();
    for (double t : cuts)
      if (t < g.t_grid.front() - 1e-12 * span || t > g.t_grid.back() + 1e-12 * span)
        throw Error(Errc::CutOutOfRange, "cut outside a generator's parameter range");
    mixing = mixing && g.b_fraction.has_value();
  }

  CutIntegrals out;
  out.cuts = cuts;
  out.values.assign(cuts.size(), 0.0);
  if (mixing) {
    out.b_only = std::vector<double>(cuts.size(), 0.0);
    out.f_only = std::vector<double>(cuts.size(), 0.0);
  }
  for (const auto& g : b.generators) {
    std::vector<double> local = cuts;
    for (double& t : local) t = std::clamp(t, g.t_grid.front(), g.t_grid.back());
    std::vector<double> order = local;
    std::sort(order.begin(), order.end());
    order.erase(std::unique(order.begin(), order.end()), order.end());
    const auto th = detail::theta_of(g), ps = detail::psi_of(g);
    const double mult = kind == IntegralKind::em ? 2.0 : 4.0;
    const double y0 = kind == IntegralKind::em ? g.c2_init : g.w_init;
    const auto dens = detail::solve_linear(g, [&](double t) { return -(th(t) + mult * ps(t)); }, y0, order);
    const auto meas = detail::solve_linear(g, th, g.measure_init, order);
    for (std::size_t c = 0; c < local.size(); ++c) {
      const std::size_t i = static_cast<std::size_t>(std::lower_bound(order.begin(), order.end(), local[c]) - order.begin());
      double k = 1;
      for (int j = 0; j < nk; ++j) k *= detail::interp(g.t_grid, g.killing[j], local[c]);
      const double v = dens[i] * k * meas[i];
      out.values[c] += v;
      if (mixing) {
        const double fb = detail::interp(g.t_grid, *g.b_fraction, local[c]);
        (*out.b_only)[c] += fb * v;
        (*out.f_only)[c] += (1 - fb) * v;
      }
    }
  }
  out.max_rel_spread = rel_spread(out.values);
  return out;
}

/// Light cone of Minkowski space from r0 to r1: theta = (N-2)/r, psi = 0,
/// unit Killing contractions, 2(N-1) generators of equal solid-angle weight.
inline GeneratorBundle lightcone_example(int n, double r0, double r1, int steps) {
  if (n < 3 || n > kMaxDim) throw Error(Errc::DimensionOutOfRange, "light-cone example needs 3 <= N <= 6");
  if (!(r0 > 0) || !(r1 > r0) || steps < 1) throw Error(Errc::BadRange, "need 0 < r0 < r1 and steps >= 1");
  const int gens = 2 * (n - 1);
  // Area of the unit (N-2)-sphere.
  const double area = 2 * std::pow(std::numbers::pi, (n - 1) / 2.0) / std::tgamma((n - 1) / 2.0);
  GeneratorRecord rec;
  for (int i = 0; i <= steps; ++i) {
    const double r = i == steps ? r1 : r0 + (r1 - r0) * i / steps;
    rec.t_grid.push_back(r);
    rec.theta.push_back((n - 2) / r);
    rec.psi.push_back(0.0);
  }
  rec.killing.assign(4, std::vector<double>(rec.t_grid.size(), 1.0));
  rec.c2_init = 1;
  rec.w_init = 1;
  rec.measure_init = area / gens * std::pow(r0, n - 2);
  rec.theta_fn = [n](double r) { return (n - 2) / r; };
  rec.psi_fn = [](double) { return 0.0; };
  return GeneratorBundle{std::vector<GeneratorRecord>(gens, rec)};
}

/// n -> rho n: t -> t / rho, theta, psi and Killing contractions scale by rho,
/// |c|^2 by rho^-2 and |B|^2 + |f|^2 by rho^-4; the measure is unchanged.
inline GeneratorBundle rescale_bundle(const GeneratorBundle& b, double rho) {
  if (!(rho > 0)) throw Error(Errc::BadParams, "rho must be positive");
  GeneratorBundle out = b;
  for (auto& g : out.generators) {
    for (double& t : g.t_grid) t /= rho;
    for (double& x : g.theta) x *= rho;
    for (double& x : g.psi) x *= rho;
    for (auto& k : g.killing)
      for (double& x : k) x *= rho;
    g.c2_init /= rho * rho;
    g.w_init /= rho * rho * rho * rho;
    if (g.theta_fn) g.theta_fn = [f = g.theta_fn, rho](double t) { return rho * f(rho * t); };
    if (g.psi_fn) g.psi_fn = [f = g.psi_fn, rho](double t) { return rho * f(rho * t); };
  }
  return out;
}

// ---------------------------------------------------------------------------
// Jump identities

struct JumpData {
  Tensor n;  // null 1-form
  Tensor c;  // g^{-1}(n, c) = 0
  Tensor B;  // symmetric, B(n^, .) + (tr B) n = 0
  Tensor f;  // g^{-1}(n, f) = 0
};

struct JumpIdentity {
  Tensor computed;
  Tensor expected;
  double residual;
};

inline Tensor jump_riemann(const Tensor& n, const Tensor& b) {
  const int d = n.dim();
  std::vector<double> c(ipow(d, 4));
  for (int a = 0; a < d; ++a)
    for (int bb = 0; bb < d; ++bb)
      for (int cc = 0; cc < d; ++cc)
        for (int dd = 0; dd < d; ++dd)
          c[((a * d + bb) * d + cc) * d + dd] = n[a] * n[cc] * b(bb, dd) - n[a] * n[dd] * b(bb, cc) -
                                                n[bb] * n[cc] * b(a, dd) + n[bb] * n[dd] * b(a, cc);
  return Tensor(n.frame_ref(), 4, std::move(c));
}

inline void check_jump_constraints(const JumpData& j, double tol = kTolAlg) {
  for (const Tensor* t : {&j.c, &j.B, &j.f}) check_same_frame(j.n, *t);
  if (j.n.rank() != 1 || j.c.rank() != 1 || j.f.rank() != 1 || j.B.rank() != 2)
    throw Error(Errc::ConstraintViolation, "jump data has the wrong ranks");
  const double nn = std::max(j.n.max_abs(), 1e-300);
  const double gi = j.n.frame().inverse().cwiseAbs().maxCoeff() * j.n.dim();
  if (j.n.max_abs() == 0 || std::abs(inner_full(j.n, j.n)) > tol * gi * nn * nn)
    throw Error(Errc::ConstraintViolation, "n must be a nonzero null 1-form");
  if (std::abs(inner_full(j.n, j.c)) > tol * gi * nn * std::max(j.c.max_abs(), 1e-300))
    throw Error(Errc::ConstraintViolation, "c must be orthogonal to n");
  if (std::abs(inner_full(j.n, j.f)) > tol * gi * nn * std::max(j.f.max_abs(), 1e-300))
    throw Error(Errc::ConstraintViolation, "f must be orthogonal to n");
  if (!is_symmetric2(j.B, tol)) throw Error(Errc::ConstraintViolation, "B must be symmetric");
  const Tensor bn = contract_vector(j.B, 0, raise_covector(j.n));
  const Tensor lhs = bn + trace(j.B) * j.n;
  if (lhs.max_abs() > tol * gi * nn * std::max(j.B.max_abs(), 1e-300))
    throw Error(Errc::ConstraintViolation, "B(n, .) + (tr B) n must vanish");
}

/// Superenergy of [F] = n^c, [R] = n^B^n and [nabla F] = n (x) (n^f) through the
/// general machinery, against |c|^2 n(x)n, 2|B|^2 n^(x)4 and 2|f|^2 n^(x)4.
inline std::map<std::string, JumpIdentity> jump_superenergy(const JumpData& j) {
  check_jump_constraints(j);
  const Tensor& n = j.n;
  const Tensor nn = outer(n, n);
  const Tensor n4 = outer(nn, nn);
  const double nmax = n.max_abs();
  std::map<std::string, JumpIdentity> out;
  auto record = [&](const std::string& key, const FoldedForm& form, const Tensor& expected, double scale) {
    Tensor computed = superenergy(form).tensor;
    const double denom = std::max(expected.max_abs(), scale);
    const double res = denom == 0 ? computed.max_abs() : max_abs_diff(computed, expected) / denom;
    out.emplace(key, JumpIdentity{std::move(computed), expected, res});
  };
  const double c2 = inner_full(j.c, j.c);
  record("F", FoldedForm(wedge(n, j.c), {{2}, {}}), c2 * nn, std::pow(nmax * j.c.max_abs(), 2));
  const double b2 = inner_full(j.B, j.B);
  record("R", FoldedForm(jump_riemann(n, j.B), {{2, 2}, {}}), (2 * b2) * n4,
         std::pow(nmax, 4) * std::pow(j.B.max_abs(), 2));
  const double f2 = inner_full(j.f, j.f);
  record("nablaF", FoldedForm(outer(n, wedge(n, j.f)), {{1, 2}, {}}), (2 * f2) * n4,
         std::pow(nmax, 4) * std::pow(j.f.max_abs(), 2));
  return out;
}

}  // namespace sek
