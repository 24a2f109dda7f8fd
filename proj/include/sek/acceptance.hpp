#pragma once

// The thirteen acceptance criteria, shared by the acceptance test binary and
// the `selftest` command.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sek/causal_cones.hpp"
#include "sek/causal_maps.hpp"
#include "sek/folded_forms.hpp"
#include "sek/generators.hpp"
#include "sek/lorentz_core.hpp"
#include "sek/rainich.hpp"
#include "sek/wavefront.hpp"

namespace sek::acceptance {

struct CriterionResult {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

namespace detail {

inline std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

inline double rel_err(const Tensor& a, const Tensor& b) {
  return max_abs_diff(a, b) / std::max({a.max_abs(), b.max_abs(), 1e-300});
}

/// Half the sum of squares of the independent components of a contiguous
/// block form, read in the given basis.
inline double half_square_sum(const Tensor& a, const std::vector<int>& degrees, const std::vector<Vector>& basis) {
  const Tensor comps = components_in_basis(a, basis);
  double s = 0;
  for (double x : sek::detail::to_block_array(comps, degrees).data) s += x * x;
  return 0.5 * s;
}

inline std::vector<int> random_degrees(int n, int folds, gen::Rng& rng) {
  std::vector<int> d;
  for (int i = 0; i < folds; ++i) d.push_back(gen::uniform_int(rng, 1, n - 1));
  return d;
}

}  // namespace detail

inline CriterionResult ac1_closed_form(std::uint64_t seed) {
  gen::Rng rng(seed);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = i % 2 == 0 ? 4 : 5;
    const FrameRef f = gen::random_frame(n, rng);
    const int p = gen::uniform_int(rng, 1, n - 1);
    const Tensor w = gen::random_pform(f, p, rng);
    const Tensor general = superenergy(FoldedForm(w, {{p}, {}})).tensor;
    worst = std::max(worst, detail::rel_err(general, superenergy_pform_closed(w)));
  }
  return {1, "closed-form agreement", worst <= 1e-10, detail::fmt("200 p-forms, max rel err %.3e", worst)};
}

inline CriterionResult ac2_duality(std::uint64_t seed) {
  gen::Rng rng(seed);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + i % 3;
    const FrameRef f = gen::random_frame(n, rng);
    const int folds = i % 2 == 0 ? 1 : 2;
    const auto deg = detail::random_degrees(n, folds, rng);
    const FoldedForm a(gen::random_folded(f, deg, rng), {deg, {}});
    const Tensor base = superenergy(a).tensor;
    for (int P = 1; P <= (1 << folds); ++P) {
      const Tensor dual = superenergy(hodge_dual(a, DualIndex::from_P(P, folds))).tensor;
      worst = std::max(worst, detail::rel_err(dual, base));
    }
  }
  return {2, "duality invariance", worst <= 1e-10, detail::fmt("100 forms, all duals, max rel err %.3e", worst)};
}

inline CriterionResult ac3_product_law(std::uint64_t seed) {
  gen::Rng rng(seed);
  double worst = 0, ratio = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = 3 + i % 3;
    const FrameRef f = gen::random_frame(n, rng);
    const int p = gen::uniform_int(rng, 1, n - 1), q = gen::uniform_int(rng, 1, n - 1);
    const Tensor w1 = gen::random_pform(f, p, rng), w2 = gen::random_pform(f, q, rng);
    const Tensor lhs = superenergy(FoldedForm(outer(w1, w2), {{p, q}, {}})).tensor;
    const Tensor rhs = outer(superenergy(FoldedForm(w1, {{p}, {}})).tensor, superenergy(FoldedForm(w2, {{q}, {}})).tensor);
    worst = std::max(worst, max_abs_diff(lhs, rhs) / std::max(rhs.max_abs(), 1e-300));
    ratio = std::max(ratio, lhs.max_abs() / rhs.max_abs());
  }
  return {3, "tensor-product law", worst <= 1e-10,
          detail::fmt("100 double forms, max rel err %.3e, T{W1(x)W2} / T{W1}(x)T{W2} = %.6f", worst, ratio)};
}

inline CriterionResult ac4_causality(std::uint64_t seed) {
  gen::Rng rng(seed);
  double worst = 1e300;
  int tested = 0;
  auto check = [&](const Tensor& t) {
    const std::size_t count = t.rank() == 2 ? 317 : 18;
    const auto v = check_dp_sampled(t, DPSign::plus, count, seed + tested, 1e-12);
    worst = std::min(worst, v.margin);
    ++tested;
  };
  for (int i = 0; i < 20; ++i) {
    const int n = 3 + i % 3;
    const FrameRef f = gen::random_frame(n, rng);
    const int folds = i < 10 ? 1 : 2;
    const auto deg = detail::random_degrees(n, folds, rng);
    check(superenergy(FoldedForm(gen::random_folded(f, deg, rng), {deg, {}})).tensor);
  }
  // Bel tensor of a constant-curvature Riemann tensor.
  for (double k : {1.0, -0.7}) {
    const FrameRef f = gen::random_frame(4, rng);
    const int n = 4;
    std::vector<double> c(ipow(n, 4));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int cc = 0; cc < n; ++cc)
          for (int d = 0; d < n; ++d)
            c[((a * n + b) * n + cc) * n + d] = k * (f->g(a, cc) * f->g(b, d) - f->g(a, d) * f->g(b, cc));
    check(superenergy(Tensor(f, 4, std::move(c))).tensor);
  }
  return {4, "causality of superenergy", worst >= -1e-12,
          detail::fmt("%d tensors, ~1e5 null tuples each, min scaled value %.3e", tested, worst)};
}

inline CriterionResult ac5_sum_rule(std::uint64_t seed) {
  gen::Rng rng(seed);
  double worst = 0;
  int cases = 0;
  for (int i = 0; i < 20; ++i) {
    const int n = 3 + i % 3;
    const FrameRef f = gen::random_frame(n, rng);
    const int folds = 1 + i % 2;
    const auto deg = detail::random_degrees(n, folds, rng);
    const Tensor a = gen::random_folded(f, deg, rng);
    const Tensor t = superenergy(FoldedForm(a, {deg, {}})).tensor;
    for (int b = 0; b < 5; ++b) {
      const auto basis = gen::random_orthonormal_basis(*f, rng);
      const std::vector<Vector> e0(2 * folds, basis[0]);
      const double lhs = evaluate(t, e0);
      const double rhs = detail::half_square_sum(a, deg, basis);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      ++cases;
    }
  }
  return {5, "timelike sum rule", worst <= 1e-12, detail::fmt("%d form/basis pairs, max rel err %.3e", cases, worst)};
}

inline CriterionResult ac6_maxwell(std::uint64_t) {
  const FrameRef f = minkowski(4);
  const Tensor F = wedge(basis_covector(f, 0), basis_covector(f, 1));
  const Tensor t = superenergy(F).tensor;
  const Tensor want(f, 2, {0.5, 0, 0, 0, 0, -0.5, 0, 0, 0, 0, 0.5, 0, 0, 0, 0, 0.5});
  std::vector<std::string> fails;
  if (max_abs_diff(t, want) > 1e-14) fails.push_back("T");
  if (max_abs_diff(square_sym2(t), 0.25 * metric_tensor(f)) > 1e-14) fails.push_back("T^2");
  if (std::abs(trace(t)) > 1e-14) fails.push_back("trace");
  if (!is_maxwell4(t).accepted) fails.push_back("is_maxwell4");
  try {
    const auto d = decompose_dp2(t);
    if (d.terms.size() != 1 || d.terms[0].p != 2 || !is_simple(d.terms[0].form)) fails.push_back("decompose");
  } catch (const Error&) {
    fails.push_back("decompose");
  }
  const auto pf = pform_test(2.0 * t);
  if (!pf || pf->p != 2 || pf->sign != 1) fails.push_back("pform_test");
  std::string detail = "T, T^2, trace, is_maxwell4, decomposition, pform_test";
  if (!fails.empty()) {
    detail = "failed:";
    for (const auto& s : fails) detail += " " + s;
  }
  return {6, "Maxwell pipeline", fails.empty(), detail};
}

inline CriterionResult ac7_rainich(std::uint64_t seed) {
  gen::Rng rng(seed);
  const int n = 4;
  int wrong = 0, false_accept = 0;
  double param_err = 0;
  enum Cls { maxwell, timelike, spacelike, null_scalar, fluid, dust };
  for (int cls = maxwell; cls <= dust; ++cls)
    for (int i = 0; i < 100; ++i) {
      const FrameRef f = gen::random_frame(n, rng);
      const auto basis = gen::random_orthonormal_basis(*f, rng);
      const auto th = gen::coframe(f, basis);
      const double amp = gen::uniform(rng, 0.3, 3);
      Tensor t(f, 2);
      double rho = 0, p = 0;
      switch (cls) {
        case maxwell: t = build_em(EMKind::maxwell, {.form = wedge(gen::random_covector(f, rng), gen::random_covector(f, rng))}, f); break;
        case timelike: t = build_em(EMKind::scalar, {.form = amp * th[0]}, f); break;
        case spacelike: t = build_em(EMKind::scalar, {.form = amp * th[1]}, f); break;
        case null_scalar: t = build_em(EMKind::scalar, {.form = amp * (th[0] + th[1])}, f); break;
        case fluid:
          rho = gen::uniform(rng, 0.5, 3);
          p = gen::uniform(rng, -0.95, 0.95) * rho;
          t = build_em(EMKind::fluid, {.rho = rho, .pressure = p, .velocity = basis[0]}, f);
          break;
        case dust:
          rho = gen::uniform(rng, 0.5, 3);
          t = build_em(EMKind::dust, {.rho = rho, .velocity = basis[0]}, f);
          break;
      }
      const bool mx = is_maxwell4(t).accepted;
      const auto sc = is_scalar_field(t);
      const auto fl = is_perfect_fluid(t);
      const auto du = is_dust(t);
      // Tensors that coincide algebraically: dust is the lambda = mu fluid, a timelike
      // gradient is the stiff (lambda = 0) fluid, a null gradient is a null Maxwell field.
      bool own = false;
      switch (cls) {
        case maxwell: own = mx; false_accept += sc.has_value() + !fl.empty() + du.has_value(); break;
        case timelike:
        case spacelike:
        case null_scalar: {
          const auto want = cls == timelike ? ScalarCharacter::timelike
                            : cls == spacelike ? ScalarCharacter::spacelike : ScalarCharacter::null;
          own = sc && sc->character == want;
          false_accept += du.has_value() + (cls != null_scalar && mx);
          if (cls == spacelike || cls == null_scalar) false_accept += !fl.empty();
          if (cls == timelike) {
            bool stiff = fl.size() == 1 && std::abs(fl[0].lambda) <= 1e-9 * amp * amp;
            false_accept += !fl.empty() && !stiff;
          }
          break;
        }
        case fluid: {
          own = fl.size() == 1;
          if (own) param_err = std::max({param_err, std::abs(fl[0].lambda - (rho - p) / 2) / rho,
                                         std::abs(fl[0].mu - (rho + p) / 2) / rho});
          false_accept += mx + sc.has_value() + du.has_value();
          break;
        }
        case dust:
          own = du.has_value();
          if (own) param_err = std::max(param_err, std::abs(du->rho - rho) / rho);
          false_accept += mx + sc.has_value() + !(fl.size() == 1 && std::abs(fl[0].lambda - fl[0].mu) <= 1e-9 * rho);
          break;
      }
      wrong += !own;
    }
  const bool ok = wrong == 0 && false_accept == 0 && param_err <= 1e-9;
  return {7, "Rainich round trips", ok,
          detail::fmt("600 generators, misclassified %d, cross-class false accepts %d, max param err %.3e", wrong,
                      false_accept, param_err)};
}

inline CriterionResult ac8_decomposition(std::uint64_t seed) {
  gen::Rng rng(seed);
  double worst = 0, min_alpha = 0;
  int mismatch = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = 3 + i % 3;
    const FrameRef f = gen::random_frame(n, rng);
    const auto basis = gen::random_orthonormal_basis(*f, rng);
    const auto th = gen::coframe(f, basis);
    double pmax = 0;
    Tensor t(f, 2);
    for (int a = 1; a < n; ++a) {
      const double p = gen::uniform(rng, -1, 1);
      pmax = std::max(pmax, std::abs(p));
      t = t + p * outer(th[a], th[a]);
    }
    const double mu = pmax + (i % 4 == 0 ? 0.0 : gen::uniform(rng, 0, 1));
    t = t + mu * outer(th[0], th[0]);
    const auto d = decompose_dp2(t);
    Tensor sum(f, 2);
    for (const auto& term : d.terms) {
      sum = sum + superenergy(FoldedForm(term.form, {{term.p}, {}})).tensor;
      min_alpha = std::min(min_alpha, term.weight);
    }
    worst = std::max(worst, detail::rel_err(sum, t));
  }
  // Acceptance by the exact test coincides with decomposability.
  for (int i = 0; i < 200; ++i) {
    const int n = 3 + i % 3;
    const FrameRef f = gen::random_frame(n, rng);
    Tensor t(f, 2);
    const auto th = gen::coframe(f, gen::random_orthonormal_basis(*f, rng));
    for (int a = 0; a < n; ++a) t = t + gen::uniform(rng, -1, 1.5) * outer(th[a], th[a]);
    if (i % 5 == 0) {
      const Tensor l = th[0] + th[1];
      t = gen::uniform(rng, -1, 1) * outer(l, l) + (i % 10 == 0 ? 0.0 : 0.1) * metric_tensor(f);
    }
    const auto v = check_dp2_exact(t, DPSign::plus);
    bool decomposed = true;
    try {
      decompose_dp2(t);
    } catch (const Error&) {
      decomposed = false;
    }
    mismatch += decomposed != (v.member && v.method == DPMethod::exact_eigen);
  }
  const bool ok = worst <= 1e-9 && min_alpha >= -1e-12 && mismatch == 0;
  return {8, "decomposition reassembly", ok,
          detail::fmt("200 tensors, max rel err %.3e, min alpha %.3e, exact/decomposable mismatches %d", worst,
                      min_alpha, mismatch)};
}

inline CriterionResult ac9_stretch(std::uint64_t) {
  std::string bad;
  for (double q : {0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0}) {
    const auto pt = builtin_example("minkowski_stretch", {.q = q});
    const auto v = check_proper_causal(pt.candidate, MapData{*pt.jacobian, pt.base_frame});
    if (v.properly_related != (q >= 1)) bad += detail::fmt(" q=%g wrong verdict;", q);
    if (q == 1.0 && (!v.conformal_factor || std::abs(*v.conformal_factor - 1) > 1e-12 || v.canonical_null_count != 4))
      bad += " q=1 conformal/null count;";
    if (q == 2.0 && v.canonical_null_count != 0) bad += " q=2 null count;";
  }
  return {9, "stretch family", bad.empty(), bad.empty() ? "accepted exactly for q >= 1; q=1 conformal with 4 null directions; q=2 none" : bad};
}

inline CriterionResult ac10_symmetry(std::uint64_t) {
  std::string bad;
  for (auto [a, adot] : std::vector<std::pair<double, double>>{{1, -1}, {2, -0.5}, {0.5, -2}, {1, 0}}) {
    const auto pt = builtin_example("robertson_walker", {.a = a, .adot = adot});
    const auto v = check_generalized_symmetry(pt.candidate, adot / a);
    if (!v.feasible || !v.psi_max || *v.psi_max < adot / a || !v.psi_admitted.value_or(false))
      bad += detail::fmt(" RW(a=%g, adot=%g) not feasible at adot/a;", a, adot);
  }
  for (auto [a, adot] : std::vector<std::pair<double, double>>{{1, 1}, {2, 0.3}}) {
    const auto pt = builtin_example("robertson_walker", {.a = a, .adot = adot});
    if (check_generalized_symmetry(pt.candidate).feasible) bad += detail::fmt(" RW(a=%g, adot=%g) feasible;", a, adot);
  }
  const auto ks = builtin_example("kerr_schild", {.amplitude = -3});
  const auto kv = check_generalized_symmetry(ks.candidate, 0.0);
  if (!kv.feasible || !kv.psi_admitted.value_or(false)) bad += " Kerr-Schild not feasible at psi = 0;";
  return {10, "generalized symmetry", bad.empty(),
          bad.empty() ? "RW adot<=0 admits adot/a, adot>0 infeasible, Kerr-Schild feasible at psi=0" : bad};
}

inline CriterionResult ac11_wavefront(std::uint64_t) {
  double spread = 0, law = 0, resc = 0;
  const std::vector<double> cuts{1, 2, 5};
  for (int n : {3, 4, 5}) {
    const auto b = lightcone_example(n, 1, 5, 100);
    for (auto kind : {IntegralKind::em, IntegralKind::grav}) {
      const auto ci = conserved_integrals(b, cuts, kind);
      spread = std::max(spread, ci.max_rel_spread);
      for (double rho : {0.5, 2.0}) {
        std::vector<double> scaled;
        for (double c : cuts) scaled.push_back(c / rho);
        const auto cr = conserved_integrals(rescale_bundle(b, rho), scaled, kind);
        for (std::size_t i = 0; i < cuts.size(); ++i)
          resc = std::max(resc, std::abs(cr.values[i] - ci.values[i]) / std::abs(ci.values[i]));
      }
    }
    const auto tr = transport_em(b.generators[0]);
    for (std::size_t i = 0; i < tr.t.size(); ++i)
      law = std::max(law, std::abs(tr.values[i] - std::pow(tr.t[i], -(n - 2))) / std::pow(tr.t[i], -(n - 2)));
  }
  const bool ok = spread <= 1e-8 && law <= 1e-8 && resc <= 1e-10;
  return {11, "wavefront conservation", ok,
          detail::fmt("cut spread %.3e, |c|^2 law err %.3e, rescaling err %.3e", spread, law, resc)};
}

inline CriterionResult ac12_jumps(std::uint64_t seed) {
  gen::Rng rng(seed);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 4 + i % 2;
    const FrameRef f = gen::random_frame(n, rng);
    const auto th = gen::coframe(f, gen::random_orthonormal_basis(*f, rng));
    const Tensor nn = gen::uniform(rng, 0.5, 2) * (th[0] + th[1]);
    auto screen = [&] {
      Tensor w = gen::uniform(rng, -1, 1) * nn;
      for (int a = 2; a < n; ++a) w = w + gen::uniform(rng, -1, 1) * th[a];
      return w;
    };
    // Trace-free screen part plus n (x) v + v (x) n + beta n (x) n.
    Tensor b(f, 2);
    double tr = 0;
    std::vector<double> diag;
    for (int a = 2; a < n; ++a) diag.push_back(gen::uniform(rng, -1, 1));
    for (double x : diag) tr += x;
    for (std::size_t k = 0; k < diag.size(); ++k) diag[k] -= tr / diag.size();
    for (int a = 2; a < n; ++a) {
      b = b + diag[a - 2] * outer(th[a], th[a]);
      for (int c = a + 1; c < n; ++c) {
        const double s = gen::uniform(rng, -1, 1);
        b = b + s * (outer(th[a], th[c]) + outer(th[c], th[a]));
      }
    }
    Tensor v(f, 1);
    for (int a = 2; a < n; ++a) v = v + gen::uniform(rng, -1, 1) * th[a];
    b = b + outer(nn, v) + outer(v, nn) + gen::uniform(rng, -1, 1) * outer(nn, nn);
    const JumpData jd{nn, screen(), b, screen()};
    for (const auto& [k, id] : jump_superenergy(jd)) worst = std::max(worst, id.residual);
  }
  return {12, "jump identities", worst <= 1e-12, detail::fmt("50 jump data sets, max residual %.3e", worst)};
}

inline CriterionResult ac13_composition(std::uint64_t seed) {
  gen::Rng rng(seed);
  int failures = 0, chains = 0, attempts = 0;
  auto random_map = [&](const FrameRef& from, const FrameRef& to) {
    // Orthonormal coordinates of `from` -> cone-preserving diagonal -> orthonormal basis of `to`, plus noise.
    const int n = from->dim();
    const auto bf = gen::random_orthonormal_basis(*from, rng);
    const auto bt = gen::random_orthonormal_basis(*to, rng);
    Matrix ef(n, n), et(n, n), d = Matrix::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c) {
        ef(c, a) = bf[a][c];
        et(c, a) = bt[a][c];
      }
    d(0, 0) = gen::uniform(rng, 1, 2);
    for (int a = 1; a < n; ++a) d(a, a) = gen::uniform(rng, 0.3, 1) * (gen::uniform(rng, 0, 1) < 0.5 ? -1 : 1);
    const Matrix base = et * d * ef.inverse();
    // Redraw the noise until the map is a well-conditioned local diffeomorphism.
    for (;;) {
      Matrix j = base;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) j(a, c) += 0.05 * gen::uniform(rng, -1, 1);
      const Eigen::JacobiSVD<Matrix> svd(j);
      const auto& s = svd.singularValues();
      if (s(n - 1) > 1e-3 * s(0)) return j;
    }
  };
  while (chains < 50 && attempts < 5000) {
    ++attempts;
    const int n = 3 + attempts % 3;
    const FrameRef g = gen::random_frame(n, rng), h = gen::random_frame(n, rng), u = gen::random_frame(n, rng);
    const Matrix j1 = random_map(g, h), j2 = random_map(h, u);
    if (!check_proper_causal(pullback_metric(g, j1, metric_tensor(h))).properly_related) continue;
    if (!check_proper_causal(pullback_metric(h, j2, metric_tensor(u))).properly_related) continue;
    ++chains;
    failures += !check_proper_causal(pullback_metric(g, j2 * j1, metric_tensor(u))).properly_related;
  }
  const bool ok = chains == 50 && failures == 0;
  return {13, "composition preorder", ok, detail::fmt("%d accepted chains, %d composite failures", chains, failures)};
}

inline std::vector<CriterionResult> run_all(std::uint64_t seed = kDefaultSeed) {
  using Fn = CriterionResult (*)(std::uint64_t);
  const Fn fns[] = {ac1_closed_form, ac2_duality, ac3_product_law, ac4_causality, ac5_sum_rule,
                    ac6_maxwell,     ac7_rainich, ac8_decomposition, ac9_stretch, ac10_symmetry,
                    ac11_wavefront,  ac12_jumps,  ac13_composition};
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < std::size(fns); ++i) {
    try {
      out.push_back(fns[i](seed + i));
    } catch (const std::exception& e) {
      out.push_back({static_cast<int>(i + 1), "criterion " + std::to_string(i + 1), false,
                     std::string("exception: ") + e.what()});
    }
  }
  return out;
}

inline std::string format_line(const CriterionResult& r) {
  return std::string(r.pass ? "PASS" : "FAIL") + "  AC" + std::to_string(r.id) + " " + r.name + ": " + r.detail;
}

}  // namespace sek::acceptance
