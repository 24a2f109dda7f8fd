#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sek/generators.hpp"
#include "sek/rainich.hpp"

using namespace sek;

namespace {

const FrameRef M4 = minkowski(4);

Tensor D(std::vector<double> d) { return oracle::diag(M4, std::move(d)); }
Tensor dx(int a) { return basis_covector(M4, a); }

}  // namespace

TEST(PFormTest, Examples) {
  auto r = pform_test(D({1, -1, 1, 1}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->sign, 1);
  EXPECT_EQ(r->p, 2);
  r = pform_test(D({1, 1, 1, 1}));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->sign, 1);
  EXPECT_EQ(r->p, 1);
  EXPECT_FALSE(pform_test(2.0 * metric_tensor(M4)));
}

TEST(PFormTest, NormalisedSimpleFormsAcrossDimensions) {
  gen::Rng rng(61);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen::uniform_int(rng, 2, 6);
    const FrameRef f = gen::random_frame(n, rng);
    const int p = gen::uniform_int(rng, 1, n - 1);
    const auto co = gen::coframe(f, gen::random_orthonormal_basis(*f, rng));
    // Normalised simple p-form: timelike or spacelike wedge of orthonormal coframe elements.
    const int first = gen::uniform_int(rng, 0, 1) ? 0 : 1;
    if (first + p > n) continue;
    const Tensor w = p == 1 ? co[first] : wedge(std::span<const Tensor>(co.data() + first, p));
    const double s = gen::uniform_int(rng, 0, 1) ? 1.0 : -1.0;
    const Tensor t = (2.0 * s) * superenergy(w).tensor;
    const auto r = pform_test(t);
    ASSERT_TRUE(r) << "n=" << n << " p=" << p;
    EXPECT_EQ(r->sign, static_cast<int>(s));
    // A spacelike simple p-form has the same superenergy as its timelike (N-p)-form dual.
    EXPECT_EQ(r->p, first == 0 ? p : n - p);
    EXPECT_LE(r->residual, kTolAlg);
    const auto d = decompose_dp2(r->sign * t);
    ASSERT_EQ(d.terms.size(), 1u);
    EXPECT_EQ(d.terms[0].p, r->p);
    EXPECT_TRUE(check_dp2_exact(r->sign * t, DPSign::plus).member);
  }
}

TEST(IsMaxwell4, Examples) {
  auto m = is_maxwell4(D({0.5, -0.5, 0.5, 0.5}));
  EXPECT_TRUE(m.accepted);
  EXPECT_NEAR(m.c, 0.25, 1e-15);
  EXPECT_FALSE(is_maxwell4(metric_tensor(M4)).accepted);
  EXPECT_FALSE(is_maxwell4(D({1, 2, 3, 4})).accepted);
  try {
    is_maxwell4(metric_tensor(minkowski(3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::WrongDimension);
  }
}

TEST(IsScalarField, Examples) {
  auto s = is_scalar_field(D({0.5, 0.5, 0.5, 0.5}));
  ASSERT_TRUE(s);
  ASSERT_TRUE(s->beta);
  EXPECT_NEAR(*s->beta, 2, 1e-12);
  EXPECT_EQ(s->character, ScalarCharacter::timelike);
  s = is_scalar_field(D({0.5, 0.5, -0.5, -0.5}));
  ASSERT_TRUE(s);
  EXPECT_NEAR(*s->beta, -2, 1e-12);
  EXPECT_EQ(s->character, ScalarCharacter::spacelike);
  const Tensor l = dx(0) + dx(1);
  s = is_scalar_field(outer(l, l));
  ASSERT_TRUE(s);
  EXPECT_EQ(s->character, ScalarCharacter::null);
  EXPECT_FALSE(s->beta);
  EXPECT_FALSE(is_scalar_field(D({1, 2, 3, 4})));
}

TEST(IsPerfectFluid, Examples) {
  auto f = is_perfect_fluid(D({3, 1, 1, 1}));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f[0].lambda, 1, 1e-12);
  EXPECT_NEAR(f[0].mu, 2, 1e-12);
  f = is_perfect_fluid(D({2, 0, 0, 0}));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_NEAR(f[0].lambda, 1, 1e-12);
  EXPECT_NEAR(f[0].mu, 1, 1e-12);
  EXPECT_TRUE(is_perfect_fluid(D({1, 2, 2, 2})).empty());
}

TEST(IsDust, Examples) {
  auto d = is_dust(D({2, 0, 0, 0}));
  ASSERT_TRUE(d);
  EXPECT_NEAR(d->rho, 2, 1e-14);
  EXPECT_FALSE(is_dust(D({3, 1, 1, 1})));
  EXPECT_FALSE(is_dust(D({-2, 0, 0, 0})));
}

TEST(BuildEM, Examples) {
  EXPECT_EQ(max_abs_diff(build_em(EMKind::maxwell, {wedge(dx(0), dx(1))}, M4), D({0.5, -0.5, 0.5, 0.5})), 0);
  EMParams fluid;
  fluid.rho = 3;
  fluid.pressure = 1;
  EXPECT_LT(max_abs_diff(build_em(EMKind::fluid, fluid, M4), D({3, 1, 1, 1})), 1e-15);
  EXPECT_EQ(max_abs_diff(build_em(EMKind::scalar, {dx(0)}, M4), D({0.5, 0.5, 0.5, 0.5})), 0);
  EXPECT_THROW(build_em(EMKind::maxwell, {}, M4), Error);
}

TEST(RainichProperty, MaxwellRoundTrip) {
  gen::Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const FrameRef f = gen::random_frame(4, rng);
    const Tensor F = wedge(gen::random_covector(f, rng), gen::random_covector(f, rng));
    const Tensor t = build_em(EMKind::maxwell, {F}, f);
    const auto m = is_maxwell4(t);
    EXPECT_TRUE(m.accepted);
    EXPECT_GE(m.c, 0);
    EXPECT_LE(m.square_residual, kTolAlg);
    EXPECT_LE(m.trace_residual, kTolAlg);
    EXPECT_FALSE(is_dust(t));
  }
}

TEST(RainichProperty, ScalarCharacterRoundTrip) {
  gen::Rng rng(73);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = gen::uniform_int(rng, 3, 6);
    const FrameRef f = gen::random_frame(n, rng);
    const auto basis = gen::random_orthonormal_basis(*f, rng);
    const auto co = gen::coframe(f, basis);
    Tensor dphi = gen::random_covector(f, rng);
    ScalarCharacter want;
    if (trial % 3 == 2) {
      dphi = gen::uniform(rng, 0.5, 2) * (co[0] + co[1]);
      want = ScalarCharacter::null;
    } else {
      const double q = inner_full(dphi, dphi);
      if (std::abs(q) < 1e-3) continue;
      want = q < 0 ? ScalarCharacter::timelike : ScalarCharacter::spacelike;
    }
    const Tensor t = build_em(EMKind::scalar, {dphi}, f);
    const auto s = is_scalar_field(t);
    ASSERT_TRUE(s) << "trial " << trial;
    EXPECT_EQ(s->character, want);
    if (s->beta) EXPECT_NEAR(std::abs(*s->beta), n - 2, 1e-9);
    if (want == ScalarCharacter::null) {
      EXPECT_LT(std::abs(trace(t)), 1e-10 * t.max_abs() * n);
      EXPECT_LT(std::abs(trace(square_sym2(t))), 1e-10 * t.max_abs() * t.max_abs() * n);
    }
  }
}

TEST(RainichProperty, FluidRoundTripAgainstOracle) {
  gen::Rng rng(79);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = gen::uniform_int(rng, 3, 6);
    const FrameRef f = gen::random_frame(n, rng);
    const double rho = gen::uniform(rng, 0.2, 3);
    double p = gen::uniform(rng, -rho, rho);
    if (std::abs(p) < 1e-3) p = 0.01;
    EMParams params;
    params.rho = rho;
    params.pressure = p;
    const Tensor t = build_em(EMKind::fluid, params, f);
    const auto truth = oracle::fluid_truth(rho, p);
    const auto sols = is_perfect_fluid(t);
    bool found = false;
    for (const auto& s : sols) {
      EXPECT_LE(s.residual, kTolAlg);
      if (std::abs(s.lambda - truth.lambda) <= 1e-9 && std::abs(s.mu - truth.mu) <= 1e-9) found = true;
    }
    EXPECT_TRUE(found) << "rho=" << rho << " p=" << p;
  }
}

TEST(RainichProperty, DustRoundTripAndOverlap) {
  gen::Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const FrameRef f = gen::random_frame(gen::uniform_int(rng, 2, 6), rng);
    EMParams params;
    params.rho = gen::uniform(rng, 0.1, 5);
    const Tensor t = build_em(EMKind::dust, params, f);
    const auto d = is_dust(t);
    ASSERT_TRUE(d);
    EXPECT_NEAR(d->rho, params.rho, 1e-9 * params.rho);
    const auto fl = is_perfect_fluid(t);
    ASSERT_FALSE(fl.empty());
    EXPECT_NEAR(fl[0].lambda, fl[0].mu, 1e-9 * params.rho);
    if (f->dim() == 4) EXPECT_FALSE(is_maxwell4(t).accepted);
  }
}

TEST(RainichProperty, ClassificationResidualsWithinTolerance) {
  gen::Rng rng(89);
  for (int trial = 0; trial < 100; ++trial) {
    const FrameRef f = gen::random_frame(4, rng);
    const auto kind = static_cast<EMKind>(trial % 4);
    EMParams params;
    if (kind == EMKind::maxwell) params.form = wedge(gen::random_covector(f, rng), gen::random_covector(f, rng));
    if (kind == EMKind::scalar) params.form = gen::random_covector(f, rng);
    params.rho = gen::uniform(rng, 0.5, 2);
    params.pressure = gen::uniform(rng, -0.4, 0.4);
    const EMClassification c = classify_em(build_em(kind, params, f));
    EXPECT_NE(c.kind, EMKindResult::unknown);
    for (const auto& [name, r] : c.residuals) EXPECT_LE(r, kTolAlg) << name;
  }
}

TEST(ClassifyEM, PrecedenceAndUnknown) {
  EXPECT_EQ(classify_em(D({0.5, -0.5, 0.5, 0.5})).kind, EMKindResult::maxwell);
  EXPECT_EQ(classify_em(D({1, -1, 1, 1})).kind, EMKindResult::pform);
  EXPECT_EQ(classify_em(D({3, 1, 1, 1})).kind, EMKindResult::perfect_fluid);
  EXPECT_EQ(classify_em(D({2, 0, 0, 0})).kind, EMKindResult::dust);
  EXPECT_EQ(classify_em(D({1, 2, 3, 4})).kind, EMKindResult::unknown);
}
