#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sek/causal_maps.hpp"
#include "sek/generators.hpp"

using namespace sek;

namespace {

const FrameRef M4 = minkowski(4);

Tensor D(std::vector<double> d) { return oracle::diag(M4, std::move(d)); }

Matrix stretch(double q) {
  Matrix j = Matrix::Identity(4, 4);
  j(0, 0) = q;
  return j;
}

/// Map from orthonormal coordinates of one frame to another, time scaled by ts and space by ss.
Matrix frame_map(const FrameRef& from, const FrameRef& to, double ts, double ss, gen::Rng& rng) {
  const int n = from->dim();
  const auto bf = gen::random_orthonormal_basis(*from, rng, 0.6);
  const auto bt = gen::random_orthonormal_basis(*to, rng, 0.6);
  Matrix ef(n, n), et(n, n), d = Matrix::Identity(n, n) * ss;
  d(0, 0) = ts;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      ef(c, a) = bf[a][c];
      et(c, a) = bt[a][c];
    }
  return et * d * ef.inverse();
}

}  // namespace

TEST(Pullback, Examples) {
  const Tensor g = metric_tensor(M4);
  EXPECT_EQ(max_abs_diff(pullback_metric(M4, Matrix::Identity(4, 4), g), g), 0);
  EXPECT_EQ(max_abs_diff(pullback_metric(M4, stretch(3), g), D({-9, 1, 1, 1})), 0);
  EXPECT_EQ(max_abs_diff(pullback_metric(M4, 2 * Matrix::Identity(4, 4), g), 4.0 * g), 0);
  try {
    pullback_metric(M4, stretch(0), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SingularJacobian);
  }
}

TEST(ProperCausal, StretchExamples) {
  auto v = check_proper_causal(D({-1, 1, 1, 1}));
  EXPECT_TRUE(v.properly_related);
  ASSERT_TRUE(v.conformal_factor);
  EXPECT_DOUBLE_EQ(*v.conformal_factor, 1);
  EXPECT_EQ(v.canonical_null_count, 4);

  v = check_proper_causal(D({-4, 1, 1, 1}));
  EXPECT_TRUE(v.properly_related);
  EXPECT_EQ(v.canonical_null_count, 0);

  const Tensor quarter = D({-0.25, 1, 1, 1});
  v = check_proper_causal(quarter);
  EXPECT_FALSE(v.properly_related);
  ASSERT_TRUE(v.witness);
  for (const auto& k : *v.witness) EXPECT_NEAR(M4->dot(k, k), 0, 1e-12);
  // phg in DP- means -phg evaluates >= 0; the witness breaks that.
  EXPECT_LT(oracle::eval(-1.0 * quarter, *v.witness), 0);

  try {
    check_proper_causal(D({0, 1, 1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateCandidate);
  }
}

TEST(ProperCausal, OrientationFlip) {
  Matrix j = Matrix::Identity(4, 4);
  j(0, 0) = -2;
  const Tensor phg = pullback_metric(M4, j, metric_tensor(M4));
  const auto v = check_proper_causal(phg, MapData{j, M4});
  EXPECT_TRUE(v.properly_related);
  EXPECT_TRUE(v.orientation_flipped);
  EXPECT_FALSE(check_proper_causal(phg, MapData{stretch(2), M4}).orientation_flipped);
}

TEST(CanonicalNull, Examples) {
  EXPECT_EQ(canonical_null_directions(4.0 * metric_tensor(M4)).size(), 4u);
  EXPECT_TRUE(canonical_null_directions(D({-4, 1, 1, 1})).empty());
  auto ks = canonical_null_directions(D({-1, 1, 4, 4}));
  ASSERT_EQ(ks.size(), 2u);
  std::sort(ks.begin(), ks.end());
  EXPECT_LT(oracle::max_diff(ks[0], {1, -1, 0, 0}), 1e-12);
  EXPECT_LT(oracle::max_diff(ks[1], {1, 1, 0, 0}), 1e-12);
}

TEST(ConformalFactor, Examples) {
  EXPECT_DOUBLE_EQ(*conformal_factor(4.0 * metric_tensor(M4)), 4);
  EXPECT_DOUBLE_EQ(*conformal_factor(metric_tensor(M4)), 1);
  EXPECT_FALSE(conformal_factor(D({-4, 1, 1, 1})));
  EXPECT_FALSE(conformal_factor(-1.0 * metric_tensor(M4)));
}

TEST(GeneralizedSymmetry, Examples) {
  auto v = check_generalized_symmetry(D({0, -2, -2, -2}), -1.0);
  EXPECT_TRUE(v.feasible);
  ASSERT_TRUE(v.psi_admitted);
  EXPECT_TRUE(*v.psi_admitted);
  ASSERT_TRUE(v.psi_max);
  EXPECT_NEAR(*v.psi_max, -0.5, 1e-12);

  v = check_generalized_symmetry(D({0, 2, 2, 2}));
  EXPECT_FALSE(v.feasible);
  ASSERT_TRUE(v.witness);
  const Vector k = (*v.witness)[0];
  EXPECT_NEAR(M4->dot(k, k), 0, 1e-12);
  EXPECT_GT(oracle::eval(D({0, 2, 2, 2}), {k, k}), 0);

  for (double c : {-3.0, 0.5, 2.0}) {
    v = check_generalized_symmetry(c * metric_tensor(M4), c / 2);
    EXPECT_TRUE(v.feasible);
    EXPECT_TRUE(*v.psi_admitted);
    EXPECT_NEAR(*v.psi_max, c / 2, 1e-12);
    EXPECT_FALSE(*check_generalized_symmetry(c * metric_tensor(M4), c / 2 + 0.1).psi_admitted);
  }
}

TEST(GeneralizedSymmetry, NullDeformationIsSampled) {
  BuiltinParams p;
  p.amplitude = -3;
  const auto pt = builtin_example("kerr_schild", p);
  const auto v = check_generalized_symmetry(pt.candidate, 0.0);
  EXPECT_EQ(v.method, DPMethod::sampled);
  EXPECT_TRUE(v.feasible);
  EXPECT_TRUE(*v.psi_admitted);
  ASSERT_TRUE(v.psi_max);
  EXPECT_NEAR(*v.psi_max, 0, 1e-9);
  p.amplitude = 3;
  EXPECT_FALSE(check_generalized_symmetry(builtin_example("kerr_schild", p).candidate).feasible);
}

TEST(Builtins, Examples) {
  BuiltinParams p;
  p.q = 2;
  const auto s = builtin_example("minkowski_stretch", p);
  EXPECT_EQ(max_abs_diff(s.candidate, D({-4, 1, 1, 1})), 0);
  ASSERT_TRUE(s.jacobian);

  p.a = 1;
  p.adot = -1;
  EXPECT_EQ(max_abs_diff(builtin_example("robertson_walker", p).candidate, D({0, -2, -2, -2})), 0);

  p.amplitude = -3;
  const auto ks = builtin_example("kerr_schild", p);
  const Tensor l = covector(M4, {1, 1, 0, 0});
  EXPECT_EQ(max_abs_diff(ks.candidate, -3.0 * outer(l, l)), 0);
  EXPECT_TRUE(check_dp_sampled(ks.candidate, DPSign::minus).member);

  try {
    builtin_example("schwarzschild");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownExample);
  }
}

TEST(CausalMapsProperty, RobertsonWalkerIdentity) {
  gen::Rng rng(91);
  for (int trial = 0; trial < 40; ++trial) {
    BuiltinParams p;
    p.dim = gen::uniform_int(rng, 2, 6);
    p.a = gen::uniform(rng, 0.2, 3);
    p.adot = gen::uniform(rng, -2, 2);
    const auto pt = builtin_example("robertson_walker", p);
    const FrameRef f = pt.base_frame;
    const Tensor xi = basis_covector(f, 0);
    const Tensor expected = (2 * p.adot / p.a) * superenergy(xi).tensor + (p.adot / p.a) * metric_tensor(f);
    EXPECT_LT(max_abs_diff(pt.candidate, expected), 1e-12 * std::max(1.0, expected.max_abs()));
  }
}

TEST(CausalMapsProperty, StretchFamilyThreshold) {
  for (double q : {0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0}) {
    BuiltinParams p;
    p.q = q;
    const auto pt = builtin_example("minkowski_stretch", p);
    EXPECT_EQ(check_proper_causal(pt.candidate).properly_related, q >= 1) << "q=" << q;
  }
}

TEST(CausalMapsProperty, CompositionPreorder) {
  gen::Rng rng(92);
  int chains = 0;
  for (int trial = 0; trial < 200 && chains < 60; ++trial) {
    const int n = gen::uniform_int(rng, 3, 5);
    const FrameRef g = gen::random_frame(n, rng), h = gen::random_frame(n, rng), u = gen::random_frame(n, rng);
    // Time stretched at least as much as space keeps the cone inside: accepted by construction.
    const Matrix j1 = frame_map(g, h, gen::uniform(rng, 1, 2), gen::uniform(rng, 0.3, 1), rng);
    const Matrix j2 = frame_map(h, u, gen::uniform(rng, 1, 2), gen::uniform(rng, 0.3, 1), rng);
    const auto v1 = check_proper_causal(pullback_metric(g, j1, metric_tensor(h)));
    const auto v2 = check_proper_causal(pullback_metric(h, j2, metric_tensor(u)));
    ASSERT_TRUE(v1.properly_related && v2.properly_related);
    ++chains;
    EXPECT_TRUE(check_proper_causal(pullback_metric(g, j2 * j1, metric_tensor(u))).properly_related);
  }
  EXPECT_EQ(chains, 60);
}

TEST(CausalMapsProperty, PullbackPreservesPastCausalCovectors) {
  gen::Rng rng(93);
  std::mt19937 draw(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = gen::uniform_int(rng, 3, 5);
    const FrameRef g = gen::random_frame(n, rng), h = gen::random_frame(n, rng);
    const Matrix j = frame_map(g, h, gen::uniform(rng, 1, 2), gen::uniform(rng, 0.3, 1), rng);
    ASSERT_TRUE(check_proper_causal(pullback_metric(g, j, metric_tensor(h))).properly_related);
    const auto eh = oracle::gram_schmidt(*h);
    for (int s = 0; s < 20; ++s) {
      // Past-causal covector in h: lower a future causal vector and flip it.
      Vector k = oracle::null_vector(eh, draw);
      const double stretch_t = 1 + s * 0.1;
      for (int a = 0; a < n; ++a) k[a] += (stretch_t - 1) * eh[0][a];
      const Tensor w = -1.0 * lower_vector(h, k);
      Vector pulled(n, 0.0);
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) pulled[b] += j(a, b) * w[a];
      const Vector up = raise_covector(covector(g, pulled));
      const auto c = classify_vector(g, up);
      EXPECT_NE(c.kind, CausalKind::spacelike);
      EXPECT_EQ(c.orientation, TimeOrientation::past);
    }
  }
}

TEST(CausalMapsProperty, MonotonePsiFeasibility) {
  gen::Rng rng(94);
  for (int trial = 0; trial < 40; ++trial) {
    const FrameRef f = gen::random_frame(4, rng);
    const auto co = gen::coframe(f, gen::random_orthonormal_basis(*f, rng));
    // l0 + li <= 0 keeps the deformation feasible.
    const double l0 = gen::uniform(rng, -1, 1);
    Tensor l = l0 * outer(co[0], co[0]);
    for (int i = 1; i < 4; ++i) l = l + gen::uniform(rng, -2, -l0) * outer(co[i], co[i]);
    const auto v = check_generalized_symmetry(l);
    ASSERT_TRUE(v.feasible);
    for (double drop : {0.0, 0.1, 1.0, 10.0}) {
      const auto w = check_generalized_symmetry(l, *v.psi_max - drop);
      EXPECT_TRUE(*w.psi_admitted) << "drop " << drop;
    }
    EXPECT_FALSE(*check_generalized_symmetry(l, *v.psi_max + 1e-3).psi_admitted);
  }
}
