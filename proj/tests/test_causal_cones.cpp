#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sek/causal_cones.hpp"
#include "sek/folded_forms.hpp"
#include "sek/generators.hpp"

using namespace sek;

namespace {

const FrameRef M4 = minkowski(4);

Tensor ell() { return covector(M4, {1, 1, 0, 0}); }

/// diag(mu, p) in a random orthonormal basis of f.
Tensor eigen_tensor(const FrameRef& f, double mu, const std::vector<double>& p, gen::Rng& rng) {
  const auto basis = gen::random_orthonormal_basis(*f, rng);
  const auto co = gen::coframe(f, basis);
  Tensor t = mu * outer(co[0], co[0]);
  for (std::size_t i = 0; i < p.size(); ++i) t = t + p[i] * outer(co[i + 1], co[i + 1]);
  return t;
}

Tensor random_dominant(const FrameRef& f, gen::Rng& rng) {
  const double mu = gen::uniform(rng, 0.2, 2);
  std::vector<double> p(f->dim() - 1);
  for (double& x : p) x = gen::uniform(rng, -mu, mu);
  return eigen_tensor(f, mu, p, rng);
}

}  // namespace

TEST(SampleNull, AxisDirectionsFirst) {
  const auto ks = sample_null(M4, 8, 99);
  ASSERT_EQ(ks.size(), 8u);
  const std::vector<Vector> axes{{1, 1, 0, 0}, {1, -1, 0, 0}, {1, 0, 1, 0}, {1, 0, -1, 0}, {1, 0, 0, 1}, {1, 0, 0, -1}};
  for (std::size_t i = 0; i < axes.size(); ++i) EXPECT_EQ(ks[i], axes[i]);
}

TEST(SampleNull, NullAndDeterministic) {
  gen::Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const FrameRef f = gen::random_frame(gen::uniform_int(rng, 2, 6), rng);
    const auto a = sample_null(f, 300, 5), b = sample_null(f, 300, 5);
    EXPECT_EQ(a, b);
    for (const auto& k : a) {
      EXPECT_LT(std::abs(f->dot(k, k)), 1e-14 * 100);
      EXPECT_EQ(classify_vector(f, k).orientation, TimeOrientation::future);
    }
  }
  EXPECT_THROW(sample_null(M4, 0), Error);
}

TEST(CheckDPSampled, Examples) {
  EXPECT_TRUE(check_dp_sampled(metric_tensor(M4), DPSign::minus).member);
  EXPECT_TRUE(check_dp_sampled(outer(ell(), ell()), DPSign::plus).member);
  const DPVerdict v = check_dp_sampled(oracle::diag(M4, {1, 2, 0, 0}), DPSign::plus);
  EXPECT_FALSE(v.member);
  ASSERT_TRUE(v.witness);
  ASSERT_TRUE(v.witness_value);
  EXPECT_NEAR(*v.witness_value, -1, 1e-12);
  const auto& w = *v.witness;
  EXPECT_NEAR(oracle::eval(oracle::diag(M4, {1, 2, 0, 0}), w), -1, 1e-12);
  for (const auto& k : w) EXPECT_NEAR(std::abs(k[1]), 1, 1e-6);
  EXPECT_NEAR(w[0][1] * w[1][1], -1, 1e-6);
}

TEST(CheckDPSampled, HigherRankNullProducts) {
  const Tensor l = ell(), m = covector(M4, {1, 0, -1, 0});
  EXPECT_TRUE(check_dp_sampled(outer(std::vector<Tensor>{l, m, l}), DPSign::plus).member);
  const DPVerdict v = check_dp_sampled(-1.0 * outer(std::vector<Tensor>{l, m, l}), DPSign::plus);
  EXPECT_FALSE(v.member);
  ASSERT_TRUE(v.witness);
  EXPECT_LT(oracle::eval(-1.0 * outer(std::vector<Tensor>{l, m, l}), *v.witness), 0);
}

TEST(CheckDP2Exact, Examples) {
  DPVerdict v = check_dp2_exact(oracle::diag(M4, {0.5, -0.5, 0.5, 0.5}), DPSign::plus);
  EXPECT_TRUE(v.member);
  EXPECT_EQ(v.method, DPMethod::exact_eigen);
  EXPECT_NEAR(v.margin, 0, 1e-15);
  v = check_dp2_exact(oracle::diag(M4, {1, 2, 0, 0}), DPSign::plus);
  EXPECT_FALSE(v.member);
  ASSERT_TRUE(v.witness);
  EXPECT_LT(oracle::eval(oracle::diag(M4, {1, 2, 0, 0}), *v.witness), 0);
  v = check_dp2_exact(outer(ell(), ell()), DPSign::plus);
  EXPECT_EQ(v.method, DPMethod::sampled);
  EXPECT_TRUE(v.member);
  EXPECT_THROW(check_dp2_exact(wedge(basis_covector(M4, 0), basis_covector(M4, 1)), DPSign::plus), Error);
}

TEST(SquareSym2, Examples) {
  EXPECT_LT(max_abs_diff(square_sym2(oracle::diag(M4, {0.5, -0.5, 0.5, 0.5})), 0.25 * metric_tensor(M4)), 1e-15);
  EXPECT_EQ(max_abs_diff(square_sym2(metric_tensor(M4)), metric_tensor(M4)), 0);
  EXPECT_EQ(square_sym2(outer(ell(), ell())).max_abs(), 0);
}

TEST(DecomposeDP2, Examples) {
  auto d = decompose_dp2(oracle::diag(M4, {0.5, -0.5, 0.5, 0.5}));
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_EQ(d.terms[0].p, 2);
  EXPECT_NEAR(d.terms[0].weight, 1, 1e-14);
  const Tensor f01 = wedge(basis_covector(M4, 0), basis_covector(M4, 1));
  // The eigenframe fixes e^0 ^ e^1 up to sign.
  EXPECT_LT(std::min(max_abs_diff(d.terms[0].form, f01), max_abs_diff(d.terms[0].form, -f01)), 1e-14);

  d = decompose_dp2(oracle::diag(M4, {1, 1, 1, 1}));
  ASSERT_EQ(d.terms.size(), 1u);
  EXPECT_EQ(d.terms[0].p, 1);
  EXPECT_NEAR(d.terms[0].weight, 2, 1e-14);
  EXPECT_LT(max_abs_diff(d.terms[0].form, std::sqrt(2.0) * basis_covector(M4, 0)), 1e-14);

  try {
    decompose_dp2(metric_tensor(M4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotDominant);
  }
  try {
    decompose_dp2(outer(ell(), ell()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotDiagonalizable);
  }
}

TEST(NullFactors, Examples) {
  const Tensor l = ell();
  auto r = null_factor_test(outer(std::vector<Tensor>{l, l, l}));
  ASSERT_TRUE(r);
  ASSERT_EQ(r->factors.size(), 3u);
  for (const auto& k : r->factors) EXPECT_LT(max_abs_diff(k, l), 1e-12);
  EXPECT_NEAR(r->coefficient, 1, 1e-12);
  EXPECT_FALSE(null_factor_test(metric_tensor(M4)));
  EXPECT_FALSE(null_factor_test(outer(l, basis_covector(M4, 0))));
}

TEST(NullFactors, TermsWedgeBack) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const FrameRef f = gen::random_frame(4, rng);
    const auto d = decompose_dp2(random_dominant(f, rng));
    for (const auto& term : d.terms) {
      EXPECT_TRUE(is_simple(term.form));
      if (term.p < 2) continue;
      const auto ks = null_factors(term, f, d.eigenframe);
      for (const auto& k : ks) EXPECT_LT(std::abs(inner_full(k, k)), 1e-10);
      EXPECT_LT(max_abs_diff(wedge(ks), term.form), 1e-9 * std::max(1.0, term.form.max_abs()));
    }
  }
}

TEST(CausalConesProperty, ExactAgreesWithSampled) {
  gen::Rng rng(500);
  int disagreements = 0, members = 0, counted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const FrameRef f = gen::random_frame(4, rng);
    const double mu = gen::uniform(rng, -1, 2);
    std::vector<double> p(3);
    for (double& x : p) x = gen::uniform(rng, -1.5, 1.5);
    const Tensor t = eigen_tensor(f, mu, p, rng);
    const DPSign sign = trial % 2 ? DPSign::plus : DPSign::minus;
    const DPVerdict e = check_dp2_exact(t, sign);
    const DPVerdict s = check_dp_sampled(t, sign);
    ASSERT_EQ(e.method, DPMethod::exact_eigen);
    ++counted;
    members += e.member;
    if (e.member != s.member && std::abs(e.margin) > kTolClass) ++disagreements;
  }
  EXPECT_EQ(disagreements, 0);
  EXPECT_GT(members, 50);
  EXPECT_LT(members, counted - 50);
}

TEST(CausalConesProperty, ExactMatchesBruteForceOracle) {
  gen::Rng rng(501);
  for (int trial = 0; trial < 60; ++trial) {
    const FrameRef f = gen::random_frame(gen::uniform_int(rng, 2, 5), rng);
    const double mu = gen::uniform(rng, 0.1, 2);
    std::vector<double> p(f->dim() - 1);
    for (double& x : p) x = gen::uniform(rng, -1.3 * mu, 1.3 * mu);
    const Tensor t = eigen_tensor(f, mu, p, rng);
    // Random sampling can only refute membership; a refusal must come with a genuine witness.
    const double oracle_min = oracle::min_on_null_tuples(t, 300, trial);
    const DPVerdict e = check_dp2_exact(t, DPSign::plus);
    if (oracle_min < -1e-12) EXPECT_FALSE(e.member) << "oracle " << oracle_min;
    if (!e.member) {
      ASSERT_TRUE(e.witness);
      for (const auto& k : *e.witness) EXPECT_LT(std::abs(f->dot(k, k)), 1e-9);
      EXPECT_LT(oracle::eval(t, *e.witness), 0);
    }
  }
}

TEST(CausalConesProperty, ConeAlgebra) {
  gen::Rng rng(502);
  for (int trial = 0; trial < 15; ++trial) {
    const FrameRef f = gen::random_frame(gen::uniform_int(rng, 3, 4), rng);
    const Tensor t1 = superenergy(gen::random_pform(f, gen::uniform_int(rng, 1, f->dim() - 1), rng)).tensor;
    const Tensor t2 = random_dominant(f, rng);
    ASSERT_TRUE(check_dp_sampled(t1, DPSign::plus).member);
    ASSERT_TRUE(check_dp_sampled(t2, DPSign::plus).member);
    const double a = gen::uniform(rng, 0, 3), b = gen::uniform(rng, 0, 3);
    EXPECT_TRUE(check_dp_sampled(a * t1 + b * t2, DPSign::plus).member);
    EXPECT_TRUE(check_dp_sampled(outer(t1, t2), DPSign::plus).member);
    EXPECT_TRUE(check_dp_sampled(-1.0 * t2, DPSign::minus).member);
  }
}

TEST(CausalConesProperty, MixedProductLaw) {
  gen::Rng rng(503);
  for (int trial = 0; trial < 12; ++trial) {
    const FrameRef f = gen::random_frame(gen::uniform_int(rng, 3, 4), rng);
    const Tensor plus = trial % 2 ? random_dominant(f, rng)
                                  : superenergy(gen::random_folded(f, {1, 1}, rng)).tensor;
    const Tensor minus = trial % 3 ? -1.0 * random_dominant(f, rng) : metric_tensor(f);
    ASSERT_TRUE(check_dp_sampled(minus, DPSign::minus).member);
    for (int i = 0; i < plus.rank(); ++i)
      for (int j = 0; j < minus.rank(); ++j) {
        const Tensor c = contract_ij(plus, i, minus, j);
        EXPECT_TRUE(check_dp_sampled(c, DPSign::plus).member) << "slots " << i << "," << j;
      }
  }
}

TEST(CausalConesProperty, DecompositionReassembly) {
  gen::Rng rng(504);
  for (int trial = 0; trial < 200; ++trial) {
    const FrameRef f = gen::random_frame(gen::uniform_int(rng, 2, 6), rng);
    const Tensor t = random_dominant(f, rng);
    const auto d = decompose_dp2(t);
    Tensor sum(f, 2);
    for (const auto& term : d.terms) {
      EXPECT_GE(term.weight, -1e-12);
      sum = sum + superenergy(term.form).tensor;
    }
    EXPECT_LE(max_abs_diff(sum, t) / t.max_abs(), 1e-9);
  }
}

TEST(CausalConesProperty, DecompositionExactlyWhenExactlyDominant) {
  gen::Rng rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    const FrameRef f = gen::random_frame(4, rng);
    Tensor t = metric_tensor(f);
    if (trial % 4 == 0) {
      const auto co = gen::coframe(f, gen::random_orthonormal_basis(*f, rng));
      const Tensor l = co[0] + co[1];
      t = gen::uniform(rng, -1, 1) * outer(l, l) + gen::uniform(rng, 0, 0.5) * outer(co[2], co[2]);
    } else {
      const double mu = gen::uniform(rng, -1, 2);
      std::vector<double> p(3);
      for (double& x : p) x = gen::uniform(rng, -1.5, 1.5);
      t = eigen_tensor(f, mu, p, rng);
    }
    const DPVerdict v = check_dp2_exact(t, DPSign::plus);
    const bool accepted = v.member && v.method == DPMethod::exact_eigen;
    bool decomposed = true;
    try {
      decompose_dp2(t);
    } catch (const Error&) {
      decomposed = false;
    }
    EXPECT_EQ(decomposed, accepted) << "trial " << trial;
  }
}
