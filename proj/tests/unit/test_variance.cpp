#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracle.hpp"
#include "revmc/error.hpp"
#include "revmc/variance.hpp"

namespace revmc {
namespace {

using testing::Rng;

TEST(Variance, RoutesMatchFundamentalMatrixOracle) {
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    const auto c = testing::weighted_graph_walk(rng, testing::pick(rng, 2, 10));
    const SpectralDecomposition s = spectral_decompose(c.p, c.pi);
    const Vector f = testing::random_vector(rng, c.pi.size());
    const double ref = oracle::asymptotic_variance(c.p.entries(), c.pi.probs(), f);
    const double tol = 1e-9 * (1.0 + std::abs(ref));
    EXPECT_NEAR(asym_var_spectral(s, f).value, ref, tol);
    EXPECT_NEAR(asym_var_resolvent(c.p, c.pi, f).value, ref, tol);
    EXPECT_NEAR(asym_var_autocov(s, f).value, ref, tol);
  }
}

TEST(Variance, SpectralTermsSumToValue) {
  Rng rng(22);
  const auto c = testing::weighted_graph_walk(rng, 6);
  const VarianceResult v = asym_var_spectral(spectral_decompose(c.p, c.pi), testing::random_vector(rng, 6));
  EXPECT_EQ(v.route, VarianceRoute::Spectral);
  ASSERT_EQ(v.terms.size(), 5u);
  double s = 0.0;
  for (double x : v.terms) s += x;
  EXPECT_NEAR(s, v.value, 1e-14);
}

TEST(Variance, IidChainGivesPlainVariance) {
  const TargetDistribution pi({1.0, 2.0, 3.0});
  const TransitionMatrix iid = iid_operator(pi);
  const Vector f{1.0, -2.0, 0.5};
  const Vector f0 = centered(f, pi);
  const double var = weighted_inner(f0, f0, pi);
  EXPECT_NEAR(asym_var_spectral(spectral_decompose(iid, pi), f).value, var, 1e-14);
  EXPECT_NEAR(asym_var_resolvent(iid, pi, f).value, var, 1e-14);
}

TEST(Variance, ConstantFunctionHasZeroVariance) {
  Rng rng(23);
  const auto c = testing::weighted_graph_walk(rng, 5);
  const Vector f(5, 3.25);
  EXPECT_NEAR(asym_var_spectral(spectral_decompose(c.p, c.pi), f).value, 0.0, 1e-14);
  EXPECT_NEAR(asym_var_resolvent(c.p, c.pi, f).value, 0.0, 1e-14);
}

TEST(Variance, PeriodicChains) {
  Rng rng(24);
  for (int t = 0; t < 10; ++t) {
    const auto c = testing::bipartite_walk(rng, testing::pick(rng, 2, 9));
    ASSERT_EQ(c.p.period(), 2u);
    const SpectralDecomposition s = spectral_decompose(c.p, c.pi);
    const Vector f = testing::random_vector(rng, c.pi.size());
    const double ref = oracle::asymptotic_variance(c.p.entries(), c.pi.probs(), f);
    EXPECT_NEAR(asym_var_spectral(s, f).value, ref, 1e-9 * (1.0 + ref));
    EXPECT_NEAR(asym_var_resolvent(c.p, c.pi, f).value, ref, 1e-9 * (1.0 + ref));
    try {
      asym_var_autocov(s, f);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::PeriodicChain);
    }
    const AutocovSequence seq = autocovariances(s, f, 5);
    EXPECT_TRUE(std::isinf(seq.tail_bound));
  }
}

TEST(Variance, AutocovariancesMatchMatrixPowers) {
  Rng rng(25);
  const auto c = testing::weighted_graph_walk(rng, 5);
  const SpectralDecomposition s = spectral_decompose(c.p, c.pi);
  const Vector f = testing::random_vector(rng, 5);
  const Vector f0 = centered(f, c.pi);
  const AutocovSequence seq = autocovariances(s, f, 6);
  ASSERT_EQ(seq.gammas.size(), 7u);
  Vector pk = f0;
  for (std::size_t k = 0; k <= 6; ++k) {
    EXPECT_NEAR(seq.gammas[k], weighted_inner(f0, pk, c.pi), 1e-13);
    pk = c.p.entries() * pk;
  }
  EXPECT_TRUE(std::isfinite(seq.tail_bound));
}

TEST(Variance, ReducibleChainsAreRefused) {
  const TransitionMatrix split(Matrix{{0.5, 0.5, 0, 0}, {0.5, 0.5, 0, 0}, {0, 0, 0.5, 0.5}, {0, 0, 0.5, 0.5}});
  const TargetDistribution pi = TargetDistribution::uniform(4);
  const Vector f{1, 0, 0, 0};
  try {
    asym_var_spectral(spectral_decompose(split, pi), f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotIrreducible);
  }
  try {
    asym_var_resolvent(split, pi, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::NotIrreducible || e.code() == ErrorCode::SingularSystem);
  }
}

TEST(Variance, DimensionMismatch) {
  const TargetDistribution pi = TargetDistribution::uniform(3);
  const TransitionMatrix iid = iid_operator(pi);
  try {
    asym_var_spectral(spectral_decompose(iid, pi), Vector{1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Simulate, DeterministicAndValid) {
  Rng rng(26);
  const auto c = testing::weighted_graph_walk(rng, 4);
  const auto a = simulate(c.p, 0, 1000, 42);
  const auto b = simulate(c.p, 0, 1000, 42);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 1000u);
  EXPECT_EQ(a.front(), 0u);
  for (std::size_t t = 1; t < a.size(); ++t) EXPECT_GT(c.p(a[t - 1], a[t]), 0.0);
  EXPECT_NE(simulate(c.p, 0, 1000, 43), a);
  try {
    simulate(c.p, 9, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadStartState);
  }
}

TEST(MonteCarlo, DeterministicGivenSeed) {
  Rng rng(27);
  const auto c = testing::weighted_graph_walk(rng, 4);
  const Vector f{1, 0, 0, 0};
  const McEstimate a = mc_asym_var(c.p, c.pi, f, 20000, 8, 5);
  const McEstimate b = mc_asym_var(c.p, c.pi, f, 20000, 8, 5);
  EXPECT_EQ(a.asym_var_estimate, b.asym_var_estimate);
  EXPECT_EQ(a.mean_estimate, b.mean_estimate);
  EXPECT_GT(a.std_error, 0.0);
  EXPECT_NEAR(a.mean_estimate, c.pi[0], 0.05);
}

TEST(MonteCarlo, RejectsTooShortRuns) {
  const TargetDistribution pi = TargetDistribution::uniform(2);
  const TransitionMatrix iid = iid_operator(pi);
  EXPECT_THROW(mc_asym_var(iid, pi, Vector{1, 0}, 100, 8, 1), Error);
  EXPECT_THROW(mc_asym_var(iid, pi, Vector{1, 0}, 20000, 2, 1), Error);
}

TEST(MonteCarlo, IidChainEstimateNearPlainVariance) {
  const TargetDistribution pi({1.0, 1.0, 2.0});
  const TransitionMatrix iid = iid_operator(pi);
  const Vector f{1.0, 0.0, 2.0};
  const Vector f0 = centered(f, pi);
  const double var = weighted_inner(f0, f0, pi);
  const McEstimate e = mc_asym_var(iid, pi, f, 50000, 16, 99);
  EXPECT_LT(std::abs(e.asym_var_estimate - var), 4.0 * e.std_error);
}

TEST(MonteCarlo, WithinThreeStandardErrorsInMostSeededTrials) {
  Rng rng(28);
  const auto c = testing::weighted_graph_walk(rng, 5);
  const Vector f = testing::random_vector(rng, 5);
  const double exact = asym_var_spectral(spectral_decompose(c.p, c.pi), f).value;
  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    // Seeds far apart so the per-replication streams seed ^ r never overlap.
    const McEstimate e = mc_asym_var(c.p, c.pi, f, 50000, 16, (s + 1) << 20);
    hits += std::abs(e.asym_var_estimate - exact) <= 3.0 * e.std_error;
  }
  EXPECT_GE(hits, 18);
}

}  // namespace
}  // namespace revmc
