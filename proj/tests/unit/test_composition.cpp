#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "oracle.hpp"
#include "revmc/composition.hpp"
#include "revmc/error.hpp"

namespace revmc {
namespace {

using testing::Rng;

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::BadArgument;
}

TEST(ProductSpec, LexicographicIndexing) {
  const ProductSpec prod({2, 3, 2});
  EXPECT_EQ(prod.size(), 12u);
  EXPECT_EQ(prod.components(), 3u);
  const std::size_t t[] = {1, 2, 0};
  EXPECT_EQ(prod.to_flat(t), 1u * 6 + 2u * 2 + 0);
  for (std::size_t i = 0; i < prod.size(); ++i) EXPECT_EQ(prod.to_flat(prod.to_tuple(i)), i);
  const std::size_t bad[] = {2, 0, 0};
  EXPECT_THROW(prod.to_flat(bad), Error);
}

TEST(Mix, WeightsAndResult) {
  const TargetDistribution u = TargetDistribution::uniform(2);
  const TransitionMatrix a(Matrix{{0, 1}, {1, 0}});
  const TransitionMatrix b = iid_operator(u);
  const TransitionMatrix m = mix({{a, b}, {0.25, 0.75}});
  EXPECT_DOUBLE_EQ(m(0, 0), 0.375);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.625);
  EXPECT_EQ(code_of([&] { mix({{a, b}, {0.5, 0.6}}); }), ErrorCode::BadWeights);
  EXPECT_EQ(code_of([&] { mix({{a, b}, {1.5, -0.5}}); }), ErrorCode::BadWeights);
}

TEST(Gibbs, ComponentsAreReversibleBlockKernels) {
  Rng rng(41);
  const ProductSpec prod({3, 2, 2});
  for (int t = 0; t < 5; ++t) {
    const TargetDistribution pi = testing::random_target(rng, prod.size());
    for (std::size_t k = 1; k <= 3; ++k) {
      const GibbsComponent c = gibbs_component(pi, prod, k);
      EXPECT_EQ(c.k, k);
      EXPECT_TRUE(validate_structure(c.kernel, pi).reversible);
      EXPECT_EQ(c.blocks.size(), prod.size() / prod.component_sizes()[k - 1]);
      // Rows only move along coordinate k and equal the block conditional.
      for (const GibbsBlock& b : c.blocks)
        for (std::size_t i = 0; i < b.states.size(); ++i)
          for (std::size_t j = 0; j < b.states.size(); ++j)
            EXPECT_NEAR(c.kernel(b.states[i], b.states[j]), b.conditional[j], 1e-15);
      // Idempotent: resampling twice equals resampling once.
      EXPECT_LE(max_abs_diff(c.kernel.entries() * c.kernel.entries(), c.kernel.entries()), 1e-14);
    }
    const TransitionMatrix g = random_scan_gibbs(pi, prod);
    const StructureReport s = validate_structure(g, pi);
    EXPECT_TRUE(s.reversible && s.irreducible && s.stationary_ok);
  }
  const TargetDistribution pi = TargetDistribution::uniform(12);
  EXPECT_EQ(code_of([&] { gibbs_component(pi, prod, 0); }), ErrorCode::BadComponentIndex);
  EXPECT_EQ(code_of([&] { gibbs_component(pi, prod, 4); }), ErrorCode::BadComponentIndex);
  EXPECT_EQ(code_of([&] { gibbs_component(TargetDistribution::uniform(5), prod, 1); }),
            ErrorCode::DimensionMismatch);
}

TEST(Gibbs, ReplaceBlockValidates) {
  const ProductSpec prod({2, 3});
  const TargetDistribution pi({1, 4, 1, 1, 1, 1});
  const GibbsComponent c = gibbs_component(pi, prod, 2);
  const Matrix good{{0, 1, 0}, {0.25, 0.5, 0.25}, {0, 1, 0}};
  const GibbsComponent r = replace_block(c, 0, good);
  EXPECT_EQ(r.blocks[0].kernel, good);
  EXPECT_EQ(r.kernel(1, 0), 0.25);
  EXPECT_EQ(r.kernel(4, 4), c.kernel(4, 4));

  const Matrix not_reversible{{0, 1, 0}, {0.5, 0, 0.5}, {0, 1, 0}};
  try {
    replace_block(c, 1, not_reversible);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotReversibleForConditional);
    EXPECT_NE(std::string(e.what()).find("block 1"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { replace_block(c, 0, Matrix{{0.5, 0.5, 0.1}, {0, 1, 0}, {0, 1, 0}}); }),
            ErrorCode::NotRowStochastic);
  EXPECT_EQ(code_of([&] { replace_block(c, 7, good); }), ErrorCode::BadBlockIndex);
  EXPECT_EQ(code_of([&] { replace_block(c, 0, Matrix::identity(2)); }), ErrorCode::DimensionMismatch);
}

TEST(Gibbs, BlockGapStructureMismatch) {
  const ProductSpec prod({2, 3});
  const TargetDistribution pi = TargetDistribution::uniform(6);
  EXPECT_EQ(code_of([&] { block_gap_eigs(gibbs_component(pi, prod, 1), gibbs_component(pi, prod, 2)); }),
            ErrorCode::StructureMismatch);
}

TEST(Improvement, PeskunImprovedComponentsImproveMixture) {
  Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = testing::pick(rng, 3, 7);
    const TargetDistribution pi = testing::random_target(rng, n);
    std::vector<TransitionMatrix> old_c, new_c;
    for (int k = 0; k < 3; ++k) {
      old_c.push_back(testing::metropolis(rng, pi, 0.5));
      new_c.push_back(k == 1 ? testing::peskun_improve(rng, old_c.back(), pi) : old_c.back());
    }
    const std::vector<double> a{0.2, 0.5, 0.3};
    const ImprovementVerdict v = component_improvement_verdict(old_c, new_c, a, pi);
    EXPECT_TRUE(v.components_nonnegative);
    EXPECT_EQ(v.verdict.relation, Relation::FirstDominates);
    EXPECT_EQ(v.direct_relation, Relation::FirstDominates);
    EXPECT_TRUE(v.consistent);
  }
}

TEST(Improvement, UnchangedIsEqualAndErrors) {
  Rng rng(43);
  const TargetDistribution pi = testing::random_target(rng, 4);
  const std::vector<TransitionMatrix> comps{testing::metropolis(rng, pi), testing::metropolis(rng, pi)};
  const std::vector<double> a{0.5, 0.5};
  EXPECT_EQ(component_improvement_verdict(comps, comps, a, pi).verdict.relation, Relation::Equal);
  const std::vector<double> bad{0.5, 0.6};
  EXPECT_EQ(code_of([&] { component_improvement_verdict(comps, comps, bad, pi); }), ErrorCode::BadWeights);
  const TransitionMatrix split(Matrix{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  const std::vector<TransitionMatrix> lazy{split, split};
  EXPECT_EQ(code_of([&] { component_improvement_verdict(lazy, lazy, a, pi); }), ErrorCode::NotIrreducibleMixture);
}

TEST(Improvement, MixtureEquivalenceHolds) {
  Rng rng(44);
  for (int t = 0; t < 40; ++t) {
    const TargetDistribution pi = testing::random_target(rng, testing::pick(rng, 3, 6));
    const TransitionMatrix p = testing::metropolis(rng, pi);
    const TransitionMatrix p2 = t % 2 ? testing::peskun_improve(rng, p, pi) : testing::metropolis(rng, pi);
    const TransitionMatrix q = testing::metropolis(rng, pi);
    const double a = testing::uniform(rng, 0.05, 0.95);
    const auto [component, mixture] = mixture_improvement_equivalence(p, p2, q, a, pi);
    EXPECT_EQ(component, mixture);
    if (t % 2) EXPECT_TRUE(component);
  }
  const TargetDistribution u = TargetDistribution::uniform(3);
  const TransitionMatrix iid = iid_operator(u);
  EXPECT_EQ(code_of([&] { mixture_improvement_equivalence(iid, iid, iid, 0.0, u); }),
            ErrorCode::BadMixingProbability);
}

}  // namespace
}  // namespace revmc
