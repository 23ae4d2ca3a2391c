// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "hardneg/error.hpp"
#include "hardneg/synthesizer.hpp"
#include "test_support.hpp"

namespace hardneg {
namespace {

HardSet all_of(std::span<const double> q, const std::vector<Embedding>& negs) {
  return top_n_hardest(q, negs, negs.size());
}

TEST(Synthesize, PairMixAtHalf) {
  const Embedding q{1.0, 0.0};
  const std::vector<Embedding> negs{{1.0, 0.0}, {0.0, 1.0}};
  Rng rng(1);
  const auto out = synthesize(q, all_of(q, negs), negs, 4, SynthesisStrategy::pair_mix(0.5, 0.5), rng);
  ASSERT_EQ(out.size(), 4u);
  for (const auto& s : out.samples) {
    EXPECT_NEAR(s[0], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s[1], 1.0 / std::sqrt(2.0), 1e-15);
  }
  for (const auto& p : out.parents) EXPECT_NE(p.first, p.second);
}

TEST(Synthesize, QueryMixNearZeroReturnsParent) {
  Rng gen(4);
  const auto q = testing::random_unit(5, gen);
  const auto negs = testing::random_units(6, 5, gen);
  const HardSet hard = all_of(q, negs);
  Rng rng(2);
  const auto out = synthesize(q, hard, negs, 20, SynthesisStrategy::query_mix(1e-12, 1e-12), rng);
  for (std::size_t s = 0; s < out.size(); ++s) {
    const Embedding& parent = negs[hard.indices[out.parents[s].first]];
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(out.samples[s][i], parent[i], 1e-9);
  }
}

TEST(Synthesize, ZeroCountIsEmpty) {
  const Embedding q{1.0, 0.0};
  const std::vector<Embedding> negs{{0.0, 1.0}};
  Rng rng(1);
  EXPECT_TRUE(synthesize(q, all_of(q, negs), negs, 0, SynthesisStrategy{}, rng).empty());
}

TEST(Synthesize, CancellingPairIsDegenerate) {
  const Embedding q{0.0, 1.0};
  const std::vector<Embedding> negs{{1.0, 0.0}, {-1.0, 0.0}};
  Rng rng(1);
  try {
    synthesize(q, all_of(q, negs), negs, 1, SynthesisStrategy::pair_mix(0.5, 0.5), rng);
    FAIL() << "expected DegenerateSynthesis";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSynthesis);
  }
}

TEST(Synthesize, RejectsBadIntervalsAndInputs) {
  const Embedding q{1.0, 0.0};
  const std::vector<Embedding> negs{{0.0, 1.0}, {0.6, 0.8}};
  Rng rng(1);
  EXPECT_THROW(synthesize(q, all_of(q, negs), negs, 1, SynthesisStrategy::pair_mix(0.0, 0.5), rng), Error);
  EXPECT_THROW(synthesize(q, all_of(q, negs), negs, 1, SynthesisStrategy::pair_mix(0.7, 0.3), rng), Error);
  EXPECT_THROW(synthesize(q, all_of(q, negs), negs, 1, SynthesisStrategy::query_mix(0.1, 0.6), rng), Error);
  EXPECT_THROW(synthesize(q, HardSet{}, negs, 1, SynthesisStrategy{}, rng), Error);
  EXPECT_THROW(synthesize(Embedding{1.0, 0.0, 0.0}, all_of(q, negs), negs, 1, SynthesisStrategy{}, rng),
               Error);
}

TEST(Synthesize, StrategyNames) {
  EXPECT_EQ(to_string(SynthesisKind::PairMix), "pair-mix");
  EXPECT_EQ(synthesis_kind_from_string("query-mix"), SynthesisKind::QueryMix);
  EXPECT_THROW(synthesis_kind_from_string("mixup"), Error);
}

TEST(SynthesizeProperties, UnitNormAndParentIndices) {
  Rng gen(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t dim = 2 + gen.below(8);
    const auto q = testing::random_unit(dim, gen);
    const auto negs = testing::random_units(2 + gen.below(30), dim, gen);
    const HardSet hard = top_n_hardest(q, negs, 1 + gen.below(negs.size()));
    const auto strategy = trial % 2 == 0 ? SynthesisStrategy::pair_mix() : SynthesisStrategy::query_mix();
    const std::size_t count = gen.below(10);
    const auto out = synthesize(q, hard, negs, count, strategy, gen);
    ASSERT_EQ(out.size(), count);
    for (std::size_t s = 0; s < count; ++s) {
      ASSERT_TRUE(is_unit_norm(out.samples[s]));
      ASSERT_LT(out.parents[s].first, hard.size());
      ASSERT_LT(out.parents[s].second, hard.size());
      if (strategy.kind == SynthesisKind::PairMix && hard.size() > 1) {
        ASSERT_NE(out.parents[s].first, out.parents[s].second);
      }
    }
  }
}

TEST(SynthesizeProperties, QueryMixIsNeverEasierThanItsParent) {
  Rng gen(8);
  for (int trial = 0; trial < 500; ++trial) {
    const auto q = testing::random_unit(6, gen);
    const auto negs = testing::random_units(10, 6, gen);
    const HardSet hard = all_of(q, negs);
    const auto out = synthesize(q, hard, negs, 1, SynthesisStrategy::query_mix(), gen);
    const double parent_sim = hard.similarities[out.parents[0].first];
    ASSERT_GE(testing::naive_cosine(q, out.samples[0]), parent_sim - 1e-12);
  }
}

TEST(SynthesizeProperties, PairMixOfPositiveParentsBeatsTheWeakerOne) {
  Rng gen(9);
  int checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto q = testing::random_unit(6, gen);
    auto negs = testing::random_units(10, 6, gen);
    // Reflect so every negative sits in the query's half-space.
    for (auto& n : negs) {
      if (testing::naive_cosine(q, n) < 0.0)
        for (double& v : n) v = -v;
    }
    const HardSet hard = all_of(q, negs);
    const auto out = synthesize(q, hard, negs, 1, SynthesisStrategy::pair_mix(), gen);
    const double weaker = std::min(hard.similarities[out.parents[0].first],
                                   hard.similarities[out.parents[0].second]);
    ASSERT_GE(testing::naive_cosine(q, out.samples[0]), weaker - 1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 500);
}

TEST(EffectiveCount, CooldownAndWarmup) {
  EXPECT_EQ(effective_count(199, 300, 100, 256, 4096, 256), 256u);
  EXPECT_EQ(effective_count(200, 300, 100, 256, 4096, 256), 0u);
  EXPECT_EQ(effective_count(299, 300, 100, 256, 4096, 256), 0u);
  EXPECT_EQ(effective_count(0, 300, 100, 256, 255, 256), 0u);
  EXPECT_EQ(effective_count(0, 300, 0, 256, 256, 256), 256u);
}

TEST(EffectiveCount, MatchesRuleEverywhere) {
  Rng gen(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const int total = 1 + static_cast<int>(gen.below(50));
    const int cooldown = static_cast<int>(gen.below(static_cast<std::uint64_t>(total) + 1));
    const int epoch = static_cast<int>(gen.below(static_cast<std::uint64_t>(total)));
    const std::size_t base = gen.below(100), queue = gen.below(200), n = 1 + gen.below(100);
    const std::size_t expect = (epoch < total - cooldown && queue >= n) ? base : 0;
    ASSERT_EQ(effective_count(epoch, total, cooldown, base, queue, n), expect);
  }
}

TEST(SyntheticCount, RoundsFractionOfCapacity) {
  EXPECT_EQ(synthetic_count_for(1.0 / 16.0, 4096), 256u);
  EXPECT_EQ(synthetic_count_for(0.125, 512), 64u);
  EXPECT_EQ(synthetic_count_for(0.0, 512), 0u);
}

}  // namespace
}  // namespace hardneg
