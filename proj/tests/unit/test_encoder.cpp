// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "hardneg/embedding.hpp"
#include "hardneg/encoder.hpp"
#include "hardneg/error.hpp"
#include "test_support.hpp"

namespace hardneg {
namespace {

EncoderConfig small_config() {
  EncoderConfig c;
  c.input_dim = 6;
  c.hidden_dim = 8;
  c.num_blocks = 2;
  c.embed_dim = 5;
  return c;
}

Matrix random_batch(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix x(rows, cols);
  for (double& v : x.values()) v = rng.normal();
  return x;
}

TEST(Encode, OutputRowsAreUnitNorm) {
  const EncoderConfig c = small_config();
  Rng rng(1);
  const EncoderParams p = init_encoder(c, rng, true);
  const Matrix x = random_batch(7, c.input_dim, rng);
  for (bool train : {false, true}) {
    const EncodeResult r = encode(p, c, x, EncoderMode::Online, rng, train);
    ASSERT_EQ(r.embeddings.rows(), 7u);
    ASSERT_EQ(r.embeddings.cols(), c.embed_dim);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_TRUE(is_unit_norm(r.embeddings.row(i)));
  }
}

TEST(Encode, FullDropPathEqualsZeroedResidualBranch) {
  EncoderConfig c = small_config();
  c.drop_path_online = 1.0;
  Rng rng(2);
  const EncoderParams p = init_encoder(c, rng, true);
  EncoderParams zeroed = p;
  for (auto& block : zeroed.blocks) {
    block.fc2.weight.fill(0.0);
    std::fill(block.fc2.bias.begin(), block.fc2.bias.end(), 0.0);
  }
  const Matrix x = random_batch(4, c.input_dim, rng);
  Rng r1(5), r2(5);
  const EncodeResult dropped = encode(p, c, x, EncoderMode::Online, r1, true);
  const EncodeResult identity = encode(zeroed, c, x, EncoderMode::Online, r2, false);
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_NEAR(dropped.embeddings.values()[i], identity.embeddings.values()[i], 1e-14);
}

TEST(Encode, TargetModeSkipsPredictionHead) {
  const EncoderConfig c = small_config();
  Rng rng(3);
  EncoderParams with_pred = init_encoder(c, rng, true);
  EncoderParams without = with_pred;
  without.prediction.reset();
  const Matrix x = random_batch(3, c.input_dim, rng);
  Rng r1(1), r2(1);
  EXPECT_EQ(encode(with_pred, c, x, EncoderMode::Target, r1, false).embeddings,
            encode(without, c, x, EncoderMode::Target, r2, false).embeddings);
  Rng r3(1);
  EXPECT_NE(encode(with_pred, c, x, EncoderMode::Online, r3, false).embeddings,
            encode(without, c, x, EncoderMode::Target, r2, false).embeddings);
}

TEST(Encode, OnlineModeNeedsPredictionHead) {
  const EncoderConfig c = small_config();
  Rng rng(3);
  const EncoderParams p = init_encoder(c, rng, false);
  EXPECT_THROW(encode(p, c, random_batch(2, c.input_dim, rng), EncoderMode::Online, rng, false), Error);
}

TEST(Encode, EvalIsDeterministic) {
  for (HeadNorm norm : {HeadNorm::PerSample, HeadNorm::PerBatch}) {
    EncoderConfig c = small_config();
    c.head_norm = norm;
    Rng rng(4);
    const EncoderParams p = init_encoder(c, rng, true);
    const Matrix x = random_batch(5, c.input_dim, rng);
    Rng r1(10), r2(999);
    EXPECT_EQ(encode(p, c, x, EncoderMode::Online, r1, false).embeddings,
              encode(p, c, x, EncoderMode::Online, r2, false).embeddings);
  }
}

TEST(Encode, RejectsWrongInputWidth) {
  const EncoderConfig c = small_config();
  Rng rng(3);
  const EncoderParams p = init_encoder(c, rng, true);
  try {
    encode(p, c, Matrix(2, c.input_dim + 1), EncoderMode::Online, rng, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(EncodeBackward, ZeroUpstreamGivesZeroGradients) {
  const EncoderConfig c = small_config();
  Rng rng(6);
  const EncoderParams p = init_encoder(c, rng, true);
  EncodeResult r = encode(p, c, random_batch(4, c.input_dim, rng), EncoderMode::Online, rng, true);
  const EncoderParams g = encode_backward(p, r.cache, Matrix(4, c.embed_dim));
  for (const auto& a : parameter_arrays(g))
    for (double v : a.values) ASSERT_EQ(v, 0.0) << a.name;
}

TEST(EncodeBackward, CacheIsSingleUse) {
  const EncoderConfig c = small_config();
  Rng rng(6);
  const EncoderParams p = init_encoder(c, rng, true);
  EncodeResult r = encode(p, c, random_batch(2, c.input_dim, rng), EncoderMode::Online, rng, true);
  const Matrix g(2, c.embed_dim, 1.0);
  encode_backward(p, r.cache, g);
  try {
    encode_backward(p, r.cache, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StaleCache);
  }
}

struct GradCase {
  HeadNorm norm;
  EncoderMode mode;
  double drop_path;
};

void PrintTo(const GradCase& c, std::ostream* os) {
  *os << to_string(c.norm) << (c.mode == EncoderMode::Online ? "/online" : "/target") << "/dpr" << c.drop_path;
}

class EncoderGradientTest : public ::testing::TestWithParam<GradCase> {};

TEST_P(EncoderGradientTest, MatchesCentralDifferences) {
  const GradCase gc = GetParam();
  testing::EncoderGradCheck check;
  check.config = small_config();
  check.config.head_norm = gc.norm;
  check.config.drop_path_online = gc.drop_path;
  check.config.drop_path_target = gc.drop_path;
  check.mode = gc.mode;
  check.batch = 4;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    check.seed = seed;
    EXPECT_LT(testing::encoder_gradient_error(check), 1e-5) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Cases, EncoderGradientTest,
    ::testing::Values(GradCase{HeadNorm::PerSample, EncoderMode::Online, 0.0},
                      GradCase{HeadNorm::PerBatch, EncoderMode::Online, 0.0},
                      GradCase{HeadNorm::PerSample, EncoderMode::Target, 0.0},
                      GradCase{HeadNorm::PerBatch, EncoderMode::Target, 0.0},
                      GradCase{HeadNorm::PerSample, EncoderMode::Online, 0.5},
                      GradCase{HeadNorm::PerBatch, EncoderMode::Online, 0.5}),
    [](const ::testing::TestParamInfo<GradCase>& info) {
      std::string name = info.param.norm == HeadNorm::PerSample ? "PerSample" : "PerBatch";
      name += info.param.mode == EncoderMode::Online ? "Online" : "Target";
      if (info.param.drop_path > 0.0) name += "DropPath";
      return name;
    });

TEST(AbsorbBatchStats, MovesRunningEstimates) {
  EncoderConfig c = small_config();
  c.head_norm = HeadNorm::PerBatch;
  Rng rng(8);
  EncoderParams p = init_encoder(c, rng, true);
  const auto before = p.projection.norm.running_mean;
  EncodeResult r = encode(p, c, random_batch(6, c.input_dim, rng), EncoderMode::Online, rng, true);
  absorb_batch_stats(p, r.cache);
  const auto& mean = r.cache.projection.norm.batch_mean;
  for (std::size_t i = 0; i < mean.size(); ++i)
    EXPECT_NEAR(p.projection.norm.running_mean[i],
                kRunningStatMomentum * before[i] + (1.0 - kRunningStatMomentum) * mean[i], 1e-15);
}

TEST(MomentumUpdate, WorkedExample) {
  const EncoderConfig c = small_config();
  Rng rng(9);
  EncoderParams online = init_encoder(c, rng, true);
  EncoderParams target = target_from_online(online);
  for (auto& a : parameter_arrays(online, ParamScope::Shared)) std::fill(a.values.begin(), a.values.end(), 1.0);
  for (auto& a : parameter_arrays(target)) std::fill(a.values.begin(), a.values.end(), 0.0);
  momentum_update(target, online, 0.99);
  for (const auto& a : parameter_arrays(std::as_const(target)))
    for (double v : a.values) ASSERT_NEAR(v, 0.01, 1e-15) << a.name;
}

TEST(MomentumUpdate, StaysBetweenEndpoints) {
  const EncoderConfig c = small_config();
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const EncoderParams online = init_encoder(c, rng, true);
    const EncoderParams start = target_from_online(init_encoder(c, rng, true));
    EncoderParams target = start;
    const double m = rng.uniform(0.01, 0.99);
    momentum_update(target, online, m);
    const auto o = parameter_arrays(online, ParamScope::Shared);
    const auto s = parameter_arrays(start);
    const auto t = parameter_arrays(std::as_const(target));
    ASSERT_EQ(o.size(), t.size());
    for (std::size_t a = 0; a < t.size(); ++a) {
      for (std::size_t i = 0; i < t[a].values.size(); ++i) {
        const double lo = std::min(o[a].values[i], s[a].values[i]);
        const double hi = std::max(o[a].values[i], s[a].values[i]);
        ASSERT_GE(t[a].values[i], lo - 1e-15);
        ASSERT_LE(t[a].values[i], hi + 1e-15);
        if (o[a].values[i] != s[a].values[i]) {
          ASSERT_NE(t[a].values[i], o[a].values[i]);
          ASSERT_NE(t[a].values[i], s[a].values[i]);
        }
      }
    }
  }
}

TEST(MomentumUpdate, UnitMomentumFreezesTarget) {
  const EncoderConfig c = small_config();
  Rng rng(11);
  const EncoderParams online = init_encoder(c, rng, true);
  const EncoderParams start = target_from_online(init_encoder(c, rng, true));
  EncoderParams target = start;
  momentum_update(target, online, 1.0);
  const auto a = parameter_arrays(start);
  const auto b = parameter_arrays(std::as_const(target));
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_TRUE(std::equal(a[i].values.begin(), a[i].values.end(), b[i].values.begin()));
}

TEST(CosineMomentum, Schedule) {
  EXPECT_EQ(cosine_momentum(0, 1000, 0.99), 0.99);
  EXPECT_EQ(cosine_momentum(1000, 1000, 0.99), 1.0);
  EXPECT_NEAR(cosine_momentum(500, 1000, 0.99), 0.995, 1e-15);
  double prev = 0.0;
  for (long t = 0; t <= 1000; ++t) {
    const double m = cosine_momentum(t, 1000, 0.99);
    ASSERT_GE(m, prev);
    prev = m;
  }
}

TEST(EncoderParams, NamesAndCounts) {
  const EncoderConfig c = small_config();
  Rng rng(12);
  const EncoderParams p = init_encoder(c, rng, true);
  const auto all = parameter_arrays(p);
  const auto shared = parameter_arrays(p, ParamScope::Shared);
  EXPECT_LT(shared.size(), all.size());
  EXPECT_EQ(all.front().name, "blocks.0.fc1.weight");
  std::size_t total = 0;
  for (const auto& a : all) total += a.values.size();
  EXPECT_EQ(parameter_count(p), total);
  EXPECT_EQ(to_string(HeadNorm::PerBatch), "per-batch");
  EXPECT_EQ(head_norm_from_string("per-sample"), HeadNorm::PerSample);
  EXPECT_THROW(head_norm_from_string("group"), Error);
}

}  // namespace
}  // namespace hardneg
