// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "hardneg/data.hpp"
#include "hardneg/error.hpp"
#include "hardneg/probe.hpp"
#include "hardneg/trainer.hpp"
#include "test_support.hpp"

namespace hardneg {
namespace {

FeatureTable table_from(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                        int classes) {
  FeatureTable t;
  t.features = Matrix(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(rows[r].begin(), rows[r].end(), t.features.row(r).begin());
  t.labels = labels;
  t.num_classes = classes;
  return t;
}

FeatureTable random_table(std::size_t n, std::size_t dim, int classes, Rng& rng) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(testing::random_vector(dim, rng));
    labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))));
  }
  return table_from(rows, labels, classes);
}

FeatureTable one_hot(std::size_t n, int classes) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(classes));
    std::vector<double> row(static_cast<std::size_t>(classes), 0.0);
    row[static_cast<std::size_t>(c)] = 1.0;
    rows.push_back(row);
    labels.push_back(c);
  }
  return table_from(rows, labels, classes);
}

// Exhaustive kNN: score every train row, rank by (similarity desc, index asc),
// vote, break count ties by summed similarity then by smaller label.
std::vector<int> knn_oracle(const FeatureTable& train, const FeatureTable& test, std::size_t k) {
  std::vector<int> out;
  for (std::size_t t = 0; t < test.size(); ++t) {
    const std::vector<double> q(test.features.row(t).begin(), test.features.row(t).end());
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t r = 0; r < train.size(); ++r) {
      const std::vector<double> x(train.features.row(r).begin(), train.features.row(r).end());
      ranked.emplace_back(std::clamp(testing::naive_cosine(q, x), -1.0, 1.0), r);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::map<int, std::pair<int, double>> tally;
    for (std::size_t j = 0; j < k; ++j) {
      auto& slot = tally[train.labels[ranked[j].second]];
      ++slot.first;
      slot.second += ranked[j].first;
    }
    int best = -1;
    std::pair<int, double> best_score{-1, 0.0};
    for (const auto& [label, score] : tally) {
      if (score.first > best_score.first ||
          (score.first == best_score.first && score.second > best_score.second)) {
        best = label;
        best_score = score;
      }
    }
    out.push_back(best);
  }
  return out;
}

TEST(LinearProbe, OneHotFeaturesAreSeparable) {
  EXPECT_EQ(linear_probe(one_hot(50, 5), one_hot(20, 5), 100, 0.5), 1.0);
}

TEST(LinearProbe, ShuffledLabelsAreChance) {
  Rng rng(3);
  const FeatureTable train = random_table(1000, 32, 10, rng);
  const FeatureTable test = random_table(2000, 32, 10, rng);
  EXPECT_NEAR(linear_probe(train, test, 100, 0.5), 0.10, 0.05);
}

TEST(LinearProbe, TightClustersInRawSpace) {
  const Dataset d = make_clusters(10, 100, 32, 0.05, 7);
  const auto [train, test] = split_dataset(d, 0.8, 1);
  EXPECT_GT(linear_probe(raw_features(train), raw_features(test), 100, 0.5), 0.95);
}

TEST(LinearProbe, Errors) {
  FeatureTable single = one_hot(10, 3);
  std::fill(single.labels.begin(), single.labels.end(), 1);
  try {
    linear_probe(single, one_hot(6, 3), 10, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingleClass);
  }
  EXPECT_THROW(linear_probe(one_hot(10, 3), one_hot(6, 4), 10, 0.5), Error);
  EXPECT_THROW(linear_probe(one_hot(10, 3), one_hot(6, 3), 0, 0.5), Error);
}

TEST(Knn, SingleNeighborOnCopies) {
  const FeatureTable train = one_hot(30, 3);
  EXPECT_EQ(knn_eval(train, train, 1), 1.0);
}

TEST(Knn, AllNeighborsGivesMajorityClass) {
  Rng rng(4);
  const FeatureTable train = random_table(500, 8, 10, rng);
  const FeatureTable test = random_table(2000, 8, 10, rng);
  const auto predicted = knn_predict(train, test, train.size());
  EXPECT_TRUE(std::all_of(predicted.begin(), predicted.end(), [&](int p) { return p == predicted[0]; }));
  EXPECT_NEAR(knn_eval(train, test, train.size()), 0.10, 0.05);
}

TEST(Knn, MatchesExhaustiveOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t dim = 2 + rng.below(6);
    const int classes = 2 + static_cast<int>(rng.below(5));
    FeatureTable train = random_table(20 + rng.below(40), dim, classes, rng);
    // Duplicate some rows so similarity ties actually occur.
    for (std::size_t r = 1; r < train.size(); r += 5) {
      const auto src = train.features.row(r - 1);
      std::copy(src.begin(), src.end(), train.features.row(r).begin());
    }
    const FeatureTable test = random_table(30, dim, classes, rng);
    const std::size_t k = 1 + rng.below(train.size());
    ASSERT_EQ(knn_predict(train, test, k), knn_oracle(train, test, k)) << "trial " << trial;
  }
}

TEST(Knn, TestRowOrderDoesNotMatter) {
  Rng rng(6);
  const FeatureTable train = random_table(60, 4, 3, rng);
  const FeatureTable test = random_table(25, 4, 3, rng);
  std::vector<std::size_t> perm(test.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::reverse(perm.begin(), perm.end());
  const auto base = knn_predict(train, test, 7);
  const auto shuffled = knn_predict(train, select_rows(test, perm), 7);
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(shuffled[i], base[perm[i]]);
}

TEST(Knn, RejectsBadK) {
  const FeatureTable t = one_hot(10, 2);
  EXPECT_THROW(knn_predict(t, t, 0), Error);
  EXPECT_THROW(knn_predict(t, t, 11), Error);
}

class TrainedCheckpoint : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    TrainConfig c;
    c.encoder.input_dim = 6;
    c.encoder.hidden_dim = 8;
    c.encoder.num_blocks = 1;
    c.encoder.embed_dim = 4;
    c.queue_capacity = 32;
    c.top_n = 8;
    c.batch_size = 8;
    c.epochs = 3;
    c.cooldown_epochs = 1;
    c.probe.epochs = 20;
    c.probe.knn_k = 5;
    data_ = new Dataset(make_clusters(3, 20, 6, 0.1, 8));
    ckpt_ = new Checkpoint(pretrain(c, *data_).checkpoint);
  }
  static void TearDownTestSuite() {
    delete data_;
    delete ckpt_;
  }
  static Dataset* data_;
  static Checkpoint* ckpt_;
};
Dataset* TrainedCheckpoint::data_ = nullptr;
Checkpoint* TrainedCheckpoint::ckpt_ = nullptr;

TEST_F(TrainedCheckpoint, FeaturesHaveEmbedWidth) {
  const FeatureTable f = extract_features(*ckpt_, *data_);
  EXPECT_EQ(f.size(), 60u);
  EXPECT_EQ(f.dim(), 4u);
  EXPECT_EQ(f.labels, data_->labels());
  EXPECT_THROW(extract_features(*ckpt_, make_clusters(3, 2, 5, 0.1, 1)), Error);
}

TEST_F(TrainedCheckpoint, EvaluationIsRepeatable) {
  const ProbeReport a = evaluate_checkpoint(*ckpt_, *data_, ckpt_->config.probe);
  const ProbeReport b = evaluate_checkpoint(*ckpt_, *data_, ckpt_->config.probe);
  EXPECT_EQ(a.top1, b.top1);
  EXPECT_EQ(a.knn_top1, b.knn_top1);
  EXPECT_EQ(a.split_seed, 1234u);
  EXPECT_GE(a.top1, 0.0);
  EXPECT_LE(a.top1, 1.0);
}

TEST_F(TrainedCheckpoint, HardnessReport) {
  const HardnessReport r = hardness_report(*ckpt_, *data_, 10);
  EXPECT_EQ(r.queries, 10u);
  EXPECT_EQ(r.queue_size, 32u);
  EXPECT_EQ(r.synthetic_per_query, 4u);
  EXPECT_GT(r.synthetic.mean, r.real.mean);
  EXPECT_LE(r.real.min, r.real.p50);
  EXPECT_LE(r.real.p90, r.real.max);
}

}  // namespace
}  // namespace hardneg
