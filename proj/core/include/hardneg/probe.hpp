// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hardneg/checkpoint.hpp"
#include "hardneg/data.hpp"
#include "hardneg/hard_miner.hpp"
#include "hardneg/matrix.hpp"

namespace hardneg {

/// Frozen features, one row per sample, with the sample's label.
struct FeatureTable {
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
};

/// Eval-mode online backbone + projection features (before ℓ2
/// normalization). No drop path, no augmentation.
FeatureTable extract_features(const Checkpoint& checkpoint, const Dataset& data);

/// Table from a raw dataset, features used as-is.
FeatureTable raw_features(const Dataset& data);

/// Rows `indices` of `table`, in that order.
FeatureTable select_rows(const FeatureTable& table, const std::vector<std::size_t>& indices);

/// Multinomial logistic regression trained with full-batch gradient descent
/// (heavy-ball momentum 0.9) on train-standardized features. Returns test
/// top-1 accuracy. Throws SingleClass if the training labels are constant.
double linear_probe(const FeatureTable& train, const FeatureTable& test, int epochs, double lr);

/// Cosine-similarity kNN labels for each test row. Neighbors are ranked by
/// similarity, then by lower train index; votes tied on count go to the
/// class with the larger summed similarity, then to the lower label.
std::vector<int> knn_predict(const FeatureTable& train, const FeatureTable& test, std::size_t k);
double knn_eval(const FeatureTable& train, const FeatureTable& test, std::size_t k);

struct ProbeReport {
  double top1 = 0.0;
  double knn_top1 = 0.0;
  std::uint64_t split_seed = 0;
};

/// Extracts features, splits them with the probe settings and runs both
/// evaluations.
ProbeReport evaluate_checkpoint(const Checkpoint& checkpoint, const Dataset& data,
                                const ProbeConfig& probe);

struct HardnessReport {
  HardnessStats real;
  HardnessStats synthetic;
  std::size_t queries = 0;
  std::size_t queue_size = 0;
  std::size_t synthetic_per_query = 0;
};

/// Eval-mode hardness distributions: online queries against a queue filled
/// with the last K target embeddings of `data`, and against synthetics drawn
/// from each query's top-N. Per-query statistics are averaged over at most
/// `max_queries` queries.
HardnessReport hardness_report(const Checkpoint& checkpoint, const Dataset& data,
                               std::size_t max_queries = 256);

}  // namespace hardneg
