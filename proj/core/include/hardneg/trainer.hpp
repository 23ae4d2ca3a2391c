// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hardneg/checkpoint.hpp"
#include "hardneg/config.hpp"
#include "hardneg/data.hpp"

namespace hardneg {

struct MetricsRow {
  int epoch = 0;
  double mean_loss = 0.0;
  /// Mean over queries of the mean similarity to the real queue snapshot.
  double mean_hardness_real = 0.0;
  /// Mean similarity of queries to their own synthetic negatives; 0 when none.
  double mean_hardness_synthetic = 0.0;
  /// Synthetic negatives generated during the epoch, over all queries.
  long synthetic_count = 0;
  double momentum = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<MetricsRow> metrics;
};

using EpochCallback = std::function<void(const MetricsRow&)>;

/// Self-supervised pretraining on `data` (labels are ignored). Throws
/// NonFiniteLoss with the step index if the loss diverges.
TrainResult pretrain(const TrainConfig& config, const Dataset& data,
                     const EpochCallback& on_epoch = {});

/// CSV with header
/// epoch,mean_loss,mean_hardness_real,mean_hardness_synthetic,synthetic_count,momentum,learning_rate
/// and six fixed decimals for every real column.
std::string metrics_csv(const std::vector<MetricsRow>& rows);
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path);

}  // namespace hardneg
