// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "hardneg/config.hpp"
#include "hardneg/data.hpp"

namespace hardneg {

enum class AblationAxis {
  QueueSize,    // "queue": K
  Temperature,  // "temperature": τ
  Momentum,     // "momentum": m_start
  DropPath,     // "drop-path": "online:target" rate pairs
  Hardness,     // "hardness": "N:fraction" pairs
  HeadNorm,     // "head-norm": per-sample | per-batch
};

std::string_view to_string(AblationAxis axis) noexcept;
/// Accepts the names above plus the aliases K, tau, m_start, dpr, N.
AblationAxis ablation_axis_from_string(std::string_view name);

/// Returns `base` with one axis set from its textual value. Throws
/// InvalidArgument on malformed values.
TrainConfig apply_ablation_value(const TrainConfig& base, AblationAxis axis,
                                 const std::string& value);

struct AblationRow {
  std::string setting;
  double top1 = 0.0;
  double knn_top1 = 0.0;
};

using AblationProgress = std::function<void(const AblationRow&)>;

/// One pretrain + probe per value, all sharing the base seed.
std::vector<AblationRow> run_ablation_grid(const TrainConfig& base, const Dataset& data,
                                           AblationAxis axis,
                                           const std::vector<std::string>& values,
                                           const AblationProgress& progress = {});

/// CSV: axis,value,top1,knn_top1.
std::string ablation_csv(AblationAxis axis, const std::vector<AblationRow>& rows);

}  // namespace hardneg
