// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "hardneg/data.hpp"
#include "hardneg/encoder.hpp"
#include "hardneg/optimizer.hpp"
#include "hardneg/synthesizer.hpp"

namespace hardneg {

/// Linear-probe and kNN settings used by `ablate` and as CLI defaults.
struct ProbeConfig {
  int epochs = 100;
  double lr = 0.5;
  std::size_t knn_k = 20;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 1234;
};

/// Every scalar knob of a pretraining run. Defaults are the desk-scale
/// preset; paper_scale() returns the full-size values.
struct TrainConfig {
  double tau = 0.2;
  std::size_t queue_capacity = 512;
  std::size_t top_n = 64;
  double synth_fraction = 0.125;
  SynthesisStrategy strategy = SynthesisStrategy::pair_mix();
  double m_start = 0.99;
  int epochs = 60;
  int cooldown_epochs = 20;
  std::size_t batch_size = 64;
  double base_lr = 1e-3;
  double weight_decay = 1e-4;
  OptimizerKind optimizer = OptimizerKind::AdamW;
  bool symmetrize_loss = true;
  std::uint64_t seed = 0;
  EncoderConfig encoder;
  AugmentationSpec augment_q{0.10, 0.10, 0.8, 1.2};
  AugmentationSpec augment_k{0.05, 0.20, 0.8, 1.2};
  /// Preset name ("clusters10") or CSV path used by `pretrain`.
  std::string data = kClustersPreset;
  ProbeConfig probe;

  static TrainConfig desk();
  /// τ=0.2, K=4096, N=256, m_start=0.99, lr=0.03, wd=1e-4, batch 512,
  /// 300 epochs with a 100-epoch cooldown.
  static TrainConfig paper_scale();

  /// L = round(synth_fraction · queue_capacity).
  std::size_t synthetic_per_query() const;

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
};

/// JSON with snake_case keys mirroring the struct. Missing keys keep their
/// defaults; unknown keys are rejected.
std::string to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const std::string& text);
TrainConfig load_train_config(const std::filesystem::path& path);
void save_train_config(const TrainConfig& config, const std::filesystem::path& path);

}  // namespace hardneg
