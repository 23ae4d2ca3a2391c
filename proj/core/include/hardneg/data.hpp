// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "hardneg/matrix.hpp"
#include "hardneg/rng.hpp"

namespace hardneg {

struct Sample {
  std::vector<double> features;
  int label = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  std::vector<Sample> samples;
  int num_classes = 0;

  std::size_t size() const noexcept { return samples.size(); }
  std::size_t input_dim() const noexcept {
    return samples.empty() ? 0 : samples.front().features.size();
  }
  /// Rows stacked in dataset order.
  Matrix features_matrix() const;
  std::vector<int> labels() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Parameters of one view distribution: scale, additive noise, then masking.
struct AugmentationSpec {
  double noise_sigma = 0.0;
  double mask_prob = 0.0;
  double scale_low = 1.0;
  double scale_high = 1.0;

  void validate() const;
};

/// Gaussian blobs around random unit centers; no two centers have cosine
/// similarity above 0.8. Deterministic in `seed`. Throws
/// CenterSeparationFailure when a valid center set cannot be drawn in 100
/// attempts.
Dataset make_clusters(int num_classes, int per_class, std::size_t input_dim, double sigma,
                      std::uint64_t seed);

/// One augmented view: x·U(scale_low, scale_high) + N(0, σ²), then each
/// coordinate zeroed with probability mask_prob.
std::vector<double> augment(std::span<const double> x, const AugmentationSpec& spec, Rng& rng);

/// Two independent views (query view first).
std::pair<std::vector<double>, std::vector<double>> two_views(std::span<const double> x,
                                                              const AugmentationSpec& spec_q,
                                                              const AugmentationSpec& spec_k,
                                                              Rng& rng);

/// Reads "label,f0,f1,..." CSV. Throws ParseError (with line number) or
/// RaggedRows.
Dataset load_csv(const std::filesystem::path& path);
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Name of the bundled desk-scale dataset: 10 classes × 500 samples, 32
/// features, σ = 0.15.
inline constexpr const char* kClustersPreset = "clusters10";
inline constexpr std::uint64_t kClustersPresetSeed = 1;

/// Resolves a preset name or a CSV path.
Dataset load_dataset(const std::string& spec);

/// Deterministic shuffled split: the first `train_fraction` of a seeded
/// permutation goes to train.
std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed);

}  // namespace hardneg
