// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hardneg/embedding.hpp"

namespace hardneg {

/// The N negatives most similar to one query. `similarities` is sorted
/// non-increasing and `indices` point into the negatives snapshot the set was
/// mined from.
struct HardSet {
  std::vector<std::size_t> indices;
  std::vector<double> similarities;

  std::size_t size() const noexcept { return indices.size(); }
  bool empty() const noexcept { return indices.empty(); }
};

/// Selects the min(n, negatives.size()) negatives with the largest cosine
/// similarity to `query`. Equal similarities are ordered by lower index.
/// Throws EmptyNegatives when `negatives` is empty and InvalidArgument when
/// n == 0.
HardSet top_n_hardest(std::span<const double> query, std::span<const Embedding> negatives,
                      std::size_t n);

struct HardnessStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double min = 0.0;
  double max = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
};

/// Summary of {cosine_sim(query, n)} over all negatives. Percentiles use
/// linear interpolation between order statistics.
HardnessStats hardness_stats(std::span<const double> query, std::span<const Embedding> negatives);

/// Summary of an arbitrary sample of similarities. Throws EmptyNegatives on
/// an empty sample.
HardnessStats summarize(std::vector<double> values);

}  // namespace hardneg
