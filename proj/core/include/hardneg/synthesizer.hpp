// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "hardneg/embedding.hpp"
#include "hardneg/hard_miner.hpp"
#include "hardneg/rng.hpp"

namespace hardneg {

enum class SynthesisKind {
  /// normalize(α·nᵢ + (1−α)·nⱼ) over two distinct hard negatives.
  PairMix,
  /// normalize(β·q + (1−β)·nᵢ) pulling one hard negative toward the query.
  QueryMix,
};

std::string_view to_string(SynthesisKind kind) noexcept;
SynthesisKind synthesis_kind_from_string(std::string_view name);

/// Rule and coefficient interval for generating synthetic negatives.
/// Pair-mix needs [mix_low, mix_high] inside (0, 1); query-mix inside (0, 0.5].
struct SynthesisStrategy {
  SynthesisKind kind = SynthesisKind::PairMix;
  double mix_low = 0.2;
  double mix_high = 0.8;

  static SynthesisStrategy pair_mix(double low = 0.2, double high = 0.8) {
    return {SynthesisKind::PairMix, low, high};
  }
  static SynthesisStrategy query_mix(double low = 0.1, double high = 0.5) {
    return {SynthesisKind::QueryMix, low, high};
  }

  /// Throws InvalidArgument when the interval violates the kind's bounds.
  void validate() const;
};

/// Positions in the hard set a synthetic sample was mixed from. For
/// query-mix `first == second`.
struct SynthParents {
  std::size_t first = 0;
  std::size_t second = 0;
};

struct SyntheticBatch {
  std::vector<Embedding> samples;
  std::vector<SynthParents> parents;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
};

/// Maximum redraws when a mixture collapses to the zero vector.
inline constexpr int kMaxSynthesisAttempts = 10;

/// Draws `count` unit-norm synthetic negatives for `query` from its hard set.
/// The results are plain values: nothing downstream differentiates through
/// them. Throws DegenerateSynthesis if a sample cancels to zero on every one
/// of kMaxSynthesisAttempts draws.
SyntheticBatch synthesize(std::span<const double> query, const HardSet& hard,
                          std::span<const Embedding> negatives, std::size_t count,
                          const SynthesisStrategy& strategy, Rng& rng);

/// Number of synthetic negatives per query for this epoch: zero during the
/// final `cooldown_epochs` epochs and while the queue holds fewer than `top_n`
/// entries, `base_count` otherwise.
std::size_t effective_count(int epoch, int total_epochs, int cooldown_epochs,
                            std::size_t base_count, std::size_t queue_size, std::size_t top_n);

/// round(fraction · queue_capacity).
std::size_t synthetic_count_for(double fraction, std::size_t queue_capacity);

}  // namespace hardneg
