// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/synthesizer.hpp"

#include <cmath>
#include <string>

#include "hardneg/error.hpp"

namespace hardneg {

std::string_view to_string(SynthesisKind kind) noexcept {
  return kind == SynthesisKind::PairMix ? "pair-mix" : "query-mix";
}

SynthesisKind synthesis_kind_from_string(std::string_view name) {
  if (name == "pair-mix") return SynthesisKind::PairMix;
  if (name == "query-mix") return SynthesisKind::QueryMix;
  throw Error(ErrorKind::InvalidArgument, "unknown synthesis strategy '" + std::string(name) + "'");
}

void SynthesisStrategy::validate() const {
  const bool ordered = mix_low <= mix_high;
  const bool in_range = kind == SynthesisKind::PairMix
                            ? (mix_low > 0.0 && mix_high < 1.0)
                            : (mix_low > 0.0 && mix_high <= 0.5);
  if (!ordered || !in_range) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(to_string(kind)) + " mixing interval [" + std::to_string(mix_low) +
                    ", " + std::to_string(mix_high) + "] out of range");
  }
}

namespace {

Embedding mix(std::span<const double> a, std::span<const double> b, double weight_a) {
  Embedding out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = weight_a * a[i] + (1.0 - weight_a) * b[i];
  return out;
}

}  // namespace

SyntheticBatch synthesize(std::span<const double> query, const HardSet& hard,
                          std::span<const Embedding> negatives, std::size_t count,
                          const SynthesisStrategy& strategy, Rng& rng) {
  SyntheticBatch out;
  if (count == 0) return out;
  if (hard.empty()) throw Error(ErrorKind::EmptyNegatives, "synthesis needs a non-empty hard set");
  strategy.validate();
  for (std::size_t idx : hard.indices) {
    if (idx >= negatives.size()) {
      throw Error(ErrorKind::InvalidArgument, "hard set index outside the negatives snapshot");
    }
    require_same_dim(query, negatives[idx], "synthesize");
  }

  out.samples.reserve(count);
  out.parents.reserve(count);
  const std::size_t pool = hard.size();
  for (std::size_t s = 0; s < count; ++s) {
    bool done = false;
    for (int attempt = 0; attempt < kMaxSynthesisAttempts && !done; ++attempt) {
      SynthParents parents;
      Embedding raw;
      if (strategy.kind == SynthesisKind::PairMix) {
        parents.first = rng.below(pool);
        if (pool > 1) {
          // Uniform over the other pool - 1 positions.
          parents.second = rng.below(pool - 1);
          if (parents.second >= parents.first) ++parents.second;
        } else {
          parents.second = parents.first;
        }
        const double alpha = rng.uniform(strategy.mix_low, strategy.mix_high);
        raw = mix(negatives[hard.indices[parents.first]], negatives[hard.indices[parents.second]],
                  alpha);
      } else {
        parents.first = rng.below(pool);
        parents.second = parents.first;
        const double beta = rng.uniform(strategy.mix_low, strategy.mix_high);
        raw = mix(query, negatives[hard.indices[parents.first]], beta);
      }
      if (l2_norm(raw) <= kZeroNormThreshold) continue;
      out.samples.push_back(normalize(raw));
      out.parents.push_back(parents);
      done = true;
    }
    if (!done) {
      throw Error(ErrorKind::DegenerateSynthesis,
                  "mixture cancelled to zero on " + std::to_string(kMaxSynthesisAttempts) +
                      " consecutive draws");
    }
  }
  return out;
}

std::size_t effective_count(int epoch, int total_epochs, int cooldown_epochs,
                            std::size_t base_count, std::size_t queue_size, std::size_t top_n) {
  if (epoch >= total_epochs - cooldown_epochs) return 0;
  if (queue_size < top_n) return 0;
  return base_count;
}

std::size_t synthetic_count_for(double fraction, std::size_t queue_capacity) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(queue_capacity)));
}

}  // namespace hardneg
