// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/hard_miner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hardneg/error.hpp"

namespace hardneg {

HardSet top_n_hardest(std::span<const double> query, std::span<const Embedding> negatives,
                      std::size_t n) {
  if (negatives.empty()) throw Error(ErrorKind::EmptyNegatives, "no negatives to mine");
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "top_n must be at least 1");

  const double query_norm = l2_norm(query);
  if (!(query_norm > kZeroNormThreshold)) throw Error(ErrorKind::ZeroVector, "query has zero norm");
  std::vector<double> sims(negatives.size());
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    const Embedding& n = negatives[i];
    require_same_dim(query, n, "top_n_hardest");
    const double n_norm = l2_norm(n);
    if (!(n_norm > kZeroNormThreshold)) throw Error(ErrorKind::ZeroVector, "negative has zero norm");
    // Same expression as cosine_sim, so the reported similarities agree bit for bit.
    sims[i] = std::clamp(dot_unchecked(query.data(), n.data(), n.size()) / (query_norm * n_norm), -1.0, 1.0);
  }

  std::vector<std::size_t> order(negatives.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto harder = [&sims](std::size_t a, std::size_t b) {
    return sims[a] > sims[b] || (sims[a] == sims[b] && a < b);
  };
  const std::size_t keep = std::min(n, negatives.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    harder);

  HardSet out;
  out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  out.similarities.reserve(keep);
  for (std::size_t idx : out.indices) out.similarities.push_back(sims[idx]);
  return out;
}

HardnessStats summarize(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyNegatives, "no similarities to summarize");
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());

  HardnessStats stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / count;
  double sq = 0.0;
  for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
  stats.std = std::sqrt(sq / count);
  stats.min = values.front();
  stats.max = values.back();

  const auto percentile = [&values](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  stats.p50 = percentile(0.5);
  stats.p90 = percentile(0.9);
  return stats;
}

HardnessStats hardness_stats(std::span<const double> query, std::span<const Embedding> negatives) {
  if (negatives.empty()) throw Error(ErrorKind::EmptyNegatives, "no negatives to summarize");
  std::vector<double> sims;
  sims.reserve(negatives.size());
  for (const Embedding& n : negatives) sims.push_back(cosine_sim(query, n));
  return summarize(std::move(sims));
}

}  // namespace hardneg
