// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hardneg {

/// Dense feature vector. Used for queries, keys, queue entries and synthetic
/// negatives; most call sites expect it to be unit norm.
using Embedding = std::vector<double>;

/// Norms at or below this are treated as zero.
inline constexpr double kZeroNormThreshold = 1e-12;
/// Tolerance for |‖v‖ - 1| when a vector is expected to be normalized.
inline constexpr double kUnitNormTolerance = 1e-9;

void require_same_dim(std::span<const double> a, std::span<const double> b, const char* what);

/// Inner product. Four partial sums keep the loop pipelined; the summation
/// order is fixed, so results are reproducible.
inline double dot_unchecked(const double* a, const double* b, std::size_t n) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) require_same_dim(a, b, "dot");
  return dot_unchecked(a.data(), b.data(), a.size());
}

inline double l2_norm(std::span<const double> v) {
  return std::sqrt(dot_unchecked(v.data(), v.data(), v.size()));
}

/// v / ‖v‖₂. Throws ZeroVector when ‖v‖₂ ≤ 1e-12.
Embedding normalize(std::span<const double> v);

/// (a·b)/(‖a‖‖b‖) clamped to [-1, 1]. Symmetric in its arguments.
double cosine_sim(std::span<const double> a, std::span<const double> b);

bool is_unit_norm(std::span<const double> v, double tolerance = kUnitNormTolerance);

}  // namespace hardneg
