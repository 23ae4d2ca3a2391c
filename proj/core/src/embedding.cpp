// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hardneg/error.hpp"

namespace hardneg {

Embedding normalize(std::span<const double> v) {
  const double norm = l2_norm(v);
  if (!(norm > kZeroNormThreshold)) {
    throw Error(ErrorKind::ZeroVector, "cannot normalize a vector with norm " + std::to_string(norm));
  }
  Embedding out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
  return out;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (!(na > kZeroNormThreshold) || !(nb > kZeroNormThreshold)) {
    throw Error(ErrorKind::ZeroVector, "cosine similarity of a zero vector");
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

bool is_unit_norm(std::span<const double> v, double tolerance) {
  return std::abs(l2_norm(v) - 1.0) <= tolerance;
}

void require_same_dim(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": " + std::to_string(a.size()) +
                                                  " vs " + std::to_string(b.size()));
  }
}

}  // namespace hardneg
