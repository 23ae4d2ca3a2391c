// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hardneg/embedding.hpp"

namespace hardneg {

/// Real queue snapshot plus the per-query synthetic negatives, viewed as one
/// sequence without copying.
class NegativeSet {
 public:
  NegativeSet() = default;
  NegativeSet(std::span<const Embedding> real) : real_(real) {}  // NOLINT(google-explicit-constructor)
  NegativeSet(const std::vector<Embedding>& real) : real_(real) {}  // NOLINT(google-explicit-constructor)
  NegativeSet(std::span<const Embedding> real, std::span<const Embedding> synthetic)
      : real_(real), synthetic_(synthetic) {}

  std::size_t size() const noexcept { return real_.size() + synthetic_.size(); }
  bool empty() const noexcept { return size() == 0; }
  const Embedding& operator[](std::size_t i) const {
    return i < real_.size() ? real_[i] : synthetic_[i - real_.size()];
  }

 private:
  std::span<const Embedding> real_;
  std::span<const Embedding> synthetic_;
};

struct LossOutput {
  double value = 0.0;
  Embedding grad_q;
  Embedding grad_k;
};

/// −log(exp(q·k/τ) / (exp(q·k/τ) + Σₙ exp(q·n/τ))), evaluated as a
/// max-shifted log-sum-exp. Zero when there are no negatives. Throws
/// InvalidTemperature for tau ≤ 0.
double infonce_forward(std::span<const double> q, std::span<const double> k,
                       const NegativeSet& negatives, double tau);

/// Value plus gradients with respect to q and k. Negatives are constants.
LossOutput infonce_backward(std::span<const double> q, std::span<const double> k,
                            const NegativeSet& negatives, double tau);

}  // namespace hardneg
