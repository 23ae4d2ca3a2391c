// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/infonce.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hardneg/error.hpp"

namespace hardneg {

namespace {

void check_inputs(std::span<const double> q, std::span<const double> k,
                  const NegativeSet& negatives, double tau) {
  if (!(tau > 0.0)) {
    throw Error(ErrorKind::InvalidTemperature, "tau must be positive, got " + std::to_string(tau));
  }
  require_same_dim(q, k, "infonce q/k");
  for (std::size_t i = 0; i < negatives.size(); ++i) require_same_dim(q, negatives[i], "infonce q/n");
}

// logits[0] is the positive.
std::vector<double> logits_of(std::span<const double> q, std::span<const double> k,
                              const NegativeSet& negatives, double tau) {
  std::vector<double> logits(negatives.size() + 1);
  logits[0] = dot(q, k) / tau;
  for (std::size_t i = 0; i < negatives.size(); ++i) logits[i + 1] = dot(q, negatives[i]) / tau;
  return logits;
}

// Returns log Σ exp(logits); leaves exp(logit - max) in `shifted`.
double log_sum_exp(const std::vector<double>& logits, std::vector<double>& shifted) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  shifted.resize(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    shifted[i] = std::exp(logits[i] - peak);
    sum += shifted[i];
  }
  return peak + std::log(sum);
}

}  // namespace

double infonce_forward(std::span<const double> q, std::span<const double> k,
                       const NegativeSet& negatives, double tau) {
  check_inputs(q, k, negatives, tau);
  if (negatives.empty()) return 0.0;
  const std::vector<double> logits = logits_of(q, k, negatives, tau);
  std::vector<double> shifted;
  return std::max(0.0, log_sum_exp(logits, shifted) - logits[0]);
}

LossOutput infonce_backward(std::span<const double> q, std::span<const double> k,
                            const NegativeSet& negatives, double tau) {
  check_inputs(q, k, negatives, tau);
  LossOutput out;
  out.grad_q.assign(q.size(), 0.0);
  out.grad_k.assign(k.size(), 0.0);
  if (negatives.empty()) return out;

  const std::vector<double> logits = logits_of(q, k, negatives, tau);
  std::vector<double> probs;
  const double lse = log_sum_exp(logits, probs);
  out.value = std::max(0.0, lse - logits[0]);
  double total = 0.0;
  for (double p : probs) total += p;
  for (double& p : probs) p /= total;

  // dL/dq = (1/τ)[(p₀ − 1)k + Σᵢ pᵢ nᵢ],  dL/dk = (1/τ)(p₀ − 1)q.
  const double positive_weight = (probs[0] - 1.0) / tau;
  for (std::size_t j = 0; j < q.size(); ++j) {
    out.grad_q[j] = positive_weight * k[j];
    out.grad_k[j] = positive_weight * q[j];
  }
  for (std::size_t i = 0; i < negatives.size(); ++i) {
    const double w = probs[i + 1] / tau;
    const Embedding& n = negatives[i];
    for (std::size_t j = 0; j < q.size(); ++j) out.grad_q[j] += w * n[j];
  }
  return out;
}

}  // namespace hardneg
