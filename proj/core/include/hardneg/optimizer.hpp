// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace hardneg {

enum class OptimizerKind { AdamW, Sgd };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind optimizer_kind_from_string(std::string_view name);

struct AdamWHyper {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-4;
};

/// First and second moments, one array per parameter array, plus the step
/// counter used for bias correction.
struct AdamWState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;
};

/// One AdamW step over a set of arrays: decoupled decay p -= lr·wd·p, then
/// the bias-corrected Adam update. State is sized on first use.
void adamw_step(std::span<const std::span<double>> params,
                std::span<const std::span<const double>> grads, AdamWState& state,
                const AdamWHyper& hyper);

struct SgdHyper {
  double lr = 0.03;
  double momentum = 0.9;
  double weight_decay = 1e-4;
};

struct SgdState {
  std::vector<std::vector<double>> velocity;
};

/// Heavy-ball SGD with L2 weight decay folded into the gradient.
void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads, SgdState& state,
              const SgdHyper& hyper);

/// lr(t) = base·(1 + cos(πt/T))/2, no warmup.
double cosine_lr(long step, long total_steps, double base_lr);

}  // namespace hardneg
