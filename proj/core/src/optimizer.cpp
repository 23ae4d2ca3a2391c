// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/optimizer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hardneg/error.hpp"

namespace hardneg {

std::string_view to_string(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::AdamW ? "adamw" : "sgd";
}

OptimizerKind optimizer_kind_from_string(std::string_view name) {
  if (name == "adamw") return OptimizerKind::AdamW;
  if (name == "sgd") return OptimizerKind::Sgd;
  throw Error(ErrorKind::InvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

namespace {

void check_pairing(std::span<const std::span<double>> params,
                   std::span<const std::span<const double>> grads) {
  if (params.size() != grads.size()) {
    throw Error(ErrorKind::DimensionMismatch, "parameter and gradient array counts differ");
  }
  for (std::size_t a = 0; a < params.size(); ++a) {
    if (params[a].size() != grads[a].size()) {
      throw Error(ErrorKind::DimensionMismatch, "gradient array " + std::to_string(a) + " has wrong size");
    }
  }
}

void size_moments(std::vector<std::vector<double>>& moments,
                  std::span<const std::span<double>> params) {
  if (moments.size() == params.size()) return;
  moments.clear();
  for (const auto& p : params) moments.emplace_back(p.size(), 0.0);
}

}  // namespace

void adamw_step(std::span<const std::span<double>> params,
                std::span<const std::span<const double>> grads, AdamWState& state,
                const AdamWHyper& hyper) {
  check_pairing(params, grads);
  size_moments(state.m, params);
  size_moments(state.v, params);
  ++state.step;
  const double correction1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
  const double decay = hyper.lr * hyper.weight_decay;

  for (std::size_t a = 0; a < params.size(); ++a) {
    auto p = params[a];
    const auto g = grads[a];
    auto& m = state.m[a];
    auto& v = state.v[a];
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] -= decay * p[i];
      m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
      v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= hyper.lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
  }
}

void sgd_step(std::span<const std::span<double>> params,
              std::span<const std::span<const double>> grads, SgdState& state,
              const SgdHyper& hyper) {
  check_pairing(params, grads);
  size_moments(state.velocity, params);
  for (std::size_t a = 0; a < params.size(); ++a) {
    auto p = params[a];
    const auto g = grads[a];
    auto& vel = state.velocity[a];
    for (std::size_t i = 0; i < p.size(); ++i) {
      vel[i] = hyper.momentum * vel[i] + g[i] + hyper.weight_decay * p[i];
      p[i] -= hyper.lr * vel[i];
    }
  }
}

double cosine_lr(long step, long total_steps, double base_lr) {
  if (total_steps < 1) return base_lr;
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  return base_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace hardneg
