// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

// Generators and independent oracles shared by the unit and acceptance
// suites. Nothing here calls the code path it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <unistd.h>

#include "hardneg/encoder.hpp"
#include "hardneg/embedding.hpp"
#include "hardneg/infonce.hpp"
#include "hardneg/rng.hpp"

namespace hardneg::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hardneg-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> random_vector(std::size_t dim, Rng& rng, double scale = 1.0) {
  std::vector<double> v(dim);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

/// Unit vector computed term by term, independent of normalize().
inline std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  for (;;) {
    std::vector<double> v = random_vector(dim, rng);
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq < 1e-12) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
    return v;
  }
}

inline std::vector<Embedding> random_units(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<Embedding> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_unit(dim, rng));
  return out;
}

inline double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

/// Indices of the n most similar negatives by a full sort on
/// (similarity desc, index asc).
inline std::vector<std::size_t> hardest_by_full_sort(const std::vector<double>& q,
                                                     const std::vector<Embedding>& negatives,
                                                     std::size_t n) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t i = 0; i < negatives.size(); ++i) scored.emplace_back(naive_cosine(q, negatives[i]), i);
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(n, scored.size()); ++i) out.push_back(scored[i].second);
  return out;
}

/// Softmax cross-entropy with target 0 over the logits [q·k/τ, q·n/τ, ...],
/// written directly from the definition (no max shift).
inline double softmax_cross_entropy_oracle(const std::vector<double>& q, const std::vector<double>& k,
                                           const std::vector<Embedding>& negatives, double tau) {
  const auto raw_dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  const double positive = std::exp(raw_dot(q, k) / tau);
  double denom = positive;
  for (const auto& n : negatives) denom += std::exp(raw_dot(q, n) / tau);
  return -std::log(positive / denom);
}

/// Central differences of a scalar function of a vector.
inline std::vector<double> central_difference(const std::function<double(const std::vector<double>&)>& f,
                                              std::vector<double> x, double h = 1e-5) {
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    x[i] = saved - h;
    const double down = f(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// ‖a − b‖₂ / max(‖a‖₂, ‖b‖₂, floor). The floor keeps arrays whose exact
/// gradient is zero (biases ahead of a batch norm) from comparing two
/// rounding residues against each other.
inline double relative_error(std::span<const double> a, std::span<const double> b,
                             double floor = 1e-4) {
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), floor});
}

/// Largest relative error between analytic infonce gradients and central
/// differences of infonce_forward, over q and k.
inline double infonce_gradient_error(const std::vector<double>& q, const std::vector<double>& k,
                                     const std::vector<Embedding>& negatives, double tau) {
  const LossOutput analytic = infonce_backward(q, k, negatives, tau);
  const auto fd_q = central_difference(
      [&](const std::vector<double>& x) { return infonce_forward(x, k, negatives, tau); }, q);
  const auto fd_k = central_difference(
      [&](const std::vector<double>& x) { return infonce_forward(q, x, negatives, tau); }, k);
  return std::max(relative_error(analytic.grad_q, fd_q), relative_error(analytic.grad_k, fd_k));
}

struct EncoderGradCheck {
  EncoderConfig config;
  EncoderMode mode = EncoderMode::Online;
  std::size_t batch = 3;
  std::uint64_t seed = 0;
  /// Seed of the drop-path stream; the same mask is replayed on every
  /// perturbed forward pass.
  std::uint64_t mask_seed = 7;
};

/// Compares encode_backward with central differences of
/// L(θ) = Σ G ⊙ encode(θ, x) for a random G, array by array. Returns the
/// largest per-array relative error.
inline double encoder_gradient_error(const EncoderGradCheck& check, double h = 1e-5) {
  Rng rng(check.seed);
  EncoderParams params = init_encoder(check.config, rng, check.mode == EncoderMode::Online);
  // Non-trivial norm affine parameters so their gradients are exercised.
  for (auto& array : parameter_arrays(params)) {
    if (array.name.find("norm.gamma") != std::string::npos)
      for (double& v : array.values) v = 1.0 + 0.3 * rng.normal();
    if (array.name.find("norm.beta") != std::string::npos || array.name.find(".bias") != std::string::npos)
      for (double& v : array.values) v = 0.1 * rng.normal();
  }
  Matrix x(check.batch, check.config.input_dim);
  for (double& v : x.values()) v = rng.normal();
  Matrix g(check.batch, check.config.embed_dim);
  for (double& v : g.values()) v = rng.normal();

  const auto objective = [&](const EncoderParams& p) {
    Rng mask(check.mask_seed);
    const EncodeResult r = encode(p, check.config, x, check.mode, mask, /*train=*/true);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.values()[i] * r.embeddings.values()[i];
    return s;
  };

  Rng mask(check.mask_seed);
  EncodeResult forward = encode(params, check.config, x, check.mode, mask, /*train=*/true);
  const EncoderParams grads = encode_backward(params, forward.cache, g);
  const auto analytic = parameter_arrays(grads);

  // Arrays with an exact zero gradient are compared against a floor tied to
  // the size of the whole gradient rather than against their own rounding noise.
  double total_sq = 0.0;
  for (const auto& a : analytic)
    for (double v : a.values) total_sq += v * v;
  const double floor = 1e-4 * std::sqrt(total_sq);

  double worst = 0.0;
  auto arrays = parameter_arrays(params);
  for (std::size_t a = 0; a < arrays.size(); ++a) {
    std::vector<double> numeric(arrays[a].values.size());
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      double& slot = arrays[a].values[i];
      const double saved = slot;
      slot = saved + h;
      const double up = objective(params);
      slot = saved - h;
      const double down = objective(params);
      slot = saved;
      numeric[i] = (up - down) / (2.0 * h);
    }
    worst = std::max(worst, relative_error(analytic[a].values, numeric, floor));
  }
  return worst;
}

}  // namespace hardneg::testing
