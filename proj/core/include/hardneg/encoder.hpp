// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardneg/matrix.hpp"
#include "hardneg/rng.hpp"

namespace hardneg {

/// Normalization inside the projection and prediction heads.
enum class HeadNorm {
  PerSample,  // layer-norm style: statistics over each sample's features
  PerBatch,   // batch-norm style: batch statistics in training, running estimates in eval
};

std::string_view to_string(HeadNorm norm) noexcept;
HeadNorm head_norm_from_string(std::string_view name);

enum class EncoderMode { Online, Target };

struct EncoderConfig {
  std::size_t input_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t num_blocks = 2;
  std::size_t embed_dim = 32;
  double drop_path_online = 0.1;
  double drop_path_target = 0.0;
  HeadNorm head_norm = HeadNorm::PerSample;

  double drop_path(EncoderMode mode) const noexcept {
    return mode == EncoderMode::Online ? drop_path_online : drop_path_target;
  }
  void validate() const;
};

struct Linear {
  Matrix weight;  // out × in
  std::vector<double> bias;
};

struct NormLayer {
  std::vector<double> gamma;
  std::vector<double> beta;
  // Buffers, only meaningful for HeadNorm::PerBatch. Not trained.
  std::vector<double> running_mean;
  std::vector<double> running_var;
};

/// Residual block: h + fc2(gelu(fc1(h))). Operates in input_dim space with
/// hidden_dim inner width, so a fully dropped backbone is the identity.
struct ResidualBlock {
  Linear fc1;
  Linear fc2;
};

/// fc1 → norm → gelu → fc2.
struct MlpHead {
  Linear fc1;
  NormLayer norm;
  Linear fc2;
};

/// Weights of one encoder. The online encoder carries a prediction head; the
/// target encoder does not. Also used as the container for gradients.
struct EncoderParams {
  std::vector<ResidualBlock> blocks;
  MlpHead projection;
  std::optional<MlpHead> prediction;
};

struct NamedArray {
  std::string name;
  std::span<double> values;
};
struct NamedConstArray {
  std::string name;
  std::span<const double> values;
};

enum class ParamScope {
  All,     // every trainable array, prediction head included when present
  Shared,  // backbone + projection head: the arrays the target tracks
};

/// Trainable arrays in a fixed order with stable dotted names
/// (e.g. "blocks.0.fc1.weight", "projection.norm.gamma").
std::vector<NamedArray> parameter_arrays(EncoderParams& params, ParamScope scope = ParamScope::All);
std::vector<NamedConstArray> parameter_arrays(const EncoderParams& params,
                                              ParamScope scope = ParamScope::All);
/// Running statistics of the head norms.
std::vector<NamedArray> buffer_arrays(EncoderParams& params);
std::vector<NamedConstArray> buffer_arrays(const EncoderParams& params);

std::size_t parameter_count(const EncoderParams& params);

/// Fresh weights: uniform(±1/√fan_in) for linear weights, zero biases, unit
/// norm scales. `with_prediction` adds the online-only prediction head.
EncoderParams init_encoder(const EncoderConfig& config, Rng& rng, bool with_prediction);

/// Same shapes as `params`, all zeros (buffers included).
EncoderParams zeros_like(const EncoderParams& params);

/// Copy without the prediction head; the target encoder starts from this.
EncoderParams target_from_online(const EncoderParams& online);

struct NormCache {
  Matrix normalized;  // x̂
  Matrix inv_std;     // per row (per-sample) or a single row (per-batch)
  std::vector<double> batch_mean;
  std::vector<double> batch_var;  // biased
  bool used_batch_stats = false;
};

struct HeadCache {
  Matrix input;
  Matrix pre_norm;
  NormCache norm;
  Matrix post_norm;
  Matrix activated;
};

struct BlockCache {
  Matrix input;
  Matrix pre_activation;
  Matrix activated;
  std::vector<double> path_scale;  // per sample: 0 when dropped, 1/(1-p) when kept
};

/// Everything encode_backward needs. Consumed by the first backward call.
struct EncodeCache {
  EncoderMode mode = EncoderMode::Online;
  HeadNorm head_norm = HeadNorm::PerSample;
  bool train = false;
  std::vector<BlockCache> blocks;
  HeadCache projection;
  std::optional<HeadCache> prediction;
  Matrix unnormalized;  // head output before ℓ2 normalization
  Matrix output;        // unit rows
  std::vector<double> row_norms;
  bool consumed = false;
};

struct EncodeResult {
  Matrix embeddings;  // one unit-norm row per input row
  EncodeCache cache;
};

/// Encodes a batch (one sample per row). In train mode each residual block is
/// dropped per sample with probability drop_path(mode) and kept paths are
/// scaled by 1/(1-p); per-batch head norms use batch statistics. Online mode
/// applies the prediction head after the projection head. Eval mode never
/// touches `rng`.
EncodeResult encode(const EncoderParams& params, const EncoderConfig& config, const Matrix& x,
                    EncoderMode mode, Rng& rng, bool train);

/// Reverse-mode gradients of Σ grad_out ⊙ embeddings with respect to every
/// trainable array of `params`. Throws StaleCache on a second call with the
/// same cache.
EncoderParams encode_backward(const EncoderParams& params, EncodeCache& cache,
                              const Matrix& grad_out);

/// Folds a train-mode forward's batch statistics into the per-batch norm
/// running estimates (momentum 0.9). No-op for per-sample norms.
void absorb_batch_stats(EncoderParams& params, const EncodeCache& cache);

/// Eval-mode backbone + projection output, before normalization. These are
/// the frozen features used by the probes.
Matrix project_features(const EncoderParams& params, const EncoderConfig& config, const Matrix& x);

/// θ_k ← m·θ_k + (1−m)·θ_q over the shared arrays. The prediction head is
/// never touched. Throws DimensionMismatch on shape disagreement.
void momentum_update(EncoderParams& target, const EncoderParams& online, double m);

/// m(t) = m_start + (1 − m_start)·(1 − cos(πt/T))/2: m_start at t=0, 1 at t=T.
double cosine_momentum(long step, long total_steps, double m_start);

inline constexpr double kRunningStatMomentum = 0.9;
inline constexpr double kNormEpsilon = 1e-5;

}  // namespace hardneg
