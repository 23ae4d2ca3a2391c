// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/encoder.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hardneg/embedding.hpp"
#include "hardneg/error.hpp"

namespace hardneg {

std::string_view to_string(HeadNorm norm) noexcept {
  return norm == HeadNorm::PerSample ? "per-sample" : "per-batch";
}

HeadNorm head_norm_from_string(std::string_view name) {
  if (name == "per-sample") return HeadNorm::PerSample;
  if (name == "per-batch") return HeadNorm::PerBatch;
  throw Error(ErrorKind::InvalidArgument, "unknown head norm '" + std::string(name) + "'");
}

void EncoderConfig::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || embed_dim == 0) {
    throw Error(ErrorKind::InvalidArgument, "encoder dimensions must be at least 1");
  }
  const auto valid_rate = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!valid_rate(drop_path_online) || !valid_rate(drop_path_target)) {
    throw Error(ErrorKind::InvalidArgument, "drop path rates must lie in [0, 1]");
  }
}

// ---------------------------------------------------------------------------
// Parameter enumeration

namespace {

template <class Params, class Out>
void collect_linear(Params& layer, const std::string& prefix, Out& out) {
  out.push_back({prefix + ".weight", layer.weight.values()});
  out.push_back({prefix + ".bias", std::span(layer.bias)});
}

template <class Head, class Out>
void collect_head(Head& head, const std::string& prefix, Out& out) {
  collect_linear(head.fc1, prefix + ".fc1", out);
  out.push_back({prefix + ".norm.gamma", std::span(head.norm.gamma)});
  out.push_back({prefix + ".norm.beta", std::span(head.norm.beta)});
  collect_linear(head.fc2, prefix + ".fc2", out);
}

template <class Params, class Out>
void collect_params(Params& params, ParamScope scope, Out& out) {
  for (std::size_t i = 0; i < params.blocks.size(); ++i) {
    const std::string prefix = "blocks." + std::to_string(i);
    collect_linear(params.blocks[i].fc1, prefix + ".fc1", out);
    collect_linear(params.blocks[i].fc2, prefix + ".fc2", out);
  }
  collect_head(params.projection, "projection", out);
  if (scope == ParamScope::All && params.prediction) collect_head(*params.prediction, "prediction", out);
}

template <class Params, class Out>
void collect_buffers(Params& params, Out& out) {
  out.push_back({"projection.norm.running_mean", std::span(params.projection.norm.running_mean)});
  out.push_back({"projection.norm.running_var", std::span(params.projection.norm.running_var)});
  if (params.prediction) {
    out.push_back({"prediction.norm.running_mean", std::span(params.prediction->norm.running_mean)});
    out.push_back({"prediction.norm.running_var", std::span(params.prediction->norm.running_var)});
  }
}

}  // namespace

std::vector<NamedArray> parameter_arrays(EncoderParams& params, ParamScope scope) {
  std::vector<NamedArray> out;
  collect_params(params, scope, out);
  return out;
}

std::vector<NamedConstArray> parameter_arrays(const EncoderParams& params, ParamScope scope) {
  std::vector<NamedConstArray> out;
  collect_params(params, scope, out);
  return out;
}

std::vector<NamedArray> buffer_arrays(EncoderParams& params) {
  std::vector<NamedArray> out;
  collect_buffers(params, out);
  return out;
}

std::vector<NamedConstArray> buffer_arrays(const EncoderParams& params) {
  std::vector<NamedConstArray> out;
  collect_buffers(params, out);
  return out;
}

std::size_t parameter_count(const EncoderParams& params) {
  std::size_t total = 0;
  for (const auto& array : parameter_arrays(params)) total += array.values.size();
  return total;
}

// ---------------------------------------------------------------------------
// Initialization

namespace {

Linear init_linear(std::size_t in, std::size_t out, Rng& rng) {
  Linear layer{Matrix(out, in), std::vector<double>(out, 0.0)};
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (double& w : layer.weight.values()) w = rng.uniform(-bound, bound);
  return layer;
}

NormLayer init_norm(std::size_t width) {
  return {std::vector<double>(width, 1.0), std::vector<double>(width, 0.0),
          std::vector<double>(width, 0.0), std::vector<double>(width, 1.0)};
}

MlpHead init_head(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng) {
  MlpHead head;
  head.fc1 = init_linear(in, hidden, rng);
  head.norm = init_norm(hidden);
  head.fc2 = init_linear(hidden, out, rng);
  return head;
}

}  // namespace

EncoderParams init_encoder(const EncoderConfig& config, Rng& rng, bool with_prediction) {
  config.validate();
  EncoderParams params;
  params.blocks.reserve(config.num_blocks);
  for (std::size_t b = 0; b < config.num_blocks; ++b) {
    ResidualBlock block;
    block.fc1 = init_linear(config.input_dim, config.hidden_dim, rng);
    block.fc2 = init_linear(config.hidden_dim, config.input_dim, rng);
    params.blocks.push_back(std::move(block));
  }
  params.projection = init_head(config.input_dim, config.hidden_dim, config.embed_dim, rng);
  if (with_prediction) {
    params.prediction = init_head(config.embed_dim, config.hidden_dim, config.embed_dim, rng);
  }
  return params;
}

EncoderParams zeros_like(const EncoderParams& params) {
  EncoderParams out = params;
  for (auto& array : parameter_arrays(out)) std::fill(array.values.begin(), array.values.end(), 0.0);
  for (auto& array : buffer_arrays(out)) std::fill(array.values.begin(), array.values.end(), 0.0);
  return out;
}

EncoderParams target_from_online(const EncoderParams& online) {
  EncoderParams target = online;
  target.prediction.reset();
  return target;
}

// ---------------------------------------------------------------------------
// Forward / backward kernels

namespace {

constexpr double kGeluCubic = 0.044715;
const double kGeluScale = std::sqrt(2.0 / std::numbers::pi);

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluScale * (x + kGeluCubic * x * x * x)));
}

double gelu_grad(double x) {
  const double t = std::tanh(kGeluScale * (x + kGeluCubic * x * x * x));
  return 0.5 * (1.0 + t) +
         0.5 * x * (1.0 - t * t) * kGeluScale * (1.0 + 3.0 * kGeluCubic * x * x);
}

Matrix gelu(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  auto dst = out.values();
  auto src = x.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = gelu(src[i]);
  return out;
}

void require_cols(const Matrix& m, std::size_t cols, const char* what) {
  if (m.cols() != cols) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected " +
                                                  std::to_string(cols) + " columns, got " +
                                                  std::to_string(m.cols()));
  }
}

Matrix norm_forward(const NormLayer& layer, HeadNorm kind, bool train, const Matrix& x,
                    NormCache& cache) {
  const std::size_t rows = x.rows();
  const std::size_t cols = x.cols();
  cache.normalized = Matrix(rows, cols);
  cache.used_batch_stats = false;

  if (kind == HeadNorm::PerSample) {
    cache.inv_std = Matrix(rows, 1);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto xr = x.row(r);
      double mean = 0.0;
      for (double v : xr) mean += v;
      mean /= static_cast<double>(cols);
      double var = 0.0;
      for (double v : xr) var += (v - mean) * (v - mean);
      var /= static_cast<double>(cols);
      const double inv = 1.0 / std::sqrt(var + kNormEpsilon);
      cache.inv_std(r, 0) = inv;
      for (std::size_t c = 0; c < cols; ++c) cache.normalized(r, c) = (xr[c] - mean) * inv;
    }
  } else {
    cache.inv_std = Matrix(1, cols);
    std::vector<double> mean(cols, 0.0);
    std::vector<double> var(cols, 0.0);
    if (train) {
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) mean[c] += x(r, c);
      for (double& m : mean) m /= static_cast<double>(rows);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) var[c] += (x(r, c) - mean[c]) * (x(r, c) - mean[c]);
      for (double& v : var) v /= static_cast<double>(rows);
      cache.batch_mean = mean;
      cache.batch_var = var;
      cache.used_batch_stats = true;
    } else {
      mean = layer.running_mean;
      var = layer.running_var;
    }
    for (std::size_t c = 0; c < cols; ++c) cache.inv_std(0, c) = 1.0 / std::sqrt(var[c] + kNormEpsilon);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c)
        cache.normalized(r, c) = (x(r, c) - mean[c]) * cache.inv_std(0, c);
  }

  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(r, c) = layer.gamma[c] * cache.normalized(r, c) + layer.beta[c];
  return out;
}

Matrix norm_backward(const NormLayer& layer, HeadNorm kind, const NormCache& cache,
                     const Matrix& dy, NormLayer& grad) {
  const std::size_t rows = dy.rows();
  const std::size_t cols = dy.cols();
  const Matrix& xhat = cache.normalized;
  Matrix dxhat(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      grad.gamma[c] += dy(r, c) * xhat(r, c);
      grad.beta[c] += dy(r, c);
      dxhat(r, c) = dy(r, c) * layer.gamma[c];
    }
  }

  Matrix dx(rows, cols);
  if (kind == HeadNorm::PerSample) {
    const double n = static_cast<double>(cols);
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      double sum_xhat = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        sum += dxhat(r, c);
        sum_xhat += dxhat(r, c) * xhat(r, c);
      }
      const double scale = cache.inv_std(r, 0) / n;
      for (std::size_t c = 0; c < cols; ++c)
        dx(r, c) = scale * (n * dxhat(r, c) - sum - xhat(r, c) * sum_xhat);
    }
  } else if (cache.used_batch_stats) {
    const double n = static_cast<double>(rows);
    for (std::size_t c = 0; c < cols; ++c) {
      double sum = 0.0;
      double sum_xhat = 0.0;
      for (std::size_t r = 0; r < rows; ++r) {
        sum += dxhat(r, c);
        sum_xhat += dxhat(r, c) * xhat(r, c);
      }
      const double scale = cache.inv_std(0, c) / n;
      for (std::size_t r = 0; r < rows; ++r)
        dx(r, c) = scale * (n * dxhat(r, c) - sum - xhat(r, c) * sum_xhat);
    }
  } else {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) dx(r, c) = dxhat(r, c) * cache.inv_std(0, c);
  }
  return dx;
}

Matrix head_forward(const MlpHead& head, HeadNorm kind, bool train, const Matrix& x,
                    HeadCache& cache) {
  require_cols(x, head.fc1.weight.cols(), "head input");
  cache.input = x;
  cache.pre_norm = affine(x, head.fc1.weight, head.fc1.bias);
  cache.post_norm = norm_forward(head.norm, kind, train, cache.pre_norm, cache.norm);
  cache.activated = gelu(cache.post_norm);
  return affine(cache.activated, head.fc2.weight, head.fc2.bias);
}

Matrix head_backward(const MlpHead& head, HeadNorm kind, const HeadCache& cache, const Matrix& dy,
                     MlpHead& grad) {
  Matrix d_act = affine_backward(cache.activated, head.fc2.weight, dy, grad.fc2.weight,
                                 std::span(grad.fc2.bias));
  auto da = d_act.values();
  auto pre = cache.post_norm.values();
  for (std::size_t i = 0; i < da.size(); ++i) da[i] *= gelu_grad(pre[i]);
  Matrix d_pre = norm_backward(head.norm, kind, cache.norm, d_act, grad.norm);
  return affine_backward(cache.input, head.fc1.weight, d_pre, grad.fc1.weight,
                         std::span(grad.fc1.bias));
}

void check_shapes(const EncoderParams& params, const EncoderConfig& config) {
  if (params.blocks.size() != config.num_blocks) {
    throw Error(ErrorKind::DimensionMismatch, "encoder has " + std::to_string(params.blocks.size()) +
                                                  " blocks, config expects " +
                                                  std::to_string(config.num_blocks));
  }
  for (const ResidualBlock& block : params.blocks) {
    if (block.fc1.weight.cols() != config.input_dim || block.fc1.weight.rows() != config.hidden_dim ||
        block.fc2.weight.rows() != config.input_dim) {
      throw Error(ErrorKind::DimensionMismatch, "residual block shape disagrees with config");
    }
  }
  if (params.projection.fc2.weight.rows() != config.embed_dim) {
    throw Error(ErrorKind::DimensionMismatch, "projection head width disagrees with config");
  }
}

Matrix backbone_forward(const EncoderParams& params, const EncoderConfig& config, const Matrix& x,
                        EncoderMode mode, Rng& rng, bool train, std::vector<BlockCache>& caches) {
  const double rate = config.drop_path(mode);
  const bool stochastic = train && rate > 0.0;
  Matrix h = x;
  caches.clear();
  caches.reserve(params.blocks.size());
  for (const ResidualBlock& block : params.blocks) {
    BlockCache cache;
    cache.input = h;
    cache.pre_activation = affine(h, block.fc1.weight, block.fc1.bias);
    cache.activated = gelu(cache.pre_activation);
    const Matrix branch = affine(cache.activated, block.fc2.weight, block.fc2.bias);
    cache.path_scale.assign(h.rows(), 1.0);
    if (stochastic) {
      for (double& scale : cache.path_scale) {
        const bool keep = rate < 1.0 && !rng.bernoulli(rate);
        scale = keep ? 1.0 / (1.0 - rate) : 0.0;
      }
    }
    for (std::size_t r = 0; r < h.rows(); ++r) {
      const double scale = cache.path_scale[r];
      if (scale == 0.0) continue;
      auto hr = h.row(r);
      const auto br = branch.row(r);
      for (std::size_t c = 0; c < hr.size(); ++c) hr[c] += scale * br[c];
    }
    caches.push_back(std::move(cache));
  }
  return h;
}

}  // namespace

EncodeResult encode(const EncoderParams& params, const EncoderConfig& config, const Matrix& x,
                    EncoderMode mode, Rng& rng, bool train) {
  check_shapes(params, config);
  require_cols(x, config.input_dim, "encoder input");
  if (mode == EncoderMode::Online && !params.prediction) {
    throw Error(ErrorKind::InvalidArgument, "online encoding needs a prediction head");
  }

  EncodeResult result;
  EncodeCache& cache = result.cache;
  cache.mode = mode;
  cache.head_norm = config.head_norm;
  cache.train = train;

  const Matrix h = backbone_forward(params, config, x, mode, rng, train, cache.blocks);
  Matrix out = head_forward(params.projection, config.head_norm, train, h, cache.projection);
  if (mode == EncoderMode::Online) {
    cache.prediction.emplace();
    out = head_forward(*params.prediction, config.head_norm, train, out, *cache.prediction);
  }

  cache.unnormalized = out;
  cache.output = Matrix(out.rows(), out.cols());
  cache.row_norms.resize(out.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const double norm = l2_norm(out.row(r));
    if (!std::isfinite(norm)) {
      throw Error(ErrorKind::NonFiniteLoss, "encoder output row " + std::to_string(r) + " is not finite");
    }
    if (!(norm > kZeroNormThreshold)) {
      throw Error(ErrorKind::ZeroVector, "encoder output row " + std::to_string(r) + " is zero");
    }
    cache.row_norms[r] = norm;
    auto dst = cache.output.row(r);
    const auto src = out.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c] / norm;
  }
  result.embeddings = cache.output;
  return result;
}

EncoderParams encode_backward(const EncoderParams& params, EncodeCache& cache,
                              const Matrix& grad_out) {
  if (cache.consumed) throw Error(ErrorKind::StaleCache, "encode cache already consumed");
  if (!grad_out.same_shape(cache.output)) {
    throw Error(ErrorKind::DimensionMismatch, "gradient shape differs from encoder output");
  }
  cache.consumed = true;

  EncoderParams grads = zeros_like(params);
  if (!cache.prediction) grads.prediction.reset();
  const HeadNorm kind = cache.head_norm;

  // Through y = x/‖x‖: dx = (dy − y(y·dy))/‖x‖.
  Matrix d(grad_out.rows(), grad_out.cols());
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const auto y = cache.output.row(r);
    const auto dy = grad_out.row(r);
    const double proj = dot(y, dy);
    const double inv = 1.0 / cache.row_norms[r];
    auto dr = d.row(r);
    for (std::size_t c = 0; c < dr.size(); ++c) dr[c] = (dy[c] - y[c] * proj) * inv;
  }

  if (cache.prediction) {
    if (!params.prediction) throw Error(ErrorKind::InvalidArgument, "cache expects a prediction head");
    d = head_backward(*params.prediction, kind, *cache.prediction, d, *grads.prediction);
  }
  d = head_backward(params.projection, kind, cache.projection, d, grads.projection);

  for (std::size_t b = params.blocks.size(); b-- > 0;) {
    const ResidualBlock& block = params.blocks[b];
    const BlockCache& bc = cache.blocks[b];
    ResidualBlock& grad = grads.blocks[b];
    Matrix d_branch = d;
    for (std::size_t r = 0; r < d_branch.rows(); ++r) {
      const double scale = bc.path_scale[r];
      for (double& v : d_branch.row(r)) v *= scale;
    }
    Matrix d_act = affine_backward(bc.activated, block.fc2.weight, d_branch, grad.fc2.weight,
                                   std::span(grad.fc2.bias));
    auto da = d_act.values();
    auto pre = bc.pre_activation.values();
    for (std::size_t i = 0; i < da.size(); ++i) da[i] *= gelu_grad(pre[i]);
    const Matrix d_in = affine_backward(bc.input, block.fc1.weight, d_act, grad.fc1.weight,
                                        std::span(grad.fc1.bias));
    auto dv = d.values();
    auto di = d_in.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += di[i];
  }
  return grads;
}

void absorb_batch_stats(EncoderParams& params, const EncodeCache& cache) {
  const auto absorb = [](NormLayer& layer, const NormCache& norm, std::size_t rows) {
    if (!norm.used_batch_stats) return;
    const double unbias = rows > 1 ? static_cast<double>(rows) / static_cast<double>(rows - 1) : 1.0;
    for (std::size_t c = 0; c < layer.running_mean.size(); ++c) {
      layer.running_mean[c] = kRunningStatMomentum * layer.running_mean[c] +
                              (1.0 - kRunningStatMomentum) * norm.batch_mean[c];
      layer.running_var[c] = kRunningStatMomentum * layer.running_var[c] +
                             (1.0 - kRunningStatMomentum) * norm.batch_var[c] * unbias;
    }
  };
  absorb(params.projection.norm, cache.projection.norm, cache.projection.input.rows());
  if (cache.prediction && params.prediction) {
    absorb(params.prediction->norm, cache.prediction->norm, cache.prediction->input.rows());
  }
}

Matrix project_features(const EncoderParams& params, const EncoderConfig& config, const Matrix& x) {
  check_shapes(params, config);
  require_cols(x, config.input_dim, "encoder input");
  Rng unused(0);
  std::vector<BlockCache> blocks;
  const Matrix h = backbone_forward(params, config, x, EncoderMode::Target, unused, false, blocks);
  HeadCache head;
  return head_forward(params.projection, config.head_norm, false, h, head);
}

void momentum_update(EncoderParams& target, const EncoderParams& online, double m) {
  if (!(m >= 0.0 && m <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "momentum must lie in [0, 1], got " + std::to_string(m));
  }
  auto dst = parameter_arrays(target, ParamScope::Shared);
  const auto src = parameter_arrays(online, ParamScope::Shared);
  if (dst.size() != src.size()) {
    throw Error(ErrorKind::DimensionMismatch, "online and target encoders differ in depth");
  }
  for (std::size_t a = 0; a < dst.size(); ++a) {
    if (dst[a].name != src[a].name || dst[a].values.size() != src[a].values.size()) {
      throw Error(ErrorKind::DimensionMismatch, "shape mismatch at " + dst[a].name);
    }
  }
  const double blend = 1.0 - m;
  for (std::size_t a = 0; a < dst.size(); ++a) {
    auto k = dst[a].values;
    const auto q = src[a].values;
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = m * k[i] + blend * q[i];
  }
}

double cosine_momentum(long step, long total_steps, double m_start) {
  if (total_steps < 1 || step < 0 || step > total_steps) {
    throw Error(ErrorKind::InvalidArgument, "cosine_momentum needs 0 <= t <= T and T >= 1");
  }
  const double progress = static_cast<double>(step) / static_cast<double>(total_steps);
  return m_start + (1.0 - m_start) * (1.0 - std::cos(std::numbers::pi * progress)) / 2.0;
}

}  // namespace hardneg
