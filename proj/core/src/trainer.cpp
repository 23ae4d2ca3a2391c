// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "hardneg/error.hpp"
#include "hardneg/hard_miner.hpp"
#include "hardneg/infonce.hpp"
#include "hardneg/negative_queue.hpp"
#include "hardneg/optimizer.hpp"
#include "hardneg/synthesizer.hpp"

namespace hardneg {

namespace {

// Stream ids for Rng::stream; every random draw in a run derives from the
// config seed through one of these.
enum : std::uint64_t {
  kInitStream = 1,
  kShuffleStream = 2,
  kAugmentStream = 3,
  kDropPathStream = 4,
  kSynthesisStream = 5,
};

void add_into(EncoderParams& total, const EncoderParams& part) {
  auto dst = parameter_arrays(total);
  const auto src = parameter_arrays(part);
  for (std::size_t a = 0; a < dst.size(); ++a) {
    for (std::size_t i = 0; i < dst[a].values.size(); ++i) dst[a].values[i] += src[a].values[i];
  }
}

std::vector<Embedding> rows_of(const Matrix& m) {
  std::vector<Embedding> out;
  out.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
  return out;
}

double mean_dot(std::span<const double> q, std::span<const Embedding> others) {
  double sum = 0.0;
  for (const Embedding& n : others) sum += dot(q, n);
  return sum / static_cast<double>(others.size());
}

struct EpochTotals {
  double loss = 0.0;
  long steps = 0;
  double real_hardness = 0.0;
  long real_queries = 0;
  double synthetic_hardness = 0.0;
  long synthetic_queries = 0;
  long synthetic_count = 0;
};

}  // namespace

TrainResult pretrain(const TrainConfig& config, const Dataset& data, const EpochCallback& on_epoch) {
  config.validate();
  if (data.size() == 0) throw Error(ErrorKind::InvalidArgument, "pretraining needs a non-empty dataset");
  if (data.input_dim() != config.encoder.input_dim) {
    throw Error(ErrorKind::DimensionMismatch,
                "dataset has " + std::to_string(data.input_dim()) + " features, encoder expects " +
                    std::to_string(config.encoder.input_dim));
  }

  const EncoderConfig& enc = config.encoder;
  const std::size_t batch = std::min(config.batch_size, data.size());
  const long steps_per_epoch = static_cast<long>(data.size() / batch);
  const long total_steps = steps_per_epoch * config.epochs;
  const std::size_t base_synthetic = config.synthetic_per_query();
  const std::size_t directions = config.symmetrize_loss ? 2 : 1;
  const double query_weight = 1.0 / static_cast<double>(batch * directions);

  Rng init_rng = Rng::stream(config.seed, {kInitStream});
  EncoderParams online = init_encoder(enc, init_rng, /*with_prediction=*/true);
  EncoderParams target = target_from_online(online);
  NegativeQueue queue(config.queue_capacity);
  // Optimizer state is bound to the online encoder only.
  AdamWState adam;
  SgdState sgd;

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng = Rng::stream(config.seed, {kShuffleStream});

  TrainResult result;
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle_rng.below(i)]);

    EpochTotals totals;
    double momentum = 0.0;
    double lr = 0.0;
    for (long s = 0; s < steps_per_epoch; ++s, ++step) {
      const auto ustep = static_cast<std::uint64_t>(step);
      Matrix view_a(batch, enc.input_dim);
      Matrix view_b(batch, enc.input_dim);
      Rng aug_rng = Rng::stream(config.seed, {kAugmentStream, ustep});
      for (std::size_t i = 0; i < batch; ++i) {
        const Sample& sample = data.samples[order[static_cast<std::size_t>(s) * batch + i]];
        auto [a, b] = two_views(sample.features, config.augment_q, config.augment_k, aug_rng);
        std::copy(a.begin(), a.end(), view_a.row(i).begin());
        std::copy(b.begin(), b.end(), view_b.row(i).begin());
      }

      Rng drop_rng = Rng::stream(config.seed, {kDropPathStream, ustep});
      struct Direction {
        EncodeResult query;
        EncodeResult key;
      };
      std::vector<Direction> passes;
      passes.push_back({encode(online, enc, view_a, EncoderMode::Online, drop_rng, true),
                        encode(target, enc, view_b, EncoderMode::Target, drop_rng, true)});
      if (config.symmetrize_loss) {
        passes.push_back({encode(online, enc, view_b, EncoderMode::Online, drop_rng, true),
                          encode(target, enc, view_a, EncoderMode::Target, drop_rng, true)});
      }

      const std::vector<Embedding> snapshot = queue.as_negatives();
      const std::size_t synthetic_per_query = effective_count(
          epoch, config.epochs, config.cooldown_epochs, base_synthetic, snapshot.size(), config.top_n);

      double step_loss = 0.0;
      EncoderParams grads = zeros_like(online);
      for (std::size_t d = 0; d < passes.size(); ++d) {
        Direction& pass = passes[d];
        Matrix grad_q(batch, enc.embed_dim);
        for (std::size_t i = 0; i < batch; ++i) {
          const auto q = pass.query.embeddings.row(i);
          const auto k = pass.key.embeddings.row(i);
          SyntheticBatch synthetic;
          if (synthetic_per_query > 0) {
            const HardSet hard = top_n_hardest(q, snapshot, config.top_n);
            Rng synth_rng = Rng::stream(config.seed, {kSynthesisStream, ustep, d, i});
            synthetic = synthesize(q, hard, snapshot, synthetic_per_query, config.strategy, synth_rng);
          }
          const LossOutput loss =
              infonce_backward(q, k, NegativeSet(snapshot, synthetic.samples), config.tau);
          step_loss += query_weight * loss.value;
          // grad_k is dropped: keys come from the momentum encoder.
          auto g = grad_q.row(i);
          for (std::size_t c = 0; c < g.size(); ++c) g[c] = query_weight * loss.grad_q[c];

          if (!snapshot.empty()) {
            totals.real_hardness += mean_dot(q, snapshot);
            ++totals.real_queries;
          }
          if (!synthetic.empty()) {
            totals.synthetic_hardness += mean_dot(q, synthetic.samples);
            ++totals.synthetic_queries;
            totals.synthetic_count += static_cast<long>(synthetic.size());
          }
        }
        add_into(grads, encode_backward(online, pass.query.cache, grad_q));
      }
      if (!std::isfinite(step_loss)) {
        throw Error(ErrorKind::NonFiniteLoss, "loss became non-finite at step " + std::to_string(step));
      }

      for (const Direction& pass : passes) {
        absorb_batch_stats(online, pass.query.cache);
        absorb_batch_stats(target, pass.key.cache);
      }

      lr = cosine_lr(step, total_steps, config.base_lr);
      {
        std::vector<std::span<double>> param_spans;
        std::vector<std::span<const double>> grad_spans;
        for (auto& a : parameter_arrays(online)) param_spans.push_back(a.values);
        for (const auto& a : parameter_arrays(std::as_const(grads))) grad_spans.push_back(a.values);
        if (config.optimizer == OptimizerKind::AdamW) {
          adamw_step(param_spans, grad_spans, adam,
                     AdamWHyper{lr, 0.9, 0.999, 1e-8, config.weight_decay});
        } else {
          sgd_step(param_spans, grad_spans, sgd, SgdHyper{lr, 0.9, config.weight_decay});
        }
      }

      momentum = cosine_momentum(step, total_steps, config.m_start);
      momentum_update(target, online, momentum);
      queue.enqueue_batch(rows_of(passes.front().key.embeddings));

      totals.loss += step_loss;
      ++totals.steps;
    }

    MetricsRow row;
    row.epoch = epoch;
    row.mean_loss = totals.steps ? totals.loss / static_cast<double>(totals.steps) : 0.0;
    row.mean_hardness_real =
        totals.real_queries ? totals.real_hardness / static_cast<double>(totals.real_queries) : 0.0;
    row.mean_hardness_synthetic =
        totals.synthetic_queries
            ? totals.synthetic_hardness / static_cast<double>(totals.synthetic_queries)
            : 0.0;
    row.synthetic_count = totals.synthetic_count;
    row.momentum = momentum;
    row.learning_rate = lr;
    result.metrics.push_back(row);
    if (on_epoch) on_epoch(row);
  }

  result.checkpoint = Checkpoint{config, std::move(online), std::move(target), config.seed, step};
  return result;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out =
      "epoch,mean_loss,mean_hardness_real,mean_hardness_synthetic,synthetic_count,momentum,"
      "learning_rate\n";
  char line[256];
  for (const MetricsRow& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.6f,%.6f,%.6f,%ld,%.6f,%.6f\n", r.epoch, r.mean_loss,
                  r.mean_hardness_real, r.mean_hardness_synthetic, r.synthetic_count, r.momentum,
                  r.learning_rate);
    out += line;
  }
  return out;
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write metrics " + path.string());
  out << metrics_csv(rows);
  if (!out) throw Error(ErrorKind::IoError, "failed writing metrics " + path.string());
}

}  // namespace hardneg
