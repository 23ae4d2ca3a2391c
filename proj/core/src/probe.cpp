// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hardneg/embedding.hpp"
#include "hardneg/error.hpp"
#include "hardneg/synthesizer.hpp"

namespace hardneg {

FeatureTable extract_features(const Checkpoint& checkpoint, const Dataset& data) {
  if (data.input_dim() != checkpoint.config.encoder.input_dim) {
    throw Error(ErrorKind::DimensionMismatch, "dataset width does not match the checkpoint encoder");
  }
  FeatureTable table;
  table.features = project_features(checkpoint.online, checkpoint.config.encoder, data.features_matrix());
  table.labels = data.labels();
  table.num_classes = data.num_classes;
  return table;
}

FeatureTable raw_features(const Dataset& data) {
  return {data.features_matrix(), data.labels(), data.num_classes};
}

FeatureTable select_rows(const FeatureTable& table, const std::vector<std::size_t>& indices) {
  FeatureTable out{Matrix(indices.size(), table.dim()), {}, table.num_classes};
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = table.features.row(indices[r]);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
    out.labels.push_back(table.labels[indices[r]]);
  }
  return out;
}

namespace {

void check_tables(const FeatureTable& train, const FeatureTable& test) {
  if (train.size() == 0 || test.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "evaluation needs non-empty train and test tables");
  }
  if (train.dim() != test.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "train and test feature widths differ");
  }
  const auto [lo, hi] = std::minmax_element(train.labels.begin(), train.labels.end());
  if (*lo == *hi) throw Error(ErrorKind::SingleClass, "training labels are all " + std::to_string(*lo));
}

int class_count(const FeatureTable& train, const FeatureTable& test) {
  int count = std::max(train.num_classes, test.num_classes);
  for (int l : train.labels) count = std::max(count, l + 1);
  for (int l : test.labels) count = std::max(count, l + 1);
  return count;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace

double linear_probe(const FeatureTable& train, const FeatureTable& test, int epochs, double lr) {
  check_tables(train, test);
  if (epochs < 1 || !(lr > 0.0)) throw Error(ErrorKind::InvalidArgument, "probe epochs and lr must be positive");

  const std::size_t n = train.size();
  const std::size_t dim = train.dim();
  const auto classes = static_cast<std::size_t>(class_count(train, test));

  // Standardize with training statistics.
  std::vector<double> mean(dim, 0.0);
  std::vector<double> inv_std(dim, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < dim; ++c) mean[c] += train.features(r, c);
  for (double& m : mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const double dv = train.features(r, c) - mean[c];
      inv_std[c] += dv * dv;
    }
  for (double& s : inv_std) {
    const double sd = std::sqrt(s / static_cast<double>(n));
    s = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  const auto standardize = [&](const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < dim; ++c) out(r, c) = (x(r, c) - mean[c]) * inv_std[c];
    return out;
  };
  const Matrix x_train = standardize(train.features);
  const Matrix x_test = standardize(test.features);

  Matrix weight(classes, dim);
  std::vector<double> bias(classes, 0.0);
  Matrix vel_w(classes, dim);
  std::vector<double> vel_b(classes, 0.0);
  constexpr double kMomentum = 0.9;
  const double inv_n = 1.0 / static_cast<double>(n);

  for (int epoch = 0; epoch < epochs; ++epoch) {
    Matrix logits = affine(x_train, weight, bias);
    // Softmax minus one-hot, averaged over the batch.
    for (std::size_t r = 0; r < n; ++r) {
      auto row = logits.row(r);
      const double peak = *std::max_element(row.begin(), row.end());
      double total = 0.0;
      for (double& v : row) {
        v = std::exp(v - peak);
        total += v;
      }
      for (double& v : row) v = v / total * inv_n;
      row[static_cast<std::size_t>(train.labels[r])] -= inv_n;
    }
    Matrix grad_w(classes, dim);
    std::vector<double> grad_b(classes, 0.0);
    affine_backward(x_train, weight, logits, grad_w, grad_b);
    auto w = weight.values();
    auto gw = grad_w.values();
    auto vw = vel_w.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      vw[i] = kMomentum * vw[i] + gw[i];
      w[i] -= lr * vw[i];
    }
    for (std::size_t k = 0; k < classes; ++k) {
      vel_b[k] = kMomentum * vel_b[k] + grad_b[k];
      bias[k] -= lr * vel_b[k];
    }
  }

  const Matrix scores = affine(x_test, weight, bias);
  std::vector<int> predicted(test.size());
  for (std::size_t r = 0; r < test.size(); ++r) {
    const auto row = scores.row(r);
    predicted[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return accuracy(predicted, test.labels);
}

namespace {

Matrix unit_rows(const Matrix& x) {
  Matrix out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double norm = l2_norm(row);
    if (norm > kZeroNormThreshold)
      for (double& v : row) v /= norm;
  }
  return out;
}

}  // namespace

std::vector<int> knn_predict(const FeatureTable& train, const FeatureTable& test, std::size_t k) {
  check_tables(train, test);
  if (k < 1 || k > train.size()) {
    throw Error(ErrorKind::InvalidArgument, "k must satisfy 1 <= k <= " + std::to_string(train.size()));
  }
  const Matrix a = unit_rows(train.features);
  const Matrix b = unit_rows(test.features);
  const auto classes = static_cast<std::size_t>(class_count(train, test));

  std::vector<int> predicted(test.size());
  std::vector<double> sims(train.size());
  std::vector<std::size_t> order(train.size());
  for (std::size_t t = 0; t < test.size(); ++t) {
    for (std::size_t r = 0; r < train.size(); ++r) {
      sims[r] = std::clamp(dot(b.row(t), a.row(r)), -1.0, 1.0);
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t x, std::size_t y) {
                        return sims[x] > sims[y] || (sims[x] == sims[y] && x < y);
                      });
    std::vector<std::size_t> votes(classes, 0);
    std::vector<double> weight(classes, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
      const auto label = static_cast<std::size_t>(train.labels[order[j]]);
      ++votes[label];
      weight[label] += sims[order[j]];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (votes[c] > votes[best] || (votes[c] == votes[best] && weight[c] > weight[best])) best = c;
    }
    predicted[t] = static_cast<int>(best);
  }
  return predicted;
}

double knn_eval(const FeatureTable& train, const FeatureTable& test, std::size_t k) {
  return accuracy(knn_predict(train, test, k), test.labels);
}

ProbeReport evaluate_checkpoint(const Checkpoint& checkpoint, const Dataset& data,
                                const ProbeConfig& probe) {
  const auto [train_data, test_data] = split_dataset(data, probe.train_fraction, probe.split_seed);
  const FeatureTable train = extract_features(checkpoint, train_data);
  const FeatureTable test = extract_features(checkpoint, test_data);
  ProbeReport report;
  report.top1 = linear_probe(train, test, probe.epochs, probe.lr);
  report.knn_top1 = knn_eval(train, test, std::min(probe.knn_k, train.size()));
  report.split_seed = probe.split_seed;
  return report;
}

HardnessReport hardness_report(const Checkpoint& checkpoint, const Dataset& data,
                               std::size_t max_queries) {
  const TrainConfig& cfg = checkpoint.config;
  if (data.input_dim() != cfg.encoder.input_dim) {
    throw Error(ErrorKind::DimensionMismatch, "dataset width does not match the checkpoint encoder");
  }
  if (data.size() == 0 || max_queries == 0) {
    throw Error(ErrorKind::InvalidArgument, "hardness report needs data and at least one query");
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(checkpoint.seed, {0x5747});
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  const Matrix all = data.features_matrix();
  const auto gather = [&](std::size_t begin, std::size_t end) {
    Matrix out(end - begin, all.cols());
    for (std::size_t r = begin; r < end; ++r) {
      const auto src = all.row(order[r]);
      std::copy(src.begin(), src.end(), out.row(r - begin).begin());
    }
    return out;
  };

  const std::size_t queue_size = std::min(cfg.queue_capacity, data.size());
  const std::size_t query_count = std::min(max_queries, data.size());
  Rng unused(0);
  const EncodeResult keys = encode(checkpoint.target, cfg.encoder, gather(0, queue_size),
                                   EncoderMode::Target, unused, false);
  const EncodeResult queries =
      encode(checkpoint.online, cfg.encoder, gather(data.size() - query_count, data.size()),
             EncoderMode::Online, unused, false);

  std::vector<Embedding> queue;
  for (std::size_t r = 0; r < keys.embeddings.rows(); ++r) {
    queue.emplace_back(keys.embeddings.row(r).begin(), keys.embeddings.row(r).end());
  }

  HardnessReport report;
  report.queries = query_count;
  report.queue_size = queue.size();
  report.synthetic_per_query = queue.size() >= cfg.top_n ? cfg.synthetic_per_query() : 0;

  const auto accumulate = [](HardnessStats& into, const HardnessStats& s) {
    into.mean += s.mean;
    into.std += s.std;
    into.min += s.min;
    into.max += s.max;
    into.p50 += s.p50;
    into.p90 += s.p90;
  };
  const auto scale = [](HardnessStats& s, double f) {
    s.mean *= f;
    s.std *= f;
    s.min *= f;
    s.max *= f;
    s.p50 *= f;
    s.p90 *= f;
  };

  for (std::size_t i = 0; i < query_count; ++i) {
    const auto q = queries.embeddings.row(i);
    accumulate(report.real, hardness_stats(q, queue));
    if (report.synthetic_per_query > 0) {
      const HardSet hard = top_n_hardest(q, queue, cfg.top_n);
      Rng synth_rng = Rng::stream(checkpoint.seed, {0x5747, i});
      const SyntheticBatch synthetic =
          synthesize(q, hard, queue, report.synthetic_per_query, cfg.strategy, synth_rng);
      accumulate(report.synthetic, hardness_stats(q, synthetic.samples));
    }
  }
  scale(report.real, 1.0 / static_cast<double>(query_count));
  scale(report.synthetic, 1.0 / static_cast<double>(query_count));
  return report;
}

}  // namespace hardneg
