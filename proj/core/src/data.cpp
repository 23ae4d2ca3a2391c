// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hardneg/embedding.hpp"
#include "hardneg/error.hpp"

namespace hardneg {

Matrix Dataset::features_matrix() const {
  Matrix out(samples.size(), input_dim());
  for (std::size_t r = 0; r < samples.size(); ++r) {
    std::copy(samples[r].features.begin(), samples[r].features.end(), out.row(r).begin());
  }
  return out;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const Sample& s : samples) out.push_back(s.label);
  return out;
}

void AugmentationSpec::validate() const {
  if (!(noise_sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise_sigma must be >= 0");
  if (!(mask_prob >= 0.0 && mask_prob <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "mask_prob must lie in [0, 1]");
  }
  if (!(scale_low > 0.0 && scale_low <= scale_high)) {
    throw Error(ErrorKind::InvalidArgument, "scale interval must satisfy 0 < low <= high");
  }
}

namespace {

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  for (;;) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal();
    if (l2_norm(v) > kZeroNormThreshold) return normalize(v);
  }
}

}  // namespace

Dataset make_clusters(int num_classes, int per_class, std::size_t input_dim, double sigma,
                      std::uint64_t seed) {
  if (num_classes < 2 || per_class < 1 || input_dim < 2 || !(sigma >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "make_clusters needs num_classes >= 2, per_class >= 1, input_dim >= 2, sigma >= 0");
  }
  constexpr double kMaxCenterSimilarity = 0.8;
  constexpr int kMaxAttempts = 100;

  Rng rng(seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      std::vector<double> candidate = random_unit(input_dim, rng);
      const bool separated = std::all_of(centers.begin(), centers.end(), [&](const auto& other) {
        return cosine_sim(candidate, other) <= kMaxCenterSimilarity;
      });
      if (separated) {
        centers.push_back(std::move(candidate));
        placed = true;
      }
    }
    if (!placed) {
      throw Error(ErrorKind::CenterSeparationFailure,
                  "could not place center " + std::to_string(c) + " after " +
                      std::to_string(kMaxAttempts) + " draws");
    }
  }

  Dataset data;
  data.num_classes = num_classes;
  data.samples.reserve(static_cast<std::size_t>(num_classes * per_class));
  for (int c = 0; c < num_classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Sample s{centers[static_cast<std::size_t>(c)], c};
      if (sigma > 0.0) {
        for (double& x : s.features) x += sigma * rng.normal();
      }
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

std::vector<double> augment(std::span<const double> x, const AugmentationSpec& spec, Rng& rng) {
  const double scale = rng.uniform(spec.scale_low, spec.scale_high);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = scale * x[i];
    if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.normal();
    if (spec.mask_prob > 0.0 && rng.bernoulli(spec.mask_prob)) v = 0.0;
    out[i] = v;
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> two_views(std::span<const double> x,
                                                              const AugmentationSpec& spec_q,
                                                              const AugmentationSpec& spec_k,
                                                              Rng& rng) {
  auto view_q = augment(x, spec_q, rng);
  auto view_k = augment(x, spec_k, rng);
  return {std::move(view_q), std::move(view_k)};
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_error(1, "empty file, expected header 'label,f0,...'");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.size() < 2 || header.front() != "label") {
    parse_error(line_no, "header must start with 'label' followed by feature columns");
  }
  const std::size_t width = header.size() - 1;

  Dataset data;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != width + 1) {
      throw Error(ErrorKind::RaggedRows, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(width + 1) + " fields, got " +
                                             std::to_string(fields.size()));
    }
    Sample sample;
    const auto label_field = fields[0];
    auto [lptr, lec] = std::from_chars(label_field.data(), label_field.data() + label_field.size(),
                                       sample.label);
    if (lec != std::errc() || lptr != label_field.data() + label_field.size() || sample.label < 0) {
      parse_error(line_no, "invalid label '" + std::string(label_field) + "'");
    }
    sample.features.resize(width);
    for (std::size_t f = 0; f < width; ++f) {
      const auto field = fields[f + 1];
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), sample.features[f]);
      if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(sample.features[f])) {
        parse_error(line_no, "invalid number '" + std::string(field) + "'");
      }
    }
    max_label = std::max(max_label, sample.label);
    data.samples.push_back(std::move(sample));
  }
  if (data.samples.empty()) parse_error(line_no, "no data rows");
  data.num_classes = max_label + 1;
  return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "label";
  for (std::size_t f = 0; f < data.input_dim(); ++f) out << ",f" << f;
  out << '\n';
  char buffer[32];
  for (const Sample& s : data.samples) {
    out << s.label;
    for (double v : s.features) {
      std::snprintf(buffer, sizeof buffer, "%.17g", v);
      out << ',' << buffer;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

Dataset load_dataset(const std::string& spec) {
  if (spec == kClustersPreset) return make_clusters(10, 500, 32, 0.15, kClustersPresetSeed);
  return load_csv(spec);
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction,
                                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  const auto train_count =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(data.size())));
  std::pair<Dataset, Dataset> out;
  out.first.num_classes = out.second.num_classes = data.num_classes;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < train_count ? out.first : out.second).samples.push_back(data.samples[order[i]]);
  }
  return out;
}

}  // namespace hardneg
