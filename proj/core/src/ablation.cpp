// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/ablation.hpp"

#include <charconv>
#include <cstdio>

#include "hardneg/error.hpp"
#include "hardneg/probe.hpp"
#include "hardneg/trainer.hpp"

namespace hardneg {

std::string_view to_string(AblationAxis axis) noexcept {
  switch (axis) {
    case AblationAxis::QueueSize: return "queue";
    case AblationAxis::Temperature: return "temperature";
    case AblationAxis::Momentum: return "momentum";
    case AblationAxis::DropPath: return "drop-path";
    case AblationAxis::Hardness: return "hardness";
    case AblationAxis::HeadNorm: return "head-norm";
  }
  return "unknown";
}

AblationAxis ablation_axis_from_string(std::string_view name) {
  if (name == "queue" || name == "K") return AblationAxis::QueueSize;
  if (name == "temperature" || name == "tau") return AblationAxis::Temperature;
  if (name == "momentum" || name == "m_start") return AblationAxis::Momentum;
  if (name == "drop-path" || name == "dpr") return AblationAxis::DropPath;
  if (name == "hardness" || name == "N") return AblationAxis::Hardness;
  if (name == "head-norm") return AblationAxis::HeadNorm;
  throw Error(ErrorKind::InvalidArgument, "unknown ablation axis '" + std::string(name) + "'");
}

namespace {

template <class T>
T parse_number(std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::InvalidArgument, "invalid numeric value '" + std::string(text) + "'");
  }
  return value;
}

std::pair<std::string_view, std::string_view> split_pair(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::InvalidArgument, "expected 'a:b' pair, got '" + std::string(text) + "'");
  }
  return {text.substr(0, colon), text.substr(colon + 1)};
}

}  // namespace

TrainConfig apply_ablation_value(const TrainConfig& base, AblationAxis axis, const std::string& value) {
  TrainConfig c = base;
  switch (axis) {
    case AblationAxis::QueueSize:
      c.queue_capacity = parse_number<std::size_t>(value);
      break;
    case AblationAxis::Temperature:
      c.tau = parse_number<double>(value);
      break;
    case AblationAxis::Momentum:
      c.m_start = parse_number<double>(value);
      break;
    case AblationAxis::DropPath: {
      const auto [online, target] = split_pair(value);
      c.encoder.drop_path_online = parse_number<double>(online);
      c.encoder.drop_path_target = parse_number<double>(target);
      break;
    }
    case AblationAxis::Hardness: {
      const auto [n, fraction] = split_pair(value);
      c.top_n = parse_number<std::size_t>(n);
      c.synth_fraction = parse_number<double>(fraction);
      break;
    }
    case AblationAxis::HeadNorm:
      c.encoder.head_norm = head_norm_from_string(value);
      break;
  }
  c.validate();
  return c;
}

std::vector<AblationRow> run_ablation_grid(const TrainConfig& base, const Dataset& data,
                                           AblationAxis axis, const std::vector<std::string>& values,
                                           const AblationProgress& progress) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "ablation needs at least one value");
  // Validate every value before spending time on training.
  std::vector<TrainConfig> configs;
  for (const std::string& v : values) configs.push_back(apply_ablation_value(base, axis, v));

  std::vector<AblationRow> rows;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const TrainResult run = pretrain(configs[i], data);
    const ProbeReport report = evaluate_checkpoint(run.checkpoint, data, configs[i].probe);
    rows.push_back({values[i], report.top1, report.knn_top1});
    if (progress) progress(rows.back());
  }
  return rows;
}

std::string ablation_csv(AblationAxis axis, const std::vector<AblationRow>& rows) {
  std::string out = "axis,value,top1,knn_top1\n";
  char line[256];
  for (const AblationRow& r : rows) {
    std::snprintf(line, sizeof line, "%s,%s,%.6f,%.6f\n", std::string(to_string(axis)).c_str(),
                  r.setting.c_str(), r.top1, r.knn_top1);
    out += line;
  }
  return out;
}

}  // namespace hardneg
