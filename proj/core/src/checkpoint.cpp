// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "hardneg/error.hpp"
#include "json.hpp"

namespace hardneg {

using nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "hardneg-checkpoint/1";

template <class Arrays>
ordered_json arrays_json(const Arrays& arrays) {
  ordered_json out = ordered_json::array();
  for (const auto& a : arrays) {
    out.push_back({{"name", a.name}, {"values", std::vector<double>(a.values.begin(), a.values.end())}});
  }
  return out;
}

ordered_json encoder_json(const EncoderParams& params) {
  return {{"parameters", arrays_json(parameter_arrays(params))},
          {"buffers", arrays_json(buffer_arrays(params))}};
}

void fill_arrays(std::vector<NamedArray> arrays, const ordered_json& node, const std::string& where) {
  if (!node.is_array() || node.size() != arrays.size()) {
    throw Error(ErrorKind::ParseError, where + ": expected " + std::to_string(arrays.size()) + " arrays");
  }
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    const auto& item = node[i];
    if (item.at("name").get<std::string>() != arrays[i].name) {
      throw Error(ErrorKind::ParseError, where + ": expected array '" + arrays[i].name + "'");
    }
    const auto values = item.at("values").get<std::vector<double>>();
    if (values.size() != arrays[i].values.size()) {
      throw Error(ErrorKind::DimensionMismatch, where + ": wrong length for " + arrays[i].name);
    }
    std::copy(values.begin(), values.end(), arrays[i].values.begin());
  }
}

EncoderParams encoder_from_json(const EncoderConfig& config, bool with_prediction,
                                const ordered_json& node, const std::string& where) {
  Rng unused(0);
  EncoderParams params = init_encoder(config, unused, with_prediction);
  fill_arrays(parameter_arrays(params), node.at("parameters"), where + ".parameters");
  fill_arrays(buffer_arrays(params), node.at("buffers"), where + ".buffers");
  return params;
}

}  // namespace

std::string to_json(const Checkpoint& checkpoint) {
  ordered_json j;
  j["format"] = kFormat;
  j["config"] = ordered_json::parse(to_json(checkpoint.config));
  j["seed"] = checkpoint.seed;
  j["step"] = checkpoint.step;
  j["online"] = encoder_json(checkpoint.online);
  j["target"] = encoder_json(checkpoint.target);
  return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    if (j.at("format").get<std::string>() != kFormat) {
      throw Error(ErrorKind::ParseError, "unsupported checkpoint format");
    }
    Checkpoint c;
    c.config = train_config_from_json(j.at("config").dump());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.step = j.at("step").get<long>();
    c.online = encoder_from_json(c.config.encoder, true, j.at("online"), "online");
    c.target = encoder_from_json(c.config.encoder, false, j.at("target"), "target");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write checkpoint " + path.string());
  out << to_json(checkpoint) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open checkpoint " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str());
}

}  // namespace hardneg
