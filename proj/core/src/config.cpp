// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "hardneg/error.hpp"
#include "json.hpp"

namespace hardneg {

using nlohmann::ordered_json;

TrainConfig TrainConfig::desk() { return TrainConfig{}; }

TrainConfig TrainConfig::paper_scale() {
  TrainConfig c;
  c.tau = 0.2;
  c.queue_capacity = 4096;
  c.top_n = 256;
  c.synth_fraction = 1.0 / 16.0;
  c.m_start = 0.99;
  c.epochs = 300;
  c.cooldown_epochs = 100;
  c.batch_size = 512;
  c.base_lr = 0.03;
  c.weight_decay = 1e-4;
  c.encoder.drop_path_online = 0.1;
  c.encoder.drop_path_target = 0.0;
  return c;
}

std::size_t TrainConfig::synthetic_per_query() const {
  return synthetic_count_for(synth_fraction, queue_capacity);
}

void TrainConfig::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidTemperature, "tau must be positive");
  if (queue_capacity == 0) fail("queue_capacity must be positive");
  if (top_n == 0 || top_n > queue_capacity) fail("top_n must satisfy 1 <= N <= K");
  if (!(synth_fraction >= 0.0 && synth_fraction <= 1.0)) fail("synth_fraction must lie in [0, 1]");
  if (!(m_start >= 0.0 && m_start <= 1.0)) fail("m_start must lie in [0, 1]");
  if (epochs < 1) fail("epochs must be at least 1");
  if (cooldown_epochs < 0 || cooldown_epochs >= epochs) fail("cooldown_epochs must satisfy 0 <= c < epochs");
  if (batch_size == 0) fail("batch_size must be positive");
  if (!(base_lr > 0.0)) fail("base_lr must be positive");
  if (!(weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (probe.epochs < 1 || !(probe.lr > 0.0) || probe.knn_k == 0) fail("probe settings must be positive");
  if (!(probe.train_fraction > 0.0 && probe.train_fraction < 1.0)) fail("probe.train_fraction must lie in (0, 1)");
  strategy.validate();
  encoder.validate();
  augment_q.validate();
  augment_k.validate();
}

namespace {

ordered_json aug_json(const AugmentationSpec& a) {
  return {{"noise_sigma", a.noise_sigma},
          {"mask_prob", a.mask_prob},
          {"scale_low", a.scale_low},
          {"scale_high", a.scale_high}};
}

// Reads only the keys listed; anything else in the object is an error.
class ObjectReader {
 public:
  ObjectReader(const ordered_json& obj, std::string path, std::initializer_list<const char*> allowed)
      : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) throw Error(ErrorKind::ParseError, path_ + " must be a JSON object");
    for (const auto& item : obj.items()) {
      bool known = false;
      for (const char* key : allowed) known = known || item.key() == key;
      if (!known) throw Error(ErrorKind::ParseError, "unknown key '" + path_ + item.key() + "'");
    }
  }

  template <class T>
  void read(const char* key, T& out) const {
    if (!obj_.contains(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ParseError, "bad value for '" + path_ + key + "': " + e.what());
    }
  }

  const ordered_json* child(const char* key) const {
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }
  std::string prefix(const char* key) const { return path_ + key + "."; }

 private:
  const ordered_json& obj_;
  std::string path_;
};

void read_aug(const ObjectReader& parent, const char* key, AugmentationSpec& a) {
  const ordered_json* node = parent.child(key);
  if (!node) return;
  ObjectReader r(*node, parent.prefix(key), {"noise_sigma", "mask_prob", "scale_low", "scale_high"});
  r.read("noise_sigma", a.noise_sigma);
  r.read("mask_prob", a.mask_prob);
  r.read("scale_low", a.scale_low);
  r.read("scale_high", a.scale_high);
}

template <class Enum, class Parse>
void read_enum(const ObjectReader& r, const char* key, Enum& out, Parse parse) {
  std::string name;
  r.read(key, name);
  if (!name.empty()) out = parse(name);
}

}  // namespace

std::string to_json(const TrainConfig& c) {
  ordered_json j;
  j["tau"] = c.tau;
  j["queue_capacity"] = c.queue_capacity;
  j["top_n"] = c.top_n;
  j["synth_fraction"] = c.synth_fraction;
  j["strategy"] = {{"kind", std::string(to_string(c.strategy.kind))},
                   {"mix_low", c.strategy.mix_low},
                   {"mix_high", c.strategy.mix_high}};
  j["m_start"] = c.m_start;
  j["epochs"] = c.epochs;
  j["cooldown_epochs"] = c.cooldown_epochs;
  j["batch_size"] = c.batch_size;
  j["base_lr"] = c.base_lr;
  j["weight_decay"] = c.weight_decay;
  j["optimizer"] = std::string(to_string(c.optimizer));
  j["symmetrize_loss"] = c.symmetrize_loss;
  j["seed"] = c.seed;
  j["encoder"] = {{"input_dim", c.encoder.input_dim},
                  {"hidden_dim", c.encoder.hidden_dim},
                  {"num_blocks", c.encoder.num_blocks},
                  {"embed_dim", c.encoder.embed_dim},
                  {"drop_path_online", c.encoder.drop_path_online},
                  {"drop_path_target", c.encoder.drop_path_target},
                  {"head_norm", std::string(to_string(c.encoder.head_norm))}};
  j["augment_q"] = aug_json(c.augment_q);
  j["augment_k"] = aug_json(c.augment_k);
  j["data"] = c.data;
  j["probe"] = {{"epochs", c.probe.epochs},
                {"lr", c.probe.lr},
                {"knn_k", c.probe.knn_k},
                {"train_fraction", c.probe.train_fraction},
                {"split_seed", c.probe.split_seed}};
  return j.dump(2);
}

TrainConfig train_config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }

  TrainConfig c;
  ObjectReader r(j, "", {"tau", "queue_capacity", "top_n", "synth_fraction", "strategy", "m_start",
                         "epochs", "cooldown_epochs", "batch_size", "base_lr", "weight_decay",
                         "optimizer", "symmetrize_loss", "seed", "encoder", "augment_q",
                         "augment_k", "data", "probe"});
  r.read("tau", c.tau);
  r.read("queue_capacity", c.queue_capacity);
  r.read("top_n", c.top_n);
  r.read("synth_fraction", c.synth_fraction);
  r.read("m_start", c.m_start);
  r.read("epochs", c.epochs);
  r.read("cooldown_epochs", c.cooldown_epochs);
  r.read("batch_size", c.batch_size);
  r.read("base_lr", c.base_lr);
  r.read("weight_decay", c.weight_decay);
  read_enum(r, "optimizer", c.optimizer, optimizer_kind_from_string);
  r.read("symmetrize_loss", c.symmetrize_loss);
  r.read("seed", c.seed);
  r.read("data", c.data);

  if (const auto* node = r.child("strategy")) {
    ObjectReader s(*node, "strategy.", {"kind", "mix_low", "mix_high"});
    read_enum(s, "kind", c.strategy.kind, synthesis_kind_from_string);
    s.read("mix_low", c.strategy.mix_low);
    s.read("mix_high", c.strategy.mix_high);
  }
  if (const auto* node = r.child("encoder")) {
    ObjectReader e(*node, "encoder.", {"input_dim", "hidden_dim", "num_blocks", "embed_dim",
                                       "drop_path_online", "drop_path_target", "head_norm"});
    e.read("input_dim", c.encoder.input_dim);
    e.read("hidden_dim", c.encoder.hidden_dim);
    e.read("num_blocks", c.encoder.num_blocks);
    e.read("embed_dim", c.encoder.embed_dim);
    e.read("drop_path_online", c.encoder.drop_path_online);
    e.read("drop_path_target", c.encoder.drop_path_target);
    read_enum(e, "head_norm", c.encoder.head_norm, head_norm_from_string);
  }
  read_aug(r, "augment_q", c.augment_q);
  read_aug(r, "augment_k", c.augment_k);
  if (const auto* node = r.child("probe")) {
    ObjectReader p(*node, "probe.", {"epochs", "lr", "knn_k", "train_fraction", "split_seed"});
    p.read("epochs", c.probe.epochs);
    p.read("lr", c.probe.lr);
    p.read("knn_k", c.probe.knn_k);
    p.read("train_fraction", c.probe.train_fraction);
    p.read("split_seed", c.probe.split_seed);
  }
  c.validate();
  return c;
}

TrainConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return train_config_from_json(buffer.str());
}

void save_train_config(const TrainConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write config " + path.string());
  out << to_json(config) << '\n';
}

}  // namespace hardneg
