// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "hardneg/config.hpp"
#include "hardneg/encoder.hpp"

namespace hardneg {

struct Checkpoint {
  TrainConfig config;
  EncoderParams online;
  EncoderParams target;
  std::uint64_t seed = 0;
  long step = 0;
};

/// JSON document: config echo, named parameter and buffer arrays in a fixed
/// order, seed and step counter. Doubles are written in shortest round-trip
/// form, so save → load reproduces every bit.
std::string to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hardneg
