// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/error.hpp"

namespace hardneg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyNegatives: return "EmptyNegatives";
    case ErrorKind::DegenerateSynthesis: return "DegenerateSynthesis";
    case ErrorKind::InvalidTemperature: return "InvalidTemperature";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::StaleCache: return "StaleCache";
    case ErrorKind::CenterSeparationFailure: return "CenterSeparationFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::SingleClass: return "SingleClass";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace hardneg
