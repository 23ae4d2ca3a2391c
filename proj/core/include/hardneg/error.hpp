// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hardneg {

enum class ErrorKind {
  ZeroVector,
  DimensionMismatch,
  EmptyNegatives,
  DegenerateSynthesis,
  InvalidTemperature,
  InvalidArgument,
  StaleCache,
  CenterSeparationFailure,
  ParseError,
  RaggedRows,
  SingleClass,
  NonFiniteLoss,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (and tests) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hardneg
