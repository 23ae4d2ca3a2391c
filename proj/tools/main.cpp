// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return hardneg::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
