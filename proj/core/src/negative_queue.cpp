// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/negative_queue.hpp"

#include <string>

#include "hardneg/error.hpp"

namespace hardneg {

NegativeQueue::NegativeQueue(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw Error(ErrorKind::InvalidArgument, "queue capacity must be positive");
}

void NegativeQueue::enqueue_batch(std::span<const Embedding> batch) {
  if (batch.empty()) throw Error(ErrorKind::InvalidArgument, "enqueue of an empty batch");
  const std::size_t dim = dim_ == 0 ? batch.front().size() : dim_;
  for (const Embedding& e : batch) {
    if (e.size() != dim || dim == 0) {
      throw Error(ErrorKind::DimensionMismatch, "queue holds dimension " + std::to_string(dim) +
                                                    ", got " + std::to_string(e.size()));
    }
    if (!is_unit_norm(e)) throw Error(ErrorKind::InvalidArgument, "queue entries must be unit norm");
  }
  dim_ = dim;
  for (const Embedding& e : batch) {
    entries_.push_back(e);
    if (entries_.size() > capacity_) entries_.pop_front();
  }
}

std::vector<Embedding> NegativeQueue::as_negatives() const {
  return {entries_.begin(), entries_.end()};
}

}  // namespace hardneg
