// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "hardneg/embedding.hpp"

namespace hardneg {

/// Fixed-capacity FIFO of target-encoder embeddings. Oldest entries are
/// evicted first once the capacity is reached. Only real embeddings are
/// stored here; synthetic negatives live for a single step and never enter.
class NegativeQueue {
 public:
  explicit NegativeQueue(std::size_t capacity);

  /// Appends the batch in order, then evicts from the front until
  /// size() <= capacity(). Every element must be unit norm and share the
  /// dimension of the entries already held.
  void enqueue_batch(std::span<const Embedding> batch);

  /// Copy of the current entries, oldest first.
  std::vector<Embedding> as_negatives() const;

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return entries_.empty(); }
  /// 0 until the first enqueue.
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t capacity_;
  std::size_t dim_ = 0;
  std::deque<Embedding> entries_;
};

}  // namespace hardneg
