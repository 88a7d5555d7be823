// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace arnids {

/// Read-only view of one window: `steps` consecutive records of `width`
/// raw slots each, row-major.
struct WindowRef {
  std::span<const double> values;
  std::size_t steps = 0;
  std::size_t width = 0;

  std::span<const double> step(std::size_t t) const { return values.subspan(t * width, width); }
};

/// B windows of `steps` x `width` raw slots plus one class label per window.
/// Numeric slots hold normalized values; categorical slots hold vocabulary
/// indices stored as doubles.
struct SequenceBatch {
  std::size_t steps = 0;
  std::size_t width = 0;
  std::vector<double> values;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }

  WindowRef window(std::size_t i) const {
    const std::size_t stride = steps * width;
    return {std::span<const double>(values).subspan(i * stride, stride), steps, width};
  }

  /// Appends one window; `window_values` must hold steps * width values.
  void push(std::span<const double> window_values, int label);

  /// FNV-1a over shape, value bits and labels.
  std::uint64_t content_hash() const;
};

}  // namespace arnids
