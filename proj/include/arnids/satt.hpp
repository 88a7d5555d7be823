// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

// Single attention: a one-way attention in which only the previous hidden
// state issues a query. The query is scored against keys of both the hidden
// state and the current input, and the two values are mixed by the
// resulting two-way softmax into a supplementary vector.

#pragma once

#include <cstddef>

#include "arnids/tensor.hpp"

namespace arnids {

class Rng;

/// Query/key/value projections shared by the hidden-state path and the
/// input path. All three are d x n with d == n.
struct SattParams {
  Tensor wq;
  Tensor wk;
  Tensor wv;

  static SattParams init(Rng& rng, std::size_t dim, double scale);
  static SattParams identity(std::size_t dim);
  static SattParams zeros(std::size_t dim);

  std::size_t dim() const noexcept { return wq.rows(); }
  /// Throws ShapeError unless all three matrices are dim x dim.
  void validate(std::size_t dim) const;
};

/// Everything satt_forward computed, kept for the backward pass.
struct SattTrace {
  Tensor h_in;
  Tensor x_in;
  Tensor q1;
  Tensor q2;  // computed for completeness; scoring uses q1 only
  Tensor k1;
  Tensor k2;
  Tensor v1;
  Tensor v2;
  double score_h = 0.0;
  double score_x = 0.0;
  double weight_h = 0.0;
  double weight_x = 0.0;
  Tensor out;
};

struct SattGrads {
  SattParams params;
  Tensor h_in;
  Tensor x_in;
};

SattTrace satt_forward(const SattParams& p, const Tensor& h_prev, const Tensor& x_t);

SattGrads satt_backward(const SattParams& p, const SattTrace& trace, const Tensor& grad_out);

}  // namespace arnids
