// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "arnids/satt.hpp"
#include "arnids/tensor.hpp"

namespace arnids {

class Rng;

/// Associative recurrent cell. Input and previous state are projected to the
/// hidden width, S-ATT mixes them, and the mix is added to the projected
/// input:
///
///   x' = Wx x,  h' = Wh h_prev,  h_t = satt(h', x').out + x'
///
/// There are no gates, no biases and no squashing on h_t.
struct ArnParams {
  Tensor wx;  // n x m
  Tensor wh;  // n x n
  SattParams satt;

  static ArnParams init(Rng& rng, std::size_t hidden, std::size_t input);
  /// Identity projections (requires hidden == input) and identity S-ATT.
  static ArnParams identity(std::size_t hidden);
  static ArnParams zeros(std::size_t hidden, std::size_t input);

  std::size_t hidden() const noexcept { return wh.rows(); }
  std::size_t input() const noexcept { return wx.cols(); }
  void validate() const;
};

struct ArnStepTrace {
  Tensor h_prev;
  Tensor x_raw;
  Tensor x_proj;
  Tensor h_proj;
  Tensor h_stack;  // 2 x n, rows (h_proj, x_proj)
  SattTrace satt;
  Tensor h_t;
};

struct ArnStepGrads {
  ArnParams params;
  Tensor h_prev;
  Tensor x_raw;
};

ArnStepTrace arn_step(const ArnParams& p, const Tensor& h_prev, const Tensor& x_raw);

ArnStepGrads arn_step_backward(const ArnParams& p, const ArnStepTrace& trace,
                               const Tensor& grad_h_t);

}  // namespace arnids
