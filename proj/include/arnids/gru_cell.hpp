// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "arnids/tensor.hpp"

namespace arnids {

class Rng;

/// Bias-free GRU baseline. Each weight is stored (m+n) x n and applied to a
/// concatenated row vector from the right:
///
///   r   = sigmoid([h_prev, x] . W_R)
///   z   = sigmoid([h_prev, x] . W_Z)
///   h~  = tanh([x, r * h_prev] . W_h)
///   h_t = z * h~ + (1 - z) * h_prev
///
/// Note the candidate concatenates input first, the gates hidden state first.
/// Storing W_h as (m+n) x n makes the right product the same linear map as
/// a left product by its transpose.
struct GruParams {
  Tensor w_r;
  Tensor w_z;
  Tensor w_h;

  static GruParams init(Rng& rng, std::size_t hidden, std::size_t input);
  static GruParams zeros(std::size_t hidden, std::size_t input);

  std::size_t hidden() const noexcept { return w_r.cols(); }
  std::size_t input() const noexcept { return w_r.rows() - w_r.cols(); }
  void validate() const;
};

struct GruStepTrace {
  Tensor h_prev;
  Tensor x_raw;
  Tensor gate_in;       // [h_prev, x]
  Tensor candidate_in;  // [x, r * h_prev]
  Tensor r_t;
  Tensor z_t;
  Tensor h_cand;
  Tensor h_t;
};

struct GruStepGrads {
  GruParams params;
  Tensor h_prev;
  Tensor x_raw;
};

GruStepTrace gru_step(const GruParams& p, const Tensor& h_prev, const Tensor& x_raw);

GruStepGrads gru_step_backward(const GruParams& p, const GruStepTrace& trace,
                               const Tensor& grad_h_t);

}  // namespace arnids
