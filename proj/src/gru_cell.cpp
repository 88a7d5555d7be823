// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/gru_cell.hpp"

#include <cmath>

#include "arnids/error.hpp"
#include "arnids/rng.hpp"

namespace arnids {

GruParams GruParams::init(Rng& rng, std::size_t hidden, std::size_t input) {
  const double s = 1.0 / std::sqrt(static_cast<double>(hidden));
  GruParams p;
  p.w_r = init_uniform(rng, {input + hidden, hidden}, s);
  p.w_z = init_uniform(rng, {input + hidden, hidden}, s);
  p.w_h = init_uniform(rng, {input + hidden, hidden}, s);
  return p;
}

GruParams GruParams::zeros(std::size_t hidden, std::size_t input) {
  return {Tensor({input + hidden, hidden}), Tensor({input + hidden, hidden}),
          Tensor({input + hidden, hidden})};
}

void GruParams::validate() const {
  if (w_r.rank() != 2 || w_r.rows() <= w_r.cols()) {
    throw ShapeError("GRU W_R must be (m+n) x n, got " + shape_to_string(w_r.shape()));
  }
  expect_shape(w_z, w_r.shape(), "GRU W_Z");
  expect_shape(w_h, w_r.shape(), "GRU W_h");
}

GruStepTrace gru_step(const GruParams& p, const Tensor& h_prev, const Tensor& x_raw) {
  p.validate();
  const std::size_t n = p.hidden();
  expect_shape(h_prev, {n}, "GRU previous hidden state");
  expect_shape(x_raw, {p.input()}, "GRU input");

  GruStepTrace t;
  t.h_prev = h_prev;
  t.x_raw = x_raw;
  t.gate_in = concat(h_prev, x_raw);
  // row . W == W^T . column
  t.r_t = sigmoid(matvec_transposed(p.w_r, t.gate_in));
  t.z_t = sigmoid(matvec_transposed(p.w_z, t.gate_in));
  t.candidate_in = concat(x_raw, hadamard(t.r_t, h_prev));
  t.h_cand = tanh_act(matvec_transposed(p.w_h, t.candidate_in));

  t.h_t = Tensor({n});
  for (std::size_t i = 0; i < n; ++i) {
    t.h_t[i] = t.z_t[i] * t.h_cand[i] + (1.0 - t.z_t[i]) * h_prev[i];
  }
  return t;
}

GruStepGrads gru_step_backward(const GruParams& p, const GruStepTrace& t,
                               const Tensor& grad_h_t) {
  p.validate();
  const std::size_t n = p.hidden();
  const std::size_t m = p.input();
  expect_shape(grad_h_t, {n}, "GRU hidden-state gradient");

  Tensor grad_h_prev({n});
  Tensor grad_pre_z({n});
  Tensor grad_pre_c({n});
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad_h_t[i];
    const double z = t.z_t[i];
    const double c = t.h_cand[i];
    grad_h_prev[i] = g * (1.0 - z);
    grad_pre_z[i] = g * (c - t.h_prev[i]) * z * (1.0 - z);
    grad_pre_c[i] = g * z * (1.0 - c * c);
  }

  GruStepGrads g;
  g.params = GruParams::zeros(n, m);
  add_outer(g.params.w_h, t.candidate_in, grad_pre_c);
  const Tensor grad_candidate_in = matvec(p.w_h, grad_pre_c);

  g.x_raw = slice(grad_candidate_in, 0, m);
  Tensor grad_pre_r({n});
  for (std::size_t i = 0; i < n; ++i) {
    const double grad_rh = grad_candidate_in[m + i];
    const double r = t.r_t[i];
    grad_h_prev[i] += grad_rh * r;
    grad_pre_r[i] = grad_rh * t.h_prev[i] * r * (1.0 - r);
  }

  add_outer(g.params.w_r, t.gate_in, grad_pre_r);
  add_outer(g.params.w_z, t.gate_in, grad_pre_z);
  Tensor grad_gate_in = matvec(p.w_r, grad_pre_r);
  axpy(grad_gate_in, 1.0, matvec(p.w_z, grad_pre_z));

  axpy(grad_h_prev, 1.0, slice(grad_gate_in, 0, n));
  axpy(g.x_raw, 1.0, slice(grad_gate_in, n, m));
  g.h_prev = std::move(grad_h_prev);
  return g;
}

}  // namespace arnids
