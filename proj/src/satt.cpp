// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/satt.hpp"

#include <array>
#include <cmath>

#include "arnids/error.hpp"
#include "arnids/rng.hpp"

namespace arnids {

SattParams SattParams::init(Rng& rng, std::size_t dim, double scale) {
  SattParams p;
  p.wq = init_uniform(rng, {dim, dim}, scale);
  p.wk = init_uniform(rng, {dim, dim}, scale);
  p.wv = init_uniform(rng, {dim, dim}, scale);
  return p;
}

SattParams SattParams::identity(std::size_t dim) {
  SattParams p = zeros(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    p.wq.at(i, i) = 1.0;
    p.wk.at(i, i) = 1.0;
    p.wv.at(i, i) = 1.0;
  }
  return p;
}

SattParams SattParams::zeros(std::size_t dim) {
  return {Tensor({dim, dim}), Tensor({dim, dim}), Tensor({dim, dim})};
}

void SattParams::validate(std::size_t dim) const {
  expect_shape(wq, {dim, dim}, "S-ATT Wq");
  expect_shape(wk, {dim, dim}, "S-ATT Wk");
  expect_shape(wv, {dim, dim}, "S-ATT Wv");
}

SattTrace satt_forward(const SattParams& p, const Tensor& h_prev, const Tensor& x_t) {
  const std::size_t d = p.dim();
  p.validate(d);
  expect_shape(h_prev, {d}, "S-ATT hidden input");
  expect_shape(x_t, {d}, "S-ATT current input");

  SattTrace t;
  t.h_in = h_prev;
  t.x_in = x_t;
  t.q1 = matvec(p.wq, h_prev);
  t.q2 = matvec(p.wq, x_t);
  t.k1 = matvec(p.wk, h_prev);
  t.k2 = matvec(p.wk, x_t);
  t.v1 = matvec(p.wv, h_prev);
  t.v2 = matvec(p.wv, x_t);

  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
  t.score_h = dot(t.q1, t.k1) * inv_sqrt_d;
  t.score_x = dot(t.q1, t.k2) * inv_sqrt_d;
  const std::array<double, 2> scores{t.score_h, t.score_x};
  const auto weights = softmax(scores);
  t.weight_h = weights[0];
  t.weight_x = weights[1];

  t.out = scale(t.v1, t.weight_h);
  axpy(t.out, t.weight_x, t.v2);
  return t;
}

SattGrads satt_backward(const SattParams& p, const SattTrace& t, const Tensor& grad_out) {
  const std::size_t d = p.dim();
  p.validate(d);
  expect_shape(grad_out, {d}, "S-ATT output gradient");
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

  // out = w_h v1 + w_x v2
  const Tensor grad_v1 = scale(grad_out, t.weight_h);
  const Tensor grad_v2 = scale(grad_out, t.weight_x);
  const double grad_wh = dot(grad_out, t.v1);
  const double grad_wx = dot(grad_out, t.v2);

  // Two-way softmax Jacobian.
  const double mean = t.weight_h * grad_wh + t.weight_x * grad_wx;
  const double grad_sh = t.weight_h * (grad_wh - mean) * inv_sqrt_d;
  const double grad_sx = t.weight_x * (grad_wx - mean) * inv_sqrt_d;

  // s_h = q1.k1, s_x = q1.k2 (already divided by sqrt(d) above)
  Tensor grad_q1 = scale(t.k1, grad_sh);
  axpy(grad_q1, grad_sx, t.k2);
  const Tensor grad_k1 = scale(t.q1, grad_sh);
  const Tensor grad_k2 = scale(t.q1, grad_sx);

  SattGrads g;
  g.params = SattParams::zeros(d);
  add_outer(g.params.wq, grad_q1, t.h_in);
  add_outer(g.params.wk, grad_k1, t.h_in);
  add_outer(g.params.wk, grad_k2, t.x_in);
  add_outer(g.params.wv, grad_v1, t.h_in);
  add_outer(g.params.wv, grad_v2, t.x_in);

  g.h_in = matvec_transposed(p.wq, grad_q1);
  axpy(g.h_in, 1.0, matvec_transposed(p.wk, grad_k1));
  axpy(g.h_in, 1.0, matvec_transposed(p.wv, grad_v1));

  g.x_in = matvec_transposed(p.wk, grad_k2);
  axpy(g.x_in, 1.0, matvec_transposed(p.wv, grad_v2));
  return g;
}

}  // namespace arnids
