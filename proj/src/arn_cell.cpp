// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/arn_cell.hpp"

#include <cmath>

#include "arnids/error.hpp"
#include "arnids/rng.hpp"

namespace arnids {

ArnParams ArnParams::init(Rng& rng, std::size_t hidden, std::size_t input) {
  ArnParams p;
  p.wx = init_uniform(rng, {hidden, input}, 1.0 / std::sqrt(static_cast<double>(input)));
  p.wh = init_uniform(rng, {hidden, hidden}, 1.0 / std::sqrt(static_cast<double>(hidden)));
  p.satt = SattParams::init(rng, hidden, 1.0 / std::sqrt(static_cast<double>(hidden)));
  return p;
}

ArnParams ArnParams::identity(std::size_t hidden) {
  ArnParams p = zeros(hidden, hidden);
  for (std::size_t i = 0; i < hidden; ++i) {
    p.wx.at(i, i) = 1.0;
    p.wh.at(i, i) = 1.0;
  }
  p.satt = SattParams::identity(hidden);
  return p;
}

ArnParams ArnParams::zeros(std::size_t hidden, std::size_t input) {
  return {Tensor({hidden, input}), Tensor({hidden, hidden}), SattParams::zeros(hidden)};
}

void ArnParams::validate() const {
  if (wx.rank() != 2 || wh.rank() != 2) {
    throw ShapeError("ARN projections must be matrices");
  }
  const std::size_t n = hidden();
  expect_shape(wh, {n, n}, "ARN Wh");
  expect_shape(wx, {n, input()}, "ARN Wx");
  satt.validate(n);
}

ArnStepTrace arn_step(const ArnParams& p, const Tensor& h_prev, const Tensor& x_raw) {
  p.validate();
  expect_shape(h_prev, {p.hidden()}, "ARN previous hidden state");
  expect_shape(x_raw, {p.input()}, "ARN input");

  ArnStepTrace t;
  t.h_prev = h_prev;
  t.x_raw = x_raw;
  t.x_proj = matvec(p.wx, x_raw);
  t.h_proj = matvec(p.wh, h_prev);
  t.h_stack = stack_rows(t.h_proj, t.x_proj);
  t.satt = satt_forward(p.satt, t.h_proj, t.x_proj);
  t.h_t = add(t.satt.out, t.x_proj);
  return t;
}

ArnStepGrads arn_step_backward(const ArnParams& p, const ArnStepTrace& t,
                               const Tensor& grad_h_t) {
  p.validate();
  expect_shape(grad_h_t, {p.hidden()}, "ARN hidden-state gradient");

  SattGrads sg = satt_backward(p.satt, t.satt, grad_h_t);

  // x_proj feeds h_t directly and also enters S-ATT as the current input.
  Tensor grad_x_proj = grad_h_t;
  axpy(grad_x_proj, 1.0, sg.x_in);
  const Tensor& grad_h_proj = sg.h_in;

  ArnStepGrads g;
  g.params = ArnParams::zeros(p.hidden(), p.input());
  add_outer(g.params.wx, grad_x_proj, t.x_raw);
  add_outer(g.params.wh, grad_h_proj, t.h_prev);
  g.params.satt = std::move(sg.params);
  g.x_raw = matvec_transposed(p.wx, grad_x_proj);
  g.h_prev = matvec_transposed(p.wh, grad_h_proj);
  return g;
}

}  // namespace arnids
