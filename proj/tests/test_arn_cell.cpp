// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "arnids/arn_cell.hpp"
#include "arnids/error.hpp"
#include "arnids/rng.hpp"
#include "support.hpp"

using namespace arnids;

namespace {

constexpr double kFloor = 1e-4;  // see the S-ATT finite-difference test

double probe(const ArnParams& p, const Tensor& h, const Tensor& x, const Tensor& g) {
  return dot(arn_step(p, h, x).h_t, g);
}

}  // namespace

TEST_CASE("zero hidden state with identity weights gives 1.5 x") {
  const ArnParams p = ArnParams::identity(3);
  const Tensor x = Tensor::vector({0.4, -1.2, 2.0});
  const ArnStepTrace t = arn_step(p, Tensor({3}), x);
  CHECK(t.satt.q1 == Tensor({3}));
  CHECK(t.satt.score_h == 0.0);
  CHECK(t.satt.score_x == 0.0);
  CHECK(t.satt.weight_h == 0.5);
  CHECK(t.h_t == scale(x, 1.5));
}

TEST_CASE("zero input and zero Wv give a zero state") {
  Rng rng(1);
  ArnParams p = ArnParams::init(rng, 4, 3);
  p.satt.wv.fill(0.0);
  const ArnStepTrace t = arn_step(p, testing::random_tensor(rng, {4}), Tensor({3}));
  CHECK(t.h_t == Tensor({4}));
}

TEST_CASE("seed-42 step matches a straight-line evaluation") {
  Rng rng(42);
  const ArnParams p = ArnParams::init(rng, 2, 2);
  const Tensor h = Tensor::vector({0.1, -0.2});
  const Tensor x = Tensor::vector({1.0, 1.0});
  const ArnStepTrace t = arn_step(p, h, x);

  // Scalar transcription of the step, independent of the tensor kernels.
  auto w = [](const Tensor& m, int r, int c) { return m.storage()[static_cast<std::size_t>(r * 2 + c)]; };
  const double xp0 = w(p.wx, 0, 0) * 1.0 + w(p.wx, 0, 1) * 1.0;
  const double xp1 = w(p.wx, 1, 0) * 1.0 + w(p.wx, 1, 1) * 1.0;
  const double hp0 = w(p.wh, 0, 0) * 0.1 + w(p.wh, 0, 1) * -0.2;
  const double hp1 = w(p.wh, 1, 0) * 0.1 + w(p.wh, 1, 1) * -0.2;
  const double q0 = w(p.satt.wq, 0, 0) * hp0 + w(p.satt.wq, 0, 1) * hp1;
  const double q1 = w(p.satt.wq, 1, 0) * hp0 + w(p.satt.wq, 1, 1) * hp1;
  const double kh0 = w(p.satt.wk, 0, 0) * hp0 + w(p.satt.wk, 0, 1) * hp1;
  const double kh1 = w(p.satt.wk, 1, 0) * hp0 + w(p.satt.wk, 1, 1) * hp1;
  const double kx0 = w(p.satt.wk, 0, 0) * xp0 + w(p.satt.wk, 0, 1) * xp1;
  const double kx1 = w(p.satt.wk, 1, 0) * xp0 + w(p.satt.wk, 1, 1) * xp1;
  const double vh0 = w(p.satt.wv, 0, 0) * hp0 + w(p.satt.wv, 0, 1) * hp1;
  const double vh1 = w(p.satt.wv, 1, 0) * hp0 + w(p.satt.wv, 1, 1) * hp1;
  const double vx0 = w(p.satt.wv, 0, 0) * xp0 + w(p.satt.wv, 0, 1) * xp1;
  const double vx1 = w(p.satt.wv, 1, 0) * xp0 + w(p.satt.wv, 1, 1) * xp1;
  const double ah = (q0 * kh0 + q1 * kh1) / std::sqrt(2.0);
  const double ax = (q0 * kx0 + q1 * kx1) / std::sqrt(2.0);
  const double wh = 1.0 / (1.0 + std::exp(ax - ah));
  const double wx = 1.0 - wh;
  const double h0 = wh * vh0 + wx * vx0 + xp0;
  const double h1 = wh * vh1 + wx * vx1 + xp1;
  CHECK(std::abs(t.h_t[0] - h0) <= 1e-12);
  CHECK(std::abs(t.h_t[1] - h1) <= 1e-12);

  // Same quantity from an arbitrary-precision script run once, frozen here.
  CHECK(std::abs(t.h_t[0] - 0.69181087542026199202) <= 1e-12);
  CHECK(std::abs(t.h_t[1] - -0.35704160857641318578) <= 1e-12);
}

TEST_CASE("trace structure") {
  Rng rng(2);
  const ArnParams p = ArnParams::init(rng, 5, 3);
  const Tensor h = testing::random_tensor(rng, {5});
  const Tensor x = testing::random_tensor(rng, {3});
  const ArnStepTrace t = arn_step(p, h, x);
  CHECK(t.x_proj == matvec(p.wx, x));
  CHECK(t.h_proj == matvec(p.wh, h));
  const auto [row0, row1] = unstack_rows(t.h_stack);
  CHECK(row0 == t.h_proj);
  CHECK(row1 == t.x_proj);
  CHECK(t.satt.h_in == t.h_proj);
  CHECK(t.satt.x_in == t.x_proj);
}

TEST_CASE("property: h_t is the supplement plus the projected input") {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = testing::random_size(rng, 1, 10);
    const std::size_t m = testing::random_size(rng, 1, 10);
    const ArnParams p = ArnParams::init(rng, n, m);
    const ArnStepTrace t =
        arn_step(p, testing::random_tensor(rng, {n}, 3.0), testing::random_tensor(rng, {m}));
    CHECK(t.h_t == add(t.satt.out, t.x_proj));
    const Tensor diff = sub(t.h_t, t.x_proj);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(diff[i] - t.satt.out[i]) <= 1e-15 * std::max(1.0, std::abs(t.h_t[i])) * 4);
    }
  }
}

TEST_CASE("property: stepping is deterministic") {
  Rng rng(4);
  const ArnParams p = ArnParams::init(rng, 6, 4);
  const Tensor h = testing::random_tensor(rng, {6});
  const Tensor x = testing::random_tensor(rng, {4});
  CHECK(arn_step(p, h, x).h_t == arn_step(p, h, x).h_t);
}

TEST_CASE("shape errors") {
  Rng rng(5);
  const ArnParams p = ArnParams::init(rng, 4, 3);
  CHECK_THROWS_AS(arn_step(p, Tensor({3}), Tensor({3})), ShapeError);
  CHECK_THROWS_AS(arn_step(p, Tensor({4}), Tensor({4})), ShapeError);
  CHECK_THROWS_AS(arn_step_backward(p, arn_step(p, Tensor({4}), Tensor({3})), Tensor({3})),
                  ShapeError);
}

TEST_CASE("backward: zero upstream gradient") {
  Rng rng(6);
  const ArnParams p = ArnParams::init(rng, 4, 3);
  const ArnStepTrace t = arn_step(p, testing::random_tensor(rng, {4}), testing::random_tensor(rng, {3}));
  const ArnStepGrads g = arn_step_backward(p, t, Tensor({4}));
  CHECK(g.params.wx == Tensor({4, 3}));
  CHECK(g.params.wh == Tensor({4, 4}));
  CHECK(g.params.satt.wq == Tensor({4, 4}));
  CHECK(g.params.satt.wk == Tensor({4, 4}));
  CHECK(g.params.satt.wv == Tensor({4, 4}));
  CHECK(g.h_prev == Tensor({4}));
  CHECK(g.x_raw == Tensor({3}));
}

TEST_CASE("backward: with attention zeroed only the direct input path remains") {
  Rng rng(7);
  ArnParams p = ArnParams::init(rng, 4, 3);
  p.satt = SattParams::zeros(4);
  const ArnStepTrace t = arn_step(p, testing::random_tensor(rng, {4}), testing::random_tensor(rng, {3}));
  const Tensor g = testing::random_tensor(rng, {4});
  const ArnStepGrads grads = arn_step_backward(p, t, g);
  CHECK(grads.x_raw == matvec_transposed(p.wx, g));
  CHECK(grads.h_prev == Tensor({4}));
}

TEST_CASE("backward matches central finite differences, both input paths summed") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = testing::random_size(rng, 1, 6);
    const std::size_t m = testing::random_size(rng, 1, 6);
    ArnParams p = ArnParams::init(rng, n, m);
    Tensor h = testing::random_tensor(rng, {n});
    Tensor x = testing::random_tensor(rng, {m});
    const Tensor g = testing::random_tensor(rng, {n});
    const ArnStepGrads grads = arn_step_backward(p, arn_step(p, h, x), g);
    const auto loss = [&] { return probe(p, h, x, g); };
    CHECK(testing::max_fd_error(p.wx, grads.params.wx, loss, kFloor) <= 1e-6);
    CHECK(testing::max_fd_error(p.wh, grads.params.wh, loss, kFloor) <= 1e-6);
    CHECK(testing::max_fd_error(p.satt.wq, grads.params.satt.wq, loss, kFloor) <= 1e-6);
    CHECK(testing::max_fd_error(p.satt.wk, grads.params.satt.wk, loss, kFloor) <= 1e-6);
    CHECK(testing::max_fd_error(p.satt.wv, grads.params.satt.wv, loss, kFloor) <= 1e-6);
    CHECK(testing::max_fd_error(h, grads.h_prev, loss, kFloor) <= 1e-6);
    CHECK(testing::max_fd_error(x, grads.x_raw, loss, kFloor) <= 1e-6);
  }
}
