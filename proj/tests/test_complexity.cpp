// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <map>
#include <sstream>

#include "arnids/complexity.hpp"
#include "arnids/error.hpp"
#include "arnids/rng.hpp"
#include "support.hpp"

using namespace arnids;

namespace {

// Per-site charges derived by hand from the cell equations.
std::map<std::string, std::uint64_t> expected_arn_sites(std::uint64_t m, std::uint64_t n) {
  return {{"input_projection", 2 * m * n},
          {"hidden_projection", 2 * n * n},
          {"satt.q1", 2 * n * n},
          {"satt.q2", 0},
          {"satt.k1", 2 * n * n},
          {"satt.k2", 2 * n * n},
          {"satt.v1", 2 * n * n},
          {"satt.v2", 2 * n * n},
          {"satt.scores", 0},
          {"satt.softmax", 0},
          {"satt.value_weighting", 2 * n},
          {"satt.mix", 0},
          {"state_update", 0}};
}

std::map<std::string, std::uint64_t> expected_gru_sites(std::uint64_t m, std::uint64_t n) {
  return {{"reset_gate", (m + n) * n},
          {"update_gate", (m + n) * n},
          {"gate_activations", 0},
          {"reset_product", n * n},
          {"candidate", (m + n) * n},
          {"candidate_activation", 0},
          {"state.keep", n * n},
          {"state.complement", n},
          {"state.carry", n * n},
          {"state.sum", 0}};
}

std::map<std::string, std::uint64_t> charged_by_site(const OpCount& c) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& s : c.sites) out[s.site] += s.charged;
  return out;
}

}  // namespace

TEST_CASE("closed-form examples") {
  CHECK(predict_ops(CellKind::Arn, 1, 1) == 16);
  CHECK(predict_ops(CellKind::Gru, 1, 1) == 10);
  CHECK(predict_ops(CellKind::Arn, 10, 100) == 122200);
  CHECK(predict_ops(CellKind::Gru, 10, 100) == 63100);
  CHECK_THROWS_AS(predict_ops(CellKind::Arn, 0, 3), UsageError);
  CHECK_THROWS_AS(predict_ops(CellKind::Gru, 3, 0), UsageError);
}

TEST_CASE("instrumented anchors") {
  CHECK(count_ops(CellKind::Arn, 1, 1).measured_madds == 16);
  CHECK(count_ops(CellKind::Gru, 1, 1).measured_madds == 10);
  CHECK(count_ops(CellKind::Arn, 10, 100).measured_madds == 122200);
  CHECK(count_ops(CellKind::Gru, 10, 100).measured_madds == 63100);
}

TEST_CASE("property: measured equals predicted and per-site charges match") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = testing::random_size(rng, 1, 64);
    const std::size_t n = testing::random_size(rng, 1, 64);
    CAPTURE(m);
    CAPTURE(n);
    const OpCount arn = count_ops(CellKind::Arn, m, n, rng.next_u64());
    CHECK(arn.measured_madds == predict_ops(CellKind::Arn, m, n));
    CHECK(arn.measured_madds == 2 * m * n + 12 * n * n + 2 * n);
    CHECK(charged_by_site(arn) == expected_arn_sites(m, n));
    const OpCount gru = count_ops(CellKind::Gru, m, n, rng.next_u64());
    CHECK(gru.measured_madds == predict_ops(CellKind::Gru, m, n));
    CHECK(gru.measured_madds == 3 * m * n + 6 * n * n + n);
    CHECK(charged_by_site(gru) == expected_gru_sites(m, n));

    std::uint64_t sum = 0;
    for (const auto& s : arn.sites) sum += s.charged;
    CHECK(sum == arn.measured_madds);
  }
}

TEST_CASE("q2 is computed but not charged") {
  const OpCount c = count_ops(CellKind::Arn, 3, 5);
  bool seen = false;
  for (const auto& s : c.sites) {
    if (s.site != "satt.q2") continue;
    seen = true;
    CHECK(s.rule == ChargeRule::Uncharged);
    CHECK(s.multiplies == 25);
    CHECK(s.charged == 0);
  }
  CHECK(seen);
}

TEST_CASE("instrumented step computes the same state as the plain step") {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = testing::random_size(rng, 1, 12);
    const std::size_t n = testing::random_size(rng, 1, 12);
    const Tensor h = testing::random_tensor(rng, {n}, 1.0);
    const Tensor x = testing::random_tensor(rng, {m}, 1.0);
    const ArnParams ap = ArnParams::init(rng, n, m);
    CHECK(count_ops(ap, h, x).h_t.storage() == arn_step(ap, h, x).h_t.storage());
    const GruParams gp = GruParams::init(rng, n, m);
    CHECK(count_ops(gp, h, x).h_t.storage() == gru_step(gp, h, x).h_t.storage());
  }
}

TEST_CASE("property: counts are monotone in m and n") {
  for (const CellKind cell : {CellKind::Arn, CellKind::Gru}) {
    for (std::size_t m = 1; m < 20; ++m) {
      for (std::size_t n = 1; n < 20; ++n) {
        CHECK(predict_ops(cell, m + 1, n) > predict_ops(cell, m, n));
        CHECK(predict_ops(cell, m, n + 1) > predict_ops(cell, m, n));
      }
    }
  }
}

TEST_CASE("bench timing is positive and repeatable") {
  const WallclockResult a = bench_wallclock(CellKind::Arn, 8, 32, 200, 3, 1);
  const WallclockResult b = bench_wallclock(CellKind::Arn, 8, 32, 200, 3, 1);
  REQUIRE(a.repeat_seconds_per_step.size() == 3);
  CHECK(a.median_seconds_per_step > 0.0);
  // Identical work; only scheduler noise separates the two.
  const double ratio = a.median_seconds_per_step / b.median_seconds_per_step;
  CHECK(ratio > 0.25);
  CHECK(ratio < 4.0);
}

TEST_CASE("bench table layout") {
  std::ostringstream os;
  write_bench_table(os, {{CellKind::Arn, 1, 1, 16, 16, 1e-6}, {CellKind::Gru, 1, 1, 10, 10, 5e-7}});
  const std::string text = os.str();
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kBenchHeader);
  std::getline(in, line);
  CHECK(line.rfind("arn\t1\t1\t16\t16\t", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("gru\t1\t1\t10\t10\t", 0) == 0);
  CHECK_FALSE(std::getline(in, line));
}
