// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

// Operation-count model for one forward step of each cell, and a
// forward-only wall-clock benchmark.
//
// count_ops() runs a dedicated instrumented copy of each cell whose
// arithmetic goes through a counting scalar. Every code site is tagged with
// the rule that converts the multiplies and additions it actually performed
// into the cost units of the closed-form model:
//
//   ARN (2mn + 12n^2 + 2n)
//     site                 operation          rule            charge
//     input_projection     Wx . x             mul + add       2mn
//     hidden_projection    Wh . h             mul + add       2n^2
//     satt.q1/k1/v1        W{q,k,v} . h'      mul + add       6n^2
//     satt.k2/v2           W{k,v} . x'        mul + add       4n^2
//     satt.value_weighting a_h v1, a_x v2     mul             2n
//     satt.q2              Wq . x'            uncharged (never consumed)
//     satt.scores/softmax/mix, state_update   uncharged
//
//   GRU (3mn + 6n^2 + n)
//     site                 operation          rule            charge
//     reset_gate           [h,x] . W_R        mul             mn + n^2
//     update_gate          [h,x] . W_Z        mul             mn + n^2
//     reset_product        r * h              mul^2           n^2
//     candidate            [x, r*h] . W_h     mul             mn + n^2
//     state.keep           z * h~             mul^2           n^2
//     state.complement     1 - z              add             n
//     state.carry          (1-z) * h          mul^2           n^2
//     activations, state.sum                  uncharged
//
// "mul^2" prices an elementwise product of two n-vectors as an n x n
// product, which is how the GRU subtotals price R_t x h_{t-1} and the two
// products of the state update.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "arnids/sequence_model.hpp"
#include "arnids/tensor.hpp"

namespace arnids {

enum class ChargeRule {
  Uncharged,
  Multiplies,         // one unit per multiply (a multiply-accumulate counts 1)
  Flops,              // one unit per multiply and one per addition
  SquaredMultiplies,  // (multiplies)^2
  Additions,          // one unit per addition or subtraction
};

std::string to_string(ChargeRule rule);

struct SiteCount {
  std::string site;
  ChargeRule rule = ChargeRule::Uncharged;
  std::uint64_t multiplies = 0;
  std::uint64_t additions = 0;
  std::uint64_t charged = 0;
};

struct OpCount {
  CellKind cell = CellKind::Arn;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t measured_madds = 0;   // sum of site charges
  std::uint64_t predicted_madds = 0;  // closed form
  std::uint64_t physical_multiplies = 0;
  std::uint64_t physical_additions = 0;
  std::vector<SiteCount> sites;
  Tensor h_t;  // output of the instrumented step
};

/// ARN: 2mn + 12n^2 + 2n. GRU: 3mn + 6n^2 + n.
std::uint64_t predict_ops(CellKind cell, std::size_t m, std::size_t n);

/// Instrumented forward step on seeded random parameters and inputs.
OpCount count_ops(CellKind cell, std::size_t m, std::size_t n, std::uint64_t seed = 0);

/// Instrumented step on explicit parameters and inputs.
OpCount count_ops(const ArnParams& p, const Tensor& h_prev, const Tensor& x_raw);
OpCount count_ops(const GruParams& p, const Tensor& h_prev, const Tensor& x_raw);

struct WallclockResult {
  double median_seconds_per_step = 0.0;
  std::vector<double> repeat_seconds_per_step;
};

/// Forward-only stepping on random data, single-threaded, after one warm-up
/// repeat. The hidden state restarts from zero every `window` steps.
WallclockResult bench_wallclock(CellKind cell, std::size_t m, std::size_t n, std::size_t steps,
                                std::size_t repeats, std::uint64_t seed = 0,
                                std::size_t window = 10);

struct BenchRow {
  CellKind cell = CellKind::Arn;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t predicted = 0;
  std::uint64_t measured = 0;
  double seconds_per_step = 0.0;
};

inline constexpr const char* kBenchHeader = "cell\tm\tn\tpredicted\tmeasured\tseconds_per_step";

void write_bench_table(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace arnids
