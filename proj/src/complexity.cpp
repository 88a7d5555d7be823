// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/complexity.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <chrono>
#include <cmath>
#include <ostream>

#include "arnids/error.hpp"
#include "arnids/rng.hpp"

namespace arnids {

namespace {

struct Tally {
  std::uint64_t multiplies = 0;
  std::uint64_t additions = 0;
};

thread_local Tally* active_tally = nullptr;

volatile double bench_sink = 0.0;

/// Double that reports every multiply and add/subtract to the active tally.
struct Counted {
  double v = 0.0;

  friend Counted operator*(Counted a, Counted b) {
    if (active_tally != nullptr) ++active_tally->multiplies;
    return {a.v * b.v};
  }
  friend Counted operator+(Counted a, Counted b) {
    if (active_tally != nullptr) ++active_tally->additions;
    return {a.v + b.v};
  }
  friend Counted operator-(Counted a, Counted b) {
    if (active_tally != nullptr) ++active_tally->additions;
    return {a.v - b.v};
  }
};

using CVec = std::vector<Counted>;

struct CMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  CVec data;
  Counted at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

CVec lift(const Tensor& t) {
  CVec out;
  out.reserve(t.size());
  for (const double v : t.values()) out.push_back({v});
  return out;
}

CMat lift_matrix(const Tensor& t) { return {t.rows(), t.cols(), lift(t)}; }

Tensor lower(const CVec& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const Counted c : v) out.push_back(c.v);
  return Tensor::vector(std::move(out));
}

// W . x, accumulating from zero: one multiply and one add per weight.
CVec matvec(const CMat& w, const CVec& x) {
  CVec out(w.rows);
  for (std::size_t i = 0; i < w.rows; ++i) {
    Counted acc{0.0};
    for (std::size_t j = 0; j < w.cols; ++j) acc = acc + w.at(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

// Row vector times matrix: x . W for W of shape len(x) x cols.
CVec rowvec(const CVec& x, const CMat& w) {
  CVec out(w.cols);
  for (std::size_t j = 0; j < w.cols; ++j) {
    Counted acc{0.0};
    for (std::size_t i = 0; i < w.rows; ++i) acc = acc + x[i] * w.at(i, j);
    out[j] = acc;
  }
  return out;
}

Counted dot(const CVec& a, const CVec& b) {
  Counted acc{0.0};
  for (std::size_t i = 0; i < a.size(); ++i) acc = acc + a[i] * b[i];
  return acc;
}

CVec hadamard(const CVec& a, const CVec& b) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

CVec scale(const CVec& a, Counted s) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

CVec add(const CVec& a, const CVec& b) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

CVec complement(const CVec& a) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = Counted{1.0} - a[i];
  return out;
}

CVec concat(const CVec& a, const CVec& b) {
  CVec out(a);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Activations are outside the cost model and run on plain doubles.
CVec apply(const CVec& a, double (*fn)(double)) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = {fn(a[i].v)};
  return out;
}

double sigmoid_fn(double x) { return sigmoid(x); }
double tanh_fn(double x) { return std::tanh(x); }

std::uint64_t charge(ChargeRule rule, const Tally& t) {
  switch (rule) {
    case ChargeRule::Uncharged: return 0;
    case ChargeRule::Multiplies: return t.multiplies;
    case ChargeRule::Flops: return t.multiplies + t.additions;
    case ChargeRule::SquaredMultiplies: return t.multiplies * t.multiplies;
    case ChargeRule::Additions: return t.additions;
  }
  return 0;
}

/// Collects per-site tallies for one instrumented step.
class Meter {
 public:
  template <typename Fn>
  auto site(const char* name, ChargeRule rule, Fn&& fn) {
    Tally tally;
    Tally* previous = active_tally;
    active_tally = &tally;
    auto result = fn();
    active_tally = previous;
    sites_.push_back({name, rule, tally.multiplies, tally.additions, charge(rule, tally)});
    return result;
  }

  OpCount finish(CellKind cell, std::size_t m, std::size_t n, Tensor h_t) && {
    OpCount out;
    out.cell = cell;
    out.m = m;
    out.n = n;
    out.predicted_madds = predict_ops(cell, m, n);
    for (const auto& s : sites_) {
      out.measured_madds += s.charged;
      out.physical_multiplies += s.multiplies;
      out.physical_additions += s.additions;
    }
    out.sites = std::move(sites_);
    out.h_t = std::move(h_t);
    return out;
  }

 private:
  std::vector<SiteCount> sites_;
};

}  // namespace

std::string to_string(ChargeRule rule) {
  switch (rule) {
    case ChargeRule::Uncharged: return "uncharged";
    case ChargeRule::Multiplies: return "mul";
    case ChargeRule::Flops: return "mul+add";
    case ChargeRule::SquaredMultiplies: return "mul^2";
    case ChargeRule::Additions: return "add";
  }
  return "uncharged";
}

std::uint64_t predict_ops(CellKind cell, std::size_t m, std::size_t n) {
  if (m < 1 || n < 1) {
    throw UsageError("predict_ops: m and n must be >= 1");
  }
  const std::uint64_t mm = m;
  const std::uint64_t nn = n;
  if (cell == CellKind::Arn) {
    return 2 * mm * nn + 12 * nn * nn + 2 * nn;
  }
  return 3 * mm * nn + 6 * nn * nn + nn;
}

OpCount count_ops(const ArnParams& p, const Tensor& h_prev, const Tensor& x_raw) {
  p.validate();
  const std::size_t n = p.hidden();
  const std::size_t m = p.input();
  expect_shape(h_prev, {n}, "count_ops hidden state");
  expect_shape(x_raw, {m}, "count_ops input");

  const CMat wx = lift_matrix(p.wx);
  const CMat wh = lift_matrix(p.wh);
  const CMat wq = lift_matrix(p.satt.wq);
  const CMat wk = lift_matrix(p.satt.wk);
  const CMat wv = lift_matrix(p.satt.wv);
  const CVec h = lift(h_prev);
  const CVec x = lift(x_raw);

  using R = ChargeRule;
  Meter meter;
  const CVec xp = meter.site("input_projection", R::Flops, [&] { return matvec(wx, x); });
  const CVec hp = meter.site("hidden_projection", R::Flops, [&] { return matvec(wh, h); });
  const CVec q1 = meter.site("satt.q1", R::Flops, [&] { return matvec(wq, hp); });
  meter.site("satt.q2", R::Uncharged, [&] { return matvec(wq, xp); });
  const CVec k1 = meter.site("satt.k1", R::Flops, [&] { return matvec(wk, hp); });
  const CVec k2 = meter.site("satt.k2", R::Flops, [&] { return matvec(wk, xp); });
  const CVec v1 = meter.site("satt.v1", R::Flops, [&] { return matvec(wv, hp); });
  const CVec v2 = meter.site("satt.v2", R::Flops, [&] { return matvec(wv, xp); });
  const auto [sh, sx] = meter.site("satt.scores", R::Uncharged, [&] {
    const Counted inv{1.0 / std::sqrt(static_cast<double>(n))};
    return std::pair{dot(q1, k1) * inv, dot(q1, k2) * inv};
  });
  const auto [ah, ax] = meter.site("satt.softmax", R::Uncharged, [&] {
    const std::array<double, 2> scores{sh.v, sx.v};
    const auto w = softmax(scores);
    return std::pair{Counted{w[0]}, Counted{w[1]}};
  });
  const auto [wv1, wv2] = meter.site("satt.value_weighting", R::Multiplies,
                                     [&] { return std::pair{scale(v1, ah), scale(v2, ax)}; });
  const CVec mixed = meter.site("satt.mix", R::Uncharged, [&] { return add(wv1, wv2); });
  const CVec ht = meter.site("state_update", R::Uncharged, [&] { return add(mixed, xp); });
  return std::move(meter).finish(CellKind::Arn, m, n, lower(ht));
}

OpCount count_ops(const GruParams& p, const Tensor& h_prev, const Tensor& x_raw) {
  p.validate();
  const std::size_t n = p.hidden();
  const std::size_t m = p.input();
  expect_shape(h_prev, {n}, "count_ops hidden state");
  expect_shape(x_raw, {m}, "count_ops input");

  const CMat w_r = lift_matrix(p.w_r);
  const CMat w_z = lift_matrix(p.w_z);
  const CMat w_h = lift_matrix(p.w_h);
  const CVec h = lift(h_prev);
  const CVec x = lift(x_raw);
  const CVec hx = concat(h, x);

  using R = ChargeRule;
  Meter meter;
  const CVec pre_r = meter.site("reset_gate", R::Multiplies, [&] { return rowvec(hx, w_r); });
  const CVec pre_z = meter.site("update_gate", R::Multiplies, [&] { return rowvec(hx, w_z); });
  const auto [r, z] = meter.site("gate_activations", R::Uncharged, [&] {
    return std::pair{apply(pre_r, sigmoid_fn), apply(pre_z, sigmoid_fn)};
  });
  const CVec rh = meter.site("reset_product", R::SquaredMultiplies, [&] { return hadamard(r, h); });
  const CVec pre_c =
      meter.site("candidate", R::Multiplies, [&] { return rowvec(concat(x, rh), w_h); });
  const CVec cand = meter.site("candidate_activation", R::Uncharged,
                               [&] { return apply(pre_c, tanh_fn); });
  const CVec keep = meter.site("state.keep", R::SquaredMultiplies, [&] { return hadamard(z, cand); });
  const CVec one_minus_z = meter.site("state.complement", R::Additions, [&] { return complement(z); });
  const CVec carry =
      meter.site("state.carry", R::SquaredMultiplies, [&] { return hadamard(one_minus_z, h); });
  const CVec ht = meter.site("state.sum", R::Uncharged, [&] { return add(keep, carry); });
  return std::move(meter).finish(CellKind::Gru, m, n, lower(ht));
}

OpCount count_ops(CellKind cell, std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m < 1 || n < 1) {
    throw UsageError("count_ops: m and n must be >= 1");
  }
  Rng rng(seed);
  const Tensor h = init_uniform(rng, {n}, 1.0);
  const Tensor x = init_uniform(rng, {m}, 1.0);
  if (cell == CellKind::Arn) {
    return count_ops(ArnParams::init(rng, n, m), h, x);
  }
  return count_ops(GruParams::init(rng, n, m), h, x);
}

WallclockResult bench_wallclock(CellKind cell, std::size_t m, std::size_t n, std::size_t steps,
                                std::size_t repeats, std::uint64_t seed, std::size_t window) {
  if (steps < 1 || repeats < 1 || window < 1) {
    throw UsageError("bench_wallclock: steps, repeats and window must be >= 1");
  }
  Rng rng(seed);
  constexpr std::size_t kInputPool = 64;
  std::vector<Tensor> inputs;
  for (std::size_t i = 0; i < kInputPool; ++i) {
    inputs.push_back(init_uniform(rng, {m}, 1.0));
  }
  const ArnParams arn = cell == CellKind::Arn ? ArnParams::init(rng, n, m) : ArnParams{};
  const GruParams gru = cell == CellKind::Gru ? GruParams::init(rng, n, m) : GruParams{};

  double sink = 0.0;
  auto run = [&]() {
    Tensor h({n});
    for (std::size_t s = 0; s < steps; ++s) {
      if (s % window == 0) {
        h.fill(0.0);
      }
      const Tensor& x = inputs[s % kInputPool];
      h = cell == CellKind::Arn ? arn_step(arn, h, x).h_t : gru_step(gru, h, x).h_t;
    }
    sink += h[0];
  };

  run();  // warm-up
  WallclockResult result;
  for (std::size_t r = 0; r < repeats; ++r) {
    const auto start = std::chrono::steady_clock::now();
    run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.repeat_seconds_per_step.push_back(secs / static_cast<double>(steps));
  }
  std::vector<double> sorted = result.repeat_seconds_per_step;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  result.median_seconds_per_step =
      sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  // Keeps the optimizer from discarding the stepping loop.
  bench_sink = sink;
  return result;
}

void write_bench_table(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << kBenchHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.cell) << '\t' << r.m << '\t' << r.n << '\t' << r.predicted << '\t'
       << r.measured << '\t' << r.seconds_per_step << '\n';
  }
}

}  // namespace arnids
