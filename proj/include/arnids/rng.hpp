// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace arnids {

/// Explicitly seeded generator. Draws are reproducible across platforms:
/// the engine is std::mt19937_64, whose output sequence the standard fixes,
/// and all conversions to reals or bounded integers are done here rather
/// than through the implementation-defined std distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Unbiased integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller.
  double normal();

  /// Fisher-Yates shuffle.
  void shuffle(std::span<std::size_t> items);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace arnids
