// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "arnids/rng.hpp"
#include "arnids/sequence_model.hpp"

namespace arnids {

struct TrainConfig {
  std::size_t epochs = 10;
  double lr = 0.001;
  std::size_t batch_size = 64;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// Global gradient-norm clip; 0 disables clipping.
  double clip_norm = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Adam moments, created lazily on the first update to match the
/// parameters they follow.
struct AdamState {
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update applied in place to every parameter.
void adam_update(AdamState& state, std::span<Tensor* const> params,
                 std::span<const Tensor* const> grads, const TrainConfig& cfg);
void adam_update(AdamState& state, ModelParams& params, const ModelParams& grads,
                 const TrainConfig& cfg);

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double wall_seconds = 0.0;
};

/// Writes one tab-separated line: epoch, mean_loss, train_accuracy, wall_seconds.
void write_log_line(std::ostream& os, const EpochStats& stats);

/// Stateful epoch runner: owns the shuffling generator and Adam state so
/// callers can interleave their own measurements between epochs.
class Trainer {
 public:
  Trainer(Classifier& clf, const SequenceBatch& data, TrainConfig cfg);

  EpochStats run_epoch();
  const std::vector<EpochStats>& history() const noexcept { return history_; }

 private:
  Classifier& clf_;
  const SequenceBatch& data_;
  TrainConfig cfg_;
  Rng rng_;
  AdamState adam_;
  std::vector<std::size_t> order_;
  std::vector<EpochStats> history_;
};

struct TrainResult {
  Classifier model;
  std::vector<EpochStats> history;
};

/// Trains for exactly cfg.epochs epochs. `on_epoch` observes each epoch.
TrainResult train(Classifier clf, const SequenceBatch& data, const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

}  // namespace arnids
