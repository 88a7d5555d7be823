// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/training.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

#include "arnids/error.hpp"

namespace arnids {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) {
    throw UsageError("train: lr must be positive");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw UsageError("train: Adam betas must lie in (0, 1)");
  }
  if (!(eps > 0.0)) {
    throw UsageError("train: Adam eps must be positive");
  }
  if (batch_size < 1) {
    throw UsageError("train: batch_size must be >= 1");
  }
  if (clip_norm < 0.0) {
    throw UsageError("train: clip_norm must be >= 0");
  }
}

void adam_update(AdamState& state, std::span<Tensor* const> params,
                 std::span<const Tensor* const> grads, const TrainConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_update: " + std::to_string(params.size()) + " parameters but " +
                     std::to_string(grads.size()) + " gradients");
  }
  if (state.first_moment.empty()) {
    for (const Tensor* p : params) {
      state.first_moment.push_back(Tensor::zeros_like(*p));
      state.second_moment.push_back(Tensor::zeros_like(*p));
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw ShapeError("adam_update: optimizer state tracks a different parameter set");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    expect_shape(*grads[i], params[i]->shape(), "adam_update gradient");
    expect_shape(state.first_moment[i], params[i]->shape(), "adam_update moment");
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto theta = params[i]->values();
    const auto g = grads[i]->values();
    auto m = state.first_moment[i].values();
    auto v = state.second_moment[i].values();
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      theta[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

void adam_update(AdamState& state, ModelParams& params, const ModelParams& grads,
                 const TrainConfig& cfg) {
  std::vector<Tensor*> p;
  std::vector<const Tensor*> g;
  for (auto& [name, t] : params.named_tensors()) {
    p.push_back(t);
  }
  for (const auto& [name, t] : grads.named_tensors()) {
    g.push_back(t);
  }
  adam_update(state, p, g, cfg);
}

void write_log_line(std::ostream& os, const EpochStats& s) {
  os << s.epoch << '\t' << s.mean_loss << '\t' << s.train_accuracy << '\t' << s.wall_seconds
     << '\n';
}

Trainer::Trainer(Classifier& clf, const SequenceBatch& data, TrainConfig cfg)
    : clf_(clf), data_(data), cfg_(cfg), rng_(cfg.seed), order_(data.size()) {
  cfg_.validate();
  clf_.validate();
  if (data_.empty()) {
    throw UsageError("train: training set is empty");
  }
  for (std::size_t i = 0; i < order_.size(); ++i) {
    order_[i] = i;
  }
}

EpochStats Trainer::run_epoch() {
  const auto start = std::chrono::steady_clock::now();
  rng_.shuffle(order_);

  double loss_sum = 0.0;
  std::size_t correct = 0;
  std::size_t batch_index = 0;
  for (std::size_t begin = 0; begin < order_.size(); begin += cfg_.batch_size, ++batch_index) {
    const std::size_t count = std::min(cfg_.batch_size, order_.size() - begin);
    const std::span<const std::size_t> indices(order_.data() + begin, count);
    LossAndGrads lg = loss_and_grads(clf_, data_, indices);

    bool finite = std::isfinite(lg.loss);
    double norm_sq = 0.0;
    for (const auto& [name, t] : lg.grads.named_tensors()) {
      for (const double v : t->values()) {
        norm_sq += v * v;
      }
    }
    finite = finite && std::isfinite(norm_sq);
    if (!finite) {
      throw NumericError("non-finite loss or gradient at epoch " +
                         std::to_string(history_.size() + 1) + ", batch " +
                         std::to_string(batch_index));
    }
    if (cfg_.clip_norm > 0.0) {
      const double norm = std::sqrt(norm_sq);
      if (norm > cfg_.clip_norm) {
        for (auto& [name, t] : lg.grads.named_tensors()) {
          *t = scale(*t, cfg_.clip_norm / norm);
        }
      }
    }

    adam_update(adam_, clf_.params, lg.grads, cfg_);
    loss_sum += lg.loss * static_cast<double>(count);
    correct += lg.correct;
  }

  EpochStats stats;
  stats.epoch = history_.size() + 1;
  stats.mean_loss = loss_sum / static_cast<double>(order_.size());
  stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(order_.size());
  stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  history_.push_back(stats);
  return stats;
}

TrainResult train(Classifier clf, const SequenceBatch& data, const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  cfg.validate();
  if (data.empty()) {
    throw UsageError("train: training set is empty");
  }
  Trainer trainer(clf, data, cfg);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const EpochStats stats = trainer.run_epoch();
    if (on_epoch) {
      on_epoch(stats);
    }
  }
  return {std::move(clf), trainer.history()};
}

}  // namespace arnids
