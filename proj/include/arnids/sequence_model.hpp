// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "arnids/arn_cell.hpp"
#include "arnids/gru_cell.hpp"
#include "arnids/sequence_batch.hpp"
#include "arnids/tensor.hpp"

namespace arnids {

enum class CellKind { Arn, Gru };

std::string to_string(CellKind kind);
CellKind parse_cell_kind(const std::string& text);

/// Raw record layout: `numeric` normalized slots followed by one vocabulary
/// index slot per categorical field.
struct FeatureLayout {
  std::size_t numeric = 0;
  std::vector<std::size_t> vocab_sizes;

  std::size_t raw_width() const noexcept { return numeric + vocab_sizes.size(); }
  friend bool operator==(const FeatureLayout&, const FeatureLayout&) = default;
};

struct ModelConfig {
  CellKind cell = CellKind::Arn;
  std::size_t hidden = 100;
  std::size_t window = 10;
  std::size_t embed_dim = 16;
  std::size_t num_classes = 2;
  std::uint64_t seed = 0;
  FeatureLayout features;

  /// Width of the vector the recurrent cell consumes per step.
  std::size_t input_dim() const noexcept {
    return features.numeric + features.vocab_sizes.size() * embed_dim;
  }
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

using CellParams = std::variant<ArnParams, GruParams>;

/// Every trainable tensor of a classifier. The same type carries gradients.
struct ModelParams {
  CellParams cell;
  Tensor head_w;  // num_classes x n
  Tensor head_b;  // num_classes
  std::vector<Tensor> embeddings;  // one vocab x embed_dim table per categorical field

  /// Stable, named list of every tensor, cell first, then head, then
  /// embeddings.
  std::vector<std::pair<std::string, Tensor*>> named_tensors();
  std::vector<std::pair<std::string, const Tensor*>> named_tensors() const;
  std::size_t parameter_count() const;

  /// Same structure, all zeros.
  ModelParams zeros_like() const;
};

struct Classifier {
  ModelConfig config;
  ModelParams params;

  /// Seeded initialization from `config.seed`.
  static Classifier init(const ModelConfig& config);
  void validate() const;
};

using StepTraces = std::variant<std::vector<ArnStepTrace>, std::vector<GruStepTrace>>;

struct ForwardResult {
  std::vector<double> logits;
  std::vector<double> probs;
  std::vector<Tensor> inputs;  // per-step cell inputs after embedding lookup
  StepTraces traces;
  Tensor final_hidden;
};

/// Runs the cell from a zero state over the window, applies the linear head
/// to the last hidden state and normalizes with softmax.
ForwardResult forward(const Classifier& clf, const WindowRef& window);

/// Predicted class (argmax, lowest index on ties).
int predict(const Classifier& clf, const WindowRef& window);

struct LossAndGrads {
  double loss = 0.0;  // mean cross-entropy
  ModelParams grads;  // gradient of the mean loss
  std::size_t correct = 0;
};

/// Mean cross-entropy over the batch and its full gradient via BPTT.
LossAndGrads loss_and_grads(const Classifier& clf, const SequenceBatch& batch);
/// Same, restricted to the listed window indices.
LossAndGrads loss_and_grads(const Classifier& clf, const SequenceBatch& batch,
                            std::span<const std::size_t> indices);

/// Mean cross-entropy only, for finite-difference oracles.
double mean_loss(const Classifier& clf, const SequenceBatch& batch);

}  // namespace arnids
