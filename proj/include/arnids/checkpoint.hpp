// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

// Structured-text (JSON) persistence for models and encoded datasets.
// Every tensor is stored as {name, shape, values} with values printed in
// shortest round-trip decimal form, so load -> save reproduces the same
// bytes and the same doubles.

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "arnids/data_pipeline.hpp"
#include "arnids/sequence_batch.hpp"
#include "arnids/sequence_model.hpp"

namespace arnids {

inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  Classifier model;
  /// Schema, vocabularies and normalization statistics fitted on the
  /// training partition.
  std::optional<Preprocessor> preprocessing;
  /// The run configuration that produced the model, if any.
  nlohmann::json run_config;
};

nlohmann::json model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& doc);

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json sequence_batch_to_json(const SequenceBatch& batch);
SequenceBatch sequence_batch_from_json(const nlohmann::json& doc);
void save_sequence_batch(const std::filesystem::path& path, const SequenceBatch& batch);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace arnids
