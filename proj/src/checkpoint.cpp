// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/checkpoint.hpp"

#include <fstream>

#include "arnids/error.hpp"

namespace arnids {

namespace {

using nlohmann::json;

json tensor_record(const std::string& name, const Tensor& t) {
  return {{"name", name}, {"shape", t.shape()}, {"values", t.storage()}};
}

}  // namespace

json model_config_to_json(const ModelConfig& cfg) {
  return {{"cell", to_string(cfg.cell)},
          {"hidden", cfg.hidden},
          {"window", cfg.window},
          {"embed_dim", cfg.embed_dim},
          {"num_classes", cfg.num_classes},
          {"seed", cfg.seed},
          {"features", {{"numeric", cfg.features.numeric}, {"vocab_sizes", cfg.features.vocab_sizes}}}};
}

ModelConfig model_config_from_json(const json& doc) {
  ModelConfig cfg;
  cfg.cell = parse_cell_kind(doc.at("cell").get<std::string>());
  cfg.hidden = doc.at("hidden").get<std::size_t>();
  cfg.window = doc.at("window").get<std::size_t>();
  cfg.embed_dim = doc.at("embed_dim").get<std::size_t>();
  cfg.num_classes = doc.at("num_classes").get<std::size_t>();
  cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.features.numeric = doc.at("features").at("numeric").get<std::size_t>();
  cfg.features.vocab_sizes = doc.at("features").at("vocab_sizes").get<std::vector<std::size_t>>();
  return cfg;
}

json checkpoint_to_json(const Checkpoint& ckpt) {
  json doc;
  doc["format_version"] = kCheckpointFormatVersion;
  doc["model_config"] = model_config_to_json(ckpt.model.config);
  if (ckpt.preprocessing) {
    doc["preprocessing"] = {{"schema", ckpt.preprocessing->schema.to_json()},
                            {"norm_stats", ckpt.preprocessing->norm.to_json()},
                            {"vocab", ckpt.preprocessing->vocab.to_json()}};
  } else {
    doc["preprocessing"] = nullptr;
  }
  doc["run_config"] = ckpt.run_config;
  json tensors = json::array();
  for (const auto& [name, t] : ckpt.model.params.named_tensors()) {
    tensors.push_back(tensor_record(name, *t));
  }
  doc["tensors"] = std::move(tensors);
  return doc;
}

Checkpoint checkpoint_from_json(const json& doc) {
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointFormatVersion) {
      throw DataError("checkpoint format_version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kCheckpointFormatVersion) + ")");
    }
    Checkpoint ckpt;
    // Initialize to get the right parameter structure, then overwrite every
    // tensor from the file.
    ckpt.model = Classifier::init(model_config_from_json(doc.at("model_config")));
    std::map<std::string, const json*> stored;
    for (const auto& rec : doc.at("tensors")) {
      stored[rec.at("name").get<std::string>()] = &rec;
    }
    for (auto& [name, t] : ckpt.model.params.named_tensors()) {
      const auto it = stored.find(name);
      if (it == stored.end()) {
        throw DataError("checkpoint is missing tensor '" + name + "'");
      }
      *t = Tensor(it->second->at("shape").get<Shape>(),
                  it->second->at("values").get<std::vector<double>>());
      stored.erase(it);
    }
    if (!stored.empty()) {
      throw DataError("checkpoint has unexpected tensor '" + stored.begin()->first + "'");
    }
    ckpt.model.validate();

    const auto& prep = doc.at("preprocessing");
    if (!prep.is_null()) {
      Preprocessor p{Schema::from_json(prep.at("schema")), NormStats::from_json(prep.at("norm_stats")),
                     Vocab::from_json(prep.at("vocab"))};
      if (p.layout() != ckpt.model.config.features) {
        throw DataError("checkpoint preprocessing does not match the model's feature layout");
      }
      ckpt.preprocessing = std::move(p);
    }
    ckpt.run_config = doc.value("run_config", json());
    return ckpt;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ShapeError& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_json_file(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return checkpoint_from_json(read_json_file(path));
}

json sequence_batch_to_json(const SequenceBatch& batch) {
  std::vector<double> labels(batch.labels.begin(), batch.labels.end());
  return {{"format_version", kCheckpointFormatVersion},
          {"steps", batch.steps},
          {"width", batch.width},
          {"tensors",
           {{{"name", "windows"},
             {"shape", {batch.size(), batch.steps * batch.width}},
             {"values", batch.values}},
            {{"name", "labels"}, {"shape", {batch.size()}}, {"values", labels}}}}};
}

SequenceBatch sequence_batch_from_json(const json& doc) {
  try {
    SequenceBatch batch;
    batch.steps = doc.at("steps").get<std::size_t>();
    batch.width = doc.at("width").get<std::size_t>();
    for (const auto& rec : doc.at("tensors")) {
      const auto name = rec.at("name").get<std::string>();
      auto values = rec.at("values").get<std::vector<double>>();
      if (name == "windows") {
        batch.values = std::move(values);
      } else if (name == "labels") {
        batch.labels.assign(values.begin(), values.end());
      }
    }
    if (batch.values.size() != batch.size() * batch.steps * batch.width) {
      throw DataError("encoded dataset: window storage does not match its labels");
    }
    return batch;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed encoded dataset: ") + e.what());
  }
}

void save_sequence_batch(const std::filesystem::path& path, const SequenceBatch& batch) {
  write_json_file(path, sequence_batch_to_json(batch));
}

}  // namespace arnids
