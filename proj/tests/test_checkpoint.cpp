// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "arnids/checkpoint.hpp"
#include "arnids/error.hpp"
#include "arnids/rng.hpp"
#include "support.hpp"

using namespace arnids;
using nlohmann::json;

namespace {

Checkpoint swat_checkpoint(CellKind cell) {
  const Schema schema = Schema::load(testing::fixture("swat_schema.json"));
  const RawDataset ds = load_csv(testing::fixture("swat_mini.csv"), schema);
  Checkpoint ckpt;
  ckpt.preprocessing = Preprocessor::fit(schema, ds);
  ModelConfig cfg;
  cfg.cell = cell;
  cfg.hidden = 4;
  cfg.window = 3;
  cfg.embed_dim = 2;
  cfg.seed = 9;
  cfg.features = ckpt.preprocessing->layout();
  ckpt.model = Classifier::init(cfg);
  ckpt.run_config = {{"seed", 9}};
  return ckpt;
}

Checkpoint categorical_checkpoint() {
  ModelConfig cfg;
  cfg.cell = CellKind::Gru;
  cfg.hidden = 3;
  cfg.window = 2;
  cfg.embed_dim = 2;
  cfg.num_classes = 4;
  cfg.features.numeric = 1;
  cfg.features.vocab_sizes = {3, 5};
  Checkpoint ckpt;
  ckpt.model = Classifier::init(cfg);
  return ckpt;
}

}  // namespace

TEST_CASE("load then save is byte-identical") {
  testing::TempDir dir;
  for (const CellKind cell : {CellKind::Arn, CellKind::Gru}) {
    Checkpoint ckpt = swat_checkpoint(cell);
    // Awkward doubles must survive the text form exactly.
    auto tensors = ckpt.model.params.named_tensors();
    Tensor& first = *tensors.front().second;
    first[0] = 0.1;
    first[1] = 1.0 / 3.0;
    first[2] = std::numeric_limits<double>::denorm_min();
    first[3] = -1e300;

    save_checkpoint(dir / "a.json", ckpt);
    const Checkpoint back = load_checkpoint(dir / "a.json");
    save_checkpoint(dir / "b.json", back);
    CHECK(testing::read_file(dir / "a.json") == testing::read_file(dir / "b.json"));

    CHECK(back.model.config == ckpt.model.config);
    CHECK(back.run_config == ckpt.run_config);
    REQUIRE(back.preprocessing.has_value());
    CHECK(back.preprocessing->schema == ckpt.preprocessing->schema);
    CHECK(back.preprocessing->norm == ckpt.preprocessing->norm);
    CHECK(back.preprocessing->vocab == ckpt.preprocessing->vocab);
    const auto a = ckpt.model.params.named_tensors();
    const auto b = back.model.params.named_tensors();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].first == b[i].first);
      CHECK(a[i].second->shape() == b[i].second->shape());
      CHECK(a[i].second->storage() == b[i].second->storage());
    }
  }
}

TEST_CASE("checkpoint without preprocessing round-trips") {
  const Checkpoint ckpt = categorical_checkpoint();
  const Checkpoint back = checkpoint_from_json(checkpoint_to_json(ckpt));
  CHECK_FALSE(back.preprocessing.has_value());
  CHECK(checkpoint_to_json(back).dump() == checkpoint_to_json(ckpt).dump());
  CHECK(back.model.params.embeddings.size() == 2);
}

TEST_CASE("tensor set mismatches are errors") {
  const json good = checkpoint_to_json(categorical_checkpoint());

  SUBCASE("missing tensor") {
    json doc = good;
    doc["tensors"].erase(doc["tensors"].size() - 1);
    CHECK_THROWS_WITH_AS(checkpoint_from_json(doc), doctest::Contains("missing tensor"), DataError);
  }
  SUBCASE("unexpected tensor") {
    json doc = good;
    doc["tensors"].push_back({{"name", "extra"}, {"shape", {1}}, {"values", {0.0}}});
    CHECK_THROWS_WITH_AS(checkpoint_from_json(doc), doctest::Contains("unexpected tensor 'extra'"),
                         DataError);
  }
  SUBCASE("wrong shape") {
    json doc = good;
    doc["tensors"][0]["shape"] = {1, 1};
    doc["tensors"][0]["values"] = {0.0};
    CHECK_THROWS_AS(checkpoint_from_json(doc), DataError);
  }
  SUBCASE("values do not fill the shape") {
    json doc = good;
    doc["tensors"][0]["values"].erase(0);
    CHECK_THROWS_AS(checkpoint_from_json(doc), DataError);
  }
  SUBCASE("format version") {
    json doc = good;
    doc["format_version"] = kCheckpointFormatVersion + 1;
    CHECK_THROWS_WITH_AS(checkpoint_from_json(doc), doctest::Contains("format_version"), DataError);
  }
  SUBCASE("missing field") {
    json doc = good;
    doc.erase("model_config");
    CHECK_THROWS_AS(checkpoint_from_json(doc), DataError);
  }
}

TEST_CASE("preprocessing must match the feature layout") {
  json doc = checkpoint_to_json(swat_checkpoint(CellKind::Arn));
  doc["model_config"]["features"]["numeric"] = 3;
  // Rebuild tensors for the altered layout so only the layout check can fire.
  ModelConfig cfg = model_config_from_json(doc["model_config"]);
  Checkpoint other;
  other.model = Classifier::init(cfg);
  doc["tensors"] = checkpoint_to_json(other)["tensors"];
  CHECK_THROWS_WITH_AS(checkpoint_from_json(doc), doctest::Contains("feature layout"), DataError);
}

TEST_CASE("file errors") {
  testing::TempDir dir;
  CHECK_THROWS_AS(load_checkpoint(dir / "absent.json"), IoError);
  testing::write_file(dir / "bad.json", "{not json");
  CHECK_THROWS_AS(load_checkpoint(dir / "bad.json"), DataError);
  CHECK_THROWS_AS(save_checkpoint(dir / "no" / "such" / "dir.json", categorical_checkpoint()), IoError);
}

TEST_CASE("property: random sequence batches round-trip") {
  Rng rng(4);
  testing::TempDir dir;
  for (int trial = 0; trial < 30; ++trial) {
    SequenceBatch batch;
    batch.steps = testing::random_size(rng, 1, 5);
    batch.width = testing::random_size(rng, 1, 4);
    const std::size_t count = testing::random_size(rng, 0, 20);
    std::vector<double> window(batch.steps * batch.width);
    for (std::size_t i = 0; i < count; ++i) {
      for (double& v : window) v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
      batch.push(window, static_cast<int>(rng.below(7)));
    }
    save_sequence_batch(dir / "batch.json", batch);
    const SequenceBatch back = sequence_batch_from_json(read_json_file(dir / "batch.json"));
    CHECK(back.steps == batch.steps);
    CHECK(back.width == batch.width);
    CHECK(back.values == batch.values);
    CHECK(back.labels == batch.labels);
    CHECK(back.content_hash() == batch.content_hash());
    save_sequence_batch(dir / "again.json", back);
    CHECK(testing::read_file(dir / "batch.json") == testing::read_file(dir / "again.json"));
  }
}

TEST_CASE("sequence batch storage must match labels") {
  SequenceBatch batch;
  batch.steps = 2;
  batch.width = 1;
  batch.push(std::vector<double>{1.0, 2.0}, 1);
  json doc = sequence_batch_to_json(batch);
  doc["tensors"][0]["values"].push_back(3.0);
  CHECK_THROWS_AS(sequence_batch_from_json(doc), DataError);
}
