// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

// CSV replay of captured traffic records and the preprocessing that turns
// them into labelled windows: string fields become vocabulary indices,
// numeric fields are min-max scaled, rows are split into train and test
// partitions and cut into overlapping windows.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arnids/sequence_batch.hpp"
#include "arnids/sequence_model.hpp"

namespace arnids {

enum class ColumnKind { Numeric, Categorical, Label, Drop };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

/// Declares every CSV column in header order plus the label vocabulary.
/// Several label strings may map to the same class.
struct Schema {
  std::vector<ColumnSpec> columns;
  std::map<std::string, int> label_map;
  std::vector<std::string> class_names;
  int normal_class = 0;

  std::size_t num_classes() const { return class_names.size(); }
  std::vector<std::string> header() const;

  static Schema from_json(const nlohmann::json& doc);
  static Schema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  friend bool operator==(const Schema&, const Schema&) = default;
};

/// Lines describing how `found` differs from the schema header; empty when
/// they agree.
std::vector<std::string> header_diff(const Schema& schema, const std::vector<std::string>& found);

struct Record {
  std::vector<double> numeric;
  std::vector<std::string> categorical;
  int label = 0;
  friend bool operator==(const Record&, const Record&) = default;
};

struct RawDataset {
  std::vector<std::string> numeric_columns;
  std::vector<std::string> categorical_columns;
  std::vector<Record> rows;

  std::size_t size() const noexcept { return rows.size(); }
};

/// Splits one CSV line into trimmed cells, honoring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

RawDataset parse_csv(std::istream& in, const Schema& schema, const std::string& source);
RawDataset load_csv(const std::filesystem::path& path, const Schema& schema);
/// First line of a CSV file split into cells.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

/// Per numeric column min and max over training rows.
struct NormStats {
  std::vector<double> min;
  std::vector<double> max;

  static NormStats fit(const RawDataset& train);
  nlohmann::json to_json() const;
  static NormStats from_json(const nlohmann::json& doc);
  friend bool operator==(const NormStats&, const NormStats&) = default;
};

/// (x - min) / (max - min) clamped to [0, 1]; constant columns map to 0.
RawDataset normalize(const RawDataset& ds, const NormStats& stats);

/// Per categorical column token -> index. Index 0 stands for tokens never
/// seen in training; known tokens are numbered from 1 in order of first
/// appearance.
struct Vocab {
  std::vector<std::map<std::string, std::size_t>> tables;

  static Vocab fit(const RawDataset& train);
  std::size_t index(std::size_t column, const std::string& token) const;
  /// Table size including the unknown slot.
  std::size_t size(std::size_t column) const { return tables.at(column).size() + 1; }
  std::vector<std::size_t> sizes() const;

  nlohmann::json to_json() const;
  static Vocab from_json(const nlohmann::json& doc);
  friend bool operator==(const Vocab&, const Vocab&) = default;
};

/// Row-major records of `numeric` values followed by `categorical` indices.
struct EncodedDataset {
  std::size_t numeric = 0;
  std::size_t categorical = 0;
  std::vector<double> values;
  std::vector<int> labels;

  std::size_t width() const noexcept { return numeric + categorical; }
  std::size_t rows() const noexcept { return labels.size(); }
};

/// Replaces categorical tokens with vocabulary indices; numeric values pass
/// through unchanged.
EncodedDataset vectorize(const RawDataset& ds, const Vocab& vocab);

enum class SplitMode { Sequential, Random };

struct SplitRatio {
  double train = 8.0;
  double test = 2.0;

  static SplitRatio parse(const std::string& text);
  std::string to_string() const;
};

struct SplitSpec {
  SplitRatio ratio;
  SplitMode mode = SplitMode::Sequential;
  std::uint64_t seed = 0;
};

SplitMode parse_split_mode(const std::string& text);
std::string to_string(SplitMode mode);

/// Number of training rows for N rows at ratio a:b, floor(a / (a + b) * N).
std::size_t train_count(std::size_t rows, const SplitRatio& ratio);

/// Sequential: the first train_count rows train, the rest test. Random: a
/// seeded permutation picks the training rows. Both partitions keep the
/// original row order so windows stay temporally contiguous.
std::pair<RawDataset, RawDataset> split(const RawDataset& ds, const SplitSpec& spec);

/// Keeps floor(fraction * N) seeded-random rows, in original order.
RawDataset subsample(const RawDataset& ds, double fraction, std::uint64_t seed);

/// Overlapping windows over consecutive rows; each window takes the label of
/// its last row. Fewer rows than `window` yields an empty batch.
SequenceBatch make_windows(const EncodedDataset& ds, std::size_t window, std::size_t stride = 1);

/// Everything learned from the training partition that evaluation needs to
/// encode new data the same way.
struct Preprocessor {
  Schema schema;
  NormStats norm;
  Vocab vocab;

  static Preprocessor fit(const Schema& schema, const RawDataset& train);
  EncodedDataset encode(const RawDataset& ds) const;
  FeatureLayout layout() const;
};

}  // namespace arnids
