// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "arnids/error.hpp"
#include "arnids/rng.hpp"

namespace arnids {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

ColumnKind parse_kind(const std::string& text) {
  if (text == "numeric") return ColumnKind::Numeric;
  if (text == "categorical") return ColumnKind::Categorical;
  if (text == "label") return ColumnKind::Label;
  if (text == "drop") return ColumnKind::Drop;
  throw DataError("schema: unknown column kind '" + text + "'");
}

std::string kind_name(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Label: return "label";
    case ColumnKind::Drop: return "drop";
  }
  return "drop";
}

bool parse_double(const std::string& cell, double& out) {
  if (cell.empty()) {
    return false;
  }
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

RawDataset select_rows(const RawDataset& ds, const std::vector<std::size_t>& keep) {
  RawDataset out;
  out.numeric_columns = ds.numeric_columns;
  out.categorical_columns = ds.categorical_columns;
  out.rows.reserve(keep.size());
  for (const std::size_t i : keep) {
    out.rows.push_back(ds.rows[i]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema

std::vector<std::string> Schema::header() const {
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (const auto& c : columns) {
    names.push_back(c.name);
  }
  return names;
}

Schema Schema::from_json(const json& doc) {
  Schema s;
  try {
    std::size_t label_columns = 0;
    for (const auto& col : doc.at("columns")) {
      ColumnSpec spec{col.at("name").get<std::string>(), parse_kind(col.at("kind").get<std::string>())};
      label_columns += spec.kind == ColumnKind::Label ? 1 : 0;
      s.columns.push_back(std::move(spec));
    }
    if (label_columns != 1) {
      throw DataError("schema: exactly one label column required, found " +
                      std::to_string(label_columns));
    }
    for (const auto& [token, cls] : doc.at("labels").items()) {
      s.label_map[trim(token)] = cls.get<int>();
    }
    if (s.label_map.empty()) {
      throw DataError("schema: label map is empty");
    }
    int max_class = -1;
    for (const auto& [token, cls] : s.label_map) {
      if (cls < 0) {
        throw DataError("schema: label '" + token + "' maps to negative class");
      }
      max_class = std::max(max_class, cls);
    }
    const auto num_classes = static_cast<std::size_t>(max_class + 1);
    if (doc.contains("class_names")) {
      s.class_names = doc.at("class_names").get<std::vector<std::string>>();
    } else {
      s.class_names.assign(num_classes, {});
      for (const auto& [token, cls] : s.label_map) {
        auto& name = s.class_names[static_cast<std::size_t>(cls)];
        if (name.empty()) {
          name = token;
        }
      }
    }
    if (s.class_names.size() != num_classes) {
      throw DataError("schema: class_names lists " + std::to_string(s.class_names.size()) +
                      " classes but labels use " + std::to_string(num_classes));
    }
    std::vector<bool> used(num_classes, false);
    for (const auto& [token, cls] : s.label_map) {
      used[static_cast<std::size_t>(cls)] = true;
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
      throw DataError("schema: class indices must be dense from 0");
    }
    if (num_classes < 2) {
      throw DataError("schema: at least two classes required");
    }
    s.normal_class = doc.value("normal_class", 0);
    if (s.normal_class < 0 || static_cast<std::size_t>(s.normal_class) >= num_classes) {
      throw DataError("schema: normal_class out of range");
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("schema: ") + e.what());
  }
  return s;
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open schema file " + path.string());
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("schema " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

json Schema::to_json() const {
  json cols = json::array();
  for (const auto& c : columns) {
    cols.push_back({{"name", c.name}, {"kind", kind_name(c.kind)}});
  }
  json labels = json::object();
  for (const auto& [token, cls] : label_map) {
    labels[token] = cls;
  }
  return {{"columns", cols},
          {"labels", labels},
          {"class_names", class_names},
          {"normal_class", normal_class}};
}

std::vector<std::string> header_diff(const Schema& schema, const std::vector<std::string>& found) {
  std::vector<std::string> diff;
  const auto expected = schema.header();
  const std::size_t common = std::min(expected.size(), found.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (expected[i] != found[i]) {
      diff.push_back("column " + std::to_string(i + 1) + ": expected '" + expected[i] +
                     "', found '" + found[i] + "'");
    }
  }
  for (std::size_t i = common; i < expected.size(); ++i) {
    diff.push_back("column " + std::to_string(i + 1) + ": expected '" + expected[i] +
                   "', missing");
  }
  for (std::size_t i = common; i < found.size(); ++i) {
    diff.push_back("column " + std::to_string(i + 1) + ": unexpected extra column '" + found[i] +
                   "'");
  }
  return diff;
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

RawDataset parse_csv(std::istream& in, const Schema& schema, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(source + ": file is empty, expected a header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  const auto header = split_csv_line(line);
  const auto diff = header_diff(schema, header);
  if (!diff.empty()) {
    std::string msg = source + ": header does not match schema";
    for (const auto& d : diff) {
      msg += "\n  " + d;
    }
    throw DataError(msg);
  }

  RawDataset ds;
  for (const auto& c : schema.columns) {
    if (c.kind == ColumnKind::Numeric) {
      ds.numeric_columns.push_back(c.name);
    } else if (c.kind == ColumnKind::Categorical) {
      ds.categorical_columns.push_back(c.name);
    }
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != schema.columns.size()) {
      throw DataError(source + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(schema.columns.size()));
    }
    Record rec;
    rec.numeric.reserve(ds.numeric_columns.size());
    rec.categorical.reserve(ds.categorical_columns.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& spec = schema.columns[c];
      const std::string& cell = cells[c];
      switch (spec.kind) {
        case ColumnKind::Numeric: {
          double v = 0.0;
          if (!parse_double(cell, v)) {
            throw DataError(source + ": row " + std::to_string(line_no) + ", column " +
                            std::to_string(c + 1) + " ('" + spec.name + "'): cannot parse '" +
                            cell + "' as a finite number");
          }
          rec.numeric.push_back(v);
          break;
        }
        case ColumnKind::Categorical:
          rec.categorical.push_back(cell);
          break;
        case ColumnKind::Label: {
          const auto it = schema.label_map.find(cell);
          if (it == schema.label_map.end()) {
            throw DataError(source + ": row " + std::to_string(line_no) + ", column " +
                            std::to_string(c + 1) + " ('" + spec.name + "'): unknown label '" +
                            cell + "'");
          }
          rec.label = it->second;
          break;
        }
        case ColumnKind::Drop:
          break;
      }
    }
    ds.rows.push_back(std::move(rec));
  }
  return ds;
}

RawDataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open data file " + path.string());
  }
  return parse_csv(in, schema, path.string());
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open data file " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    return {};
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  return split_csv_line(line);
}

// ---------------------------------------------------------------------------
// Normalization and vocabularies

NormStats NormStats::fit(const RawDataset& train) {
  if (train.rows.empty()) {
    throw UsageError("normalization statistics need at least one training row");
  }
  const std::size_t cols = train.numeric_columns.size();
  NormStats s;
  s.min = train.rows.front().numeric;
  s.max = train.rows.front().numeric;
  for (const auto& row : train.rows) {
    for (std::size_t c = 0; c < cols; ++c) {
      s.min[c] = std::min(s.min[c], row.numeric[c]);
      s.max[c] = std::max(s.max[c], row.numeric[c]);
    }
  }
  return s;
}

nlohmann::json NormStats::to_json() const { return {{"min", min}, {"max", max}}; }

NormStats NormStats::from_json(const nlohmann::json& doc) {
  NormStats s;
  s.min = doc.at("min").get<std::vector<double>>();
  s.max = doc.at("max").get<std::vector<double>>();
  if (s.min.size() != s.max.size()) {
    throw DataError("normalization statistics: min and max lengths differ");
  }
  return s;
}

RawDataset normalize(const RawDataset& ds, const NormStats& stats) {
  if (stats.min.size() != ds.numeric_columns.size()) {
    throw ShapeError("normalize: statistics cover " + std::to_string(stats.min.size()) +
                     " columns, dataset has " + std::to_string(ds.numeric_columns.size()));
  }
  RawDataset out = ds;
  for (auto& row : out.rows) {
    for (std::size_t c = 0; c < row.numeric.size(); ++c) {
      const double span = stats.max[c] - stats.min[c];
      double v = span > 0.0 ? (row.numeric[c] - stats.min[c]) / span : 0.0;
      row.numeric[c] = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

Vocab Vocab::fit(const RawDataset& train) {
  Vocab v;
  v.tables.resize(train.categorical_columns.size());
  for (const auto& row : train.rows) {
    for (std::size_t c = 0; c < row.categorical.size(); ++c) {
      auto& table = v.tables[c];
      table.emplace(row.categorical[c], table.size() + 1);
    }
  }
  return v;
}

std::size_t Vocab::index(std::size_t column, const std::string& token) const {
  const auto& table = tables.at(column);
  const auto it = table.find(token);
  return it == table.end() ? 0 : it->second;
}

std::vector<std::size_t> Vocab::sizes() const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < tables.size(); ++c) {
    out.push_back(size(c));
  }
  return out;
}

nlohmann::json Vocab::to_json() const {
  json out = json::array();
  for (const auto& table : tables) {
    std::vector<std::string> tokens(table.size());
    for (const auto& [token, idx] : table) {
      tokens[idx - 1] = token;
    }
    out.push_back(tokens);
  }
  return out;
}

Vocab Vocab::from_json(const nlohmann::json& doc) {
  Vocab v;
  for (const auto& column : doc) {
    std::map<std::string, std::size_t> table;
    for (const auto& token : column) {
      table.emplace(token.get<std::string>(), table.size() + 1);
    }
    v.tables.push_back(std::move(table));
  }
  return v;
}

EncodedDataset vectorize(const RawDataset& ds, const Vocab& vocab) {
  if (vocab.tables.size() != ds.categorical_columns.size()) {
    throw ShapeError("vectorize: vocabulary covers " + std::to_string(vocab.tables.size()) +
                     " columns, dataset has " + std::to_string(ds.categorical_columns.size()));
  }
  EncodedDataset out;
  out.numeric = ds.numeric_columns.size();
  out.categorical = ds.categorical_columns.size();
  out.values.reserve(ds.rows.size() * out.width());
  out.labels.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    out.values.insert(out.values.end(), row.numeric.begin(), row.numeric.end());
    for (std::size_t c = 0; c < row.categorical.size(); ++c) {
      out.values.push_back(static_cast<double>(vocab.index(c, row.categorical[c])));
    }
    out.labels.push_back(row.label);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting and windows

SplitRatio SplitRatio::parse(const std::string& text) {
  const auto colon = text.find(':');
  SplitRatio r;
  if (colon == std::string::npos || !parse_double(trim(text.substr(0, colon)), r.train) ||
      !parse_double(trim(text.substr(colon + 1)), r.test)) {
    throw UsageError("split ratio '" + text + "' is not of the form a:b");
  }
  if (!(r.train > 0.0) || !(r.test > 0.0)) {
    throw UsageError("split ratio '" + text + "' needs both parts > 0");
  }
  return r;
}

std::string SplitRatio::to_string() const {
  std::ostringstream os;
  os << train << ':' << test;
  return os.str();
}

SplitMode parse_split_mode(const std::string& text) {
  if (text == "sequential") return SplitMode::Sequential;
  if (text == "random") return SplitMode::Random;
  throw UsageError("unknown split mode '" + text + "' (expected sequential or random)");
}

std::string to_string(SplitMode mode) {
  return mode == SplitMode::Sequential ? "sequential" : "random";
}

std::size_t train_count(std::size_t rows, const SplitRatio& ratio) {
  if (!(ratio.train > 0.0) || !(ratio.test > 0.0)) {
    throw UsageError("split ratio parts must be > 0");
  }
  const double exact = ratio.train / (ratio.train + ratio.test) * static_cast<double>(rows);
  // Guard against 0.8 * 100 landing on 79.999...
  return std::min(rows, static_cast<std::size_t>(std::floor(exact + 1e-9)));
}

std::pair<RawDataset, RawDataset> split(const RawDataset& ds, const SplitSpec& spec) {
  const std::size_t n_train = train_count(ds.size(), spec.ratio);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (spec.mode == SplitMode::Random) {
    Rng rng(spec.seed);
    rng.shuffle(order);
  }
  std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {select_rows(ds, train_idx), select_rows(ds, test_idx)};
}

RawDataset subsample(const RawDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw UsageError("subsample fraction must lie in (0, 1]");
  }
  const auto keep = std::min(
      ds.size(), static_cast<std::size_t>(std::floor(fraction * static_cast<double>(ds.size()) + 1e-9)));
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  return select_rows(ds, order);
}

SequenceBatch make_windows(const EncodedDataset& ds, std::size_t window, std::size_t stride) {
  if (window < 1 || stride < 1) {
    throw UsageError("make_windows: window and stride must be >= 1");
  }
  SequenceBatch batch;
  batch.steps = window;
  batch.width = ds.width();
  const std::size_t rows = ds.rows();
  if (rows < window) {
    return batch;
  }
  const std::size_t w = ds.width();
  for (std::size_t start = 0; start + window <= rows; start += stride) {
    const std::span<const double> values(ds.values.data() + start * w, window * w);
    batch.push(values, ds.labels[start + window - 1]);
  }
  return batch;
}

// ---------------------------------------------------------------------------

Preprocessor Preprocessor::fit(const Schema& schema, const RawDataset& train) {
  return {schema, NormStats::fit(train), Vocab::fit(train)};
}

EncodedDataset Preprocessor::encode(const RawDataset& ds) const {
  return vectorize(normalize(ds, norm), vocab);
}

FeatureLayout Preprocessor::layout() const { return {norm.min.size(), vocab.sizes()}; }

}  // namespace arnids
