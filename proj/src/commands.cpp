// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "arnids/checkpoint.hpp"
#include "arnids/complexity.hpp"
#include "arnids/error.hpp"
#include "arnids/evaluation.hpp"
#include "arnids/rng.hpp"

namespace arnids {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
  if (!obj.is_object()) {
    throw UsageError("config: '" + where + "' must be an object");
  }
  for (const auto& item : obj.items()) {
    if (known.count(item.key()) == 0) {
      throw UsageError("config: unknown key '" + item.key() + "' in '" + where + "'");
    }
  }
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) {
    return p;
  }
  return (base / p).lexically_normal();
}

std::size_t parse_size(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw UsageError(what + ": '" + text + "' is not a non-negative integer");
  }
  return v;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) {
    parts.push_back(cur);
  }
  return parts;
}

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

/// Runs `fn`, mapping library errors to exit codes and reporting them on `err`.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: malformed JSON: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

/// Remembers files a command created so a failure can remove them again.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void prepare() {
    std::error_code ec;
    if (!fs::exists(dir_, ec)) {
      fs::create_directories(dir_, ec);
      if (ec) {
        throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
      }
      created_dir_ = true;
    } else if (!fs::is_directory(dir_, ec)) {
      throw IoError("output path " + dir_.string() + " is not a directory");
    }
  }

  fs::path claim(const char* name) {
    fs::path p = dir_ / name;
    files_.push_back(p);
    return p;
  }

  void commit() { committed_ = true; }

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
    if (created_dir_ && fs::is_empty(dir_, ec)) fs::remove(dir_, ec);
  }

  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

 private:
  fs::path dir_;
  std::vector<fs::path> files_;
  bool created_dir_ = false;
  bool committed_ = false;
};

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

std::vector<std::string> schema_diff(const Schema& expected, const Schema& found) {
  std::vector<std::string> lines;
  const std::size_t n = std::max(expected.columns.size(), found.columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    auto describe = [](const std::vector<ColumnSpec>& cols, std::size_t i) -> std::string {
      if (i >= cols.size()) return "(none)";
      static const char* kinds[] = {"numeric", "categorical", "label", "drop"};
      return "'" + cols[i].name + "' (" + kinds[static_cast<int>(cols[i].kind)] + ")";
    };
    const bool same = i < expected.columns.size() && i < found.columns.size() &&
                      expected.columns[i] == found.columns[i];
    if (!same) {
      lines.push_back("column " + std::to_string(i + 1) + ": checkpoint has " +
                      describe(expected.columns, i) + ", schema has " +
                      describe(found.columns, i));
    }
  }
  if (expected.label_map != found.label_map) {
    lines.push_back("label map differs");
  }
  if (expected.class_names != found.class_names) {
    lines.push_back("class names differ");
  }
  if (expected.normal_class != found.normal_class) {
    lines.push_back("normal_class differs: checkpoint has " +
                    std::to_string(expected.normal_class) + ", schema has " +
                    std::to_string(found.normal_class));
  }
  return lines;
}

}  // namespace

// --- RunConfig ---------------------------------------------------------------

json RunConfig::to_json() const {
  return json{
      {"seed", seed},
      {"out", out_dir.generic_string()},
      {"model",
       {{"cell", to_string(model.cell)},
        {"hidden", model.hidden},
        {"window", model.window},
        {"embed_dim", model.embed_dim}}},
      {"train",
       {{"epochs", train.epochs},
        {"lr", train.lr},
        {"batch_size", train.batch_size},
        {"beta1", train.beta1},
        {"beta2", train.beta2},
        {"eps", train.eps},
        {"clip_norm", train.clip_norm}}},
      {"data",
       {{"path", data.path.generic_string()},
        {"schema", data.schema.generic_string()},
        {"split", data.split.to_string()},
        {"split_mode", to_string(data.split_mode)},
        {"subsample", data.subsample},
        {"stride", data.stride},
        {"cache_encoded", data.cache_encoded}}},
  };
}

RunConfig RunConfig::from_json(const json& doc, const fs::path& base_dir) {
  RunConfig cfg;
  try {
    reject_unknown_keys(doc, {"seed", "out", "model", "train", "data"}, "top level");
    cfg.seed = doc.value("seed", cfg.seed);
    if (doc.contains("out")) {
      cfg.out_dir = resolve(doc.at("out").get<std::string>(), base_dir);
    } else {
      cfg.out_dir = resolve(cfg.out_dir, base_dir);
    }
    if (doc.contains("model")) {
      const json& m = doc.at("model");
      reject_unknown_keys(m, {"cell", "hidden", "window", "embed_dim"}, "model");
      if (m.contains("cell")) cfg.model.cell = parse_cell_kind(m.at("cell").get<std::string>());
      cfg.model.hidden = m.value("hidden", cfg.model.hidden);
      cfg.model.window = m.value("window", cfg.model.window);
      cfg.model.embed_dim = m.value("embed_dim", cfg.model.embed_dim);
    }
    if (doc.contains("train")) {
      const json& t = doc.at("train");
      reject_unknown_keys(t, {"epochs", "lr", "batch_size", "beta1", "beta2", "eps", "clip_norm"},
                          "train");
      cfg.train.epochs = t.value("epochs", cfg.train.epochs);
      cfg.train.lr = t.value("lr", cfg.train.lr);
      cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
      cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
      cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
      cfg.train.eps = t.value("eps", cfg.train.eps);
      cfg.train.clip_norm = t.value("clip_norm", cfg.train.clip_norm);
    }
    if (doc.contains("data")) {
      const json& d = doc.at("data");
      reject_unknown_keys(
          d, {"path", "schema", "split", "split_mode", "subsample", "stride", "cache_encoded"},
          "data");
      if (d.contains("path")) cfg.data.path = resolve(d.at("path").get<std::string>(), base_dir);
      if (d.contains("schema")) {
        cfg.data.schema = resolve(d.at("schema").get<std::string>(), base_dir);
      }
      if (d.contains("split")) cfg.data.split = SplitRatio::parse(d.at("split").get<std::string>());
      if (d.contains("split_mode")) {
        cfg.data.split_mode = parse_split_mode(d.at("split_mode").get<std::string>());
      }
      cfg.data.subsample = d.value("subsample", cfg.data.subsample);
      cfg.data.stride = d.value("stride", cfg.data.stride);
      cfg.data.cache_encoded = d.value("cache_encoded", cfg.data.cache_encoded);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  cfg.model.seed = cfg.seed;
  cfg.train.seed = cfg.seed;
  return cfg;
}

RunConfig RunConfig::load(const fs::path& path) {
  const json doc = read_json_file(path);
  return from_json(doc, path.parent_path());
}

void RunConfig::validate() const {
  if (data.path.empty()) {
    throw UsageError("config: data.path is required");
  }
  if (data.schema.empty()) {
    throw UsageError("config: data.schema is required");
  }
  if (!(data.subsample > 0.0 && data.subsample <= 1.0)) {
    throw UsageError("config: data.subsample must be in (0, 1]");
  }
  if (data.stride < 1) {
    throw UsageError("config: data.stride must be >= 1");
  }
  if (model.hidden < 1 || model.window < 1 || model.embed_dim < 1) {
    throw UsageError("config: model.hidden, model.window and model.embed_dim must be >= 1");
  }
  train.validate();
}

// --- train -------------------------------------------------------------------

int cmd_train(const RunConfig& cfg_in, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    RunConfig cfg = cfg_in;
    cfg.model.seed = cfg.seed;
    cfg.train.seed = cfg.seed;
    cfg.validate();

    const Schema schema = Schema::load(cfg.data.schema);
    RawDataset raw = load_csv(cfg.data.path, schema);
    if (raw.size() == 0) {
      throw UsageError(cfg.data.path.string() + " has no data rows");
    }
    if (cfg.data.subsample < 1.0) {
      raw = subsample(raw, cfg.data.subsample, cfg.seed);
    }
    const auto [train_raw, test_raw] = split(raw, {cfg.data.split, cfg.data.split_mode, cfg.seed});
    const Preprocessor prep = Preprocessor::fit(schema, train_raw);
    const EncodedDataset train_enc = prep.encode(train_raw);
    const EncodedDataset test_enc = prep.encode(test_raw);
    const SequenceBatch train_batch = make_windows(train_enc, cfg.model.window, cfg.data.stride);
    const SequenceBatch test_batch = make_windows(test_enc, cfg.model.window, cfg.data.stride);
    if (train_batch.empty()) {
      throw UsageError("training partition has " + std::to_string(train_enc.rows()) +
                       " rows, fewer than the window length " +
                       std::to_string(cfg.model.window));
    }

    ModelConfig mc = cfg.model;
    mc.features = prep.layout();
    mc.num_classes = schema.num_classes();
    Classifier clf = Classifier::init(mc);

    OutputSet outputs(cfg.out_dir);
    outputs.prepare();
    const fs::path log_path = outputs.claim(artifacts::kTrainLog);
    std::ofstream log(log_path, std::ios::binary);
    if (!log) {
      throw IoError("cannot write " + log_path.string());
    }
    const TrainResult result = train(std::move(clf), train_batch, cfg.train,
                                     [&](const EpochStats& s) {
                                       write_log_line(log, s);
                                       log.flush();
                                       write_log_line(out, s);
                                     });
    log.close();

    const json run_json = cfg.to_json();
    Checkpoint ckpt{result.model, prep, run_json};
    save_checkpoint(outputs.claim(artifacts::kCheckpoint), ckpt);
    write_json_file(outputs.claim(artifacts::kRunConfig), run_json);

    if (cfg.data.cache_encoded) {
      save_sequence_batch(outputs.claim(artifacts::kTrainEncoded), train_batch);
      save_sequence_batch(outputs.claim(artifacts::kTestEncoded), test_batch);
    }

    if (test_batch.empty()) {
      err << "warning: test partition yields no windows, metrics not written\n";
    } else {
      const MetricsReport report =
          evaluate(result.model, test_batch, schema.normal_class, schema.class_names);
      write_text_file(outputs.claim(artifacts::kMetricsText), report.to_text());
      write_json_file(outputs.claim(artifacts::kMetricsJson), report.to_json());
      out << report.to_text();
    }
    outputs.commit();
    return kExitOk;
  });
}

// --- eval --------------------------------------------------------------------

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (opts.checkpoint.empty() || opts.data.empty()) {
      throw UsageError("eval needs --checkpoint and --data");
    }
    const Checkpoint ckpt = load_checkpoint(opts.checkpoint);
    if (!ckpt.preprocessing) {
      throw UsageError(opts.checkpoint.string() + " carries no preprocessing state");
    }
    const Preprocessor& prep = *ckpt.preprocessing;
    if (opts.schema) {
      const Schema given = Schema::load(*opts.schema);
      const auto diff = schema_diff(prep.schema, given);
      if (!diff.empty()) {
        std::string msg = "schema " + opts.schema->string() + " does not match the checkpoint";
        for (const auto& d : diff) msg += "\n  " + d;
        throw DataError(msg);
      }
    }
    const RawDataset raw = load_csv(opts.data, prep.schema);
    const SequenceBatch batch =
        make_windows(prep.encode(raw), ckpt.model.config.window, 1);
    if (batch.empty()) {
      throw UsageError(opts.data.string() + " has " + std::to_string(raw.size()) +
                       " rows, fewer than the window length " +
                       std::to_string(ckpt.model.config.window));
    }
    const MetricsReport report =
        evaluate(ckpt.model, batch, prep.schema.normal_class, prep.schema.class_names);
    if (opts.out_dir) {
      OutputSet outputs(*opts.out_dir);
      outputs.prepare();
      write_text_file(outputs.claim(artifacts::kMetricsText), report.to_text());
      write_json_file(outputs.claim(artifacts::kMetricsJson), report.to_json());
      outputs.commit();
    }
    if (opts.json) {
      out << report.to_json().dump(2) << '\n';
    } else {
      out << report.to_text();
    }
    return kExitOk;
  });
}

// --- gradcheck ---------------------------------------------------------------

GradcheckDims GradcheckDims::parse(const std::string& text) {
  const auto parts = split_on(text, ',');
  if (parts.size() != 4) {
    throw UsageError("--dims expects n,m,window,batch, got '" + text + "'");
  }
  GradcheckDims d;
  d.hidden = parse_size(trim_copy(parts[0]), "--dims n");
  d.input = parse_size(trim_copy(parts[1]), "--dims m");
  d.window = parse_size(trim_copy(parts[2]), "--dims window");
  d.batch = parse_size(trim_copy(parts[3]), "--dims batch");
  if (d.hidden < 1 || d.input < 1 || d.window < 1 || d.batch < 1) {
    throw UsageError("--dims entries must all be >= 1");
  }
  return d;
}

std::vector<GradcheckGroup> run_gradcheck(CellKind cell, const GradcheckDims& dims,
                                          std::uint64_t seed, bool corrupt_backward) {
  constexpr std::size_t kClasses = 3;
  constexpr std::size_t kVocab = 5;

  ModelConfig mc;
  mc.cell = cell;
  mc.hidden = dims.hidden;
  mc.window = dims.window;
  mc.num_classes = kClasses;
  mc.seed = seed;
  // Half the cell input comes from one embedded categorical field so the
  // embedding gradient is checked too.
  if (dims.input >= 2) {
    mc.embed_dim = dims.input / 2;
    mc.features.numeric = dims.input - mc.embed_dim;
    mc.features.vocab_sizes = {kVocab};
  } else {
    mc.embed_dim = 1;
    mc.features.numeric = dims.input;
  }
  Classifier clf = Classifier::init(mc);

  Rng rng(seed + 1);
  SequenceBatch batch;
  batch.steps = dims.window;
  batch.width = mc.features.raw_width();
  std::vector<double> window(batch.steps * batch.width);
  for (std::size_t b = 0; b < dims.batch; ++b) {
    for (std::size_t t = 0; t < batch.steps; ++t) {
      for (std::size_t k = 0; k < batch.width; ++k) {
        window[t * batch.width + k] = k < mc.features.numeric
                                          ? rng.uniform01()
                                          : static_cast<double>(rng.below(kVocab));
      }
    }
    batch.push(window, static_cast<int>(rng.below(kClasses)));
  }

  LossAndGrads analytic = loss_and_grads(clf, batch);
  auto grads = analytic.grads.named_tensors();
  if (corrupt_backward) {
    for (double& g : grads.front().second->values()) g = 1.5 * g + 1e-3;
  }

  std::vector<GradcheckGroup> groups;
  auto params = clf.params.named_tensors();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i].second;
    const Tensor& g = *grads[i].second;
    GradcheckGroup group;
    group.cell = cell;
    group.name = params[i].first;
    group.size = p.size();
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double saved = p[j];
      p[j] = saved + kGradcheckStep;
      const double up = mean_loss(clf, batch);
      p[j] = saved - kGradcheckStep;
      const double down = mean_loss(clf, batch);
      p[j] = saved;
      const double fd = (up - down) / (2.0 * kGradcheckStep);
      const double denom = std::max({std::abs(g[j]), std::abs(fd), kGradcheckFloor});
      group.max_rel_error = std::max(group.max_rel_error, std::abs(g[j] - fd) / denom);
    }
    group.passed = group.max_rel_error <= kGradcheckTolerance;
    groups.push_back(group);
  }
  return groups;
}

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    int failures = 0;
    out << "cell\tgroup\tsize\tmax_rel_error\tstatus\n";
    for (const CellKind cell : opts.cells) {
      for (const auto& g : run_gradcheck(cell, opts.dims, opts.seed, opts.corrupt_backward)) {
        std::ostringstream err_text;
        err_text << std::scientific << std::setprecision(3) << g.max_rel_error;
        out << to_string(cell) << '\t' << g.name << '\t' << g.size << '\t' << err_text.str()
            << '\t' << (g.passed ? "pass" : "FAIL") << '\n';
        if (!g.passed) {
          ++failures;
          err << "gradcheck FAILED: " << to_string(cell) << ' ' << g.name
              << " max relative error " << err_text.str() << " > " << kGradcheckTolerance
              << '\n';
        }
      }
    }
    return failures == 0 ? kExitOk : std::min(kExitGradcheckBase + failures, 125);
  });
}

// --- bench -------------------------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> parse_bench_dims(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> dims;
  for (const auto& entry : split_on(text, ';')) {
    const std::string e = trim_copy(entry);
    if (e.empty()) continue;
    const auto parts = split_on(e, ',');
    if (parts.size() != 2) {
      throw UsageError("--dims expects m,n pairs separated by ';', got '" + entry + "'");
    }
    const std::size_t m = parse_size(trim_copy(parts[0]), "--dims m");
    const std::size_t n = parse_size(trim_copy(parts[1]), "--dims n");
    if (m < 1 || n < 1) {
      throw UsageError("--dims entries must be >= 1");
    }
    dims.emplace_back(m, n);
  }
  if (dims.empty()) {
    throw UsageError("--dims is empty");
  }
  return dims;
}

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (opts.steps < 1 || opts.repeats < 1) {
      throw UsageError("--steps and --repeats must be >= 1");
    }
    std::vector<BenchRow> rows;
    for (const auto& [m, n] : opts.dims) {
      for (const CellKind cell : {CellKind::Arn, CellKind::Gru}) {
        BenchRow row;
        row.cell = cell;
        row.m = m;
        row.n = n;
        row.predicted = predict_ops(cell, m, n);
        row.measured = count_ops(cell, m, n, opts.seed).measured_madds;
        row.seconds_per_step =
            bench_wallclock(cell, m, n, opts.steps, opts.repeats, opts.seed).median_seconds_per_step;
        rows.push_back(row);
      }
    }
    std::ostringstream table;
    write_bench_table(table, rows);
    if (opts.out_dir) {
      OutputSet outputs(*opts.out_dir);
      outputs.prepare();
      write_text_file(outputs.claim(artifacts::kBenchTable), table.str());
      outputs.commit();
    }
    out << table.str();
    for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
      err << "# arn/gru seconds_per_step ratio at m=" << rows[i].m << ", n=" << rows[i].n << ": "
          << rows[i].seconds_per_step / rows[i + 1].seconds_per_step << '\n';
    }
    return kExitOk;
  });
}

// --- command line ------------------------------------------------------------

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Associative recurrent network intrusion detector"};
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint_path;
  std::string data_path;
  std::string schema_path;
  std::string out_path;
  std::string cell_text;
  std::uint64_t seed = 0;
  std::string dims_text;
  std::size_t steps = 1000;
  std::size_t repeats = 5;
  bool json_out = false;
  bool corrupt = false;

  auto* train_cmd = app.add_subcommand("train", "Train a classifier from a run config");
  train_cmd->add_option("--config", config_path, "Run config (JSON)")->required();
  train_cmd->add_option("--data", data_path, "Override data.path");
  train_cmd->add_option("--schema", schema_path, "Override data.schema");
  train_cmd->add_option("--seed", seed, "Override the run seed");
  train_cmd->add_option("--cell", cell_text, "Override model.cell")
      ->check(CLI::IsMember({"arn", "gru"}));
  train_cmd->add_option("--out", out_path, "Override the output directory");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a CSV file");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  eval_cmd->add_option("--data", data_path, "CSV file")->required();
  eval_cmd->add_option("--schema", schema_path, "Schema that must match the checkpoint's");
  eval_cmd->add_option("--out", out_path, "Directory for metrics.txt and metrics.json");
  eval_cmd->add_flag("--json", json_out, "Print the report as JSON");

  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  grad_cmd->add_option("--seed", seed, "Seed for parameters and data");
  grad_cmd->add_option("--cell", cell_text, "Only this cell kind")
      ->check(CLI::IsMember({"arn", "gru"}));
  grad_cmd->add_option("--dims", dims_text, "n,m,window,batch (default 8,6,5,2)");
  grad_cmd->add_flag("--corrupt-backward", corrupt)->group("");

  auto* bench_cmd = app.add_subcommand("bench", "Operation counts and forward wall-clock");
  bench_cmd->add_option("--dims", dims_text, "m,n;m,n;... (default 10,100;40,100;40,200)");
  bench_cmd->add_option("--steps", steps, "Forward steps per repeat")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--repeats", repeats, "Timed repeats")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", seed, "Seed for parameters and data");
  bench_cmd->add_option("--out", out_path, "Directory for bench.tsv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (e.get_exit_code() == 0) return kExitOk;
    return kExitUsage;
  }

  if (train_cmd->parsed()) {
    RunConfig cfg;
    const int rc = guarded(err, [&] {
      cfg = RunConfig::load(config_path);
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
    if (!data_path.empty()) cfg.data.path = data_path;
    if (!schema_path.empty()) cfg.data.schema = schema_path;
    if (train_cmd->count("--seed") > 0) cfg.seed = seed;
    if (!cell_text.empty()) cfg.model.cell = parse_cell_kind(cell_text);
    if (!out_path.empty()) cfg.out_dir = out_path;
    return cmd_train(cfg, out, err);
  }
  if (eval_cmd->parsed()) {
    EvalOptions opts;
    opts.checkpoint = checkpoint_path;
    opts.data = data_path;
    if (!schema_path.empty()) opts.schema = schema_path;
    if (!out_path.empty()) opts.out_dir = out_path;
    opts.json = json_out;
    return cmd_eval(opts, out, err);
  }
  if (grad_cmd->parsed()) {
    GradcheckOptions opts;
    opts.seed = seed;
    opts.corrupt_backward = corrupt;
    if (!cell_text.empty()) opts.cells = {parse_cell_kind(cell_text)};
    const int rc = guarded(err, [&] {
      if (!dims_text.empty()) opts.dims = GradcheckDims::parse(dims_text);
      return kExitOk;
    });
    if (rc != kExitOk) return rc;
    return cmd_gradcheck(opts, out, err);
  }
  BenchOptions opts;
  opts.steps = steps;
  opts.repeats = repeats;
  opts.seed = seed;
  if (!out_path.empty()) opts.out_dir = out_path;
  const int rc = guarded(err, [&] {
    if (!dims_text.empty()) opts.dims = parse_bench_dims(dims_text);
    return kExitOk;
  });
  if (rc != kExitOk) return rc;
  return cmd_bench(opts, out, err);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("arnids");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace arnids
