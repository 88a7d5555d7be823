// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

// Subcommands behind the `arnids` executable. Each command returns a process
// exit code; run_cli() parses arguments and maps library errors to codes.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "arnids/data_pipeline.hpp"
#include "arnids/sequence_model.hpp"
#include "arnids/training.hpp"

namespace arnids {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitIo = 2,
  kExitUsage = 3,
  kExitNumeric = 4,
  kExitGradcheckBase = 10,  // plus the number of failing parameter groups
};

struct DataConfig {
  std::filesystem::path path;
  std::filesystem::path schema;
  SplitRatio split;
  SplitMode split_mode = SplitMode::Sequential;
  double subsample = 1.0;  // fraction of rows kept before splitting
  std::size_t stride = 1;
  bool cache_encoded = false;
};

/// Everything needed to replay a training run. One seed drives model
/// initialization, batch shuffling, subsampling and random splits.
struct RunConfig {
  ModelConfig model;  // features and num_classes are filled from the data
  TrainConfig train;
  DataConfig data;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "run";

  nlohmann::json to_json() const;
  /// Relative paths in `doc` are resolved against `base_dir`.
  static RunConfig from_json(const nlohmann::json& doc,
                             const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);
  void validate() const;
};

/// File names written by cmd_train inside the output directory.
namespace artifacts {
inline constexpr const char* kCheckpoint = "model.ckpt.json";
inline constexpr const char* kTrainLog = "train.log";
inline constexpr const char* kRunConfig = "run_config.json";
inline constexpr const char* kMetricsText = "metrics.txt";
inline constexpr const char* kMetricsJson = "metrics.json";
inline constexpr const char* kTrainEncoded = "train.encoded.json";
inline constexpr const char* kTestEncoded = "test.encoded.json";
inline constexpr const char* kBenchTable = "bench.tsv";
}  // namespace artifacts

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);

struct EvalOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path data;
  std::optional<std::filesystem::path> schema;  // must match the checkpoint's
  std::optional<std::filesystem::path> out_dir;
  bool json = false;
};

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);

struct GradcheckDims {
  std::size_t hidden = 8;
  std::size_t input = 6;
  std::size_t window = 5;
  std::size_t batch = 2;

  /// "n,m,window,batch".
  static GradcheckDims parse(const std::string& text);
};

struct GradcheckGroup {
  CellKind cell = CellKind::Arn;
  std::string name;
  std::size_t size = 0;
  double max_rel_error = 0.0;
  bool passed = false;
};

inline constexpr double kGradcheckStep = 1e-5;
inline constexpr double kGradcheckTolerance = 1e-4;
/// Denominator floor of the relative error |a - f| / max(|a|, |f|, floor),
/// so entries whose true gradient is ~0 are judged on absolute error.
inline constexpr double kGradcheckFloor = 1e-6;

/// Compares the analytic gradient of every parameter with central finite
/// differences on a tiny seeded classifier. `corrupt_backward` scales the
/// analytic gradient of the first cell tensor, as a negative control.
std::vector<GradcheckGroup> run_gradcheck(CellKind cell, const GradcheckDims& dims,
                                          std::uint64_t seed, bool corrupt_backward = false);

struct GradcheckOptions {
  std::vector<CellKind> cells{CellKind::Arn, CellKind::Gru};
  GradcheckDims dims;
  std::uint64_t seed = 0;
  bool corrupt_backward = false;
};

int cmd_gradcheck(const GradcheckOptions& opts, std::ostream& out, std::ostream& err);

struct BenchOptions {
  std::vector<std::pair<std::size_t, std::size_t>> dims{{10, 100}, {40, 100}, {40, 200}};  // (m, n)
  std::size_t steps = 1000;
  std::size_t repeats = 5;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out_dir;
};

/// "m,n;m,n;...".
std::vector<std::pair<std::size_t, std::size_t>> parse_bench_dims(const std::string& text);

int cmd_bench(const BenchOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line entry point, argv[0] included.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with `args` excluding the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arnids
