// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the test executables: temporary directories, file
// I/O, finite differences and small generators for property tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "arnids/rng.hpp"
#include "arnids/tensor.hpp"

namespace testing {

namespace fs = std::filesystem;

inline fs::path fixture(const std::string& name) { return fs::path(ARNIDS_FIXTURE_DIR) / name; }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "arnids-test-XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (mkdtemp(buf.data()) == nullptr) {
      throw std::runtime_error("mkdtemp failed");
    }
    path_ = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

/// |a - b| / max(|a|, |b|, floor).
inline double rel_error(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Central difference of f with respect to t[i], restoring t[i] afterwards.
inline double central_diff(arnids::Tensor& t, std::size_t i, const std::function<double()>& f,
                           double h = 1e-5) {
  const double saved = t[i];
  t[i] = saved + h;
  const double up = f();
  t[i] = saved - h;
  const double down = f();
  t[i] = saved;
  return (up - down) / (2.0 * h);
}

/// Largest relative error between `analytic` and the central differences of
/// f over every element of `param`.
inline double max_fd_error(arnids::Tensor& param, const arnids::Tensor& analytic,
                           const std::function<double()>& f, double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    worst = std::max(worst, rel_error(analytic[i], central_diff(param, i, f), floor));
  }
  return worst;
}

/// Uniform tensor in [-scale, scale].
inline arnids::Tensor random_tensor(arnids::Rng& rng, arnids::Shape shape, double scale = 1.0) {
  return arnids::init_uniform(rng, std::move(shape), scale);
}

/// Integer in [lo, hi].
inline std::size_t random_size(arnids::Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

/// Runs the CLI binary through the shell, returning its exit status.
inline int run_binary(const std::string& args, const fs::path& stdout_file,
                      const fs::path& stderr_file) {
  const std::string cmd = std::string("\"") + ARNIDS_CLI_PATH + "\" " + args + " >\"" +
                          stdout_file.string() + "\" 2>\"" + stderr_file.string() + "\"";
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace testing
