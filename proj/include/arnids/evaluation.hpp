// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "arnids/sequence_batch.hpp"
#include "arnids/sequence_model.hpp"

namespace arnids {

/// Attack-vs-normal tallies. "Positive" means flagged as attack.
struct BinaryCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const BinaryCounts&, const BinaryCounts&) = default;
};

/// C x C counts indexed [real][predicted].
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);

  void add(int real, int predicted);
  std::uint64_t at(std::size_t real, std::size_t predicted) const {
    return counts_[real * classes_ + predicted];
  }
  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t trace() const noexcept;

  /// Collapses every class other than `normal_class` into "attack".
  BinaryCounts binarize(int normal_class) const;

  /// Merges counts from a matrix of the same size.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

ConfusionMatrix compare(std::span<const int> y_real, std::span<const int> y_pred,
                        std::size_t classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
};

/// Point metrics for one evaluation run.
///
/// Definitions:
///  - frr = fp / (fp + tn): share of normal traffic flagged as attack.
///  - Two classes: precision, recall and f1 describe the attack class.
///  - More classes: precision and recall are macro averages over classes and
///    f1 is their harmonic mean; accuracy is trace / total.
///  - Any ratio with a zero denominator is 0.
struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double frr = 0.0;
  std::uint64_t n_test = 0;
  std::vector<ClassMetrics> per_class;
  std::vector<std::string> class_names;

  /// key: value lines preceded by '#' comment lines stating the definitions.
  std::string to_text() const;
  nlohmann::json to_json() const;
};

MetricsReport metrics_from_binary(const BinaryCounts& counts);
MetricsReport metrics_from_confusion(const ConfusionMatrix& cm, int normal_class,
                                     std::vector<std::string> class_names = {});

std::vector<int> predict_all(const Classifier& clf, const SequenceBatch& batch);

MetricsReport evaluate(const Classifier& clf, const SequenceBatch& batch, int normal_class = 0,
                       std::vector<std::string> class_names = {});

}  // namespace arnids
