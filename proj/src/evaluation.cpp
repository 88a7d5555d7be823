// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/evaluation.hpp"

#include <iomanip>
#include <sstream>

#include "arnids/error.hpp"

namespace arnids {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {
  if (classes < 2) {
    throw UsageError("confusion matrix needs at least two classes");
  }
}

void ConfusionMatrix::add(int real, int predicted) {
  const auto c = static_cast<int>(classes_);
  if (real < 0 || real >= c || predicted < 0 || predicted >= c) {
    throw UsageError("confusion matrix: class index outside [0, " + std::to_string(classes_) +
                     ")");
  }
  ++counts_[static_cast<std::size_t>(real) * classes_ + static_cast<std::size_t>(predicted)];
  ++total_;
}

std::uint64_t ConfusionMatrix::trace() const noexcept {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < classes_; ++i) {
    t += at(i, i);
  }
  return t;
}

BinaryCounts ConfusionMatrix::binarize(int normal_class) const {
  const auto normal = static_cast<std::size_t>(normal_class);
  BinaryCounts b;
  for (std::size_t r = 0; r < classes_; ++r) {
    for (std::size_t p = 0; p < classes_; ++p) {
      const std::uint64_t n = at(r, p);
      const bool real_attack = r != normal;
      const bool pred_attack = p != normal;
      if (real_attack && pred_attack) {
        b.tp += n;
      } else if (!real_attack && pred_attack) {
        b.fp += n;
      } else if (!real_attack) {
        b.tn += n;
      } else {
        b.fn += n;
      }
    }
  }
  return b;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) {
    throw UsageError("cannot merge confusion matrices of different sizes");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
  total_ += other.total_;
  return *this;
}

ConfusionMatrix compare(std::span<const int> y_real, std::span<const int> y_pred,
                        std::size_t classes) {
  if (y_real.size() != y_pred.size()) {
    throw UsageError("compare: " + std::to_string(y_real.size()) + " real labels but " +
                     std::to_string(y_pred.size()) + " predictions");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < y_real.size(); ++i) {
    cm.add(y_real[i], y_pred[i]);
  }
  return cm;
}

MetricsReport metrics_from_binary(const BinaryCounts& b) {
  MetricsReport r;
  r.n_test = b.total();
  r.accuracy = ratio(b.tp + b.tn, r.n_test);
  r.precision = ratio(b.tp, b.tp + b.fp);
  r.recall = ratio(b.tp, b.tp + b.fn);
  r.f1 = harmonic(r.precision, r.recall);
  r.frr = ratio(b.fp, b.fp + b.tn);

  ClassMetrics normal;
  normal.precision = ratio(b.tn, b.tn + b.fn);
  normal.recall = ratio(b.tn, b.tn + b.fp);
  normal.f1 = harmonic(normal.precision, normal.recall);
  normal.support = b.tn + b.fp;
  ClassMetrics attack{r.precision, r.recall, r.f1, b.tp + b.fn};
  r.per_class = {normal, attack};
  r.class_names = {"normal", "attack"};
  return r;
}

MetricsReport metrics_from_confusion(const ConfusionMatrix& cm, int normal_class,
                                     std::vector<std::string> class_names) {
  const std::size_t c = cm.classes();
  if (normal_class < 0 || static_cast<std::size_t>(normal_class) >= c) {
    throw UsageError("normal class index outside the confusion matrix");
  }
  if (class_names.empty()) {
    for (std::size_t i = 0; i < c; ++i) {
      class_names.push_back("class_" + std::to_string(i));
    }
  }
  if (class_names.size() != c) {
    throw UsageError("class name count does not match the confusion matrix");
  }

  MetricsReport r;
  if (c == 2) {
    r = metrics_from_binary(cm.binarize(normal_class));
    if (normal_class == 1) {
      std::swap(r.per_class[0], r.per_class[1]);
    }
    r.class_names = std::move(class_names);
    return r;
  }

  r.n_test = cm.total();
  r.accuracy = ratio(cm.trace(), cm.total());
  r.frr = [&] {
    const BinaryCounts b = cm.binarize(normal_class);
    return ratio(b.fp, b.fp + b.tn);
  }();
  double p_sum = 0.0;
  double r_sum = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    std::uint64_t predicted = 0;
    std::uint64_t actual = 0;
    for (std::size_t j = 0; j < c; ++j) {
      predicted += cm.at(j, k);
      actual += cm.at(k, j);
    }
    ClassMetrics m;
    m.precision = ratio(cm.at(k, k), predicted);
    m.recall = ratio(cm.at(k, k), actual);
    m.f1 = harmonic(m.precision, m.recall);
    m.support = actual;
    p_sum += m.precision;
    r_sum += m.recall;
    r.per_class.push_back(m);
  }
  r.precision = p_sum / static_cast<double>(c);
  r.recall = r_sum / static_cast<double>(c);
  r.f1 = harmonic(r.precision, r.recall);
  r.class_names = std::move(class_names);
  return r;
}

std::string MetricsReport::to_text() const {
  std::ostringstream os;
  os << "# frr = fp / (fp + tn), normal traffic flagged as attack\n"
     << "# " << (per_class.size() > 2 ? "precision/recall macro-averaged over classes, f1 = their harmonic mean"
                                      : "precision/recall/f1 for the attack class")
     << "; zero denominators give 0\n";
  os << std::setprecision(17);
  os << "accuracy: " << accuracy << '\n'
     << "precision: " << precision << '\n'
     << "recall: " << recall << '\n'
     << "f1: " << f1 << '\n'
     << "frr: " << frr << '\n'
     << "n_test: " << n_test << '\n'
     << "per_class: " << to_json().at("per_class").dump() << '\n';
  return os.str();
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t k = 0; k < per_class.size(); ++k) {
    const auto& m = per_class[k];
    classes.push_back({{"class", k < class_names.size() ? class_names[k] : std::to_string(k)},
                       {"precision", m.precision},
                       {"recall", m.recall},
                       {"f1", m.f1},
                       {"support", m.support}});
  }
  return {{"accuracy", accuracy}, {"precision", precision}, {"recall", recall},
          {"f1", f1},             {"frr", frr},             {"n_test", n_test},
          {"per_class", classes}};
}

std::vector<int> predict_all(const Classifier& clf, const SequenceBatch& batch) {
  std::vector<int> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.push_back(predict(clf, batch.window(i)));
  }
  return out;
}

MetricsReport evaluate(const Classifier& clf, const SequenceBatch& batch, int normal_class,
                       std::vector<std::string> class_names) {
  if (batch.empty()) {
    throw UsageError("evaluate: test batch is empty");
  }
  const auto predictions = predict_all(clf, batch);
  const ConfusionMatrix cm = compare(batch.labels, predictions, clf.config.num_classes);
  return metrics_from_confusion(cm, normal_class, std::move(class_names));
}

}  // namespace arnids
