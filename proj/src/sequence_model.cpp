// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "arnids/error.hpp"
#include "arnids/rng.hpp"

namespace arnids {

namespace {

template <typename TensorPtr, typename Params>
std::vector<std::pair<std::string, TensorPtr>> cell_tensors(Params& cell) {
  using Arn = std::conditional_t<std::is_const_v<Params>, const ArnParams, ArnParams>;
  using Gru = std::conditional_t<std::is_const_v<Params>, const GruParams, GruParams>;
  std::vector<std::pair<std::string, TensorPtr>> out;
  if (auto* arn = std::get_if<ArnParams>(&cell)) {
    Arn& p = *arn;
    out = {{"cell.wx", &p.wx},
           {"cell.wh", &p.wh},
           {"cell.satt.wq", &p.satt.wq},
           {"cell.satt.wk", &p.satt.wk},
           {"cell.satt.wv", &p.satt.wv}};
  } else {
    Gru& p = std::get<GruParams>(cell);
    out = {{"cell.w_r", &p.w_r}, {"cell.w_z", &p.w_z}, {"cell.w_h", &p.w_h}};
  }
  return out;
}

template <typename TensorPtr, typename Self>
std::vector<std::pair<std::string, TensorPtr>> all_tensors(Self& self) {
  auto out = cell_tensors<TensorPtr>(self.cell);
  out.emplace_back("head.w", &self.head_w);
  out.emplace_back("head.b", &self.head_b);
  for (std::size_t i = 0; i < self.embeddings.size(); ++i) {
    out.emplace_back("embedding." + std::to_string(i), &self.embeddings[i]);
  }
  return out;
}

void accumulate(ModelParams& into, const ArnParams& g) {
  auto& p = std::get<ArnParams>(into.cell);
  axpy(p.wx, 1.0, g.wx);
  axpy(p.wh, 1.0, g.wh);
  axpy(p.satt.wq, 1.0, g.satt.wq);
  axpy(p.satt.wk, 1.0, g.satt.wk);
  axpy(p.satt.wv, 1.0, g.satt.wv);
}

void accumulate(ModelParams& into, const GruParams& g) {
  auto& p = std::get<GruParams>(into.cell);
  axpy(p.w_r, 1.0, g.w_r);
  axpy(p.w_z, 1.0, g.w_z);
  axpy(p.w_h, 1.0, g.w_h);
}

std::size_t category_index(double slot, std::size_t vocab_size, std::size_t field) {
  const double rounded = std::nearbyint(slot);
  if (rounded != slot || slot < 0.0 || slot >= static_cast<double>(vocab_size)) {
    throw ShapeError("categorical field " + std::to_string(field) + " holds " +
                     std::to_string(slot) + ", not a vocabulary index below " +
                     std::to_string(vocab_size));
  }
  return static_cast<std::size_t>(rounded);
}

Tensor embed_step(const Classifier& clf, std::span<const double> raw) {
  const auto& layout = clf.config.features;
  const std::size_t e = clf.config.embed_dim;
  std::vector<double> x(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(layout.numeric));
  x.reserve(clf.config.input_dim());
  for (std::size_t f = 0; f < layout.vocab_sizes.size(); ++f) {
    const std::size_t idx = category_index(raw[layout.numeric + f], layout.vocab_sizes[f], f);
    const auto row = clf.params.embeddings[f].values().subspan(idx * e, e);
    x.insert(x.end(), row.begin(), row.end());
  }
  return Tensor::vector(std::move(x));
}

double log_sum_exp(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (const double x : v) {
    total += std::exp(x - top);
  }
  return top + std::log(total);
}

}  // namespace

std::string to_string(CellKind kind) { return kind == CellKind::Arn ? "arn" : "gru"; }

CellKind parse_cell_kind(const std::string& text) {
  if (text == "arn" || text == "ARN") {
    return CellKind::Arn;
  }
  if (text == "gru" || text == "GRU") {
    return CellKind::Gru;
  }
  throw UsageError("unknown cell kind '" + text + "' (expected arn or gru)");
}

void ModelConfig::validate() const {
  if (hidden < 1) {
    throw UsageError("model: hidden size must be >= 1");
  }
  if (window < 1) {
    throw UsageError("model: window must be >= 1");
  }
  if (num_classes < 2) {
    throw UsageError("model: num_classes must be >= 2");
  }
  if (!features.vocab_sizes.empty() && embed_dim < 1) {
    throw UsageError("model: embed_dim must be >= 1 when categorical fields exist");
  }
  if (input_dim() < 1) {
    throw UsageError("model: records have no features");
  }
  for (const std::size_t v : features.vocab_sizes) {
    if (v < 1) {
      throw UsageError("model: vocabulary sizes must be >= 1");
    }
  }
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named_tensors() {
  return all_tensors<Tensor*>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named_tensors() const {
  return all_tensors<const Tensor*>(*this);
}

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for (const auto& [name, t] : named_tensors()) {
    total += t->size();
  }
  return total;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams out = *this;
  for (auto& [name, t] : out.named_tensors()) {
    t->fill(0.0);
  }
  return out;
}

Classifier Classifier::init(const ModelConfig& config) {
  config.validate();
  Rng rng(config.seed);
  const std::size_t n = config.hidden;
  const std::size_t m = config.input_dim();

  Classifier clf;
  clf.config = config;
  if (config.cell == CellKind::Arn) {
    clf.params.cell = ArnParams::init(rng, n, m);
  } else {
    clf.params.cell = GruParams::init(rng, n, m);
  }
  clf.params.head_w =
      init_uniform(rng, {config.num_classes, n}, 1.0 / std::sqrt(static_cast<double>(n)));
  clf.params.head_b = Tensor({config.num_classes});
  const double embed_scale =
      config.embed_dim > 0 ? 1.0 / std::sqrt(static_cast<double>(config.embed_dim)) : 0.0;
  for (const std::size_t vocab : config.features.vocab_sizes) {
    clf.params.embeddings.push_back(init_uniform(rng, {vocab, config.embed_dim}, embed_scale));
  }
  return clf;
}

void Classifier::validate() const {
  config.validate();
  const std::size_t n = config.hidden;
  const std::size_t m = config.input_dim();
  if (config.cell == CellKind::Arn) {
    const auto* p = std::get_if<ArnParams>(&params.cell);
    if (p == nullptr) {
      throw ShapeError("classifier configured for ARN holds GRU parameters");
    }
    p->validate();
    expect_shape(p->wx, {n, m}, "ARN Wx");
  } else {
    const auto* p = std::get_if<GruParams>(&params.cell);
    if (p == nullptr) {
      throw ShapeError("classifier configured for GRU holds ARN parameters");
    }
    p->validate();
    expect_shape(p->w_r, {m + n, n}, "GRU W_R");
  }
  expect_shape(params.head_w, {config.num_classes, n}, "head weight");
  expect_shape(params.head_b, {config.num_classes}, "head bias");
  if (params.embeddings.size() != config.features.vocab_sizes.size()) {
    throw ShapeError("classifier has " + std::to_string(params.embeddings.size()) +
                     " embedding tables for " +
                     std::to_string(config.features.vocab_sizes.size()) + " categorical fields");
  }
  for (std::size_t f = 0; f < params.embeddings.size(); ++f) {
    expect_shape(params.embeddings[f], {config.features.vocab_sizes[f], config.embed_dim},
                 "embedding table");
  }
}

ForwardResult forward(const Classifier& clf, const WindowRef& window) {
  const auto& cfg = clf.config;
  if (window.steps != cfg.window) {
    throw ShapeError("forward: window has " + std::to_string(window.steps) +
                     " steps, model expects " + std::to_string(cfg.window));
  }
  if (window.width != cfg.features.raw_width()) {
    throw ShapeError("forward: records have " + std::to_string(window.width) +
                     " slots, model expects " + std::to_string(cfg.features.raw_width()));
  }
  if (window.values.size() != window.steps * window.width) {
    throw ShapeError("forward: window storage does not match steps x width");
  }

  ForwardResult out;
  out.inputs.reserve(window.steps);
  for (std::size_t t = 0; t < window.steps; ++t) {
    out.inputs.push_back(embed_step(clf, window.step(t)));
  }

  Tensor h({cfg.hidden});
  if (const auto* arn = std::get_if<ArnParams>(&clf.params.cell)) {
    std::vector<ArnStepTrace> traces;
    traces.reserve(window.steps);
    for (const Tensor& x : out.inputs) {
      traces.push_back(arn_step(*arn, h, x));
      h = traces.back().h_t;
    }
    out.traces = std::move(traces);
  } else {
    const auto& gru = std::get<GruParams>(clf.params.cell);
    std::vector<GruStepTrace> traces;
    traces.reserve(window.steps);
    for (const Tensor& x : out.inputs) {
      traces.push_back(gru_step(gru, h, x));
      h = traces.back().h_t;
    }
    out.traces = std::move(traces);
  }

  const Tensor logits = add(matvec(clf.params.head_w, h), clf.params.head_b);
  out.logits = logits.storage();
  out.probs = softmax(logits.values());
  out.final_hidden = std::move(h);
  return out;
}

int predict(const Classifier& clf, const WindowRef& window) {
  const auto result = forward(clf, window);
  return static_cast<int>(std::max_element(result.logits.begin(), result.logits.end()) -
                          result.logits.begin());
}

LossAndGrads loss_and_grads(const Classifier& clf, const SequenceBatch& batch) {
  std::vector<std::size_t> all(batch.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i] = i;
  }
  return loss_and_grads(clf, batch, all);
}

LossAndGrads loss_and_grads(const Classifier& clf, const SequenceBatch& batch,
                            std::span<const std::size_t> indices) {
  if (indices.empty()) {
    throw UsageError("loss_and_grads: batch is empty");
  }
  const auto& cfg = clf.config;
  const double inv_b = 1.0 / static_cast<double>(indices.size());
  const std::size_t numeric = cfg.features.numeric;
  const std::size_t e = cfg.embed_dim;

  LossAndGrads result;
  result.grads = clf.params.zeros_like();
  ModelParams& grads = result.grads;

  for (const std::size_t idx : indices) {
    if (idx >= batch.size()) {
      throw UsageError("loss_and_grads: window index out of range");
    }
    const int label = batch.labels[idx];
    if (label < 0 || static_cast<std::size_t>(label) >= cfg.num_classes) {
      throw UsageError("loss_and_grads: label " + std::to_string(label) + " outside [0, " +
                       std::to_string(cfg.num_classes) + ")");
    }
    const WindowRef window = batch.window(idx);
    const ForwardResult fwd = forward(clf, window);

    result.loss += (log_sum_exp(fwd.logits) - fwd.logits[static_cast<std::size_t>(label)]) * inv_b;
    const auto best = std::max_element(fwd.logits.begin(), fwd.logits.end()) - fwd.logits.begin();
    if (best == label) {
      ++result.correct;
    }

    Tensor grad_logits = Tensor::vector(fwd.probs);
    grad_logits[static_cast<std::size_t>(label)] -= 1.0;
    grad_logits = scale(grad_logits, inv_b);
    add_outer(grads.head_w, grad_logits, fwd.final_hidden);
    axpy(grads.head_b, 1.0, grad_logits);
    Tensor grad_h = matvec_transposed(clf.params.head_w, grad_logits);

    auto scatter_input = [&](std::size_t t, const Tensor& grad_x) {
      const auto raw = window.step(t);
      for (std::size_t f = 0; f < cfg.features.vocab_sizes.size(); ++f) {
        const auto row = static_cast<std::size_t>(raw[numeric + f]);
        auto dst = grads.embeddings[f].values().subspan(row * e, e);
        const auto src = grad_x.values().subspan(numeric + f * e, e);
        for (std::size_t k = 0; k < e; ++k) {
          dst[k] += src[k];
        }
      }
    };

    if (const auto* arn = std::get_if<ArnParams>(&clf.params.cell)) {
      const auto& traces = std::get<std::vector<ArnStepTrace>>(fwd.traces);
      for (std::size_t t = traces.size(); t-- > 0;) {
        ArnStepGrads sg = arn_step_backward(*arn, traces[t], grad_h);
        accumulate(grads, sg.params);
        scatter_input(t, sg.x_raw);
        grad_h = std::move(sg.h_prev);
      }
    } else {
      const auto& gru = std::get<GruParams>(clf.params.cell);
      const auto& traces = std::get<std::vector<GruStepTrace>>(fwd.traces);
      for (std::size_t t = traces.size(); t-- > 0;) {
        GruStepGrads sg = gru_step_backward(gru, traces[t], grad_h);
        accumulate(grads, sg.params);
        scatter_input(t, sg.x_raw);
        grad_h = std::move(sg.h_prev);
      }
    }
  }
  return result;
}

double mean_loss(const Classifier& clf, const SequenceBatch& batch) {
  if (batch.empty()) {
    throw UsageError("mean_loss: batch is empty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto fwd = forward(clf, batch.window(i));
    total += log_sum_exp(fwd.logits) - fwd.logits[static_cast<std::size_t>(batch.labels[i])];
  }
  return total / static_cast<double>(batch.size());
}

void SequenceBatch::push(std::span<const double> window_values, int label) {
  if (window_values.size() != steps * width) {
    throw ShapeError("SequenceBatch::push: window has " + std::to_string(window_values.size()) +
                     " values, expected " + std::to_string(steps * width));
  }
  values.insert(values.end(), window_values.begin(), window_values.end());
  labels.push_back(label);
}

std::uint64_t SequenceBatch::content_hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t dims[2] = {steps, width};
  mix(dims, sizeof dims);
  for (const double v : values) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    mix(&bits, sizeof bits);
  }
  for (const int label : labels) {
    const auto l = static_cast<std::int64_t>(label);
    mix(&l, sizeof l);
  }
  return h;
}

}  // namespace arnids
