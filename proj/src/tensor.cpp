// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#include "arnids/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "arnids/error.hpp"
#include "arnids/rng.hpp"

namespace arnids {

namespace {

std::size_t element_count(const Shape& shape) {
  if (shape.empty() || shape.size() > 2) {
    throw ShapeError("tensor rank must be 1 or 2, got shape " + shape_to_string(shape));
  }
  std::size_t count = 1;
  for (const std::size_t dim : shape) {
    if (dim == 0) {
      throw ShapeError("tensor dimensions must be positive, got " + shape_to_string(shape));
    }
    count *= dim;
  }
  return count;
}

void require_vector(const Tensor& t, const char* op) {
  if (t.rank() != 1) {
    throw ShapeError(std::string(op) + ": expected a vector, got " + shape_to_string(t.shape()));
  }
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
  }
}

template <typename Fn>
Tensor map(const Tensor& x, Fn fn) {
  Tensor out = Tensor::zeros_like(x);
  std::transform(x.values().begin(), x.values().end(), out.values().begin(), fn);
  return out;
}

template <typename Fn>
Tensor zip(const Tensor& a, const Tensor& b, const char* op, Fn fn) {
  require_same(a, b, op);
  Tensor out = Tensor::zeros_like(a);
  std::transform(a.values().begin(), a.values().end(), b.values().begin(),
                 out.values().begin(), fn);
  return out;
}

}  // namespace

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) {
      os << 'x';
    }
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)), data_(element_count(shape_), 0.0) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != element_count(shape_)) {
    throw ShapeError("tensor of shape " + shape_to_string(shape_) + " needs " +
                     std::to_string(element_count(shape_)) + " values, got " +
                     std::to_string(data_.size()));
  }
}

Tensor Tensor::vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void expect_shape(const Tensor& t, const Shape& expected, const char* what) {
  if (t.shape() != expected) {
    throw ShapeError(std::string(what) + ": expected shape " + shape_to_string(expected) +
                     ", got " + shape_to_string(t.shape()));
  }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2) {
    throw ShapeError("matmul: left operand must be a matrix, got " + shape_to_string(a.shape()));
  }
  const std::size_t p = a.rows();
  const std::size_t q = a.cols();
  const std::size_t r = b.cols();
  if (b.rows() != q) {
    throw ShapeError("matmul: inner dimensions disagree for " + shape_to_string(a.shape()) +
                     " . " + shape_to_string(b.shape()));
  }
  Tensor out = b.rank() == 1 ? Tensor({p}) : Tensor({p, r});
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t k = 0; k < q; ++k) {
      const double aik = a.at(i, k);
      for (std::size_t j = 0; j < r; ++j) {
        out[i * r + j] += aik * b[k * r + j];
      }
    }
  }
  return out;
}

Tensor matvec(const Tensor& w, const Tensor& x) {
  require_vector(x, "matvec");
  if (w.rank() != 2 || w.cols() != x.size()) {
    throw ShapeError("matvec: cannot apply " + shape_to_string(w.shape()) + " to " +
                     shape_to_string(x.shape()));
  }
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  Tensor out({rows});
  const double* wp = w.values().data();
  const double* xp = x.values().data();
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = wp + i * cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      acc += row[j] * xp[j];
    }
    out[i] = acc;
  }
  return out;
}

Tensor matvec_transposed(const Tensor& w, const Tensor& g) {
  require_vector(g, "matvec_transposed");
  if (w.rank() != 2 || w.rows() != g.size()) {
    throw ShapeError("matvec_transposed: cannot apply transpose of " +
                     shape_to_string(w.shape()) + " to " + shape_to_string(g.shape()));
  }
  const std::size_t rows = w.rows();
  const std::size_t cols = w.cols();
  Tensor out({cols});
  for (std::size_t i = 0; i < rows; ++i) {
    const double gi = g[i];
    if (gi == 0.0) {
      continue;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out[j] += w.at(i, j) * gi;
    }
  }
  return out;
}

void add_outer(Tensor& out, const Tensor& a, const Tensor& b) {
  require_vector(a, "add_outer");
  require_vector(b, "add_outer");
  expect_shape(out, {a.size(), b.size()}, "add_outer");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) {
      continue;
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      out.at(i, j) += ai * b[j];
    }
  }
}

Tensor add(const Tensor& a, const Tensor& b) { return zip(a, b, "add", std::plus<>{}); }

Tensor sub(const Tensor& a, const Tensor& b) { return zip(a, b, "sub", std::minus<>{}); }

Tensor hadamard(const Tensor& a, const Tensor& b) {
  return zip(a, b, "hadamard", std::multiplies<>{});
}

Tensor scale(const Tensor& a, double factor) {
  return map(a, [factor](double v) { return v * factor; });
}

double dot(const Tensor& a, const Tensor& b) {
  require_same(a, b, "dot");
  return std::inner_product(a.values().begin(), a.values().end(), b.values().begin(), 0.0);
}

void axpy(Tensor& y, double alpha, const Tensor& x) {
  require_same(y, x, "axpy");
  auto yv = y.values();
  auto xv = x.values();
  for (std::size_t i = 0; i < yv.size(); ++i) {
    yv[i] += alpha * xv[i];
  }
}

Tensor concat(const Tensor& a, const Tensor& b) {
  require_vector(a, "concat");
  require_vector(b, "concat");
  std::vector<double> out(a.storage());
  out.insert(out.end(), b.values().begin(), b.values().end());
  return Tensor::vector(std::move(out));
}

Tensor slice(const Tensor& a, std::size_t offset, std::size_t length) {
  require_vector(a, "slice");
  if (offset + length > a.size()) {
    throw ShapeError("slice: range [" + std::to_string(offset) + ", " +
                     std::to_string(offset + length) + ") outside " +
                     shape_to_string(a.shape()));
  }
  const auto first = a.values().begin() + static_cast<std::ptrdiff_t>(offset);
  return Tensor::vector(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(length)));
}

double sigmoid(double x) noexcept {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& x) {
  return map(x, [](double v) { return sigmoid(v); });
}

Tensor tanh_act(const Tensor& x) {
  return map(x, [](double v) { return std::tanh(v); });
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) {
    throw UsageError("softmax: needs at least one score");
  }
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    total += out[i];
  }
  for (double& v : out) {
    v /= total;
  }
  return out;
}

Tensor stack_rows(const Tensor& a, const Tensor& b) {
  require_vector(a, "stack_rows");
  require_same(a, b, "stack_rows");
  std::vector<double> out(a.storage());
  out.insert(out.end(), b.values().begin(), b.values().end());
  return Tensor::matrix(2, a.size(), std::move(out));
}

std::pair<Tensor, Tensor> unstack_rows(const Tensor& stacked) {
  if (stacked.rank() != 2 || stacked.rows() != 2) {
    throw ShapeError("unstack_rows: expected a 2 x n matrix, got " +
                     shape_to_string(stacked.shape()));
  }
  const std::size_t n = stacked.cols();
  const auto v = stacked.values();
  return {Tensor::vector({v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)}),
          Tensor::vector({v.begin() + static_cast<std::ptrdiff_t>(n), v.end()})};
}

Tensor init_uniform(Rng& rng, Shape shape, double scale) {
  if (scale < 0.0) {
    throw UsageError("init_uniform: scale must be non-negative");
  }
  Tensor out(std::move(shape));
  if (scale == 0.0) {
    return out;
  }
  for (double& v : out.values()) {
    v = rng.uniform(-scale, scale);
  }
  return out;
}

}  // namespace arnids
