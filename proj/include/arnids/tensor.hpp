// Copyright 2026 The arnids Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace arnids {

class Rng;

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);

/// Dense row-major array of doubles with rank 1 (vector) or rank 2 (matrix).
///
/// Every shape entry is positive and the flat storage always holds exactly
/// product(shape) values.
class Tensor {
 public:
  Tensor() = default;

  /// Zero-filled tensor of the given shape.
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  /// Rows of a matrix; a vector reports its length.
  std::size_t rows() const noexcept { return shape_.empty() ? 0 : shape_[0]; }
  /// Columns of a matrix; a vector reports 1.
  std::size_t cols() const noexcept { return shape_.size() == 2 ? shape_[1] : 1; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  const std::vector<double>& storage() const noexcept { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }

  void fill(double value);
  bool all_finite() const noexcept;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Matrix product a[p x q] . b[q x r]. A rank-1 `b` is treated as a column
/// and the result is a rank-1 vector of length p.
Tensor matmul(const Tensor& a, const Tensor& b);

/// w[r x c] . x[c] -> [r]
Tensor matvec(const Tensor& w, const Tensor& x);
/// w^T . g for w[r x c], g[r] -> [c]
Tensor matvec_transposed(const Tensor& w, const Tensor& g);
/// Accumulates a (x) b into `out` (out[i][j] += a[i] * b[j]).
void add_outer(Tensor& out, const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);
double dot(const Tensor& a, const Tensor& b);
/// y += alpha * x
void axpy(Tensor& y, double alpha, const Tensor& x);
/// Concatenates two vectors end to end.
Tensor concat(const Tensor& a, const Tensor& b);
/// Elements [offset, offset + length) of a vector.
Tensor slice(const Tensor& a, std::size_t offset, std::size_t length);

double sigmoid(double x) noexcept;
Tensor sigmoid(const Tensor& x);
Tensor tanh_act(const Tensor& x);

/// Max-subtracted softmax. Requires at least one finite score.
std::vector<double> softmax(std::span<const double> scores);

/// Two equal-length vectors become the rows of a 2 x n matrix.
Tensor stack_rows(const Tensor& a, const Tensor& b);
std::pair<Tensor, Tensor> unstack_rows(const Tensor& stacked);

/// I.i.d. uniform draws in [-scale, +scale].
Tensor init_uniform(Rng& rng, Shape shape, double scale);

/// Throws ShapeError unless `t` has exactly `expected` shape.
void expect_shape(const Tensor& t, const Shape& expected, const char* what);

}  // namespace arnids
