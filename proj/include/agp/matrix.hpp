// Copyright 2026 The AGP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

#ifndef AGP_MATRIX_HPP_
#define AGP_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace agp {

/// Dense row-major matrix of doubles. Sizes here never exceed a few hundred,
/// so the naive kernels are all we need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  void fill(double v);
  Matrix& operator+=(const Matrix& o);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& a);

/// Mean over rows, returned as a 1 x cols matrix.
Matrix column_mean(const Matrix& a);
/// Sum over rows, returned as a 1 x cols matrix.
Matrix column_sum(const Matrix& a);

/// First `n` rows of `a`.
Matrix top_rows(const Matrix& a, std::size_t n);

}  // namespace agp

#endif  // AGP_MATRIX_HPP_
