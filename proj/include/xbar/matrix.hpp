/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_MATRIX_HPP
#define XBAR_MATRIX_HPP

#include <cstddef>
#include <vector>

namespace xbar {

/// Dense row-major matrix of doubles. Small and boring on purpose: every
/// array in this project fits a single crossbar core.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double *data() { return data_.data(); }
  const double *data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  bool same_shape(const Matrix &o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

} // namespace xbar

#endif // XBAR_MATRIX_HPP
