#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mvfc {

/// Dense column-major matrix of doubles.
///
/// Columns are contiguous: for a features x samples data matrix each sample
/// is one span, which is what the distance and update kernels consume.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds a matrix from row-wise literals, e.g. {{1, 2}, {3, 4}}.
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

  std::span<double> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
  std::span<const double> col(std::size_t c) const noexcept {
    return {data_.data() + c * rows_, rows_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix transpose(const Matrix& a);

// A * B
Matrix multiply(const Matrix& a, const Matrix& b);
// A * B^T
Matrix multiply_transposed(const Matrix& a, const Matrix& b);
// A^T * B
Matrix transposed_multiply(const Matrix& a, const Matrix& b);

double frobenius_squared(const Matrix& a);
double min_value(const Matrix& a);
double max_value(const Matrix& a);

}  // namespace mvfc
