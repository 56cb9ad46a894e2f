#include "mvfc/matrix.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "mvfc/kernels.hpp"

namespace mvfc {
namespace {

void require(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t nrows = rows.size();
  const std::size_t ncols = nrows == 0 ? 0 : rows.begin()->size();
  Matrix out(nrows, ncols);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != ncols) throw std::invalid_argument("Matrix::from_rows: ragged rows");
    std::size_t c = 0;
    for (double v : row) out(r, c++) = v;
    ++r;
  }
  return out;
}

Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t c = 0; c < a.cols(); ++c) {
    for (std::size_t r = 0; r < a.rows(); ++r) out(c, r) = a(r, c);
  }
  return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "multiply", a, b);
  Matrix out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto dst = out.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) kernels::axpy(b(k, j), a.col(k), dst);
  }
  return out;
}

Matrix multiply_transposed(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "multiply_transposed", a, b);
  Matrix out(a.rows(), b.rows());
  for (std::size_t j = 0; j < b.rows(); ++j) {
    auto dst = out.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) kernels::axpy(b(j, k), a.col(k), dst);
  }
  return out;
}

Matrix transposed_multiply(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "transposed_multiply", a, b);
  Matrix out(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < a.cols(); ++i) out(i, j) = kernels::dot(a.col(i), b.col(j));
  }
  return out;
}

double frobenius_squared(const Matrix& a) { return kernels::dot(a.values(), a.values()); }

double min_value(const Matrix& a) {
  if (a.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(a.values().begin(), a.values().end());
}

double max_value(const Matrix& a) {
  if (a.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::max_element(a.values().begin(), a.values().end());
}

}  // namespace mvfc
