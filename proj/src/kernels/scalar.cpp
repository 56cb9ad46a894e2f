#include "mvfc/kernels.hpp"

#include <algorithm>

namespace mvfc::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void multiplicative_update(double* value, const double* numer, const double* denom, double floor,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) value[i] *= numer[i] / std::max(denom[i], floor);
}

}  // namespace

const KernelTable kTable{Isa::Scalar, &dot, &squared_distance, &axpy, &multiplicative_update};

}  // namespace mvfc::kernels::scalar
