#pragma once

// Inner-loop kernels shared by every solver.
//
// Each kernel has a portable scalar reference and, where the target supports
// it, an AVX2/FMA or NEON variant. The variant is chosen once at startup from
// the CPU's capabilities and can be overridden with MVFC_KERNELS=scalar|avx2|neon
// or select().
//
// Elementwise kernels (axpy, multiplicative_update) are bit-identical across
// variants. Reductions (dot, squared_distance) reassociate the sum and agree
// with the scalar reference to a few ulps of the sum of absolute terms.

#include <cstddef>
#include <span>
#include <string_view>

namespace mvfc::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // value[i] *= numer[i] / max(denom[i], floor)
  void (*multiplicative_update)(double* value, const double* numer, const double* denom,
                                double floor, std::size_t n);
};

bool supported(Isa isa);
const KernelTable& table(Isa isa);
const KernelTable& active();
void select(Isa isa);
std::string_view name(Isa isa);

namespace scalar {
extern const KernelTable kTable;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void multiplicative_update(std::span<double> value, std::span<const double> numer,
                                  std::span<const double> denom, double floor) {
  active().multiplicative_update(value.data(), numer.data(), denom.data(), floor, value.size());
}

}  // namespace mvfc::kernels
