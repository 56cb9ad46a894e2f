#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mvfc/kernels.hpp"

namespace mvfc::kernels {

#if defined(MVFC_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif
#if defined(MVFC_HAVE_NEON)
namespace neon {
extern const KernelTable kTable;
}
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MVFC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* detect() {
  if (const char* env = std::getenv("MVFC_KERNELS")) {
    const std::string requested(env);
    if (requested == "scalar") return &scalar::kTable;
    if (requested == "avx2" && supported(Isa::Avx2)) return &table(Isa::Avx2);
    if (requested == "neon" && supported(Isa::Neon)) return &table(Isa::Neon);
  }
  if (supported(Isa::Avx2)) return &table(Isa::Avx2);
  if (supported(Isa::Neon)) return &table(Isa::Neon);
  return &scalar::kTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{detect()};
  return ptr;
}

}  // namespace

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
      return cpu_has_avx2();
    case Isa::Neon:
#if defined(MVFC_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw std::invalid_argument("kernel variant not supported on this CPU: " + std::string(name(isa)));
  }
  switch (isa) {
#if defined(MVFC_HAVE_AVX2)
    case Isa::Avx2:
      return avx2::kTable;
#endif
#if defined(MVFC_HAVE_NEON)
    case Isa::Neon:
      return neon::kTable;
#endif
    default:
      return scalar::kTable;
  }
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

void select(Isa isa) { current().store(&table(isa), std::memory_order_relaxed); }

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace mvfc::kernels
