#include <atomic>
#include <string>

#include "dcnn/error.hpp"
#include "dcnn/simd.hpp"

namespace dcnn::simd {
namespace {

bool cpu_has_avx2() {
#if defined(DCNN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* widest() {
#if defined(DCNN_HAVE_AVX2)
  if (cpu_has_avx2()) return &detail::kAvx2Table;
#endif
#if defined(DCNN_HAVE_NEON)
  return &detail::kNeonTable;
#else
  return &detail::kScalarTable;
#endif
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{widest()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out{Isa::Scalar};
#if defined(DCNN_HAVE_AVX2)
  if (cpu_has_avx2()) out.push_back(Isa::Avx2);
#endif
#if defined(DCNN_HAVE_NEON)
  out.push_back(Isa::Neon);
#endif
  return out;
}

const KernelTable& kernels_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return detail::kScalarTable;
    case Isa::Avx2:
#if defined(DCNN_HAVE_AVX2)
      if (cpu_has_avx2()) return detail::kAvx2Table;
#endif
      break;
    case Isa::Neon:
#if defined(DCNN_HAVE_NEON)
      return detail::kNeonTable;
#endif
      break;
  }
  throw InvalidArgument("simd: variant '" + std::string(isa_name(isa)) + "' is not available on this machine");
}

const KernelTable& active() { return *slot().load(std::memory_order_relaxed); }

void select(Isa isa) { slot().store(&kernels_for(isa), std::memory_order_relaxed); }

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "simd::dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "simd::axpy: length mismatch");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

}  // namespace dcnn::simd
