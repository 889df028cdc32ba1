#pragma once

// Data-parallel inner loops shared by convolution, the dense head, and the
// optimizer. Each kernel has a scalar reference implementation plus AVX2
// (x86-64) and NEON (aarch64) variants. The variant is picked at runtime from
// what the CPU reports, and can be pinned to Scalar for bit-reproducible runs.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace dcnn::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum_squares)(const double* x, std::size_t n);
  // accum += g*g; theta -= lr * g / (sqrt(accum) + eps); g = 0
  void (*adagrad)(double* theta, double* grad, double* accum, std::size_t n, double lr, double eps);
};

/// Variants compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();

/// Table for a specific variant; throws InvalidArgument if unavailable.
const KernelTable& kernels_for(Isa isa);

/// Currently selected table. Defaults to the widest available variant.
const KernelTable& active();

/// Pins the process-wide selection. Meant to be called once at startup.
void select(Isa isa);

// Dispatching wrappers over active().
double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double sum_squares(std::span<const double> x);

namespace detail {
extern const KernelTable kScalarTable;
#if defined(DCNN_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
#if defined(DCNN_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif
}  // namespace detail

}  // namespace dcnn::simd
