#include <cmath>

#include "dcnn/simd.hpp"

namespace dcnn::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void adagrad_scalar(double* theta, double* grad, double* accum, std::size_t n, double lr, double eps) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    accum[i] += g * g;
    theta[i] -= lr * g / (std::sqrt(accum[i]) + eps);
    grad[i] = 0.0;
  }
}

}  // namespace

const KernelTable kScalarTable{Isa::Scalar, dot_scalar, axpy_scalar, sum_squares_scalar, adagrad_scalar};

}  // namespace dcnn::simd::detail
