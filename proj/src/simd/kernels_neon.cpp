// Advanced SIMD is part of the aarch64 baseline, so no runtime probe is needed.
#include <arm_neon.h>

#include <cmath>

#include "dcnn/simd.hpp"

namespace dcnn::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += x[i] * x[i];
  return s;
}

void adagrad_neon(double* theta, double* grad, double* accum, std::size_t n, double lr, double eps) {
  const float64x2_t vlr = vdupq_n_f64(lr);
  const float64x2_t veps = vdupq_n_f64(eps);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t acc = vfmaq_f64(vld1q_f64(accum + i), g, g);
    vst1q_f64(accum + i, acc);
    const float64x2_t step = vdivq_f64(vmulq_f64(vlr, g), vaddq_f64(vsqrtq_f64(acc), veps));
    vst1q_f64(theta + i, vsubq_f64(vld1q_f64(theta + i), step));
    vst1q_f64(grad + i, zero);
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    accum[i] += g * g;
    theta[i] -= lr * g / (std::sqrt(accum[i]) + eps);
    grad[i] = 0.0;
  }
}

}  // namespace

const KernelTable kNeonTable{Isa::Neon, dot_neon, axpy_neon, sum_squares_neon, adagrad_neon};

}  // namespace dcnn::simd::detail
