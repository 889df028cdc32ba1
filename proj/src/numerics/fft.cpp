#include "dcnn/fft.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "dcnn/error.hpp"

namespace dcnn {

bool is_power_of_two(std::size_t n) { return std::has_single_bit(n); }

std::size_t next_power_of_two(std::size_t n) { return std::bit_ceil(n == 0 ? std::size_t{1} : n); }

void fft_inplace(std::span<Complex> a, bool inverse) {
  const std::size_t n = a.size();
  require(is_power_of_two(n), "fft: length " + std::to_string(n) + " is not a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // Twiddles for the full length, evaluated directly (a running product drifts
  // by ~1e-13 at n=4096) and cached per thread.
  thread_local std::vector<Complex> roots;
  if (roots.size() != n / 2) {
    roots.resize(n / 2);
    const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) roots[k] = std::polar(1.0, step * static_cast<double>(k));
  }
  const double sign = inverse ? -1.0 : 1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const double wr = roots[k * stride].real();
        const double wi = sign * roots[k * stride].imag();
        const Complex u = a[start + k];
        const Complex x = a[start + k + half];
        const Complex v(x.real() * wr - x.imag() * wi, x.real() * wi + x.imag() * wr);
        a[start + k] = u + v;
        a[start + k + half] = u - v;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (Complex& c : a) c *= scale;
  }
}

std::vector<Complex> fft_real(std::span<const double> x, std::size_t n) {
  require(!x.empty(), "fft_real: empty input");
  require(is_power_of_two(n), "fft_real: length " + std::to_string(n) + " is not a power of two");
  require(n >= x.size(), "fft_real: transform length shorter than input");
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = Complex(x[i], 0.0);
  fft_inplace(out, false);
  return out;
}

std::vector<double> ifft_real(std::span<const Complex> spectrum) {
  std::vector<Complex> tmp(spectrum.begin(), spectrum.end());
  fft_inplace(tmp, true);
  std::vector<double> out(tmp.size());
  for (std::size_t i = 0; i < tmp.size(); ++i) out[i] = tmp[i].real();
  return out;
}

}  // namespace dcnn
