#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dcnn {

using Complex = std::complex<double>;

bool is_power_of_two(std::size_t n);

/// Smallest power of two >= n (n >= 1).
std::size_t next_power_of_two(std::size_t n);

/// In-place iterative radix-2 transform. inverse=true applies the 1/n scale.
void fft_inplace(std::span<Complex> a, bool inverse);

/// DFT of x zero-padded to length n. n must be a power of two >= x.size().
std::vector<Complex> fft_real(std::span<const double> x, std::size_t n);

/// Inverse transform; returns the real parts.
std::vector<double> ifft_real(std::span<const Complex> spectrum);

}  // namespace dcnn
