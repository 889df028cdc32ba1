#include "dcnn/conv.hpp"

#include <algorithm>
#include <string>

#include "dcnn/error.hpp"
#include "dcnn/fft.hpp"
#include "dcnn/simd.hpp"

namespace dcnn {
namespace {

void check_kind(std::size_t s, std::size_t m, ConvKind kind) {
  require(s >= 1 && m >= 1, "conv: sequence and filter must be non-empty");
  if (kind == ConvKind::Narrow) {
    require(s >= m, "conv: narrow convolution needs input length " + std::to_string(s) +
                        " >= filter width " + std::to_string(m));
  }
}

bool use_fft(std::size_t s, std::size_t m, ConvPath path) {
  switch (path) {
    case ConvPath::Direct: return false;
    case ConvPath::Fft: return true;
    case ConvPath::Auto: return std::min(s, m) >= kFftCrossoverWidth;
  }
  return false;
}

// out has conv_output_length(s.size(), m.size(), kind) entries; results are added.
void accumulate_direct(std::span<const double> s, std::span<const double> m, ConvKind kind,
                       std::span<double> out) {
  const auto& k = simd::active();
  const std::size_t len_s = s.size();
  const std::size_t len_m = m.size();
  if (kind == ConvKind::Wide) {
    // Tap t contributes m[t]*s[i] to position i + (m-1-t).
    for (std::size_t t = 0; t < len_m; ++t) k.axpy(m[t], s.data(), out.data() + (len_m - 1 - t), len_s);
  } else {
    const std::size_t n = len_s - len_m + 1;
    for (std::size_t t = 0; t < len_m; ++t) k.axpy(m[t], s.data() + t, out.data(), n);
  }
}

void accumulate_fft(std::span<const double> s, std::span<const double> m, ConvKind kind, std::span<double> out) {
  const std::size_t len_s = s.size();
  const std::size_t len_m = m.size();
  const std::size_t wide = len_s + len_m - 1;
  const std::size_t n = next_power_of_two(wide);

  // Forward-order taps against each m-gram is a linear convolution with the reversed filter.
  std::vector<double> reversed(m.rbegin(), m.rend());
  std::vector<Complex> a = fft_real(s, n);
  const std::vector<Complex> b = fft_real(reversed, n);
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
  fft_inplace(a, true);

  const std::size_t first = kind == ConvKind::Wide ? 0 : len_m - 1;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += a[first + j].real();
}

}  // namespace

std::size_t conv_output_length(std::size_t s, std::size_t m, ConvKind kind) {
  check_kind(s, m, kind);
  return kind == ConvKind::Wide ? s + m - 1 : s - m + 1;
}

std::vector<double> conv1d(std::span<const double> s, std::span<const double> m, ConvKind kind, ConvPath path) {
  std::vector<double> out(conv_output_length(s.size(), m.size(), kind), 0.0);
  if (use_fft(s.size(), m.size(), path)) {
    accumulate_fft(s, m, kind, out);
  } else {
    accumulate_direct(s, m, kind, out);
  }
  return out;
}

void conv_rows_accumulate(MatView input, MatView filter, ConvKind kind, MatSpan out, ConvPath path) {
  require(input.rows == filter.rows, "conv_rows: input has " + std::to_string(input.rows) +
                                         " rows but filter has " + std::to_string(filter.rows));
  const std::size_t len = conv_output_length(input.cols, filter.cols, kind);
  require(out.rows == input.rows && out.cols == len, "conv_rows: output buffer has the wrong shape");
  const bool fft = use_fft(input.cols, filter.cols, path);
  for (std::size_t r = 0; r < input.rows; ++r) {
    if (fft) {
      accumulate_fft(input.row(r), filter.row(r), kind, out.row(r));
    } else {
      accumulate_direct(input.row(r), filter.row(r), kind, out.row(r));
    }
  }
}

Mat conv_rows(MatView input, MatView filter, ConvKind kind, ConvPath path) {
  require(input.rows == filter.rows, "conv_rows: input has " + std::to_string(input.rows) +
                                         " rows but filter has " + std::to_string(filter.rows));
  Mat out(input.rows, conv_output_length(input.cols, filter.cols, kind));
  conv_rows_accumulate(input, filter, kind, out, path);
  return out;
}

void conv_rows_grad_accumulate(MatView input, MatView filter, ConvKind kind, MatView upstream,
                               MatSpan grad_input, MatSpan grad_filter) {
  require(input.rows == filter.rows, "conv_rows_grad: row mismatch between input and filter");
  const std::size_t s = input.cols;
  const std::size_t m = filter.cols;
  const std::size_t len = conv_output_length(s, m, kind);
  require(upstream.rows == input.rows && upstream.cols == len,
          "conv_rows_grad: upstream shape does not match the convolution output");
  require(grad_input.rows == input.rows && grad_input.cols == s, "conv_rows_grad: grad_input has the wrong shape");
  require(grad_filter.rows == filter.rows && grad_filter.cols == m,
          "conv_rows_grad: grad_filter has the wrong shape");

  const auto& k = simd::active();
  for (std::size_t r = 0; r < input.rows; ++r) {
    const double* in = input.row(r).data();
    const double* f = filter.row(r).data();
    const double* up = upstream.row(r).data();
    double* gin = grad_input.row(r).data();
    double* gf = grad_filter.row(r).data();
    if (kind == ConvKind::Wide) {
      for (std::size_t t = 0; t < m; ++t) {
        const double* shifted = up + (m - 1 - t);
        k.axpy(f[t], shifted, gin, s);
        gf[t] += k.dot(shifted, in, s);
      }
    } else {
      for (std::size_t t = 0; t < m; ++t) {
        k.axpy(f[t], up, gin + t, len);
        gf[t] += k.dot(up, in + t, len);
      }
    }
  }
}

ConvGrads conv_rows_grad(MatView input, MatView filter, ConvKind kind, MatView upstream) {
  ConvGrads g{Mat(input.rows, input.cols), Mat(filter.rows, filter.cols)};
  conv_rows_grad_accumulate(input, filter, kind, upstream, g.input, g.filter);
  return g;
}

}  // namespace dcnn
