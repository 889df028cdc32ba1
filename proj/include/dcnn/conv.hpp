#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dcnn/mat.hpp"

namespace dcnn {

/// Narrow keeps only windows that lie fully inside the sequence (length s-m+1,
/// needs s >= m). Wide treats out-of-range inputs as zero (length s+m-1).
enum class ConvKind { Narrow, Wide };

/// Direct is a sliding window; Fft multiplies spectra; Auto picks by size.
enum class ConvPath { Auto, Direct, Fft };

/// Auto switches to the FFT path once both the input length and the filter
/// width reach this. From tools/conv_bench on an AVX2 machine: direct wins at
/// s=512, m=256 (0.64x the FFT time) and loses at s=512, m=512 (1.33x), and
/// wins everywhere at sentence lengths.
inline constexpr std::size_t kFftCrossoverWidth = 384;

std::size_t conv_output_length(std::size_t s, std::size_t m, ConvKind kind);

/// One-dimensional convolution: out_j = sum_t m[t] * s[j - (m-1) + t], with
/// j running over the wide or narrow range. The filter is applied in forward
/// order against each m-gram.
std::vector<double> conv1d(std::span<const double> s, std::span<const double> m, ConvKind kind,
                           ConvPath path = ConvPath::Auto);

/// Row i of the output is conv1d(input row i, filter row i).
Mat conv_rows(MatView input, MatView filter, ConvKind kind, ConvPath path = ConvPath::Auto);

/// Like conv_rows, but adds the result into `out` (which must already have the output shape).
void conv_rows_accumulate(MatView input, MatView filter, ConvKind kind, MatSpan out,
                          ConvPath path = ConvPath::Auto);

struct ConvGrads {
  Mat input;
  Mat filter;
};

/// Gradients of sum(upstream * conv_rows(input, filter, kind)).
ConvGrads conv_rows_grad(MatView input, MatView filter, ConvKind kind, MatView upstream);

/// Accumulating form used by the network's backward pass.
void conv_rows_grad_accumulate(MatView input, MatView filter, ConvKind kind, MatView upstream,
                               MatSpan grad_input, MatSpan grad_filter);

}  // namespace dcnn
