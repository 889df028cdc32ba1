#pragma once

// Deliberately naive reference implementations. They share no code with the
// library kernels they are compared against.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dcnn/conv.hpp"
#include "dcnn/network.hpp"

namespace dcnn::oracle {

/// O(n^2) discrete Fourier transform.
std::vector<std::complex<double>> dft(std::span<const double> x);

/// Convolution straight from the index formula, one output at a time.
std::vector<double> conv(std::span<const double> s, std::span<const double> m, ConvKind kind);

struct KMax {
  std::vector<double> pooled;
  std::vector<std::size_t> selected;
};

/// Sort (value, index) pairs by value descending then index ascending, keep
/// the first k, re-sort by index.
KMax kmax(std::span<const double> p, std::size_t k);

/// ceil() in floating point, then clamp below by k_top.
std::size_t dynamic_k(std::size_t layers, std::size_t k_top, std::size_t layer, std::size_t s);

/// Penultimate feature length from a shape walk over the layers for one sentence length.
std::size_t feature_length(const NetworkSpec& spec, std::size_t s);

/// Layer shapes (rows x cols) of one DCNN pass.
struct LayerShapes {
  std::size_t conv_rows, conv_cols;
  std::size_t folded_rows;
  std::size_t pooled_cols;
};
std::vector<LayerShapes> layer_shapes(const NetworkSpec& spec, std::size_t s);

}  // namespace dcnn::oracle
