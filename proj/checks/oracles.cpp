#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace dcnn::oracle {

std::vector<std::complex<double>> dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> conv(std::span<const double> s, std::span<const double> m, ConvKind kind) {
  const long S = static_cast<long>(s.size());
  const long M = static_cast<long>(m.size());
  long first = 0, last = S + M - 2;  // wide range of j, inclusive
  if (kind == ConvKind::Narrow) {
    first = M - 1;
    last = S - 1;
  }
  std::vector<double> out;
  for (long j = first; j <= last; ++j) {
    double acc = 0.0;
    for (long t = 0; t < M; ++t) {
      const long i = j - (M - 1) + t;
      if (i >= 0 && i < S) acc += m[t] * s[i];
    }
    out.push_back(acc);
  }
  return out;
}

KMax kmax(std::span<const double> p, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> pairs;
  for (std::size_t i = 0; i < p.size(); ++i) pairs.emplace_back(p[i], i);
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  pairs.resize(std::min(k, pairs.size()));
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  KMax out;
  out.pooled.assign(k, 0.0);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    out.pooled[i] = pairs[i].first;
    out.selected.push_back(pairs[i].second);
  }
  return out;
}

std::size_t dynamic_k(std::size_t layers, std::size_t k_top, std::size_t layer, std::size_t s) {
  const double raw = std::ceil(static_cast<double>(layers - layer) / static_cast<double>(layers) *
                               static_cast<double>(s) - 1e-9);
  return std::max(k_top, static_cast<std::size_t>(raw));
}

std::vector<LayerShapes> layer_shapes(const NetworkSpec& spec, std::size_t s) {
  std::vector<LayerShapes> out;
  std::size_t rows = spec.embed_dim;
  std::size_t cols = s;
  const std::size_t L = spec.layers.size();
  for (std::size_t l = 0; l < L; ++l) {
    const ConvLayerSpec& layer = spec.layers[l];
    LayerShapes sh{};
    sh.conv_rows = rows;
    sh.conv_cols = cols + layer.width - 1;
    sh.folded_rows = layer.fold ? rows / 2 : rows;
    const std::size_t k = layer.fixed_k ? layer.fixed_k : (l + 1 == L ? spec.k_top : dynamic_k(L, spec.k_top, l + 1, s));
    sh.pooled_cols = k;
    out.push_back(sh);
    rows = sh.folded_rows;
    cols = k;
  }
  return out;
}

std::size_t feature_length(const NetworkSpec& spec, std::size_t s) {
  switch (spec.kind) {
    case ModelKind::Nbow:
      return spec.embed_dim;
    case ModelKind::MaxTdnn:
      return spec.layers.at(0).maps * spec.embed_dim;
    case ModelKind::Dcnn: {
      const auto shapes = layer_shapes(spec, s);
      return shapes.back().folded_rows * shapes.back().pooled_cols * spec.layers.back().maps;
    }
  }
  return 0;
}

}  // namespace dcnn::oracle
