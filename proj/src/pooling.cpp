#include "dcnn/pooling.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "dcnn/error.hpp"

namespace dcnn {

KMaxResult kmax(std::span<const double> p, std::size_t k) {
  require(k >= 1, "kmax: k must be at least 1");
  KMaxResult out;
  out.pooled.assign(k, 0.0);

  if (p.size() <= k) {
    out.selected.resize(p.size());
    std::iota(out.selected.begin(), out.selected.end(), std::size_t{0});
  } else {
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Strict total order: larger value first, then smaller index.
    auto before = [&](std::size_t a, std::size_t b) { return p[a] > p[b] || (p[a] == p[b] && a < b); };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k - 1), order.end(), before);
    out.selected.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(out.selected.begin(), out.selected.end());
  }
  for (std::size_t i = 0; i < out.selected.size(); ++i) out.pooled[i] = p[out.selected[i]];
  return out;
}

Mat kmax_rows(MatView m, std::size_t k, PoolSelection& selection) {
  require(k >= 1, "kmax_rows: k must be at least 1");
  Mat out(m.rows, k);
  selection.k = k;
  selection.source_cols = m.cols;
  selection.rows.resize(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    KMaxResult res = kmax(m.row(r), k);
    std::copy(res.pooled.begin(), res.pooled.end(), out.row(r).begin());
    selection.rows[r] = std::move(res.selected);
  }
  return out;
}

Mat kmax_grad(const PoolSelection& selection, MatView upstream) {
  require(upstream.rows == selection.rows.size() && upstream.cols == selection.k,
          "kmax_grad: upstream shape does not match the pooled shape");
  Mat out(selection.rows.size(), selection.source_cols);
  for (std::size_t r = 0; r < selection.rows.size(); ++r) {
    const auto& sel = selection.rows[r];
    for (std::size_t i = 0; i < sel.size(); ++i) out(r, sel[i]) += upstream(r, i);
  }
  return out;
}

std::size_t dynamic_k(DynamicKSchedule sched, std::size_t layer, std::size_t sentence_length) {
  require(sched.layers >= 1 && sched.k_top >= 1, "dynamic_k: need at least one layer and k_top >= 1");
  require(layer >= 1 && layer <= sched.layers,
          "dynamic_k: layer " + std::to_string(layer) + " outside [1, " + std::to_string(sched.layers) + "]");
  require(sentence_length >= 1, "dynamic_k: sentence length must be positive");
  const std::size_t L = sched.layers;
  const std::size_t scaled = ((L - layer) * sentence_length + L - 1) / L;
  return std::max(sched.k_top, scaled);
}

std::vector<double> max_over_time(MatView c) {
  require(c.rows >= 1 && c.cols >= 1, "max_over_time: empty matrix");
  std::vector<double> out(c.rows);
  for (std::size_t r = 0; r < c.rows; ++r) {
    const auto row = c.row(r);
    out[r] = *std::max_element(row.begin(), row.end());
  }
  return out;
}

std::vector<std::size_t> argmax_over_time(MatView c) {
  require(c.rows >= 1 && c.cols >= 1, "argmax_over_time: empty matrix");
  std::vector<std::size_t> out(c.rows);
  for (std::size_t r = 0; r < c.rows; ++r) {
    const auto row = c.row(r);
    out[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

Mat fold(MatView m) {
  require(m.rows % 2 == 0, "fold: row count " + std::to_string(m.rows) + " is odd");
  Mat out(m.rows / 2, m.cols);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const auto a = m.row(2 * r);
    const auto b = m.row(2 * r + 1);
    auto dst = out.row(r);
    for (std::size_t c = 0; c < m.cols; ++c) dst[c] = a[c] + b[c];
  }
  return out;
}

Mat fold_grad(MatView upstream) {
  Mat out(upstream.rows * 2, upstream.cols);
  for (std::size_t r = 0; r < upstream.rows; ++r) {
    const auto src = upstream.row(r);
    std::copy(src.begin(), src.end(), out.row(2 * r).begin());
    std::copy(src.begin(), src.end(), out.row(2 * r + 1).begin());
  }
  return out;
}

}  // namespace dcnn
