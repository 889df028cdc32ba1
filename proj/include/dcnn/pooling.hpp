#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dcnn/mat.hpp"

namespace dcnn {

/// Source positions kept by k-max pooling, one strictly increasing list per row.
/// A row shorter than k keeps all of its positions; the pooled row is then
/// right-padded with zeros, and those padded slots route no gradient.
struct PoolSelection {
  std::size_t k = 0;
  std::size_t source_cols = 0;
  std::vector<std::vector<std::size_t>> rows;
};

struct KMaxResult {
  std::vector<double> pooled;        // length k
  std::vector<std::size_t> selected; // length min(k, p)
};

/// The k largest values of p in their original order. Ties at the k-th rank
/// go to the leftmost occurrences.
KMaxResult kmax(std::span<const double> p, std::size_t k);

/// Row-wise k-max pooling.
Mat kmax_rows(MatView m, std::size_t k, PoolSelection& selection);

/// Scatters upstream (rows x k) back to the pre-pool shape recorded in selection.
Mat kmax_grad(const PoolSelection& selection, MatView upstream);

/// Pool sizes for a stack of L convolutional layers topped by k_top.
struct DynamicKSchedule {
  std::size_t layers = 1;
  std::size_t k_top = 1;
};

/// k_l = max(k_top, ceil((L - l) * s / L)) for layer l in [1, L].
std::size_t dynamic_k(DynamicKSchedule sched, std::size_t layer, std::size_t sentence_length);

/// Maximum of each row.
std::vector<double> max_over_time(MatView c);

/// Column of the (leftmost) maximum of each row.
std::vector<std::size_t> argmax_over_time(MatView c);

/// Sums row pairs (2i, 2i+1); needs an even row count.
Mat fold(MatView m);

/// Backward of fold: each upstream row is copied to both source rows.
Mat fold_grad(MatView upstream);

}  // namespace dcnn
