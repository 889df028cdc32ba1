#pragma once

// Constructed corpora and model sizes used by the acceptance gate and tests.

#include <cstddef>
#include <cstdint>

#include "dcnn/data.hpp"
#include "dcnn/network.hpp"

namespace dcnn::synthetic {

/// One wide layer of width 8 with 5 maps over d=32, folding, k_top=4.
NetworkSpec trec_spec(std::size_t vocab_size, std::size_t classes);

/// Sentences of filler words containing either the bigram "x y" (label 1) or
/// "y x" (label 0) at a random position. Both classes share every bag of
/// words, so only word order separates them.
struct OrderTask {
  std::size_t vocab_size = 0;
  WordId x = 0, y = 0;
  Corpus train, dev, test;
};

OrderTask order_task(std::uint64_t seed, std::size_t train_size = 200, std::size_t eval_size = 100);

}  // namespace dcnn::synthetic
