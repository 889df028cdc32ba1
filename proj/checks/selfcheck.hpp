#pragma once

// Property suites shared by the unit tests, the acceptance binary and
// `dcnn selfcheck`. Each returns a pass/fail verdict with a one-line detail.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dcnn/network.hpp"

namespace dcnn::selfcheck {

struct Result {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// d=4, widths 3/2, maps 2/2, fold on the second layer only, pool sizes 5 then 3.
NetworkSpec illustrated_spec(std::size_t vocab_size = 10);

Result fft_oracle(std::size_t cases = 200, std::uint64_t seed = 11);
Result conv_oracle(std::size_t cases = 1000, std::uint64_t seed = 12);
Result kmax_oracle(std::size_t cases = 10000, std::uint64_t seed = 13);
Result dynamic_k_example();
Result dynamic_k_properties();
Result simd_equivalence(std::size_t cases = 500, std::uint64_t seed = 14);

/// Tiny model of each kind, several random sentences, central differences.
Result gradient_check(ModelKind kind, double tolerance, std::uint64_t seed = 15);

Result shape_law();
Result illustrated_shapes();
Result nbow_permutation(std::size_t cases = 200, std::uint64_t seed = 16);
Result inspector_consistency(std::uint64_t seed = 17);

std::vector<Result> run_all(std::uint64_t seed = 1);

}  // namespace dcnn::selfcheck
