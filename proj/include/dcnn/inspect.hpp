#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dcnn/data.hpp"
#include "dcnn/network.hpp"
#include "dcnn/params.hpp"

namespace dcnn {

struct NgramScore {
  std::vector<WordId> ids;
  std::vector<std::string> tokens;
  double activation = 0.0;
};

/// One row of one layer-1 filter map, read as an n-gram detector.
struct DetectorReport {
  std::size_t map = 0;
  std::size_t row = 0;
  std::vector<NgramScore> top;  // activation descending, ties by id sequence
};

/// Response of detector (map, row) to an n-gram: the layer-1 convolution at a
/// window fully inside the text, without bias.
double detector_response(const NetworkSpec& spec, const ParameterStore& params, std::size_t map, std::size_t row,
                         std::span<const WordId> ngram);

/// For every layer-1 detector, the top_n distinct n-grams by activation over
/// the given sentences. n must equal the layer-1 filter width; sentences
/// shorter than n contribute nothing. Returns maps x rows reports, map-major.
std::vector<DetectorReport> top_ngrams(const NetworkSpec& spec, const ParameterStore& params,
                                       std::span<const std::vector<WordId>> sentences, const Vocabulary& vocab,
                                       std::size_t n, std::size_t top_n = 5);

/// `detector <map>:<row>` then `activation<TAB>n-gram` lines.
void write_report(std::ostream& out, std::span<const DetectorReport> reports);

}  // namespace dcnn
