#include "dcnn/inspect.hpp"

#include <algorithm>
#include <cstdio>

#include "dcnn/conv.hpp"
#include "dcnn/error.hpp"

namespace dcnn {
namespace {

struct Layer1 {
  MatView embeddings;
  MatView filters;
  std::size_t rows;
  std::size_t maps;
  std::size_t width;
};

Layer1 layer1(const NetworkSpec& spec, const ParameterStore& params) {
  require(spec.kind == ModelKind::Dcnn, "inspect: only DCNN models have layer-1 feature detectors");
  const ParamLayout lay = Network(spec).layout(params);
  return {params[lay.embeddings].value, params[lay.filters.at(0)].value, spec.embed_dim, spec.layers.at(0).maps,
          spec.layers.at(0).width};
}

// Map j of layer 1 reads the single input map, so its block starts at row j * d.
MatView detector_block(const Layer1& l1, std::size_t map) { return l1.filters.row_block(map * l1.rows, l1.rows); }

bool ranks_before(const NgramScore& a, const NgramScore& b) {
  if (a.activation != b.activation) return a.activation > b.activation;
  return a.ids < b.ids;
}

void offer(std::vector<NgramScore>& top, std::size_t limit, std::span<const WordId> ids, double activation) {
  for (const NgramScore& s : top) {
    if (std::equal(s.ids.begin(), s.ids.end(), ids.begin(), ids.end())) return;
  }
  NgramScore cand{{ids.begin(), ids.end()}, {}, activation};
  if (top.size() == limit) {
    if (!ranks_before(cand, top.back())) return;
    top.pop_back();
  }
  top.insert(std::upper_bound(top.begin(), top.end(), cand, ranks_before), std::move(cand));
}

}  // namespace

double detector_response(const NetworkSpec& spec, const ParameterStore& params, std::size_t map, std::size_t row,
                         std::span<const WordId> ngram) {
  const Layer1 l1 = layer1(spec, params);
  require(map < l1.maps && row < l1.rows, "detector_response: detector out of range");
  require(ngram.size() == l1.width, "detector_response: n-gram length must equal the filter width");
  const Mat s = embed(ngram, l1.embeddings);
  const Mat c = conv_rows(s, detector_block(l1, map), ConvKind::Narrow, ConvPath::Direct);
  return c(row, 0);
}

std::vector<DetectorReport> top_ngrams(const NetworkSpec& spec, const ParameterStore& params,
                                       std::span<const std::vector<WordId>> sentences, const Vocabulary& vocab,
                                       std::size_t n, std::size_t top_n) {
  const Layer1 l1 = layer1(spec, params);
  require(n == l1.width, "top_ngrams: n must equal the layer-1 filter width (" + std::to_string(l1.width) + ")");
  require(top_n > 0, "top_ngrams: N must be positive");

  std::vector<DetectorReport> reports(l1.maps * l1.rows);
  for (std::size_t j = 0; j < l1.maps; ++j) {
    for (std::size_t r = 0; r < l1.rows; ++r) reports[j * l1.rows + r] = {j, r, {}};
  }

  for (const auto& sentence : sentences) {
    if (sentence.size() < n) continue;
    const Mat s = embed(sentence, l1.embeddings);
    for (std::size_t j = 0; j < l1.maps; ++j) {
      // Narrow positions are exactly the wide positions with a full window.
      const Mat c = conv_rows(s, detector_block(l1, j), ConvKind::Narrow, ConvPath::Direct);
      for (std::size_t r = 0; r < l1.rows; ++r) {
        auto& top = reports[j * l1.rows + r].top;
        for (std::size_t q = 0; q < c.cols(); ++q) {
          offer(top, top_n, std::span<const WordId>(sentence).subspan(q, n), c(r, q));
        }
      }
    }
  }

  for (DetectorReport& rep : reports) {
    for (NgramScore& s : rep.top) s.tokens = vocab.decode(s.ids);
  }
  return reports;
}

void write_report(std::ostream& out, std::span<const DetectorReport> reports) {
  char buf[64];
  for (const DetectorReport& rep : reports) {
    out << "detector " << rep.map << ':' << rep.row << '\n';
    for (const NgramScore& s : rep.top) {
      std::snprintf(buf, sizeof buf, "%.17g", s.activation);
      out << buf << '\t';
      for (std::size_t i = 0; i < s.tokens.size(); ++i) out << (i ? " " : "") << s.tokens[i];
      out << '\n';
    }
  }
}

}  // namespace dcnn
