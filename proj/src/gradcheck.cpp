#include "dcnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dcnn/error.hpp"

namespace dcnn {

double GradCheckReport::max_relative_error() const {
  double worst = 0.0;
  for (const GroupError& g : groups) worst = std::max(worst, g.max_relative_error);
  return worst;
}

double objective(const Network& net, const ParameterStore& params, const Example& ex, const L2Coefficients& l2) {
  const ForwardTrace t = net.forward(params, ex.words, Mode::Infer);
  return -t.log_probs.at(ex.label) + l2_penalty(params, l2);
}

GradCheckReport grad_check(const Network& net, ParameterStore& params, const Example& ex,
                           const GradCheckOptions& opts) {
  require(opts.step > 0.0, "grad_check: step must be positive");
  require(ex.label < net.spec().classes, "grad_check: label out of range");
  const ParamLayout lay = net.layout(params);
  Rng rng(opts.seed);
  GradCheckReport report;

  ForwardTrace trace = net.forward(params, ex.words, Mode::Infer);
  Mat& emb = params[lay.embeddings].value;
  while (trace.selection_margin < opts.min_margin && report.nudges < opts.max_nudges) {
    for (WordId w : ex.words) {
      for (double& v : emb.row(w)) v += rng.uniform(-1e-2, 1e-2);
    }
    ++report.nudges;
    trace = net.forward(params, ex.words, Mode::Infer);
  }
  report.selection_margin = trace.selection_margin;

  GradientSet analytic = params.make_gradient_set();
  net.backward(trace, ex.label, params, analytic);
  add_l2_gradient(params, opts.l2, analytic);
  if (opts.tamper) opts.tamper(analytic);

  GroupError per_group[kParamGroupCount];
  for (std::size_t g = 0; g < kParamGroupCount; ++g) per_group[g].group = static_cast<ParamGroup>(g);

  // Only embedding rows of words in the sentence can carry a non-zero CE gradient;
  // the rest only see L2, so the sample is drawn from the used rows.
  std::vector<WordId> used(ex.words.begin(), ex.words.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat& value = params[i].value;
    std::vector<std::size_t> entries;
    if (i == lay.embeddings) {
      for (WordId w : used) {
        for (std::size_t c = 0; c < value.cols(); ++c) entries.push_back(w * value.cols() + c);
      }
    } else {
      entries.resize(value.size());
      std::iota(entries.begin(), entries.end(), std::size_t{0});
    }
    if (entries.size() > opts.exhaustive_limit) {
      rng.shuffle(entries);
      entries.resize(opts.samples_per_array);
      std::sort(entries.begin(), entries.end());
    }

    GroupError& ge = per_group[static_cast<std::size_t>(params[i].group)];
    auto vals = value.values();
    const auto a_vals = analytic[i].values();
    for (std::size_t e : entries) {
      const double saved = vals[e];
      vals[e] = saved + opts.step;
      const double plus = objective(net, params, ex, opts.l2);
      vals[e] = saved - opts.step;
      const double minus = objective(net, params, ex, opts.l2);
      vals[e] = saved;

      const double numeric = (plus - minus) / (2.0 * opts.step);
      const double a = a_vals[e];
      const double denom = std::max({std::abs(a), std::abs(numeric), opts.floor});
      const double rel = std::abs(a - numeric) / denom;
      ++ge.checked;
      if (ge.worst_entry.empty() || rel > ge.max_relative_error) {
        ge.max_relative_error = rel;
        ge.worst_entry =
            params[i].name + "[" + std::to_string(e / value.cols()) + "," + std::to_string(e % value.cols()) + "]";
      }
    }
  }
  for (const GroupError& ge : per_group) {
    if (ge.checked > 0) report.groups.push_back(ge);
  }
  return report;
}

}  // namespace dcnn
