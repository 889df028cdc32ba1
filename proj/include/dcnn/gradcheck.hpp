#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "dcnn/data.hpp"
#include "dcnn/network.hpp"
#include "dcnn/params.hpp"

namespace dcnn {

struct GradCheckOptions {
  double step = 1e-5;
  L2Coefficients l2 = L2Coefficients::uniform(1e-4);
  // Arrays larger than this are sampled instead of checked exhaustively.
  std::size_t exhaustive_limit = 5000;
  std::size_t samples_per_array = 200;
  // Relative error is |a - n| / max(|a|, |n|, floor).
  double floor = 1e-4;
  // Pool selections closer than this to a tie are nudged apart first.
  double min_margin = 1e-3;
  std::size_t max_nudges = 50;
  std::uint64_t seed = 7;
  // Runs on the analytic gradient before comparison. Used to inject faults.
  std::function<void(GradientSet&)> tamper;
};

struct GroupError {
  ParamGroup group = ParamGroup::Embeddings;
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::string worst_entry;  // name[row,col]
};

struct GradCheckReport {
  std::vector<GroupError> groups;  // only groups with at least one checked entry
  std::size_t nudges = 0;
  double selection_margin = 0.0;

  double max_relative_error() const;
  bool passed(double tolerance) const { return max_relative_error() <= tolerance; }
};

/// Objective: -log p(label) + L2 penalty, evaluated without dropout.
double objective(const Network& net, const ParameterStore& params, const Example& ex, const L2Coefficients& l2);

/// Central-difference check of the analytic gradient. May perturb `params`
/// (embedding nudges away from pooling ties); values are otherwise restored.
GradCheckReport grad_check(const Network& net, ParameterStore& params, const Example& ex,
                           const GradCheckOptions& opts = {});

}  // namespace dcnn
