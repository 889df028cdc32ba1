#include "dcnn/params.hpp"

#include <string>

#include "dcnn/error.hpp"
#include "dcnn/simd.hpp"

namespace dcnn {

std::string_view param_group_name(ParamGroup g) {
  switch (g) {
    case ParamGroup::Embeddings: return "embeddings";
    case ParamGroup::Filters: return "filters";
    case ParamGroup::Biases: return "biases";
    case ParamGroup::Dense: return "dense";
  }
  return "unknown";
}

void GradientSet::set_zero() {
  for (Mat& m : buffers_) m.set_zero();
}

void GradientSet::add(const GradientSet& other) {
  require(other.size() == size(), "GradientSet::add: different parameter counts");
  for (std::size_t i = 0; i < buffers_.size(); ++i) buffers_[i] += other.buffers_[i];
}

void GradientSet::scale(double s) {
  for (Mat& m : buffers_) m *= s;
}

bool GradientSet::all_finite() const {
  for (const Mat& m : buffers_) {
    if (!m.all_finite()) return false;
  }
  return true;
}

std::size_t ParameterStore::add(std::string name, ParamGroup group, std::size_t rows, std::size_t cols) {
  require(!contains(name), "ParameterStore: duplicate parameter '" + name + "'");
  const std::size_t idx = params_.size();
  index_.emplace(name, idx);
  params_.push_back(Parameter{std::move(name), group, Mat(rows, cols)});
  grads_.append(rows, cols);
  return idx;
}

bool ParameterStore::contains(std::string_view name) const { return index_.count(std::string(name)) != 0; }

std::size_t ParameterStore::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw InvalidArgument("ParameterStore: no parameter named '" + std::string(name) + "'");
  return it->second;
}

GradientSet ParameterStore::make_gradient_set() const {
  std::vector<Mat> buffers;
  buffers.reserve(params_.size());
  for (const Parameter& p : params_) buffers.emplace_back(p.value.rows(), p.value.cols());
  return GradientSet(std::move(buffers));
}

std::size_t ParameterStore::total_entries() const {
  std::size_t n = 0;
  for (const Parameter& p : params_) n += p.value.size();
  return n;
}

double l2_penalty(const ParameterStore& params, const L2Coefficients& l2) {
  double total = 0.0;
  for (const Parameter& p : params) {
    const double lambda = l2[p.group];
    if (lambda != 0.0) total += 0.5 * lambda * simd::sum_squares(p.value.values());
  }
  return total;
}

void add_l2_gradient(const ParameterStore& params, const L2Coefficients& l2, GradientSet& grads, double scale) {
  require(grads.size() == params.size(), "add_l2_gradient: gradient set does not match the store");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double lambda = l2[params[i].group] * scale;
    if (lambda != 0.0) simd::axpy(lambda, params[i].value.values(), grads[i].values());
  }
}

}  // namespace dcnn
