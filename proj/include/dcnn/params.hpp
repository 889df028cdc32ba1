#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dcnn/mat.hpp"

namespace dcnn {

enum class ParamGroup { Embeddings, Filters, Biases, Dense };

inline constexpr std::size_t kParamGroupCount = 4;

std::string_view param_group_name(ParamGroup g);

struct Parameter {
  std::string name;
  ParamGroup group;
  Mat value;
};

/// One gradient buffer per parameter, in store order.
class GradientSet {
 public:
  GradientSet() = default;
  explicit GradientSet(std::vector<Mat> buffers) : buffers_(std::move(buffers)) {}

  std::size_t size() const { return buffers_.size(); }
  Mat& operator[](std::size_t i) { return buffers_[i]; }
  const Mat& operator[](std::size_t i) const { return buffers_[i]; }

  void append(std::size_t rows, std::size_t cols) { buffers_.emplace_back(rows, cols); }
  void set_zero();
  /// this += other (shapes must match).
  void add(const GradientSet& other);
  void scale(double s);
  bool all_finite() const;

 private:
  std::vector<Mat> buffers_;
};

/// Every trainable array, each with a paired gradient buffer.
class ParameterStore {
 public:
  std::size_t add(std::string name, ParamGroup group, std::size_t rows, std::size_t cols);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](std::size_t i) { return params_[i]; }
  const Parameter& operator[](std::size_t i) const { return params_[i]; }

  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
  Mat& value(std::string_view name) { return params_[index_of(name)].value; }
  const Mat& value(std::string_view name) const { return params_[index_of(name)].value; }

  GradientSet& grads() { return grads_; }
  const GradientSet& grads() const { return grads_; }

  /// Zeroed buffers with this store's shapes.
  GradientSet make_gradient_set() const;

  std::size_t total_entries() const;

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
  GradientSet grads_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// L2 coefficient per parameter group.
struct L2Coefficients {
  double by_group[kParamGroupCount] = {0.0, 0.0, 0.0, 0.0};

  static L2Coefficients uniform(double lambda) { return {{lambda, lambda, lambda, lambda}}; }
  double operator[](ParamGroup g) const { return by_group[static_cast<std::size_t>(g)]; }
  double& operator[](ParamGroup g) { return by_group[static_cast<std::size_t>(g)]; }
};

/// sum_g (lambda_g / 2) * ||theta_g||^2
double l2_penalty(const ParameterStore& params, const L2Coefficients& l2);

/// grads += scale * lambda_g * theta_g for every parameter.
void add_l2_gradient(const ParameterStore& params, const L2Coefficients& l2, GradientSet& grads, double scale = 1.0);

}  // namespace dcnn
