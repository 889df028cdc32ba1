#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcnn/mat.hpp"
#include "dcnn/params.hpp"
#include "dcnn/pooling.hpp"
#include "dcnn/rng.hpp"

namespace dcnn {

using WordId = std::uint32_t;

enum class ModelKind { Dcnn, MaxTdnn, Nbow };

std::string_view model_kind_name(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// One convolutional layer. For Max-TDNN only the first layer is used and its
/// width is the narrow filter width.
struct ConvLayerSpec {
  std::size_t width = 1;
  std::size_t maps = 1;
  bool fold = false;
  // Non-zero pins this layer's pool size instead of the length-dependent schedule.
  std::size_t fixed_k = 0;

  friend bool operator==(const ConvLayerSpec&, const ConvLayerSpec&) = default;
};

struct NetworkSpec {
  ModelKind kind = ModelKind::Dcnn;
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 0;
  std::vector<ConvLayerSpec> layers;
  std::size_t k_top = 1;
  std::size_t classes = 2;
  double dropout = 0.5;

  /// Throws InvalidArgument naming the first broken constraint.
  void validate() const;

  /// Rows of the maps entering layer l (0-based); index layers.size() gives the final row count.
  std::size_t rows_entering(std::size_t layer) const;

  /// Length of the penultimate feature vector. Independent of sentence length.
  std::size_t feature_length() const;

  /// Pool size at 0-based layer l for a sentence of length s.
  std::size_t pool_size(std::size_t layer, std::size_t sentence_length) const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Binary movie-review configuration: d=48, widths 7/5, maps 6/14, folding, k_top=4.
NetworkSpec binary_sentiment_spec(std::size_t vocab_size, std::size_t classes = 2);

/// Smallest configuration the gradient checker runs by default: d=6, widths 3/2,
/// maps 2/2, folding on the second layer (6 rows only fold once), k_top=2.
NetworkSpec tiny_dcnn_spec(std::size_t vocab_size = 12, std::size_t classes = 3);

enum class Mode { Train, Infer };

/// Per-layer memo for DCNN backprop.
struct LayerTrace {
  std::vector<Mat> pre_pool;               // per output map, after folding
  std::vector<PoolSelection> selections;   // per output map
  std::vector<Mat> output;                 // per output map, tanh(pooled + bias)
};

struct ForwardTrace {
  ModelKind kind = ModelKind::Dcnn;
  Mode mode = Mode::Infer;
  std::vector<WordId> sentence;
  Mat sentence_matrix;                     // d x s (Max-TDNN: zero-padded to the filter width)

  std::vector<LayerTrace> layers;          // DCNN

  std::vector<Mat> tdnn_activation;        // Max-TDNN, per map: tanh(conv + bias)
  std::vector<std::vector<std::size_t>> tdnn_argmax;

  std::vector<double> features;            // penultimate layer, before dropout
  std::vector<double> dropout_mask;        // empty when dropout is inactive
  std::vector<double> dense_input;         // features after dropout
  std::vector<double> logits;
  std::vector<double> log_probs;

  // Smallest gap between a kept and a discarded value over all pooling steps.
  // Finite differences are only trustworthy when this exceeds the step size.
  double selection_margin = std::numeric_limits<double>::infinity();

  std::size_t predicted() const;
};

/// Indices of the named arrays a network owns inside its ParameterStore.
struct ParamLayout {
  std::size_t embeddings = 0;
  std::vector<std::size_t> filters;  // per conv layer
  std::vector<std::size_t> biases;   // per conv layer
  std::size_t dense_weight = 0;
  std::size_t dense_bias = 0;
};

/// Columns are the embeddings of the sentence's words.
Mat embed(std::span<const WordId> sentence, MatView embeddings);

/// One DCNN layer: out-map j = tanh(bias_j + kmax(fold?(sum_k wide(in_k, m_{j,k})))).
/// `filters` holds the order-4 tensor as (maps_out * maps_in * rows) x width,
/// block (j, k) starting at row (j * maps_in + k) * rows. `bias` is maps_out x rows_out.
LayerTrace dcnn_layer(const std::vector<Mat>& inputs, MatView filters, MatView bias, std::size_t maps_out,
                      std::size_t k, bool fold_rows);

class Network {
 public:
  explicit Network(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }

  /// Store with every array allocated (zeros) under its canonical name.
  ParameterStore make_parameters() const;

  /// Filters and dense weights uniform in +-sqrt(6/(fan_in+fan_out)); embeddings
  /// uniform in +-0.1; biases zero.
  void initialize(ParameterStore& params, Rng& rng) const;

  /// Throws InvalidArgument if params lacks an array or has a wrong shape.
  ParamLayout layout(const ParameterStore& params) const;

  /// rng is only drawn from in Train mode with a non-zero dropout rate.
  ForwardTrace forward(const ParameterStore& params, std::span<const WordId> sentence, Mode mode,
                       Rng* rng = nullptr) const;

  /// Adds scale * d(-log p(label))/d(theta) into grads. The L2 term is applied
  /// separately (add_l2_gradient) so it is counted once per batch.
  void backward(const ForwardTrace& trace, std::size_t label, const ParameterStore& params, GradientSet& grads,
                double scale = 1.0) const;

  /// Convenience: accumulate into params.grads().
  void backward(const ForwardTrace& trace, std::size_t label, ParameterStore& params, double scale = 1.0) const;

 private:
  struct ArrayShape {
    std::string name;
    ParamGroup group;
    std::size_t rows;
    std::size_t cols;
  };
  std::vector<ArrayShape> array_shapes() const;

  ForwardTrace forward_dcnn(const ParameterStore& params, const ParamLayout& lay, ForwardTrace trace) const;
  ForwardTrace forward_tdnn(const ParameterStore& params, const ParamLayout& lay, ForwardTrace trace) const;
  ForwardTrace forward_nbow(const ParameterStore& params, const ParamLayout& lay, ForwardTrace trace) const;
  void finish_head(const ParameterStore& params, const ParamLayout& lay, ForwardTrace& trace, Rng* rng) const;

  void backward_dcnn(const ForwardTrace& trace, const ParameterStore& params, const ParamLayout& lay,
                     std::vector<double> grad_features, GradientSet& grads) const;
  void backward_tdnn(const ForwardTrace& trace, const ParameterStore& params, const ParamLayout& lay,
                     std::vector<double> grad_features, GradientSet& grads) const;
  void backward_nbow(const ForwardTrace& trace, const ParamLayout& lay, std::vector<double> grad_features,
                     GradientSet& grads) const;

  NetworkSpec spec_;
};

/// Numerically stable log-softmax.
std::vector<double> log_softmax(std::span<const double> logits);

}  // namespace dcnn
