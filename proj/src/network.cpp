#include "dcnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dcnn/conv.hpp"
#include "dcnn/error.hpp"
#include "dcnn/simd.hpp"

namespace dcnn {
namespace {

std::string layer_name(std::size_t l, const char* what) { return "conv" + std::to_string(l + 1) + "." + what; }

// Smallest kept value minus largest discarded value in one pooled row.
double selection_gap(std::span<const double> row, const std::vector<std::size_t>& sel) {
  if (sel.size() >= row.size()) return std::numeric_limits<double>::infinity();
  double kept = std::numeric_limits<double>::infinity();
  double dropped = -std::numeric_limits<double>::infinity();
  std::size_t next = 0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (next < sel.size() && sel[next] == i) {
      kept = std::min(kept, row[i]);
      ++next;
    } else {
      dropped = std::max(dropped, row[i]);
    }
  }
  return kept - dropped;
}

void check_sentence(std::span<const WordId> sentence, std::size_t vocab) {
  require(!sentence.empty(), "forward: empty sentence");
  for (WordId w : sentence) {
    require(w < vocab, "embed: word id " + std::to_string(w) + " outside vocabulary of size " + std::to_string(vocab));
  }
}

void scatter_to_embeddings(MatView grad_sentence, std::span<const WordId> sentence, Mat& grad_embeddings) {
  const std::size_t used = std::min<std::size_t>(grad_sentence.cols, sentence.size());
  for (std::size_t i = 0; i < used; ++i) {
    auto dst = grad_embeddings.row(sentence[i]);
    for (std::size_t r = 0; r < grad_sentence.rows; ++r) dst[r] += grad_sentence(r, i);
  }
}

}  // namespace

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dcnn: return "dcnn";
    case ModelKind::MaxTdnn: return "maxtdnn";
    case ModelKind::Nbow: return "nbow";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "dcnn") return ModelKind::Dcnn;
  if (name == "maxtdnn" || name == "max-tdnn") return ModelKind::MaxTdnn;
  if (name == "nbow") return ModelKind::Nbow;
  throw InvalidArgument("unknown model kind '" + std::string(name) + "' (expected dcnn, maxtdnn or nbow)");
}

// ---------------------------------------------------------------------------
// NetworkSpec

void NetworkSpec::validate() const {
  require(vocab_size >= 1, "NetworkSpec: vocab_size must be positive");
  require(embed_dim >= 1, "NetworkSpec: embed_dim must be positive");
  require(classes >= 2, "NetworkSpec: need at least two classes");
  require(dropout >= 0.0 && dropout < 1.0, "NetworkSpec: dropout rate must lie in [0, 1)");
  switch (kind) {
    case ModelKind::Dcnn: {
      require(!layers.empty(), "NetworkSpec: a DCNN needs at least one convolutional layer");
      require(k_top >= 1, "NetworkSpec: k_top must be at least 1");
      std::size_t rows = embed_dim;
      for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        const std::string where = "NetworkSpec: layer " + std::to_string(l + 1);
        require(layer.width >= 1, where + " has zero filter width");
        require(layer.maps >= 1, where + " has zero feature maps");
        if (layer.fold) {
          require(rows % 2 == 0, where + " folds an odd number of rows (" + std::to_string(rows) + ")");
          rows /= 2;
        }
      }
      const auto& top = layers.back();
      require(top.fixed_k == 0 || top.fixed_k == k_top, "NetworkSpec: the top layer pools to k_top");
      break;
    }
    case ModelKind::MaxTdnn:
      require(layers.size() == 1, "NetworkSpec: Max-TDNN takes exactly one convolutional layer");
      require(layers[0].width >= 1 && layers[0].maps >= 1, "NetworkSpec: Max-TDNN layer needs width and maps >= 1");
      break;
    case ModelKind::Nbow:
      require(layers.empty(), "NetworkSpec: NBoW has no convolutional layers");
      break;
  }
}

std::size_t NetworkSpec::rows_entering(std::size_t layer) const {
  std::size_t rows = embed_dim;
  for (std::size_t l = 0; l < layer && l < layers.size(); ++l) {
    if (layers[l].fold) rows /= 2;
  }
  return rows;
}

std::size_t NetworkSpec::feature_length() const {
  switch (kind) {
    case ModelKind::Dcnn: return layers.back().maps * rows_entering(layers.size()) * k_top;
    case ModelKind::MaxTdnn: return layers.front().maps * embed_dim;
    case ModelKind::Nbow: return embed_dim;
  }
  return 0;
}

std::size_t NetworkSpec::pool_size(std::size_t layer, std::size_t sentence_length) const {
  require(layer < layers.size(), "pool_size: layer out of range");
  if (layers[layer].fixed_k != 0) return layers[layer].fixed_k;
  return dynamic_k(DynamicKSchedule{layers.size(), k_top}, layer + 1, sentence_length);
}

NetworkSpec binary_sentiment_spec(std::size_t vocab_size, std::size_t classes) {
  NetworkSpec spec;
  spec.kind = ModelKind::Dcnn;
  spec.vocab_size = vocab_size;
  spec.embed_dim = 48;
  spec.layers = {ConvLayerSpec{7, 6, true, 0}, ConvLayerSpec{5, 14, true, 0}};
  spec.k_top = 4;
  spec.classes = classes;
  spec.dropout = 0.5;
  return spec;
}

NetworkSpec tiny_dcnn_spec(std::size_t vocab_size, std::size_t classes) {
  NetworkSpec spec;
  spec.kind = ModelKind::Dcnn;
  spec.vocab_size = vocab_size;
  spec.embed_dim = 6;
  spec.layers = {ConvLayerSpec{3, 2, false, 0}, ConvLayerSpec{2, 2, true, 0}};
  spec.k_top = 2;
  spec.classes = classes;
  spec.dropout = 0.0;
  return spec;
}

std::size_t ForwardTrace::predicted() const {
  // Ties go to the lowest class id.
  return static_cast<std::size_t>(std::max_element(log_probs.begin(), log_probs.end()) - log_probs.begin());
}

// ---------------------------------------------------------------------------
// Building blocks

Mat embed(std::span<const WordId> sentence, MatView embeddings) {
  check_sentence(sentence, embeddings.rows);
  Mat s(embeddings.cols, sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto vec = embeddings.row(sentence[i]);
    for (std::size_t r = 0; r < embeddings.cols; ++r) s(r, i) = vec[r];
  }
  return s;
}

LayerTrace dcnn_layer(const std::vector<Mat>& inputs, MatView filters, MatView bias, std::size_t maps_out,
                      std::size_t k, bool fold_rows) {
  require(!inputs.empty(), "dcnn_layer: no input maps");
  require(k >= 1, "dcnn_layer: k must be at least 1");
  const std::size_t maps_in = inputs.size();
  const std::size_t rows = inputs.front().rows();
  const std::size_t len = inputs.front().cols();
  for (const Mat& m : inputs) require(m.rows() == rows && m.cols() == len, "dcnn_layer: input maps differ in shape");
  require(filters.rows == maps_out * maps_in * rows,
          "dcnn_layer: filter tensor has " + std::to_string(filters.rows) + " rows, expected " +
              std::to_string(maps_out * maps_in * rows));
  require(!fold_rows || rows % 2 == 0, "dcnn_layer: cannot fold an odd number of rows");
  const std::size_t rows_out = fold_rows ? rows / 2 : rows;
  require(bias.rows == maps_out && bias.cols == rows_out, "dcnn_layer: bias has the wrong shape");

  const std::size_t width = filters.cols;
  LayerTrace out;
  out.pre_pool.reserve(maps_out);
  out.selections.resize(maps_out);
  out.output.reserve(maps_out);
  for (std::size_t j = 0; j < maps_out; ++j) {
    Mat conv(rows, len + width - 1);
    for (std::size_t k_in = 0; k_in < maps_in; ++k_in) {
      conv_rows_accumulate(inputs[k_in], filters.row_block((j * maps_in + k_in) * rows, rows), ConvKind::Wide, conv);
    }
    Mat pre = fold_rows ? fold(conv) : std::move(conv);
    Mat pooled = kmax_rows(pre, k, out.selections[j]);
    const auto b = bias.row(j);
    for (std::size_t r = 0; r < rows_out; ++r) {
      for (double& v : pooled.row(r)) v = std::tanh(v + b[r]);
    }
    out.pre_pool.push_back(std::move(pre));
    out.output.push_back(std::move(pooled));
  }
  return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - top);
  const double lse = top + std::log(total);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

// ---------------------------------------------------------------------------
// Network

Network::Network(NetworkSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

std::vector<Network::ArrayShape> Network::array_shapes() const {
  std::vector<ArrayShape> shapes;
  const std::size_t d = spec_.embed_dim;
  shapes.push_back({"embeddings", ParamGroup::Embeddings, spec_.vocab_size, d});
  switch (spec_.kind) {
    case ModelKind::Dcnn: {
      std::size_t maps_in = 1;
      for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
        const auto& layer = spec_.layers[l];
        const std::size_t rows = spec_.rows_entering(l);
        shapes.push_back({layer_name(l, "filters"), ParamGroup::Filters, layer.maps * maps_in * rows, layer.width});
        shapes.push_back({layer_name(l, "bias"), ParamGroup::Biases, layer.maps, spec_.rows_entering(l + 1)});
        maps_in = layer.maps;
      }
      break;
    }
    case ModelKind::MaxTdnn: {
      const auto& layer = spec_.layers.front();
      shapes.push_back({"tdnn.filters", ParamGroup::Filters, layer.maps * d, layer.width});
      shapes.push_back({"tdnn.bias", ParamGroup::Biases, layer.maps, d});
      break;
    }
    case ModelKind::Nbow: break;
  }
  shapes.push_back({"dense.weight", ParamGroup::Dense, spec_.classes, spec_.feature_length()});
  shapes.push_back({"dense.bias", ParamGroup::Biases, 1, spec_.classes});
  return shapes;
}

ParameterStore Network::make_parameters() const {
  ParameterStore store;
  for (const ArrayShape& a : array_shapes()) store.add(a.name, a.group, a.rows, a.cols);
  return store;
}

void Network::initialize(ParameterStore& params, Rng& rng) const {
  const ParamLayout lay = layout(params);
  rng.fill_uniform(params[lay.embeddings].value.values(), -0.1, 0.1);

  auto glorot = [&](Mat& m, double fan_in, double fan_out) {
    const double r = std::sqrt(6.0 / (fan_in + fan_out));
    rng.fill_uniform(m.values(), -r, r);
  };
  std::size_t maps_in = 1;
  for (std::size_t l = 0; l < lay.filters.size(); ++l) {
    const auto& layer = spec_.layers[l];
    glorot(params[lay.filters[l]].value, static_cast<double>(maps_in * layer.width),
           static_cast<double>(layer.maps * layer.width));
    params[lay.biases[l]].value.set_zero();
    maps_in = layer.maps;
  }
  glorot(params[lay.dense_weight].value, static_cast<double>(spec_.feature_length()),
         static_cast<double>(spec_.classes));
  params[lay.dense_bias].value.set_zero();
}

ParamLayout Network::layout(const ParameterStore& params) const {
  const std::vector<ArrayShape> shapes = array_shapes();
  require(params.size() == shapes.size(), "parameter store has " + std::to_string(params.size()) +
                                              " arrays, this network expects " + std::to_string(shapes.size()));
  for (const ArrayShape& a : shapes) {
    const Parameter& got = params[params.index_of(a.name)];
    require(got.value.rows() == a.rows && got.value.cols() == a.cols,
            "parameter '" + a.name + "' has shape " + std::to_string(got.value.rows()) + "x" +
                std::to_string(got.value.cols()) + ", expected " + std::to_string(a.rows) + "x" +
                std::to_string(a.cols));
  }
  ParamLayout lay;
  lay.embeddings = params.index_of("embeddings");
  if (spec_.kind == ModelKind::Dcnn) {
    for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
      lay.filters.push_back(params.index_of(layer_name(l, "filters")));
      lay.biases.push_back(params.index_of(layer_name(l, "bias")));
    }
  } else if (spec_.kind == ModelKind::MaxTdnn) {
    lay.filters.push_back(params.index_of("tdnn.filters"));
    lay.biases.push_back(params.index_of("tdnn.bias"));
  }
  lay.dense_weight = params.index_of("dense.weight");
  lay.dense_bias = params.index_of("dense.bias");
  return lay;
}

ForwardTrace Network::forward(const ParameterStore& params, std::span<const WordId> sentence, Mode mode,
                              Rng* rng) const {
  const ParamLayout lay = layout(params);
  check_sentence(sentence, spec_.vocab_size);
  ForwardTrace trace;
  trace.kind = spec_.kind;
  trace.mode = mode;
  trace.sentence.assign(sentence.begin(), sentence.end());
  trace.sentence_matrix = embed(sentence, params[lay.embeddings].value);

  switch (spec_.kind) {
    case ModelKind::Dcnn: trace = forward_dcnn(params, lay, std::move(trace)); break;
    case ModelKind::MaxTdnn: trace = forward_tdnn(params, lay, std::move(trace)); break;
    case ModelKind::Nbow: trace = forward_nbow(params, lay, std::move(trace)); break;
  }
  finish_head(params, lay, trace, rng);
  return trace;
}

ForwardTrace Network::forward_dcnn(const ParameterStore& params, const ParamLayout& lay, ForwardTrace trace) const {
  const std::size_t s = trace.sentence.size();
  std::vector<Mat> maps{trace.sentence_matrix};
  for (std::size_t l = 0; l < spec_.layers.size(); ++l) {
    const auto& layer = spec_.layers[l];
    LayerTrace lt = dcnn_layer(maps, params[lay.filters[l]].value, params[lay.biases[l]].value, layer.maps,
                               spec_.pool_size(l, s), layer.fold);
    for (std::size_t j = 0; j < lt.pre_pool.size(); ++j) {
      for (std::size_t r = 0; r < lt.pre_pool[j].rows(); ++r) {
        trace.selection_margin =
            std::min(trace.selection_margin, selection_gap(lt.pre_pool[j].row(r), lt.selections[j].rows[r]));
      }
    }
    maps = lt.output;
    trace.layers.push_back(std::move(lt));
  }
  // Map-major, then row, then position.
  trace.features.reserve(spec_.feature_length());
  for (const Mat& m : maps) trace.features.insert(trace.features.end(), m.values().begin(), m.values().end());
  return trace;
}

ForwardTrace Network::forward_tdnn(const ParameterStore& params, const ParamLayout& lay, ForwardTrace trace) const {
  const auto& layer = spec_.layers.front();
  const std::size_t d = spec_.embed_dim;
  const std::size_t s = trace.sentence.size();
  if (s < layer.width) {
    // Right-pad with zero columns up to the filter width.
    Mat padded(d, layer.width);
    for (std::size_t r = 0; r < d; ++r) {
      std::copy(trace.sentence_matrix.row(r).begin(), trace.sentence_matrix.row(r).end(), padded.row(r).begin());
    }
    trace.sentence_matrix = std::move(padded);
  }
  const Mat& filters = params[lay.filters[0]].value;
  const Mat& bias = params[lay.biases[0]].value;
  trace.features.resize(layer.maps * d);
  for (std::size_t q = 0; q < layer.maps; ++q) {
    Mat act = conv_rows(trace.sentence_matrix, filters.row_block(q * d, d), ConvKind::Narrow);
    const auto b = bias.row(q);
    for (std::size_t r = 0; r < d; ++r) {
      for (double& v : act.row(r)) v = std::tanh(v + b[r]);
    }
    std::vector<std::size_t> arg = argmax_over_time(act);
    for (std::size_t r = 0; r < d; ++r) {
      trace.features[q * d + r] = act(r, arg[r]);
      if (act.cols() > 1) {
        double second = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < act.cols(); ++c) {
          if (c != arg[r]) second = std::max(second, act(r, c));
        }
        trace.selection_margin = std::min(trace.selection_margin, act(r, arg[r]) - second);
      }
    }
    trace.tdnn_activation.push_back(std::move(act));
    trace.tdnn_argmax.push_back(std::move(arg));
  }
  return trace;
}

ForwardTrace Network::forward_nbow(const ParameterStore&, const ParamLayout&, ForwardTrace trace) const {
  const Mat& s = trace.sentence_matrix;
  trace.features.assign(s.rows(), 0.0);
  // Summing in sorted order makes the result exactly independent of word order.
  std::vector<double> row;
  for (std::size_t r = 0; r < s.rows(); ++r) {
    row.assign(s.row(r).begin(), s.row(r).end());
    std::sort(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += v;
    trace.features[r] = std::tanh(sum);
  }
  return trace;
}

void Network::finish_head(const ParameterStore& params, const ParamLayout& lay, ForwardTrace& trace, Rng* rng) const {
  trace.dense_input = trace.features;
  if (trace.mode == Mode::Train && spec_.dropout > 0.0) {
    require(rng != nullptr, "forward: train mode with dropout needs an Rng");
    // Inverted dropout: kept units are scaled so inference needs no rescaling.
    const double keep_scale = 1.0 / (1.0 - spec_.dropout);
    trace.dropout_mask.resize(trace.features.size());
    for (std::size_t i = 0; i < trace.features.size(); ++i) {
      trace.dropout_mask[i] = rng->uniform01() < spec_.dropout ? 0.0 : keep_scale;
      trace.dense_input[i] *= trace.dropout_mask[i];
    }
  }
  const Mat& w = params[lay.dense_weight].value;
  const Mat& b = params[lay.dense_bias].value;
  trace.logits.resize(spec_.classes);
  for (std::size_t c = 0; c < spec_.classes; ++c) trace.logits[c] = b(0, c) + simd::dot(w.row(c), trace.dense_input);
  trace.log_probs = log_softmax(trace.logits);
}

void Network::backward(const ForwardTrace& trace, std::size_t label, ParameterStore& params, double scale) const {
  backward(trace, label, static_cast<const ParameterStore&>(params), params.grads(), scale);
}

void Network::backward(const ForwardTrace& trace, std::size_t label, const ParameterStore& params, GradientSet& grads,
                       double scale) const {
  const ParamLayout lay = layout(params);
  require(grads.size() == params.size(), "backward: gradient set does not match the parameter store");
  require(trace.kind == spec_.kind, "backward: trace was produced by a different model kind");
  require(trace.log_probs.size() == spec_.classes && trace.features.size() == spec_.feature_length(),
          "backward: trace shapes do not match this network");
  require(label < spec_.classes, "backward: label " + std::to_string(label) + " outside [0, " +
                                     std::to_string(spec_.classes) + ")");

  std::vector<double> delta(spec_.classes);
  for (std::size_t c = 0; c < spec_.classes; ++c) {
    delta[c] = scale * (std::exp(trace.log_probs[c]) - (c == label ? 1.0 : 0.0));
  }

  const Mat& w = params[lay.dense_weight].value;
  Mat& gw = grads[lay.dense_weight];
  Mat& gb = grads[lay.dense_bias];
  std::vector<double> grad_features(trace.features.size(), 0.0);
  for (std::size_t c = 0; c < spec_.classes; ++c) {
    gb(0, c) += delta[c];
    simd::axpy(delta[c], trace.dense_input, gw.row(c));
    simd::axpy(delta[c], w.row(c), grad_features);
  }
  if (!trace.dropout_mask.empty()) {
    for (std::size_t i = 0; i < grad_features.size(); ++i) grad_features[i] *= trace.dropout_mask[i];
  }

  switch (spec_.kind) {
    case ModelKind::Dcnn: backward_dcnn(trace, params, lay, std::move(grad_features), grads); break;
    case ModelKind::MaxTdnn: backward_tdnn(trace, params, lay, std::move(grad_features), grads); break;
    case ModelKind::Nbow: backward_nbow(trace, lay, std::move(grad_features), grads); break;
  }
}

void Network::backward_dcnn(const ForwardTrace& trace, const ParameterStore& params, const ParamLayout& lay,
                            std::vector<double> grad_features, GradientSet& grads) const {
  const std::size_t L = spec_.layers.size();
  require(trace.layers.size() == L, "backward: trace has the wrong number of layers");

  // Unflatten into per-map gradients of the top layer's outputs.
  std::vector<Mat> grad_out;
  {
    const auto& top = trace.layers.back().output;
    std::size_t offset = 0;
    for (const Mat& m : top) {
      Mat g(m.rows(), m.cols());
      std::copy_n(grad_features.begin() + static_cast<std::ptrdiff_t>(offset), m.size(), g.values().begin());
      offset += m.size();
      grad_out.push_back(std::move(g));
    }
  }

  for (std::size_t li = L; li-- > 0;) {
    const LayerTrace& lt = trace.layers[li];
    const auto& layer = spec_.layers[li];
    const std::vector<Mat> first_inputs = li == 0 ? std::vector<Mat>{trace.sentence_matrix} : std::vector<Mat>{};
    const std::vector<Mat>& inputs = li == 0 ? first_inputs : trace.layers[li - 1].output;
    const std::size_t maps_in = inputs.size();
    const std::size_t rows = inputs.front().rows();
    const Mat& filters = params[lay.filters[li]].value;
    Mat& gfilters = grads[lay.filters[li]];
    Mat& gbias = grads[lay.biases[li]];

    std::vector<Mat> grad_in;
    for (std::size_t k = 0; k < maps_in; ++k) grad_in.emplace_back(rows, inputs[k].cols());

    for (std::size_t j = 0; j < layer.maps; ++j) {
      Mat dz = grad_out[j];
      const Mat& a = lt.output[j];
      for (std::size_t r = 0; r < dz.rows(); ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < dz.cols(); ++c) {
          dz(r, c) *= 1.0 - a(r, c) * a(r, c);
          row_sum += dz(r, c);
        }
        gbias(j, r) += row_sum;
      }
      Mat dpre = kmax_grad(lt.selections[j], dz);
      const Mat dconv = layer.fold ? fold_grad(dpre) : std::move(dpre);
      for (std::size_t k = 0; k < maps_in; ++k) {
        const std::size_t first = (j * maps_in + k) * rows;
        conv_rows_grad_accumulate(inputs[k], filters.row_block(first, rows), ConvKind::Wide, dconv, grad_in[k],
                                  gfilters.row_block(first, rows));
      }
    }
    grad_out = std::move(grad_in);
  }
  scatter_to_embeddings(grad_out.front(), trace.sentence, grads[lay.embeddings]);
}

void Network::backward_tdnn(const ForwardTrace& trace, const ParameterStore& params, const ParamLayout& lay,
                            std::vector<double> grad_features, GradientSet& grads) const {
  const auto& layer = spec_.layers.front();
  const std::size_t d = spec_.embed_dim;
  const Mat& filters = params[lay.filters[0]].value;
  Mat& gbias = grads[lay.biases[0]];
  Mat grad_sentence(trace.sentence_matrix.rows(), trace.sentence_matrix.cols());
  for (std::size_t q = 0; q < layer.maps; ++q) {
    const Mat& act = trace.tdnn_activation[q];
    Mat dz(act.rows(), act.cols());
    for (std::size_t r = 0; r < d; ++r) {
      const std::size_t c = trace.tdnn_argmax[q][r];
      const double g = grad_features[q * d + r] * (1.0 - act(r, c) * act(r, c));
      dz(r, c) = g;
      gbias(q, r) += g;
    }
    conv_rows_grad_accumulate(trace.sentence_matrix, filters.row_block(q * d, d), ConvKind::Narrow, dz,
                              grad_sentence, grads[lay.filters[0]].row_block(q * d, d));
  }
  // Padding columns are constants, not parameters.
  scatter_to_embeddings(grad_sentence, trace.sentence, grads[lay.embeddings]);
}

void Network::backward_nbow(const ForwardTrace& trace, const ParamLayout& lay, std::vector<double> grad_features,
                            GradientSet& grads) const {
  std::vector<double> dsum(grad_features.size());
  for (std::size_t r = 0; r < dsum.size(); ++r) {
    dsum[r] = grad_features[r] * (1.0 - trace.features[r] * trace.features[r]);
  }
  Mat& ge = grads[lay.embeddings];
  for (WordId w : trace.sentence) simd::axpy(1.0, dsum, ge.row(w));
}

}  // namespace dcnn
