#include <doctest.h>

#include <cmath>
#include <numeric>

#include "dcnn/error.hpp"
#include "dcnn/network.hpp"
#include "selfcheck.hpp"

using namespace dcnn;

namespace {

ParameterStore init(const Network& net, std::uint64_t seed) {
  ParameterStore p = net.make_parameters();
  Rng rng(seed);
  net.initialize(p, rng);
  return p;
}

NetworkSpec tdnn_spec(std::size_t vocab) {
  NetworkSpec s;
  s.kind = ModelKind::MaxTdnn;
  s.vocab_size = vocab;
  s.embed_dim = 5;
  s.layers = {ConvLayerSpec{3, 2, false, 0}};
  s.classes = 3;
  s.dropout = 0.0;
  return s;
}

NetworkSpec nbow_spec(std::size_t vocab) {
  NetworkSpec s;
  s.kind = ModelKind::Nbow;
  s.vocab_size = vocab;
  s.embed_dim = 5;
  s.classes = 3;
  s.dropout = 0.0;
  return s;
}

}  // namespace

TEST_CASE("embed") {
  const Mat E = Mat::from_rows({{0, 0}, {1, 2}, {3, 4}, {5, 6}});
  const std::vector<WordId> s{2, 3, 2};
  const Mat m = embed(s, E);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(0, 0) == m(0, 2));
  CHECK(m(1, 0) == m(1, 2));
  const std::vector<WordId> one{3};
  CHECK(embed(one, E) == Mat::from_rows({{5}, {6}}));
  const std::vector<WordId> bad{4};
  CHECK_THROWS_AS(embed(bad, E), InvalidArgument);
}

TEST_CASE("a width-1 unit filter with full pooling is a pointwise tanh layer") {
  Mat in = Mat::from_rows({{0.5, -1.0, 2.0}, {0.1, 0.2, -0.3}});
  const Mat filters(2, 1, 1.0);
  const Mat bias = Mat::from_rows({{0.25, -0.5}});
  const LayerTrace lt = dcnn_layer({in}, filters, bias, 1, 3, false);
  REQUIRE(lt.output.size() == 1);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) CHECK(lt.output[0](r, c) == std::tanh(in(r, c) + bias(0, r)));
  }
  CHECK_THROWS_AS(dcnn_layer({in}, Mat(3, 1), bias, 1, 3, false), InvalidArgument);
}

TEST_CASE("spec validation") {
  NetworkSpec s = tiny_dcnn_spec();
  CHECK_NOTHROW(s.validate());
  s.layers[0].fold = true;  // 6 -> 3 rows, then the second layer cannot fold
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = tiny_dcnn_spec();
  s.classes = 1;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s = tiny_dcnn_spec();
  s.dropout = 1.0;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  CHECK(parse_model_kind("max-tdnn") == ModelKind::MaxTdnn);
  CHECK(parse_model_kind("nbow") == ModelKind::Nbow);
  CHECK_THROWS_AS(parse_model_kind("rnn"), InvalidArgument);
}

TEST_CASE("shape law and the illustrated two-layer model") {
  CHECK(binary_sentiment_spec(10).feature_length() == 672);
  for (const auto& r : {selfcheck::shape_law(), selfcheck::illustrated_shapes()}) {
    INFO(r.name << ": " << r.detail);
    CHECK(r.passed);
  }
}

TEST_CASE("three layers on an 18-word sentence pool to 12, 6, then 3") {
  NetworkSpec s;
  s.kind = ModelKind::Dcnn;
  s.vocab_size = 20;
  s.embed_dim = 4;
  s.layers = {ConvLayerSpec{3, 2, false, 0}, ConvLayerSpec{3, 2, false, 0}, ConvLayerSpec{2, 2, true, 0}};
  s.k_top = 3;
  s.classes = 2;
  s.dropout = 0.0;
  const Network net(s);
  const ParameterStore p = init(net, 1);
  std::vector<WordId> sentence(18);
  std::iota(sentence.begin(), sentence.end(), 2);
  const ForwardTrace t = net.forward(p, sentence, Mode::Infer);
  CHECK(t.layers.at(0).output.at(0).cols() == 12);
  CHECK(t.layers.at(1).output.at(0).cols() == 6);
  CHECK(t.layers.at(2).output.at(0).cols() == 3);
  CHECK(t.features.size() == 2 * 3 * 2);
}

TEST_CASE("zero dense weights give a uniform distribution") {
  for (const NetworkSpec& s : {tiny_dcnn_spec(), tdnn_spec(12), nbow_spec(12)}) {
    const Network net(s);
    ParameterStore p = init(net, 2);
    p.value("dense.weight").set_zero();
    const std::vector<WordId> sentence{3, 4, 5, 6};
    const ForwardTrace t = net.forward(p, sentence, Mode::Infer);
    for (double lp : t.log_probs) CHECK(std::exp(lp) == doctest::Approx(1.0 / s.classes).epsilon(1e-15));
    CHECK(t.predicted() == 0);
  }
}

TEST_CASE("softmax is normalised and log-probabilities are non-positive") {
  Rng rng(3);
  for (const NetworkSpec& s : {tiny_dcnn_spec(), tdnn_spec(12), nbow_spec(12)}) {
    const Network net(s);
    const ParameterStore p = init(net, 3);
    for (int i = 0; i < 20; ++i) {
      std::vector<WordId> sentence(1 + rng.below(15));
      for (auto& w : sentence) w = static_cast<WordId>(rng.below(12));
      const ForwardTrace t = net.forward(p, sentence, Mode::Infer);
      double total = 0;
      for (double lp : t.log_probs) {
        CHECK(lp <= 0.0);
        total += std::exp(lp);
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("word order") {
  const auto r = selfcheck::nbow_permutation(100, 4);
  INFO(r.detail);
  CHECK(r.passed);

  const Network tdnn(tdnn_spec(12));
  const ParameterStore p = init(tdnn, 5);
  const std::vector<WordId> a{2, 3, 4, 5, 6}, b{6, 5, 4, 3, 2};
  CHECK(tdnn.forward(p, a, Mode::Infer).logits != tdnn.forward(p, b, Mode::Infer).logits);
}

TEST_CASE("max-tdnn pads short sentences to the filter width") {
  const Network net(tdnn_spec(12));
  const ParameterStore p = init(net, 6);
  const std::vector<WordId> one{4};
  const ForwardTrace t = net.forward(p, one, Mode::Infer);
  CHECK(t.sentence_matrix.cols() == 3);
  CHECK(t.features.size() == 2 * 5);
}

TEST_CASE("dropout contract") {
  NetworkSpec s = tiny_dcnn_spec();
  const std::vector<WordId> sentence{2, 5, 7, 3};
  {
    const Network net(s);  // rate 0
    const ParameterStore p = init(net, 7);
    Rng rng(1);
    const ForwardTrace train = net.forward(p, sentence, Mode::Train, &rng);
    const ForwardTrace infer = net.forward(p, sentence, Mode::Infer);
    CHECK(train.logits == infer.logits);
    CHECK(train.dropout_mask.empty());
  }
  s.dropout = 0.5;
  const Network net(s);
  const ParameterStore p = init(net, 7);
  CHECK(net.forward(p, sentence, Mode::Infer).logits == net.forward(p, sentence, Mode::Infer).logits);
  Rng rng(2);
  const ForwardTrace t = net.forward(p, sentence, Mode::Train, &rng);
  REQUIRE(t.dropout_mask.size() == t.features.size());
  for (double m : t.dropout_mask) CHECK((m == 0.0 || m == 2.0));
  CHECK_THROWS_AS(net.forward(p, sentence, Mode::Train), InvalidArgument);
}

TEST_CASE("backward") {
  Rng rng(8);
  SUBCASE("gradients are finite and absent words get none") {
    for (const NetworkSpec& s : {tiny_dcnn_spec(), tdnn_spec(12), nbow_spec(12)}) {
      const Network net(s);
      const ParameterStore p = init(net, 8);
      GradientSet g = p.make_gradient_set();
      const std::vector<WordId> sentence{2, 3, 2, 9};
      net.backward(net.forward(p, sentence, Mode::Infer), 1, p, g);
      CHECK(g.all_finite());
      const Mat& ge = g[p.index_of("embeddings")];
      for (WordId w = 0; w < 12; ++w) {
        if (w == 2 || w == 3 || w == 9) continue;
        for (double v : ge.row(w)) CHECK(v == 0.0);
      }
    }
  }
  SUBCASE("a confident correct prediction leaves the dense bias untouched") {
    const Network net(nbow_spec(12));
    ParameterStore p = init(net, 9);
    p.value("dense.bias") = Mat::from_rows({{0.0, 1000.0, 0.0}});
    GradientSet g = p.make_gradient_set();
    const std::vector<WordId> sentence{4, 5};
    net.backward(net.forward(p, sentence, Mode::Infer), 1, p, g);
    CHECK(g[p.index_of("dense.bias")] == Mat(1, 3));
  }
  SUBCASE("label out of range") {
    const Network net(nbow_spec(12));
    const ParameterStore p = init(net, 9);
    GradientSet g = p.make_gradient_set();
    const std::vector<WordId> sentence{4};
    CHECK_THROWS_AS(net.backward(net.forward(p, sentence, Mode::Infer), 3, p, g), InvalidArgument);
  }
}

TEST_CASE("finite-difference gradients") {
  for (auto [kind, tol] : {std::pair{ModelKind::Dcnn, 1e-4}, {ModelKind::MaxTdnn, 1e-4}, {ModelKind::Nbow, 1e-6}}) {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
      const auto r = selfcheck::gradient_check(kind, tol, seed);
      INFO(r.name << " seed " << seed << ": " << r.detail);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("initialisation ranges and determinism") {
  const NetworkSpec s = binary_sentiment_spec(30);
  const Network net(s);
  const ParameterStore a = init(net, 11), b = init(net, 11);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
  const Mat& f1 = a.value("conv1.filters");
  const double r1 = std::sqrt(6.0 / (1 * 7 + 6 * 7));
  for (double v : f1.values()) CHECK(std::abs(v) <= r1);
  for (double v : a.value("embeddings").values()) CHECK(std::abs(v) <= 0.1);
  for (double v : a.value("conv2.bias").values()) CHECK(v == 0.0);
  const std::vector<WordId> sentence{3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(net.forward(a, sentence, Mode::Infer).logits == net.forward(b, sentence, Mode::Infer).logits);
}

TEST_CASE("layout rejects foreign stores") {
  const Network net(tiny_dcnn_spec());
  ParameterStore p = net.make_parameters();
  p.value("conv1.filters") = Mat(1, 1);
  CHECK_THROWS_AS(net.layout(p), InvalidArgument);
  ParameterStore empty;
  CHECK_THROWS_AS(net.layout(empty), InvalidArgument);
}
