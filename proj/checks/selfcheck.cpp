#include "selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>

#include "dcnn/conv.hpp"
#include "dcnn/data.hpp"
#include "dcnn/fft.hpp"
#include "dcnn/gradcheck.hpp"
#include "dcnn/inspect.hpp"
#include "dcnn/pooling.hpp"
#include "dcnn/simd.hpp"
#include "oracles.hpp"

namespace dcnn::selfcheck {
namespace {

using Clock = std::chrono::steady_clock;

Result timed(std::string name, const std::function<std::string(bool&)>& body) {
  Result r;
  r.name = std::move(name);
  const auto t0 = Clock::now();
  try {
    r.passed = true;
    r.detail = body(r.passed);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  rng.fill_uniform(v, lo, hi);
  return v;
}

std::vector<WordId> random_sentence(Rng& rng, std::size_t vocab, std::size_t len) {
  std::vector<WordId> s(len);
  for (auto& w : s) w = static_cast<WordId>(rng.below(vocab));
  return s;
}

NetworkSpec tiny_spec(ModelKind kind) {
  switch (kind) {
    case ModelKind::Dcnn:
      return tiny_dcnn_spec();
    case ModelKind::MaxTdnn: {
      NetworkSpec s;
      s.kind = ModelKind::MaxTdnn;
      s.vocab_size = 12;
      s.embed_dim = 6;
      s.layers = {ConvLayerSpec{3, 2, false, 0}};
      s.classes = 3;
      s.dropout = 0.0;
      return s;
    }
    case ModelKind::Nbow: {
      NetworkSpec s;
      s.kind = ModelKind::Nbow;
      s.vocab_size = 12;
      s.embed_dim = 6;
      s.classes = 3;
      s.dropout = 0.0;
      return s;
    }
  }
  return {};
}

}  // namespace

NetworkSpec illustrated_spec(std::size_t vocab_size) {
  NetworkSpec spec;
  spec.kind = ModelKind::Dcnn;
  spec.vocab_size = vocab_size;
  spec.embed_dim = 4;
  spec.layers = {ConvLayerSpec{3, 2, false, 5}, ConvLayerSpec{2, 2, true, 0}};
  spec.k_top = 3;
  spec.classes = 2;
  spec.dropout = 0.0;
  return spec;
}

Result fft_oracle(std::size_t cases, std::uint64_t seed) {
  return timed("fft matches naive DFT", [&](bool& ok) {
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t c = 0; c < cases; ++c) {
      const std::size_t len = 1 + rng.below(40);
      const std::size_t n = next_power_of_two(len + rng.below(8));
      auto x = random_vector(rng, len);
      std::vector<double> padded(x);
      padded.resize(n, 0.0);
      const auto fast = fft_real(x, n);
      const auto slow = oracle::dft(padded);
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(fast[i] - slow[i]));
      const auto back = ifft_real(fast);
      for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(back[i] - padded[i]));
    }
    ok = worst < 1e-9;
    return "max abs diff " + fmt("%.3g", worst);
  });
}

Result conv_oracle(std::size_t cases, std::uint64_t seed) {
  return timed("convolution fft vs direct vs oracle", [&](bool& ok) {
    Rng rng(seed);
    double fft_direct = 0.0, vs_oracle = 0.0;
    std::size_t slice_mismatch = 0;
    for (std::size_t c = 0; c < cases; ++c) {
      const std::size_t d = 1 + rng.below(8);
      const std::size_t s = 1 + rng.below(32);
      const std::size_t m = 1 + rng.below(10);
      Mat in(d, s), f(d, m);
      rng.fill_uniform(in.values(), -1.0, 1.0);
      rng.fill_uniform(f.values(), -1.0, 1.0);
      const Mat wide_direct = conv_rows(in, f, ConvKind::Wide, ConvPath::Direct);
      const Mat wide_fft = conv_rows(in, f, ConvKind::Wide, ConvPath::Fft);
      fft_direct = std::max(fft_direct, max_abs_diff(wide_direct, wide_fft));
      for (std::size_t r = 0; r < d; ++r) {
        const auto ref = oracle::conv(in.row(r), f.row(r), ConvKind::Wide);
        for (std::size_t j = 0; j < ref.size(); ++j) vs_oracle = std::max(vs_oracle, std::abs(ref[j] - wide_direct(r, j)));
      }
      if (s >= m) {
        for (ConvPath path : {ConvPath::Direct, ConvPath::Fft}) {
          const Mat wide = path == ConvPath::Direct ? wide_direct : wide_fft;
          const Mat narrow = conv_rows(in, f, ConvKind::Narrow, path);
          for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t j = 0; j < narrow.cols(); ++j) {
              if (narrow(r, j) != wide(r, j + m - 1)) ++slice_mismatch;
            }
          }
          fft_direct = std::max(fft_direct, max_abs_diff(narrow, conv_rows(in, f, ConvKind::Narrow, ConvPath::Direct)));
        }
      }
    }
    ok = fft_direct < 1e-8 && vs_oracle < 1e-12 && slice_mismatch == 0;
    return "fft/direct " + fmt("%.3g", fft_direct) + ", direct/oracle " + fmt("%.3g", vs_oracle) +
           ", narrow-slice mismatches " + std::to_string(slice_mismatch);
  });
}

Result kmax_oracle(std::size_t cases, std::uint64_t seed) {
  return timed("k-max pooling vs sort oracle", [&](bool& ok) {
    Rng rng(seed);
    std::size_t mismatches = 0, not_idempotent = 0;
    for (std::size_t c = 0; c < cases; ++c) {
      const std::size_t p = 1 + rng.below(24);
      const std::size_t k = 1 + rng.below(28);
      std::vector<double> row(p);
      const bool ties = rng.below(2) == 0;
      for (double& v : row) v = ties ? static_cast<double>(rng.below(4)) : rng.uniform(-1.0, 1.0);
      const KMaxResult got = kmax(row, k);
      const oracle::KMax want = oracle::kmax(row, k);
      if (got.pooled != want.pooled || got.selected != want.selected) ++mismatches;
      const KMaxResult again = kmax(got.pooled, k);
      if (again.pooled != got.pooled) ++not_idempotent;
    }
    ok = mismatches == 0 && not_idempotent == 0;
    return std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches, " +
           std::to_string(not_idempotent) + " idempotence failures";
  });
}

Result dynamic_k_example() {
  return timed("dynamic k worked example", [&](bool& ok) {
    const DynamicKSchedule sched{3, 3};
    const std::size_t k1 = dynamic_k(sched, 1, 18), k2 = dynamic_k(sched, 2, 18), k3 = dynamic_k(sched, 3, 18);
    ok = k1 == 12 && k2 == 6 && k3 == 3;
    return "(" + std::to_string(k1) + "," + std::to_string(k2) + "," + std::to_string(k3) + ")";
  });
}

Result dynamic_k_properties() {
  return timed("dynamic k schedule properties", [&](bool& ok) {
    std::size_t bad = 0;
    for (std::size_t L = 1; L <= 6; ++L) {
      for (std::size_t kt = 1; kt <= 6; ++kt) {
        for (std::size_t s = 1; s <= 80; ++s) {
          std::size_t prev = SIZE_MAX;
          for (std::size_t l = 1; l <= L; ++l) {
            const std::size_t k = dynamic_k({L, kt}, l, s);
            if (k != oracle::dynamic_k(L, kt, l, s) || k < kt || k > prev) ++bad;
            prev = k;
          }
          if (prev != kt) ++bad;
        }
      }
    }
    ok = bad == 0;
    return std::to_string(bad) + " violations";
  });
}

Result simd_equivalence(std::size_t cases, std::uint64_t seed) {
  return timed("simd kernels match scalar", [&](bool& ok) {
    Rng rng(seed);
    const auto& ref = simd::kernels_for(simd::Isa::Scalar);
    double worst = 0.0;
    std::string isas;
    for (simd::Isa isa : simd::available_isas()) {
      isas += std::string(isas.empty() ? "" : ",") + std::string(simd::isa_name(isa));
      const auto& k = simd::kernels_for(isa);
      for (std::size_t c = 0; c < cases; ++c) {
        const std::size_t n = rng.below(70);
        auto a = random_vector(rng, n), b = random_vector(rng, n);
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
        worst = std::max(worst, std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) / scale);
        worst = std::max(worst, std::abs(k.sum_squares(a.data(), n) - ref.sum_squares(a.data(), n)) / scale);

        auto y1 = b, y2 = b;
        const double alpha = rng.uniform(-2.0, 2.0);
        k.axpy(alpha, a.data(), y1.data(), n);
        ref.axpy(alpha, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(y1[i] - y2[i]));

        auto th1 = b, th2 = b, g1 = a, g2 = a;
        auto acc1 = random_vector(rng, n, 0.0, 1.0);
        auto acc2 = acc1;
        k.adagrad(th1.data(), g1.data(), acc1.data(), n, 0.05, 1e-6);
        ref.adagrad(th2.data(), g2.data(), acc2.data(), n, 0.05, 1e-6);
        for (std::size_t i = 0; i < n; ++i) {
          worst = std::max({worst, std::abs(th1[i] - th2[i]), std::abs(acc1[i] - acc2[i])});
          if (g1[i] != 0.0 || g2[i] != 0.0) worst = 1.0;
        }
      }
    }
    ok = worst < 1e-12;
    return "isas " + isas + ", max diff " + fmt("%.3g", worst);
  });
}

Result gradient_check(ModelKind kind, double tolerance, std::uint64_t seed) {
  return timed("gradient check " + std::string(model_kind_name(kind)), [&](bool& ok) {
    const NetworkSpec spec = tiny_spec(kind);
    const Network net(spec);
    Rng rng(seed);
    double worst = 0.0;
    std::string where;
    std::size_t nudges = 0;
    for (std::size_t trial = 0; trial < 4; ++trial) {
      ParameterStore params = net.make_parameters();
      net.initialize(params, rng);
      // Non-zero biases so their gradients are exercised away from the origin.
      for (Parameter& p : params) {
        if (p.group == ParamGroup::Biases) rng.fill_uniform(p.value.values(), -0.3, 0.3);
      }
      Example ex;
      ex.words = random_sentence(rng, spec.vocab_size, 2 + rng.below(9));
      ex.label = rng.below(spec.classes);
      const GradCheckReport rep = grad_check(net, params, ex);
      nudges += rep.nudges;
      for (const GroupError& g : rep.groups) {
        if (g.max_relative_error > worst) {
          worst = g.max_relative_error;
          where = g.worst_entry;
        }
      }
    }
    ok = worst < tolerance;
    return "max rel err " + fmt("%.3g", worst) + " at " + where + " (tolerance " + fmt("%g", tolerance) +
           ", nudges " + std::to_string(nudges) + ")";
  });
}

Result shape_law() {
  return timed("feature length is independent of sentence length", [&](bool& ok) {
    const NetworkSpec spec = binary_sentiment_spec(40);
    const Network net(spec);
    ParameterStore params = net.make_parameters();
    Rng rng(3);
    net.initialize(params, rng);
    std::size_t bad = 0;
    for (std::size_t s = 1; s <= 60; ++s) {
      const auto sentence = random_sentence(rng, spec.vocab_size, s);
      const ForwardTrace t = net.forward(params, sentence, Mode::Infer);
      if (t.features.size() != 672 || oracle::feature_length(spec, s) != 672 || spec.feature_length() != 672) ++bad;
    }
    ok = bad == 0;
    return "s in [1,60], expected 672, " + std::to_string(bad) + " mismatches";
  });
}

Result illustrated_shapes() {
  return timed("two-layer illustrated shapes", [&](bool& ok) {
    const NetworkSpec spec = illustrated_spec();
    const Network net(spec);
    ParameterStore params = net.make_parameters();
    Rng rng(4);
    net.initialize(params, rng);
    const auto sentence = random_sentence(rng, spec.vocab_size, 7);
    const ForwardTrace t = net.forward(params, sentence, Mode::Infer);
    std::ostringstream got;
    const auto& l1 = t.layers.at(0);
    const auto& l2 = t.layers.at(1);
    // Layer 2's raw convolution is d x (5 + 2 - 1); its folded form is what the trace keeps.
    const std::size_t l2_conv_cols = conv_output_length(l1.output.at(0).cols(), spec.layers[1].width, ConvKind::Wide);
    got << "L1 conv " << l1.pre_pool.at(0).rows() << "x" << l1.pre_pool.at(0).cols() << ", L1 pooled "
        << l1.output.at(0).rows() << "x" << l1.output.at(0).cols() << ", L2 conv " << l1.output.at(0).rows() << "x"
        << l2_conv_cols << ", L2 folded " << l2.pre_pool.at(0).rows() << "x" << l2.pre_pool.at(0).cols()
        << ", L2 pooled " << l2.output.at(0).rows() << "x" << l2.output.at(0).cols() << ", maps " << l1.output.size()
        << "/" << l2.output.size();
    ok = got.str() == "L1 conv 4x9, L1 pooled 4x5, L2 conv 4x6, L2 folded 2x6, L2 pooled 2x3, maps 2/2";
    const auto oracle_shapes = oracle::layer_shapes(spec, 7);
    ok = ok && oracle_shapes[0].conv_cols == 9 && oracle_shapes[0].pooled_cols == 5 && oracle_shapes[1].conv_cols == 6 &&
         oracle_shapes[1].folded_rows == 2 && oracle_shapes[1].pooled_cols == 3;
    return got.str();
  });
}

Result nbow_permutation(std::size_t cases, std::uint64_t seed) {
  return timed("nbow logits are permutation invariant", [&](bool& ok) {
    NetworkSpec spec = tiny_spec(ModelKind::Nbow);
    spec.vocab_size = 30;
    const Network net(spec);
    Rng rng(seed);
    ParameterStore params = net.make_parameters();
    net.initialize(params, rng);
    std::size_t bad = 0;
    for (std::size_t c = 0; c < cases; ++c) {
      auto sentence = random_sentence(rng, spec.vocab_size, 1 + rng.below(20));
      const auto a = net.forward(params, sentence, Mode::Infer).logits;
      rng.shuffle(sentence);
      const auto b = net.forward(params, sentence, Mode::Infer).logits;
      if (a != b) ++bad;
    }
    ok = bad == 0;
    return std::to_string(cases) + " permutations, " + std::to_string(bad) + " with differing logits";
  });
}

Result inspector_consistency(std::uint64_t seed) {
  return timed("inspector activations match recomputation", [&](bool& ok) {
    const std::size_t vocab_size = 60;
    const NetworkSpec spec = binary_sentiment_spec(vocab_size);
    const Network net(spec);
    Rng rng(seed);
    ParameterStore params = net.make_parameters();
    net.initialize(params, rng);
    std::vector<std::vector<std::string>> toks;
    for (std::size_t i = 0; i + 2 < vocab_size; ++i) toks.push_back({"w" + std::to_string(i)});
    const Vocabulary vocab = Vocabulary::build(toks);
    std::vector<std::vector<WordId>> corpus;
    for (std::size_t i = 0; i < 40; ++i) corpus.push_back(random_sentence(rng, vocab_size, 3 + rng.below(20)));

    const std::size_t width = spec.layers[0].width;
    const auto reports = top_ngrams(spec, params, corpus, vocab, width, 5);
    double worst = 0.0;
    std::size_t short_lists = 0;
    for (const DetectorReport& rep : reports) {
      if (rep.top.size() != 5) ++short_lists;
      for (const NgramScore& s : rep.top) {
        worst = std::max(worst, std::abs(s.activation - detector_response(spec, params, rep.map, rep.row, s.ids)));
      }
    }
    const std::size_t expected = spec.layers[0].maps * spec.embed_dim;
    ok = reports.size() == expected && expected == 288 && worst <= 1e-10 && short_lists == 0;
    return std::to_string(reports.size()) + " detectors, max recompute diff " + fmt("%.3g", worst);
  });
}

std::vector<Result> run_all(std::uint64_t seed) {
  return {
      fft_oracle(200, seed + 10),
      conv_oracle(1000, seed + 11),
      kmax_oracle(10000, seed + 12),
      dynamic_k_example(),
      dynamic_k_properties(),
      simd_equivalence(500, seed + 13),
      gradient_check(ModelKind::Dcnn, 1e-4, seed + 14),
      gradient_check(ModelKind::MaxTdnn, 1e-4, seed + 15),
      gradient_check(ModelKind::Nbow, 1e-6, seed + 16),
      shape_law(),
      illustrated_shapes(),
      nbow_permutation(200, seed + 17),
      inspector_consistency(seed + 18),
  };
}

}  // namespace dcnn::selfcheck
