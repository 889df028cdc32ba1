#include "dcnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <thread>

#include "dcnn/error.hpp"
#include "dcnn/simd.hpp"

namespace dcnn {
namespace {

// SplitMix64 finaliser; decorrelates the per-example dropout streams.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void example_gradient(const Network& net, const ParameterStore& params, const Example& ex, std::uint64_t seed,
                      double scale, GradientSet& grads) {
  Rng rng(seed);
  const ForwardTrace trace = net.forward(params, ex.words, Mode::Train, &rng);
  net.backward(trace, ex.label, params, grads, scale);
}

}  // namespace

void TrainConfig::validate() const {
  require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be positive");
  require(epsilon > 0.0, "epsilon must be positive");
  for (double l : l2.by_group) require(l >= 0.0 && std::isfinite(l), "L2 coefficients must be non-negative");
  require(batch_size > 0, "batch_size must be positive");
  require(threads > 0, "threads must be positive");
}

AdagradState::AdagradState(const ParameterStore& params) {
  accum_.reserve(params.size());
  for (const Parameter& p : params) accum_.emplace_back(p.value.rows(), p.value.cols());
}

void adagrad_step(ParameterStore& params, AdagradState& state, const TrainConfig& cfg) {
  require(state.size() == params.size(), "adagrad_step: state does not match parameters");
  const auto& k = simd::active();
  for (std::size_t i = 0; i < params.size(); ++i) {
    Mat& theta = params[i].value;
    Mat& g = params.grads()[i];
    Mat& acc = state[i];
    require(g.same_shape(theta) && acc.same_shape(theta), "adagrad_step: shape mismatch");
    k.adagrad(theta.values().data(), g.values().data(), acc.values().data(), theta.size(), cfg.learning_rate,
              cfg.epsilon);
  }
}

double loss(std::span<const double> log_probs, std::size_t label, const ParameterStore& params,
            const L2Coefficients& l2) {
  require(label < log_probs.size(), "loss: label out of range");
  return -log_probs[label] + l2_penalty(params, l2);
}

Evaluation evaluate(const Network& net, const ParameterStore& params, const Corpus& corpus,
                    const L2Coefficients& l2) {
  Evaluation ev;
  const std::size_t classes = net.spec().classes;
  ev.class_total.assign(classes, 0);
  ev.class_correct.assign(classes, 0);
  double ce = 0.0;
  for (const Example& ex : corpus.examples) {
    require(ex.label < classes, "evaluate: label out of range");
    const ForwardTrace t = net.forward(params, ex.words, Mode::Infer);
    ce -= t.log_probs[ex.label];
    ++ev.class_total[ex.label];
    if (t.predicted() == ex.label) {
      ++ev.correct;
      ++ev.class_correct[ex.label];
    }
  }
  ev.total = corpus.size();
  if (ev.total > 0) {
    ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(ev.total);
    ev.loss = ce / static_cast<double>(ev.total);
  }
  ev.loss += l2_penalty(params, l2);
  return ev;
}

void write_metrics_line(std::ostream& out, const EpochMetrics& m) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu\t%.9f\t%.6f\t%.9f\t%.6f\n", m.epoch, m.train_loss, m.train_accuracy,
                m.dev_loss, m.dev_accuracy);
  out << buf;
}

void accumulate_batch_gradient(const Network& net, const ParameterStore& params, const Corpus& corpus,
                               std::span<const std::size_t> batch, std::uint64_t dropout_seed, GradientSet& grads,
                               std::size_t threads) {
  if (batch.empty()) return;
  const double scale = 1.0 / static_cast<double>(batch.size());
  auto seed_for = [&](std::size_t pos) { return mix(dropout_seed ^ mix(pos)); };

  threads = std::min(threads, batch.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) {
      example_gradient(net, params, corpus.examples.at(batch[i]), seed_for(i), scale, grads);
    }
    return;
  }

  // Contiguous chunks, reduced in chunk order, so the result depends only on
  // the thread count.
  std::vector<GradientSet> partial(threads);
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::jthread> workers;
  const std::size_t chunk = (batch.size() + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        partial[t] = params.make_gradient_set();
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(batch.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) {
          example_gradient(net, params, corpus.examples.at(batch[i]), seed_for(i), scale, partial[t]);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  workers.clear();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const GradientSet& p : partial) grads.add(p);
}

TrainResult train(const NetworkSpec& spec, const Corpus& train_split, const Corpus* dev_split, const TrainConfig& cfg,
                  const TrainHooks& hooks, std::optional<ParameterStore> initial) {
  cfg.validate();
  require(!train_split.empty(), "train: training split is empty");
  const Network net(spec);
  Rng rng(cfg.seed);

  ParameterStore params;
  if (initial) {
    params = std::move(*initial);
    net.layout(params);
  } else {
    params = net.make_parameters();
    net.initialize(params, rng);
  }
  params.grads().set_zero();
  AdagradState state(params);
  const std::size_t threads = cfg.deterministic ? 1 : cfg.threads;
  const bool has_dev = dev_split != nullptr && !dev_split->empty();

  TrainResult result;
  auto measure = [&](std::size_t epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    const Evaluation tr = evaluate(net, params, train_split, cfg.l2);
    m.train_loss = tr.loss;
    m.train_accuracy = tr.accuracy;
    if (has_dev) {
      const Evaluation dv = evaluate(net, params, *dev_split, cfg.l2);
      m.dev_loss = dv.loss;
      m.dev_accuracy = dv.accuracy;
    }
    result.metrics.push_back(m);
    if (hooks.on_epoch) hooks.on_epoch(m);
    return has_dev ? m.dev_accuracy : m.train_accuracy;
  };

  double best = measure(0);
  result.params = params;
  result.best_epoch = 0;
  if (hooks.on_improvement) hooks.on_improvement(params, result.metrics.back());

  std::vector<std::size_t> order(train_split.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t stale = 0;
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
      const std::span<const std::size_t> batch(order.data() + lo, hi - lo);
      accumulate_batch_gradient(net, params, train_split, batch, mix(cfg.seed ^ mix(++step)), params.grads(), threads);
      add_l2_gradient(params, cfg.l2, params.grads());
      adagrad_step(params, state, cfg);
    }

    const double score = measure(epoch);
    if (score > best) {
      best = score;
      result.params = params;
      result.best_epoch = epoch;
      stale = 0;
      if (hooks.on_improvement) hooks.on_improvement(params, result.metrics.back());
    } else if (has_dev && cfg.patience > 0 && ++stale >= cfg.patience) {
      break;
    }
  }
  result.params.grads().set_zero();
  result.last = std::move(params);
  result.last.grads().set_zero();
  return result;
}

}  // namespace dcnn
