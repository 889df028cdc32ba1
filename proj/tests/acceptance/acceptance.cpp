// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dcnn/data.hpp"
#include "dcnn/network.hpp"
#include "dcnn/training.hpp"
#include "selfcheck.hpp"
#include "synthetic.hpp"

using namespace dcnn;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  enum Kind { Pass, Fail, Skip } kind = Fail;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

Verdict from(const selfcheck::Result& r, double budget) {
  const bool ok = r.passed && r.seconds < budget;
  return {ok ? Verdict::Pass : Verdict::Fail, r.detail + ", " + secs(r.seconds) + " (budget " + secs(budget) + ")"};
}

Verdict conv_criterion() { return from(selfcheck::conv_oracle(1000, 101), 5.0); }

Verdict dynamic_k_criterion() {
  const auto r = selfcheck::dynamic_k_example();
  return {r.passed ? Verdict::Pass : Verdict::Fail, "k = " + r.detail};
}

Verdict kmax_criterion() { return from(selfcheck::kmax_oracle(10000, 103), 5.0); }

Verdict gradient_criterion() {
  const auto t0 = Clock::now();
  const auto dcnn = selfcheck::gradient_check(ModelKind::Dcnn, 1e-4, 104);
  const auto tdnn = selfcheck::gradient_check(ModelKind::MaxTdnn, 1e-4, 105);
  const auto nbow = selfcheck::gradient_check(ModelKind::Nbow, 1e-6, 106);
  const double t = since(t0);
  const bool ok = dcnn.passed && tdnn.passed && nbow.passed && t < 60.0;
  return {ok ? Verdict::Pass : Verdict::Fail,
          "dcnn " + dcnn.detail + "; maxtdnn " + tdnn.detail + "; nbow " + nbow.detail + "; " + secs(t)};
}

Verdict shape_criterion() {
  const auto law = selfcheck::shape_law();
  const auto fig = selfcheck::illustrated_shapes();
  return {law.passed && fig.passed ? Verdict::Pass : Verdict::Fail, law.detail + "; " + fig.detail};
}

Verdict overfit_criterion() {
  const fs::path path = fs::path(DCNN_SOURCE_DIR) / "data" / "toy" / "train.tsv";
  const auto raw = load_tsv(path);
  const auto toks = tokenize_all(raw, {});
  std::vector<std::vector<std::string>> sents;
  for (const auto& t : toks) sents.push_back(t.tokens);
  const Vocabulary vocab = Vocabulary::build(sents);
  const LabelMap labels = LabelMap::build(raw);
  const Corpus corpus = encode_corpus(toks, vocab, labels, Split::Train);

  NetworkSpec spec = tiny_dcnn_spec(vocab.size(), 2);
  TrainConfig cfg;  // defaults throughout; only the epoch budget is fixed
  cfg.max_epochs = 500;

  auto run = [&](std::string& log, std::size_t& first_perfect, double& seconds) {
    std::ostringstream out;
    first_perfect = 0;
    TrainHooks hooks;
    hooks.on_epoch = [&](const EpochMetrics& m) {
      write_metrics_line(out, m);
      if (first_perfect == 0 && m.epoch > 0 && m.train_accuracy == 1.0) first_perfect = m.epoch;
    };
    const auto t0 = Clock::now();
    const TrainResult r = train(spec, corpus, nullptr, cfg, hooks);
    seconds = since(t0);
    log = out.str();
    return r;
  };
  std::string log_a, log_b;
  std::size_t perfect_a = 0, perfect_b = 0;
  double t_a = 0, t_b = 0;
  const TrainResult a = run(log_a, perfect_a, t_a);
  run(log_b, perfect_b, t_b);
  const Evaluation ev = evaluate(Network(spec), a.params, corpus);

  const bool ok = corpus.size() == 32 && labels.size() == 2 && perfect_a > 0 && perfect_a <= 500 &&
                  ev.accuracy == 1.0 && log_a == log_b;
  return {ok ? Verdict::Pass : Verdict::Fail,
          std::to_string(corpus.size()) + " examples, 100% train accuracy first at epoch " + std::to_string(perfect_a) +
              ", best-checkpoint accuracy " + std::to_string(ev.accuracy) + ", logs " +
              (log_a == log_b ? "bit-identical" : "DIFFER") + " over " + std::to_string(a.metrics.size()) +
              " rows, " + secs(t_a)};
}

Verdict order_criterion() {
  const auto perm = selfcheck::nbow_permutation(500, 107);
  const synthetic::OrderTask task = synthetic::order_task(108);
  const NetworkSpec spec = tiny_dcnn_spec(task.vocab_size, 2);
  TrainConfig cfg;
  cfg.max_epochs = 200;
  cfg.batch_size = 10;
  cfg.patience = 0;  // the full budget; the dev split only picks the epoch
  const auto t0 = Clock::now();
  const TrainResult r = train(spec, task.train, &task.dev, cfg);
  const Evaluation ev = evaluate(Network(spec), r.params, task.test);

  NetworkSpec nbow_spec;
  nbow_spec.kind = ModelKind::Nbow;
  nbow_spec.vocab_size = task.vocab_size;
  nbow_spec.embed_dim = 6;
  nbow_spec.classes = 2;
  nbow_spec.dropout = 0.0;
  const TrainResult nb = train(nbow_spec, task.train, &task.dev, cfg);
  const Evaluation nb_ev = evaluate(Network(nbow_spec), nb.params, task.test);

  const bool ok = perm.passed && ev.accuracy > 0.90 && r.metrics.size() <= 201;
  char buf[200];
  std::snprintf(buf, sizeof buf, "dcnn test accuracy %.3f (best epoch %zu), nbow test accuracy %.3f; ", ev.accuracy,
                r.best_epoch, nb_ev.accuracy);
  return {ok ? Verdict::Pass : Verdict::Fail, buf + perm.detail + ", " + secs(since(t0))};
}

Verdict trec_criterion() {
  const char* env = std::getenv("DCNN_TREC_DIR");
  const fs::path dir = env ? fs::path(env) : fs::path(DCNN_SOURCE_DIR) / "data" / "trec";
  const fs::path train_path = dir / "train.tsv", test_path = dir / "test.tsv";
  if (!fs::exists(train_path) || !fs::exists(test_path)) {
    return {Verdict::Skip, "data absent (" + train_path.string() + ", " + test_path.string() + ")"};
  }
  const auto train_raw = load_tsv(train_path);
  const auto test_raw = load_tsv(test_path);
  const auto train_tok = tokenize_all(train_raw, {});
  std::vector<std::vector<std::string>> sents;
  for (const auto& t : train_tok) sents.push_back(t.tokens);
  const Vocabulary vocab = Vocabulary::build(sents);
  std::vector<RawExample> all(train_raw);
  all.insert(all.end(), test_raw.begin(), test_raw.end());
  const LabelMap labels = LabelMap::build(all);
  const Corpus train_c = encode_corpus(train_tok, vocab, labels, Split::Train);
  const Corpus test_c = encode_corpus(tokenize_all(test_raw, {}), vocab, labels, Split::Test);

  // Hold out every tenth training question for early stopping.
  Corpus fit, dev;
  for (std::size_t i = 0; i < train_c.size(); ++i) (i % 10 == 9 ? dev : fit).examples.push_back(train_c.examples[i]);

  const NetworkSpec spec = synthetic::trec_spec(vocab.size(), labels.size());
  TrainConfig cfg;
  cfg.max_epochs = 30;
  const auto t0 = Clock::now();
  const TrainResult r = train(spec, fit, &dev, cfg);
  const double t = since(t0);
  const Evaluation ev = evaluate(Network(spec), r.params, test_c);
  const bool ok = train_c.size() == 5452 && test_c.size() == 500 && ev.accuracy > 0.75 && t < 3600.0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu train / %zu test questions, test accuracy %.3f, best epoch %zu, ",
                train_c.size(), test_c.size(), ev.accuracy, r.best_epoch);
  return {ok ? Verdict::Pass : Verdict::Fail, buf + secs(t)};
}

Verdict inspector_criterion() {
  const auto r = selfcheck::inspector_consistency(109);
  return {r.passed ? Verdict::Pass : Verdict::Fail, r.detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"1 convolution oracle", conv_criterion},
      {"2 dynamic-k worked example", dynamic_k_criterion},
      {"3 k-max pooling oracle", kmax_criterion},
      {"4 gradient check", gradient_criterion},
      {"5 shape law", shape_criterion},
      {"6 overfit sanity", overfit_criterion},
      {"7 order sensitivity", order_criterion},
      {"8 TREC end-to-end", trec_criterion},
      {"9 inspector consistency", inspector_criterion},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.kind == Verdict::Pass ? "PASS" : v.kind == Verdict::Skip ? "SKIP" : "FAIL";
    std::printf("%s  criterion %s: %s\n", tag, name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    if (v.kind == Verdict::Fail) ++failures;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
