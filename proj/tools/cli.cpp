#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "dcnn/checkpoint.hpp"
#include "dcnn/config.hpp"
#include "dcnn/data.hpp"
#include "dcnn/error.hpp"
#include "dcnn/gradcheck.hpp"
#include "dcnn/inspect.hpp"
#include "dcnn/simd.hpp"
#include "dcnn/training.hpp"
#include "selfcheck.hpp"

namespace dcnn::cli {
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  bool deterministic = false;
};

std::string flag_text(bool v) { return v ? "1" : "0"; }

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::map<std::string, std::string> tokenizer_meta(const TokenizerOptions& t) {
  return {{"tokenize", t.mode == TokenizeMode::Tweet ? "tweet" : "plain"},
          {"lowercase", flag_text(t.lowercase)},
          {"normalize_users", flag_text(t.normalize_users)},
          {"normalize_urls", flag_text(t.normalize_urls)},
          {"squeeze_letters", flag_text(t.squeeze_letters)},
          {"strip_emoticons", flag_text(t.strip_emoticons)}};
}

TokenizerOptions tokenizer_from_meta(const std::map<std::string, std::string>& meta) {
  auto get = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw DataError(std::string("checkpoint lacks tokenizer setting '") + key + "'");
    return it->second;
  };
  TokenizerOptions t;
  t.mode = parse_tokenize_mode(get("tokenize"));
  t.lowercase = get("lowercase") == "1";
  t.normalize_users = get("normalize_users") == "1";
  t.normalize_urls = get("normalize_urls") == "1";
  t.squeeze_letters = get("squeeze_letters") == "1";
  t.strip_emoticons = get("strip_emoticons") == "1";
  return t;
}

LabelMap labels_from_meta(const std::map<std::string, std::string>& meta) {
  auto it = meta.find("labels");
  if (it == meta.end()) throw DataError("checkpoint lacks label names");
  return LabelMap(split(it->second, '\t'));
}

void apply_globals(const Globals& g) {
  if (g.deterministic) simd::select(simd::Isa::Scalar);
}

Vocabulary vocabulary_for(const fs::path& checkpoint, const std::string& vocab_flag, const Checkpoint& ckpt) {
  const fs::path vocab_path = vocab_flag.empty() ? checkpoint.parent_path() / "vocab.tsv" : fs::path(vocab_flag);
  Vocabulary vocab = Vocabulary::load(vocab_path);
  if (vocab.hash() != ckpt.vocab_hash) {
    throw DataError("vocabulary '" + vocab_path.string() + "' does not match the checkpoint");
  }
  return vocab;
}

// ---- train ----

struct LoadedData {
  Vocabulary vocab;
  LabelMap labels;
  Corpus train, dev, test;
};

LoadedData load_data(const DataConfig& d) {
  std::vector<RawExample> train_raw, dev_raw, test_raw;
  if (d.format == CorpusFormat::Treebank) {
    TreebankSplits tb = load_treebank(d.train, d.phrases, d.tokenizer);
    train_raw = expand_phrases(tb.train);
    dev_raw = std::move(tb.dev);
    test_raw = std::move(tb.test);
  } else {
    train_raw = load_tsv(d.train);
    if (!d.dev.empty()) dev_raw = load_tsv(d.dev);
    if (!d.test.empty()) test_raw = load_tsv(d.test);
  }
  if (train_raw.empty()) throw DataError("training data '" + d.train.string() + "' is empty");

  std::vector<RawExample> all(train_raw);
  all.insert(all.end(), dev_raw.begin(), dev_raw.end());
  all.insert(all.end(), test_raw.begin(), test_raw.end());

  LoadedData out;
  out.labels = LabelMap::build(all);
  const auto train_tok = tokenize_all(train_raw, d.tokenizer);
  std::vector<std::vector<std::string>> sentences;
  for (const auto& t : train_tok) sentences.push_back(t.tokens);
  out.vocab = Vocabulary::build(sentences, d.min_count);
  out.train = encode_corpus(train_tok, out.vocab, out.labels, Split::Train);
  out.dev = encode_corpus(tokenize_all(dev_raw, d.tokenizer), out.vocab, out.labels, Split::Dev);
  out.test = encode_corpus(tokenize_all(test_raw, d.tokenizer), out.vocab, out.labels, Split::Test);
  return out;
}

int cmd_train(const std::string& config_path, const Globals& g, std::ostream& out) {
  RunConfig cfg = load_run_config(config_path);
  if (g.seed) cfg.train.seed = *g.seed;
  if (g.threads) cfg.train.threads = *g.threads;
  if (g.deterministic) cfg.train.deterministic = true;
  apply_globals(g);

  LoadedData data = load_data(cfg.data);
  NetworkSpec spec = cfg.model;
  spec.vocab_size = data.vocab.size();
  spec.classes = data.labels.size();
  if (spec.classes < 2) throw DataError("training data has fewer than two labels");
  const Network net(spec);

  std::optional<ParameterStore> initial;
  if (!cfg.data.embeddings.empty()) {
    Rng rng(cfg.train.seed);
    ParameterStore params = net.make_parameters();
    net.initialize(params, rng);
    EmbeddingLoad emb = load_embeddings(cfg.data.embeddings, data.vocab, spec.embed_dim, rng);
    params.value("embeddings") = std::move(emb.table);
    out << "embeddings: " << emb.found << "/" << emb.eligible << " vocabulary entries found\n";
    initial = std::move(params);
  }

  fs::create_directories(cfg.output_dir);
  data.vocab.save(cfg.output_dir / "vocab.tsv");
  std::ofstream metrics(cfg.output_dir / "metrics.tsv", std::ios::trunc);
  if (!metrics) throw DataError("cannot write '" + (cfg.output_dir / "metrics.tsv").string() + "'");
  metrics << "epoch\ttrain_loss\ttrain_acc\tdev_loss\tdev_acc\n";

  Checkpoint ckpt;
  ckpt.spec = spec;
  ckpt.vocab_hash = data.vocab.hash();
  ckpt.meta = tokenizer_meta(cfg.data.tokenizer);
  ckpt.meta["labels"] = join(data.labels.names(), '\t');
  ckpt.meta["seed"] = std::to_string(cfg.train.seed);

  TrainHooks hooks;
  hooks.on_epoch = [&](const EpochMetrics& m) {
    write_metrics_line(metrics, m);
    metrics.flush();
    write_metrics_line(out, m);
  };
  hooks.on_improvement = [&](const ParameterStore& params, const EpochMetrics& m) {
    ckpt.params = params;
    ckpt.meta["epoch"] = std::to_string(m.epoch);
    save_checkpoint(cfg.output_dir / "checkpoint.bin", ckpt);
  };

  out << "train " << data.train.size() << " examples, dev " << data.dev.size() << ", test " << data.test.size()
      << ", vocabulary " << data.vocab.size() << ", classes " << spec.classes << ", kernels "
      << simd::isa_name(simd::active().isa) << "\n";
  const TrainResult result = train(spec, data.train, data.dev.empty() ? nullptr : &data.dev, cfg.train, hooks,
                                   std::move(initial));
  out << "best epoch " << result.best_epoch << "\n";
  if (!data.test.empty()) {
    const Evaluation ev = evaluate(net, result.params, data.test);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", ev.accuracy);
    out << "test accuracy " << buf << " (" << ev.correct << "/" << ev.total << ")\n";
  }
  return kExitOk;
}

// ---- eval ----

int cmd_eval(const std::string& ckpt_path, const std::string& data_path, const std::string& vocab_flag,
             const Globals& g, std::ostream& out) {
  apply_globals(g);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Vocabulary vocab = vocabulary_for(ckpt_path, vocab_flag, ckpt);
  const LabelMap labels = labels_from_meta(ckpt.meta);
  const auto raw = load_tsv(data_path);
  if (raw.empty()) throw DataError("evaluation file '" + data_path + "' has no examples");
  const Corpus corpus = encode_corpus(tokenize_all(raw, tokenizer_from_meta(ckpt.meta)), vocab, labels, Split::Test);
  if (corpus.empty()) throw DataError("evaluation file '" + data_path + "' has no usable examples");

  const Network net(ckpt.spec);
  const Evaluation ev = evaluate(net, ckpt.params, corpus);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", ev.accuracy);
  out << "accuracy " << buf << " (" << ev.correct << "/" << ev.total << ")\n";
  for (std::size_t c = 0; c < labels.size(); ++c) {
    out << "class " << labels.name(c) << "\t" << ev.class_correct[c] << "/" << ev.class_total[c] << "\n";
  }
  return kExitOk;
}

// ---- inspect ----

int cmd_inspect(const std::string& ckpt_path, const std::vector<std::string>& corpora, std::size_t top_n,
                std::size_t gram, const std::string& report_path, const std::string& vocab_flag, const Globals& g,
                std::ostream& out) {
  apply_globals(g);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  if (ckpt.spec.kind != ModelKind::Dcnn) throw ConfigError("inspect needs a DCNN checkpoint");
  const Vocabulary vocab = vocabulary_for(ckpt_path, vocab_flag, ckpt);
  const TokenizerOptions tok = tokenizer_from_meta(ckpt.meta);
  std::vector<std::vector<WordId>> sentences;
  for (const std::string& path : corpora) {
    for (const RawExample& ex : load_tsv(path)) sentences.push_back(vocab.encode(tokenize(ex.text, tok)));
  }
  const std::size_t width = ckpt.spec.layers.at(0).width;
  if (gram == 0) gram = width;
  if (gram != width) {
    throw ConfigError("--gram must equal the layer-1 filter width (" + std::to_string(width) + ")");
  }
  const auto reports = top_ngrams(ckpt.spec, ckpt.params, sentences, vocab, gram, top_n);
  if (report_path.empty() || report_path == "-") {
    write_report(out, reports);
  } else {
    std::ofstream file(report_path, std::ios::trunc);
    if (!file) throw DataError("cannot write '" + report_path + "'");
    write_report(file, reports);
    out << reports.size() << " detectors written to " << report_path << "\n";
  }
  return kExitOk;
}

// ---- gradcheck ----

struct GradcheckArgs {
  std::string config;
  std::string model = "dcnn";
  double tolerance = 1e-4;
  bool inject_fault = false;
  std::size_t sentences = 4;
};

NetworkSpec gradcheck_spec(const GradcheckArgs& a) {
  NetworkSpec spec;
  if (!a.config.empty()) {
    spec = load_run_config(a.config).model;
  } else {
    ModelKind kind;
    try {
      kind = parse_model_kind(a.model);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--model: ") + e.what());
    }
    switch (kind) {
      case ModelKind::Dcnn:
        spec = tiny_dcnn_spec();
        break;
      case ModelKind::MaxTdnn:
        spec.kind = ModelKind::MaxTdnn;
        spec.embed_dim = 6;
        spec.layers = {ConvLayerSpec{3, 2, false, 0}};
        break;
      case ModelKind::Nbow:
        spec.kind = ModelKind::Nbow;
        spec.embed_dim = 6;
        break;
    }
  }
  spec.vocab_size = 12;
  spec.classes = 3;
  spec.dropout = 0.0;
  return spec;
}

int cmd_gradcheck(const GradcheckArgs& a, const Globals& g, std::ostream& out) {
  apply_globals(g);
  const NetworkSpec spec = gradcheck_spec(a);
  const Network net(spec);
  Rng rng(g.seed.value_or(15));
  GradCheckOptions opts;
  if (a.inject_fault) {
    opts.tamper = [](GradientSet& grads) {
      for (std::size_t i = 0; i < grads.size(); ++i) {
        if (grads[i].size() > 0) grads[i].values()[0] += 0.5;
      }
    };
  }
  double worst = 0.0;
  for (std::size_t n = 0; n < a.sentences; ++n) {
    ParameterStore params = net.make_parameters();
    net.initialize(params, rng);
    for (Parameter& p : params) {
      if (p.group == ParamGroup::Biases) rng.fill_uniform(p.value.values(), -0.3, 0.3);
    }
    Example ex;
    ex.words.resize(2 + rng.below(9));
    for (auto& w : ex.words) w = static_cast<WordId>(rng.below(spec.vocab_size));
    ex.label = rng.below(spec.classes);
    // Faults land on entry 0 of each array; make sure the embedding row is checked.
    if (a.inject_fault) ex.words[0] = 0;
    const GradCheckReport rep = grad_check(net, params, ex, opts);
    for (const GroupError& ge : rep.groups) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "sentence %zu  %-10s  max rel err %.3e  (%zu entries, worst %s)\n", n,
                    std::string(param_group_name(ge.group)).c_str(), ge.max_relative_error, ge.checked,
                    ge.worst_entry.c_str());
      out << buf;
      worst = std::max(worst, ge.max_relative_error);
    }
  }
  const bool pass = worst < a.tolerance;
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s: max relative error %.3e, tolerance %.1e\n", pass ? "PASS" : "FAIL", worst,
                a.tolerance);
  out << buf;
  return pass ? kExitOk : kExitFailure;
}

// ---- selfcheck ----

int cmd_selfcheck(const Globals& g, std::ostream& out) {
  apply_globals(g);
  bool all = true;
  for (const selfcheck::Result& r : selfcheck::run_all(g.seed.value_or(1))) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " (%.2fs)", r.seconds);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << buf << "\n";
    all = all && r.passed;
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic convolutional sentence classifier", "dcnn"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random draw (overrides the config)");
  app.add_option("--threads", g.threads, "Worker threads for training")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", g.deterministic, "Scalar kernels and one thread; bit-reproducible");

  std::string train_config;
  auto* train_cmd = app.add_subcommand("train", "Train from a config file");
  train_cmd->add_option("config", train_config, "INI config")->required();

  std::string eval_ckpt, eval_data, eval_vocab;
  auto* eval_cmd = app.add_subcommand("eval", "Accuracy of a checkpoint on a labelled TSV file");
  eval_cmd->add_option("checkpoint", eval_ckpt)->required();
  eval_cmd->add_option("data", eval_data)->required();
  eval_cmd->add_option("--vocab", eval_vocab, "Vocabulary dump (default: vocab.tsv beside the checkpoint)");

  std::string insp_ckpt, insp_report, insp_vocab;
  std::vector<std::string> insp_corpora;
  std::size_t insp_top = 5, insp_gram = 0;
  auto* insp_cmd = app.add_subcommand("inspect", "Top n-grams of every first-layer feature detector");
  insp_cmd->add_option("checkpoint", insp_ckpt)->required();
  insp_cmd->add_option("corpus", insp_corpora, "Labelled TSV files")->required();
  insp_cmd->add_option("-n,--top", insp_top, "n-grams per detector")->check(CLI::PositiveNumber);
  insp_cmd->add_option("--gram", insp_gram, "n-gram length (default: layer-1 filter width)");
  insp_cmd->add_option("-o,--output", insp_report, "Report file (default: stdout)");
  insp_cmd->add_option("--vocab", insp_vocab, "Vocabulary dump (default: vocab.tsv beside the checkpoint)");

  GradcheckArgs gc;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  gc_cmd->add_option("--config", gc.config, "Take the [model] section from this config");
  gc_cmd->add_option("--model", gc.model, "dcnn, maxtdnn or nbow (without --config)");
  gc_cmd->add_option("--tolerance", gc.tolerance, "Maximum relative error")->check(CLI::PositiveNumber);
  gc_cmd->add_option("--sentences", gc.sentences, "Random sentences to check")->check(CLI::PositiveNumber);
  gc_cmd->add_flag("--inject-gradient-fault", gc.inject_fault, "Corrupt the analytic gradient (negative control)");

  auto* self_cmd = app.add_subcommand("selfcheck", "Run the built-in property suites");

  std::vector<std::string> argv_store{"dcnn"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'dcnn --help' for usage\n";
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_config, g, out);
    if (*eval_cmd) return cmd_eval(eval_ckpt, eval_data, eval_vocab, g, out);
    if (*insp_cmd) return cmd_inspect(insp_ckpt, insp_corpora, insp_top, insp_gram, insp_report, insp_vocab, g, out);
    if (*gc_cmd) return cmd_gradcheck(gc, g, out);
    if (*self_cmd) return cmd_selfcheck(g, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace dcnn::cli
