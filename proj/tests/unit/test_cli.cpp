#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "dcnn/checkpoint.hpp"
#include "dcnn/data.hpp"
#include "tmpdir.hpp"

using namespace dcnn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path toy(const char* name) { return fs::path(DCNN_SOURCE_DIR) / "data" / "toy" / name; }

std::string toy_config(const fs::path& out_dir, const fs::path& train = toy("train.tsv")) {
  return "[model]\nkind = dcnn\nembed_dim = 8\nwidths = 3, 2\nmaps = 3, 3\nfolding = 0, 1\nk_top = 2\ndropout = 0\n"
         "[train]\nbatch_size = 8\nmax_epochs = 6\npatience = 0\n"
         "[data]\ntrain = " + train.string() + "\ndev = " + toy("dev.tsv").string() +
         "\ntest = " + toy("test.tsv").string() + "\n[run]\noutput_dir = " + out_dir.string() + "\n";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("train, eval and inspect on the toy corpus") {
  TempDir tmp;
  const fs::path out_dir = tmp.path() / "run";
  const auto cfg = tmp.file("toy.ini", toy_config(out_dir));
  const Outcome t = run({"--deterministic", "train", cfg.string()});
  REQUIRE_MESSAGE(t.code == 0, t.err);
  CHECK(t.out.find("test accuracy") != std::string::npos);
  for (const char* f : {"checkpoint.bin", "vocab.tsv", "metrics.tsv"}) CHECK(fs::exists(out_dir / f));
  const std::string metrics = slurp(out_dir / "metrics.tsv");
  CHECK(metrics.rfind("epoch\t", 0) == 0);
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 1 + 7);

  const Checkpoint ckpt = load_checkpoint(out_dir / "checkpoint.bin");
  CHECK(ckpt.meta.at("seed") == "1");
  CHECK(ckpt.meta.at("labels") == "0\t1");

  const Outcome e = run({"eval", (out_dir / "checkpoint.bin").string(), toy("test.tsv").string()});
  REQUIRE_MESSAGE(e.code == 0, e.err);
  CHECK(e.out.rfind("accuracy ", 0) == 0);
  CHECK(e.out.find("class 1\t") != std::string::npos);

  const fs::path report = tmp.path() / "report.txt";
  const Outcome i = run({"inspect", (out_dir / "checkpoint.bin").string(), toy("train.tsv").string(), "-n", "3", "-o",
                         report.string()});
  REQUIRE_MESSAGE(i.code == 0, i.err);
  const std::string text = slurp(report);
  CHECK(text.rfind("detector 0:0\n", 0) == 0);
  CHECK(text.find("detector 2:7\n") != std::string::npos);
  CHECK(run({"inspect", (out_dir / "checkpoint.bin").string(), toy("train.tsv").string(), "--gram", "2"}).code == 2);

  SUBCASE("seed flag overrides the config and runs repeat exactly") {
    const fs::path other = tmp.path() / "seeded";
    const auto cfg2 = tmp.file("seeded.ini", toy_config(other));
    REQUIRE(run({"--seed", "7", "--deterministic", "train", cfg2.string()}).code == 0);
    CHECK(load_checkpoint(other / "checkpoint.bin").meta.at("seed") == "7");
    const std::string first = slurp(other / "metrics.tsv");
    REQUIRE(run({"--seed", "7", "--deterministic", "train", cfg2.string()}).code == 0);
    CHECK(slurp(other / "metrics.tsv") == first);
    CHECK(first != metrics);
  }
  SUBCASE("empty evaluation file") {
    const auto empty = tmp.file("empty.tsv", "");
    const Outcome bad = run({"eval", (out_dir / "checkpoint.bin").string(), empty.string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("empty.tsv") != std::string::npos);
  }
  SUBCASE("vocabulary mismatch") {
    const auto other_vocab = tmp.file("v.tsv", "0\t<pad>\t0\n1\t<unk>\t0\n2\tzz\t1\n");
    const Outcome bad =
        run({"eval", (out_dir / "checkpoint.bin").string(), toy("test.tsv").string(), "--vocab", other_vocab.string()});
    CHECK(bad.code == 2);
  }
}

TEST_CASE("missing data file is a usage error naming the path") {
  TempDir tmp;
  const fs::path missing = tmp.path() / "no_such_train.tsv";
  const auto cfg = tmp.file("c.ini", toy_config(tmp.path() / "run", missing));
  const Outcome o = run({"train", cfg.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("no_such_train.tsv") != std::string::npos);
  CHECK(run({"train", (tmp.path() / "absent.ini").string()}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--threads", "0", "selfcheck"}).code == 2);
}

TEST_CASE("zero-weight checkpoint on a balanced set scores one half") {
  TempDir tmp;
  const std::vector<std::vector<std::string>> sents{{"good"}, {"bad"}};
  const Vocabulary vocab = Vocabulary::build(sents);
  vocab.save(tmp.path() / "vocab.tsv");
  Checkpoint c;
  c.spec = tiny_dcnn_spec(vocab.size(), 2);
  c.vocab_hash = vocab.hash();
  c.params = Network(c.spec).make_parameters();
  c.meta = {{"labels", "neg\tpos"},        {"tokenize", "plain"},       {"lowercase", "1"},
            {"normalize_users", "1"},      {"normalize_urls", "1"},     {"squeeze_letters", "1"},
            {"strip_emoticons", "1"}};
  save_checkpoint(tmp.path() / "zero.bin", c);
  const auto data = tmp.file("d.tsv", "pos\tgood\nneg\tbad\npos\tgood good\nneg\tbad bad\n");
  const Outcome o = run({"eval", (tmp.path() / "zero.bin").string(), data.string()});
  REQUIRE_MESSAGE(o.code == 0, o.err);
  CHECK(o.out.rfind("accuracy 0.500000 (2/4)", 0) == 0);
}

TEST_CASE("gradcheck command") {
  const Outcome ok = run({"gradcheck"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS") != std::string::npos);
  CHECK(run({"gradcheck", "--model", "maxtdnn"}).code == 0);
  CHECK(run({"gradcheck", "--model", "nbow"}).code == 0);
  const Outcome fault = run({"gradcheck", "--inject-gradient-fault"});
  CHECK(fault.code == 1);
  CHECK(fault.out.find("FAIL") != std::string::npos);
  // An absurdly tight tolerance fails on rounding noise alone.
  CHECK(run({"gradcheck", "--tolerance", "1e-15"}).code == 1);
  CHECK(run({"gradcheck", "--model", "lstm"}).code == 2);
}

TEST_CASE("selfcheck command") {
  const Outcome o = run({"--deterministic", "selfcheck"});
  CHECK(o.code == 0);
  CHECK(o.out.find("FAIL") == std::string::npos);
}
