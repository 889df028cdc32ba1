#include <doctest.h>

#include "dcnn/data.hpp"
#include "dcnn/error.hpp"
#include "tmpdir.hpp"

using namespace dcnn;

using Tokens = std::vector<std::string>;

TEST_CASE("load_tsv") {
  TempDir tmp;
  const auto rows = load_tsv(tmp.file("a.tsv", "1\tgood movie\n\n0\tbad\r\n"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].label == "1");
  CHECK(rows[0].text == "good movie");
  CHECK(rows[1].text == "bad");
  CHECK(load_tsv(tmp.file("empty.tsv", "")).empty());
  try {
    load_tsv(tmp.file("bad.tsv", "1\tok\nno tab here\n"));
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("bad.tsv:2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_tsv(tmp.path() / "missing.tsv"), DataError);
}

TEST_CASE("tokenize") {
  CHECK(tokenize("Good movie!") == Tokens{"good", "movie", "!"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  a\tb  ") == Tokens{"a", "b"});
  CHECK(tokenize("it's fine.") == Tokens{"it", "'", "s", "fine", "."});

  TokenizerOptions tweet;
  tweet.mode = TokenizeMode::Tweet;
  CHECK(tokenize("@bob http://x.co cooool", tweet) == Tokens{"<user>", "<url>", "coool"});
  CHECK(tokenize("so good :) www.site.org", tweet) == Tokens{"so", "good", "<url>"});
  CHECK(tokenize("YAAAAY", tweet) == Tokens{"yaaay"});
  tweet.normalize_users = false;
  CHECK(tokenize("@bob", tweet) == Tokens{"@", "bob"});
  // Plain mode leaves mentions and repeated letters alone.
  CHECK(tokenize("@bob cooool") == Tokens{"@", "bob", "cooool"});
  CHECK(parse_tokenize_mode("tweet") == TokenizeMode::Tweet);
  CHECK_THROWS_AS(parse_tokenize_mode("bpe"), InvalidArgument);
}

TEST_CASE("vocabulary") {
  const std::vector<Tokens> sents{{"a", "b"}, {"b", "c"}};
  const Vocabulary v1 = Vocabulary::build(sents, 1);
  CHECK(v1.size() == 5);
  CHECK(v1.token(Vocabulary::kPad) == "<pad>");
  CHECK(v1.token(Vocabulary::kUnk) == "<unk>");
  CHECK(v1.token(2) == "b");  // most frequent first
  CHECK(v1.id("zzz") == Vocabulary::kUnk);
  const Vocabulary v2 = Vocabulary::build(sents, 2);
  CHECK(v2.size() == 3);
  CHECK(v2.contains("b"));
  CHECK_FALSE(v2.contains("a"));

  const Tokens words{"c", "q", "a"};
  const auto ids = v1.encode(words);
  CHECK(v1.decode(ids) == Tokens{"c", "<unk>", "a"});

  TempDir tmp;
  v1.save(tmp.path() / "v.tsv");
  const Vocabulary back = Vocabulary::load(tmp.path() / "v.tsv");
  CHECK(back.size() == v1.size());
  CHECK(back.hash() == v1.hash());
  CHECK(back.hash() != v2.hash());
  CHECK_THROWS_AS(Vocabulary::load(tmp.file("bad.tsv", "0\t<pad>\t0\n5\tx\t1\n")), DataError);
}

TEST_CASE("labels") {
  const std::vector<RawExample> num{{"10", ""}, {"2", ""}, {"2", ""}, {"0", ""}};
  const LabelMap a = LabelMap::build(num);
  CHECK(a.names() == Tokens{"0", "2", "10"});
  const std::vector<RawExample> words{{"pos", ""}, {"neg", ""}};
  const LabelMap b = LabelMap::build(words);
  CHECK(b.id("neg") == 0);
  CHECK(b.id("pos") == 1);
  CHECK_THROWS_AS(b.id("neutral"), DataError);
}

TEST_CASE("encode_corpus") {
  const std::vector<TokenizedExample> ex{{{"a", "b"}, "1"}, {{}, "0"}, {{"z"}, "0"}};
  const std::vector<Tokens> sents{{"a", "b"}};
  const Vocabulary v = Vocabulary::build(sents);
  const LabelMap labels(Tokens{"0", "1"});
  const Corpus c = encode_corpus(ex, v, labels, Split::Dev);
  REQUIRE(c.size() == 2);  // the empty example is dropped
  CHECK(c.examples[0].label == 1);
  CHECK(c.examples[1].words == std::vector<WordId>{Vocabulary::kUnk});
  CHECK(c.split == Split::Dev);
  const std::vector<TokenizedExample> odd{{{"a"}, "7"}};
  CHECK_THROWS_AS(encode_corpus(odd, v, labels, Split::Train), DataError);
}

TEST_CASE("phrase expansion") {
  TreebankRecord r{"a fine film", "1", {{"1", "fine"}, {"1", "fine film"}, {"0", "a"}}};
  const std::vector<TreebankRecord> one{r};
  CHECK(expand_phrases(one).size() == 4);
  r.subphrases.clear();
  const std::vector<TreebankRecord> bare{r};
  const auto out = expand_phrases(bare);
  REQUIRE(out.size() == 1);
  CHECK(out[0].text == "a fine film");
}

TEST_CASE("duplicate phrases with different labels are both kept") {
  const TreebankRecord r{"not bad at all", "1", {{"1", "not bad"}, {"0", "not bad"}}};
  const std::vector<TreebankRecord> one{r};
  const auto out = expand_phrases(one);
  REQUIRE(out.size() == 3);
  CHECK(out[1].label != out[2].label);
}

TEST_CASE("tweet normalisation is idempotent") {
  TokenizerOptions tweet;
  tweet.mode = TokenizeMode::Tweet;
  for (const char* text : {"@bob http://x.co cooool", "WOOOOW :) see www.a.b/c?d=1 !!!", "I <3 it... sooo much @x_y",
                           "plain words only", ""}) {
    const auto once = tokenize(text, tweet);
    std::string joined;
    for (const auto& t : once) joined += t + " ";
    CAPTURE(text);
    CHECK(tokenize(joined, tweet) == once);
  }
}

TEST_CASE("vocabulary sees the training split only") {
  const std::vector<Tokens> train{{"a", "b"}};
  const Vocabulary v = Vocabulary::build(train);
  const std::vector<TokenizedExample> dev{{{"c", "d", "a"}, "0"}};
  const Corpus c = encode_corpus(dev, v, LabelMap(Tokens{"0"}), Split::Dev);
  CHECK(v.size() == 4);
  CHECK(c.examples[0].words == std::vector<WordId>{Vocabulary::kUnk, Vocabulary::kUnk, v.id("a")});
  const Tokens in_vocab{"b", "a", "b"};
  CHECK(v.decode(v.encode(in_vocab)) == in_vocab);
}

TEST_CASE("treebank loader") {
  TempDir tmp;
  const auto sentences = tmp.file("s.tsv",
                                  "train\t1\tA fine film .\n"
                                  "train\t0\tA dull film .\n"
                                  "dev\t1\tfine work\n"
                                  "test\t0\tdull work\n");
  const auto phrases = tmp.file("p.tsv",
                                "1\tfine\n"
                                "1\tfine film\n"
                                "0\tdull\n"
                                "1\tA fine film .\n"
                                "1\twork\n");
  const TreebankSplits tb = load_treebank(sentences, phrases, {});
  REQUIRE(tb.train.size() == 2);
  CHECK(tb.dev.size() == 1);
  CHECK(tb.test.size() == 1);
  // Whole-sentence phrases are not subphrases; "work" occurs only outside train.
  CHECK(tb.train[0].subphrases.size() == 2);
  CHECK(tb.train[1].subphrases.size() == 1);
  CHECK(expand_phrases(tb.train).size() == 5);
  CHECK_THROWS_AS(load_treebank(tmp.file("bad.tsv", "valid\t1\tx\n"), phrases, {}), DataError);
}

TEST_CASE("pretrained embeddings") {
  TempDir tmp;
  const std::vector<Tokens> sents{{"a", "b", "c", "d", "e"}};
  const Vocabulary v = Vocabulary::build(sents);
  Rng rng(1);
  SUBCASE("partial overlap") {
    const auto path = tmp.file("e.txt", "3 2\na 1 2\nc 3 4\ne 5 6\nzzz 7 8\n");
    const EmbeddingLoad e = load_embeddings(path, v, 2, rng);
    CHECK(e.found == 3);
    CHECK(e.eligible == 5);
    CHECK(e.coverage() == doctest::Approx(0.6));
    CHECK(e.table(v.id("c"), 1) == 4.0);
    CHECK(std::abs(e.table(v.id("b"), 0)) <= 0.1);
  }
  SUBCASE("no overlap") {
    const EmbeddingLoad e = load_embeddings(tmp.file("n.txt", "x 1 1\n"), v, 2, rng);
    CHECK(e.coverage() == 0.0);
  }
  SUBCASE("full overlap") {
    const auto path = tmp.file("f.txt", "a 1 1\nb 2 2\nc 3 3\nd 4 4\ne 5 5\n");
    const EmbeddingLoad e = load_embeddings(path, v, 2, rng);
    CHECK(e.coverage() == 1.0);
    for (const char* t : {"a", "b", "c", "d", "e"}) CHECK(e.table(v.id(t), 0) == e.table(v.id(t), 1));
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(load_embeddings(tmp.file("d.txt", "a 1 2 3\n"), v, 2, rng), InvalidArgument);
  }
}
