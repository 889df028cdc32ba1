#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dcnn/mat.hpp"
#include "dcnn/network.hpp"
#include "dcnn/rng.hpp"

namespace dcnn {

struct RawExample {
  std::string label;
  std::string text;
};

/// Parses `label<TAB>text` lines. Blank lines are skipped; an empty file
/// yields no examples and a warning on stderr.
std::vector<RawExample> load_tsv(const std::filesystem::path& path);

enum class TokenizeMode { Plain, Tweet };

TokenizeMode parse_tokenize_mode(std::string_view name);

struct TokenizerOptions {
  TokenizeMode mode = TokenizeMode::Plain;
  bool lowercase = true;
  // The rest only apply in tweet mode.
  bool normalize_users = true;    // @name -> <user>
  bool normalize_urls = true;     // http://..., https://..., www.... -> <url>
  bool squeeze_letters = true;    // runs of more than three identical letters -> three
  bool strip_emoticons = true;
};

inline constexpr std::string_view kUserToken = "<user>";
inline constexpr std::string_view kUrlToken = "<url>";

/// Lowercases (ASCII), splits on whitespace and separates ASCII punctuation
/// into single-character tokens. Tweet mode first rewrites mentions and URLs,
/// drops emoticons and squeezes repeated letters.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts = {});

class Vocabulary {
 public:
  static constexpr WordId kPad = 0;
  static constexpr WordId kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  /// Tokens seen at least min_count times get ids, most frequent first
  /// (ties in byte order).
  static Vocabulary build(std::span<const std::vector<std::string>> sentences, std::size_t min_count = 1);

  std::size_t size() const { return tokens_.size(); }
  WordId id(std::string_view token) const;  // kUnk when absent
  bool contains(std::string_view token) const;
  const std::string& token(WordId id) const;
  std::size_t count(WordId id) const { return counts_.at(id); }

  std::vector<WordId> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const WordId> ids) const;

  /// FNV-1a over the dump lines; ties a checkpoint to its vocabulary.
  std::uint64_t hash() const;

  /// `id<TAB>token<TAB>count` per line.
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  void push(std::string token, std::size_t count);

  std::vector<std::string> tokens_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, WordId> index_;
};

/// Label names to ids. Numeric labels sort numerically, others in byte order.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<std::string> names);

  static LabelMap build(std::span<const RawExample> examples);

  std::size_t size() const { return names_.size(); }
  std::size_t id(std::string_view name) const;  // throws DataError if unknown
  const std::string& name(std::size_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct Example {
  std::vector<WordId> words;
  std::size_t label = 0;
};

enum class Split { Train, Dev, Test };

struct Corpus {
  Split split = Split::Train;
  std::vector<Example> examples;
  std::vector<std::string> label_names;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

struct TokenizedExample {
  std::vector<std::string> tokens;
  std::string label;
};

std::vector<TokenizedExample> tokenize_all(std::span<const RawExample> raw, const TokenizerOptions& opts);

/// Encodes tokenized examples. Empty token lists are dropped with a warning;
/// unknown labels throw DataError.
Corpus encode_corpus(std::span<const TokenizedExample> examples, const Vocabulary& vocab, const LabelMap& labels,
                     Split split);

/// A treebank sentence together with the labelled phrases inside it.
struct TreebankRecord {
  std::string text;
  std::string label;
  std::vector<RawExample> subphrases;
};

/// Each sentence plus each of its labelled subphrases becomes one instance.
std::vector<RawExample> expand_phrases(std::span<const TreebankRecord> records);

struct TreebankSplits {
  std::vector<TreebankRecord> train;
  std::vector<RawExample> dev;
  std::vector<RawExample> test;
};

/// Two-file treebank layout:
///   sentences: `split<TAB>label<TAB>text`, split one of train/dev/test
///   phrases:   `label<TAB>phrase`
/// A phrase is attached to the first training sentence that contains it as a
/// contiguous, strictly shorter token run. Phrases found only in dev/test
/// sentences are ignored.
TreebankSplits load_treebank(const std::filesystem::path& sentences, const std::filesystem::path& phrases,
                             const TokenizerOptions& opts);

struct EmbeddingLoad {
  Mat table;
  std::size_t found = 0;     // non-reserved vocabulary entries present in the file
  std::size_t eligible = 0;  // non-reserved vocabulary entries
  double coverage() const { return eligible == 0 ? 0.0 : static_cast<double>(found) / static_cast<double>(eligible); }
};

/// Reads `token v1 ... vd` lines (an optional `count dim` header is skipped).
/// Tokens missing from the file get uniform(-0.1, 0.1) vectors from rng.
EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim, Rng& rng);

}  // namespace dcnn
