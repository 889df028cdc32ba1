#include "dcnn/data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "dcnn/error.hpp"

namespace dcnn {
namespace {

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::string location(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

bool is_ascii_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) != 0;
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(s[i]) != prefix[i]) return false;
  }
  return true;
}

constexpr std::array<std::string_view, 24> kEmoticons = {
    ":)", ":-)", ": )", ":D", ":-D", "=)", "=D", ";)", ";-)", ";D", ":P", ":-P", ":p",
    ":(", ":-(", ": (", "=(", ":'(", ":/", ":-/", "<3", "xD", "XD", ":]"};

bool is_emoticon(std::string_view chunk) {
  return std::find(kEmoticons.begin(), kEmoticons.end(), chunk) != kEmoticons.end();
}

std::string squeeze_runs(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t run = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool letter = std::isalpha(static_cast<unsigned char>(s[i])) != 0;
    run = (i > 0 && s[i] == s[i - 1]) ? run + 1 : 1;
    if (letter && run > 3) continue;
    out.push_back(s[i]);
  }
  return out;
}

void split_punctuation(std::string_view chunk, bool lowercase, std::vector<std::string>& out) {
  std::string word;
  for (char c : chunk) {
    if (is_ascii_punct(c)) {
      if (!word.empty()) out.push_back(std::move(word));
      word.clear();
      out.emplace_back(1, c);
    } else {
      word.push_back(lowercase ? ascii_lower(c) : c);
    }
  }
  if (!word.empty()) out.push_back(std::move(word));
}

bool parse_size(std::string_view s, std::size_t& out) {
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_long(std::string_view s, long long& out) {
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<RawExample> load_tsv(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  std::vector<RawExample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_blank(line)) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(location(path, lineno) + ": expected label<TAB>text");
    RawExample ex{line.substr(0, tab), line.substr(tab + 1)};
    if (ex.label.empty()) throw DataError(location(path, lineno) + ": empty label");
    out.push_back(std::move(ex));
  }
  if (out.empty()) std::cerr << "warning: '" << path.string() << "' contains no examples\n";
  return out;
}

TokenizeMode parse_tokenize_mode(std::string_view name) {
  if (name == "plain") return TokenizeMode::Plain;
  if (name == "tweet") return TokenizeMode::Tweet;
  throw InvalidArgument("unknown tokenize mode '" + std::string(name) + "' (expected plain or tweet)");
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& opts) {
  std::vector<std::string> out;
  for (std::string_view chunk : split_whitespace(text)) {
    if (opts.mode == TokenizeMode::Tweet) {
      if (chunk == kUserToken || chunk == kUrlToken) {
        out.emplace_back(chunk);
        continue;
      }
      if (opts.strip_emoticons && is_emoticon(chunk)) continue;
      if (opts.normalize_users && chunk.size() > 1 && chunk.front() == '@') {
        out.emplace_back(kUserToken);
        continue;
      }
      if (opts.normalize_urls &&
          (starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") || starts_with_ci(chunk, "www."))) {
        out.emplace_back(kUrlToken);
        continue;
      }
      if (opts.squeeze_letters) {
        std::string lowered(chunk);
        if (opts.lowercase) std::transform(lowered.begin(), lowered.end(), lowered.begin(), ascii_lower);
        split_punctuation(squeeze_runs(lowered), false, out);
        continue;
      }
    }
    split_punctuation(chunk, opts.lowercase, out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() {
  push(std::string(kPadToken), 0);
  push(std::string(kUnkToken), 0);
}

void Vocabulary::push(std::string token, std::size_t count) {
  const auto id = static_cast<WordId>(tokens_.size());
  index_.emplace(token, id);
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> sentences, std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& s : sentences) {
    for (const auto& tok : s) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> entries;
  for (auto& [tok, n] : counts) {
    if (n >= min_count && tok != kPadToken && tok != kUnkToken) entries.emplace_back(tok, n);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  Vocabulary v;
  for (auto& [tok, n] : entries) v.push(std::move(tok), n);
  return v;
}

WordId Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return index_.count(std::string(token)) != 0; }

const std::string& Vocabulary::token(WordId id) const {
  require(id < tokens_.size(), "Vocabulary: id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

std::vector<WordId> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<WordId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::vector<std::string> Vocabulary::decode(std::span<const WordId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (WordId i : ids) out.push_back(token(i));
  return out;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    mix(std::to_string(i));
    mix("\t");
    mix(tokens_[i]);
    mix("\t");
    mix(std::to_string(counts_[i]));
    mix("\n");
  }
  return h;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << i << '\t' << tokens_[i] << '\t' << counts_[i] << '\n';
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path);
  Vocabulary v;
  v.tokens_.clear();
  v.counts_.clear();
  v.index_.clear();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    std::size_t id = 0;
    std::size_t count = 0;
    if (fields.size() != 3 || !parse_size(fields[0], id) || !parse_size(fields[2], count)) {
      throw DataError(location(path, lineno) + ": expected id<TAB>token<TAB>count");
    }
    if (id != v.tokens_.size()) throw DataError(location(path, lineno) + ": ids must be consecutive from 0");
    if (v.index_.count(std::string(fields[1]))) throw DataError(location(path, lineno) + ": duplicate token");
    v.push(std::string(fields[1]), count);
  }
  if (v.tokens_.size() < 2 || v.tokens_[kPad] != kPadToken || v.tokens_[kUnk] != kUnkToken) {
    throw DataError(path.string() + ": vocabulary must start with the reserved <pad> and <unk> entries");
  }
  return v;
}

// ---------------------------------------------------------------------------
// Labels

LabelMap::LabelMap(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!index_.emplace(names_[i], i).second) throw InvalidArgument("LabelMap: duplicate label '" + names_[i] + "'");
  }
}

LabelMap LabelMap::build(std::span<const RawExample> examples) {
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  for (const auto& ex : examples) {
    if (seen.insert(ex.label).second) names.push_back(ex.label);
  }
  const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& s) {
    long long v = 0;
    return parse_long(s, v);
  });
  if (numeric) {
    std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
      long long x = 0, y = 0;
      parse_long(a, x);
      parse_long(b, y);
      return x < y;
    });
  } else {
    std::sort(names.begin(), names.end());
  }
  return LabelMap(std::move(names));
}

std::size_t LabelMap::id(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("label '" + std::string(name) + "' does not occur in the training data");
  return it->second;
}

// ---------------------------------------------------------------------------

std::vector<TokenizedExample> tokenize_all(std::span<const RawExample> raw, const TokenizerOptions& opts) {
  std::vector<TokenizedExample> out;
  out.reserve(raw.size());
  for (const auto& ex : raw) out.push_back({tokenize(ex.text, opts), ex.label});
  return out;
}

Corpus encode_corpus(std::span<const TokenizedExample> examples, const Vocabulary& vocab, const LabelMap& labels,
                     Split split) {
  Corpus c;
  c.split = split;
  c.label_names = labels.names();
  std::size_t dropped = 0;
  for (const auto& ex : examples) {
    if (ex.tokens.empty()) {
      ++dropped;
      continue;
    }
    c.examples.push_back({vocab.encode(ex.tokens), labels.id(ex.label)});
  }
  if (dropped) std::cerr << "warning: dropped " << dropped << " example(s) with no tokens\n";
  return c;
}

std::vector<RawExample> expand_phrases(std::span<const TreebankRecord> records) {
  std::vector<RawExample> out;
  for (const auto& rec : records) {
    out.push_back({rec.label, rec.text});
    out.insert(out.end(), rec.subphrases.begin(), rec.subphrases.end());
  }
  return out;
}

TreebankSplits load_treebank(const std::filesystem::path& sentences, const std::filesystem::path& phrases,
                             const TokenizerOptions& opts) {
  TreebankSplits out;
  std::vector<std::vector<std::string>> train_tokens;
  {
    std::ifstream in = open_for_read(sentences);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (is_blank(line)) continue;
      const auto f = split_tabs(line);
      if (f.size() != 3) throw DataError(location(sentences, lineno) + ": expected split<TAB>label<TAB>text");
      const std::string label(f[1]);
      const std::string text(f[2]);
      if (f[0] == "train") {
        out.train.push_back({text, label, {}});
        train_tokens.push_back(tokenize(text, opts));
      } else if (f[0] == "dev") {
        out.dev.push_back({label, text});
      } else if (f[0] == "test") {
        out.test.push_back({label, text});
      } else {
        throw DataError(location(sentences, lineno) + ": unknown split '" + std::string(f[0]) + "'");
      }
    }
  }

  std::vector<RawExample> phrase_records;
  std::unordered_map<std::string, std::vector<std::size_t>> by_key;
  {
    std::ifstream in = open_for_read(phrases);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      strip_cr(line);
      if (is_blank(line)) continue;
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos) throw DataError(location(phrases, lineno) + ": expected label<TAB>phrase");
      phrase_records.push_back({line.substr(0, tab), line.substr(tab + 1)});
      const auto toks = tokenize(phrase_records.back().text, opts);
      if (!toks.empty()) by_key[join(toks)].push_back(phrase_records.size() - 1);
    }
  }

  std::vector<bool> assigned(phrase_records.size(), false);
  for (std::size_t si = 0; si < out.train.size(); ++si) {
    const auto& toks = train_tokens[si];
    for (std::size_t len = 1; len < toks.size(); ++len) {
      for (std::size_t start = 0; start + len <= toks.size(); ++start) {
        auto it = by_key.find(join(std::span<const std::string>(toks).subspan(start, len)));
        if (it == by_key.end()) continue;
        for (std::size_t pi : it->second) {
          if (assigned[pi]) continue;
          assigned[pi] = true;
          out.train[si].subphrases.push_back(phrase_records[pi]);
        }
      }
    }
  }
  return out;
}

EmbeddingLoad load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab, std::size_t dim, Rng& rng) {
  EmbeddingLoad out;
  out.table = Mat(vocab.size(), dim);
  rng.fill_uniform(out.table.values(), -0.1, 0.1);
  out.eligible = vocab.size() - 2;

  std::ifstream in = open_for_read(path);
  std::vector<bool> seen(vocab.size(), false);
  std::string line;
  std::size_t lineno = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (is_blank(line)) continue;
    const auto fields = split_whitespace(line);
    std::size_t a = 0, b = 0;
    if (lineno == 1 && fields.size() == 2 && parse_size(fields[0], a) && parse_size(fields[1], b)) continue;
    if (fields.size() - 1 != dim) {
      throw InvalidArgument(location(path, lineno) + ": vector has " + std::to_string(fields.size() - 1) +
                            " components, the network expects " + std::to_string(dim));
    }
    const std::string token(fields[0]);
    if (!vocab.contains(token)) continue;
    const WordId id = vocab.id(token);
    if (id < 2) continue;
    values.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const auto f = fields[i + 1];
      auto res = std::from_chars(f.data(), f.data() + f.size(), values[i]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw DataError(location(path, lineno) + ": bad number '" + std::string(f) + "'");
      }
    }
    std::copy(values.begin(), values.end(), out.table.row(id).begin());
    if (!seen[id]) {
      seen[id] = true;
      ++out.found;
    }
  }
  return out;
}

}  // namespace dcnn
