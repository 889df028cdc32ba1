#include "dcnn/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "dcnn/error.hpp"

namespace dcnn {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"kind", "embed_dim", "widths", "maps", "folding", "fixed_k", "k_top", "dropout"}},
      {"train",
       {"learning_rate", "epsilon", "l2", "l2_embeddings", "l2_filters", "l2_biases", "l2_dense", "batch_size",
        "max_epochs", "patience"}},
      {"data",
       {"format", "train", "dev", "test", "phrases", "embeddings", "tokenize", "lowercase", "normalize_users",
        "normalize_urls", "squeeze_letters", "strip_emoticons", "min_count"}},
      {"run", {"seed", "output_dir", "threads", "deterministic"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(const IniFile& ini, std::filesystem::path base) : ini_(ini), base_(std::move(base)) {}

  bool has(const std::string& sec, const std::string& key) const { return ini_.has(sec, key); }

  std::string text(const std::string& sec, const std::string& key) const { return ini_.get(sec, key); }

  std::size_t count(const std::string& sec, const std::string& key) const {
    return parse_count(text(sec, key), sec, key);
  }

  std::uint64_t u64(const std::string& sec, const std::string& key) const {
    const std::string v = text(sec, key);
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail(sec, key, "expected an unsigned integer");
    return out;
  }

  double real(const std::string& sec, const std::string& key) const {
    const std::string v = text(sec, key);
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail(sec, key, "expected a number");
    return out;
  }

  bool flag(const std::string& sec, const std::string& key) const { return parse_flag(text(sec, key), sec, key); }

  std::vector<std::size_t> counts(const std::string& sec, const std::string& key) const {
    std::vector<std::size_t> out;
    for (const std::string& item : items(sec, key)) out.push_back(parse_count(item, sec, key));
    return out;
  }

  std::vector<bool> flags(const std::string& sec, const std::string& key) const {
    std::vector<bool> out;
    for (const std::string& item : items(sec, key)) out.push_back(parse_flag(item, sec, key));
    return out;
  }

  std::filesystem::path path(const std::string& sec, const std::string& key) const {
    std::filesystem::path p = text(sec, key);
    return p.is_absolute() ? p : base_ / p;
  }

  [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& what) const {
    throw ConfigError(ini_.source() + ": [" + sec + "] " + key + ": " + what);
  }

 private:
  std::vector<std::string> items(const std::string& sec, const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(text(sec, key));
    std::string item;
    while (std::getline(ss, item, ',')) out.emplace_back(trim(item));
    return out;
  }

  std::size_t parse_count(const std::string& v, const std::string& sec, const std::string& key) const {
    std::size_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      fail(sec, key, "expected a non-negative integer, got '" + v + "'");
    }
    return out;
  }

  bool parse_flag(std::string v, const std::string& sec, const std::string& key) const {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    fail(sec, key, "expected a boolean, got '" + v + "'");
  }

  const IniFile& ini_;
  std::filesystem::path base_;
};

}  // namespace

IniFile IniFile::parse(std::string_view text, const std::string& source) {
  IniFile ini;
  ini.source_ = source;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);

    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_keys().count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      ini.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (const auto hash = value.find(" #"); hash != std::string_view::npos) value = trim(value.substr(0, hash));
    if (!known_keys().at(section).count(key)) {
      throw ConfigError(where + ": unknown key '" + key + "' in [" + section + "]");
    }
    if (!ini.sections_[section].emplace(key, std::string(value)).second) {
      throw ConfigError(where + ": duplicate key '" + key + "'");
    }
  }
  return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key);
}

const std::string& IniFile::get(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it != sections_.end()) {
    auto kv = it->second.find(key);
    if (kv != it->second.end()) return kv->second;
  }
  throw ConfigError(source_ + ": missing required key '" + key + "' in [" + section + "]");
}

RunConfig parse_run_config(const IniFile& ini, const std::filesystem::path& base_dir) {
  const Reader r(ini, base_dir);
  RunConfig cfg;

  NetworkSpec& m = cfg.model;
  try {
    m.kind = parse_model_kind(r.text("model", "kind"));
  } catch (const InvalidArgument& e) {
    r.fail("model", "kind", e.what());
  }
  m.embed_dim = r.count("model", "embed_dim");
  m.vocab_size = 1;
  if (m.kind != ModelKind::Nbow) {
    const auto widths = r.counts("model", "widths");
    const auto maps = r.counts("model", "maps");
    if (maps.size() != widths.size()) r.fail("model", "maps", "needs one entry per entry of widths");
    std::vector<bool> folding(widths.size(), false);
    std::vector<std::size_t> fixed(widths.size(), 0);
    if (r.has("model", "folding")) folding = r.flags("model", "folding");
    if (r.has("model", "fixed_k")) fixed = r.counts("model", "fixed_k");
    if (folding.size() != widths.size()) r.fail("model", "folding", "needs one entry per entry of widths");
    if (fixed.size() != widths.size()) r.fail("model", "fixed_k", "needs one entry per entry of widths");
    for (std::size_t i = 0; i < widths.size(); ++i) m.layers.push_back({widths[i], maps[i], folding[i], fixed[i]});
  } else {
    for (const char* key : {"widths", "maps", "folding", "fixed_k"}) {
      if (r.has("model", key)) r.fail("model", key, "not used by nbow");
    }
  }
  if (m.kind == ModelKind::Dcnn) {
    m.k_top = r.count("model", "k_top");
  } else if (r.has("model", "k_top")) {
    r.fail("model", "k_top", "only used by dcnn");
  }
  if (r.has("model", "dropout")) m.dropout = r.real("model", "dropout");

  TrainConfig& t = cfg.train;
  if (r.has("train", "learning_rate")) t.learning_rate = r.real("train", "learning_rate");
  if (r.has("train", "epsilon")) t.epsilon = r.real("train", "epsilon");
  if (r.has("train", "l2")) t.l2 = L2Coefficients::uniform(r.real("train", "l2"));
  const std::pair<const char*, ParamGroup> per_group[] = {{"l2_embeddings", ParamGroup::Embeddings},
                                                          {"l2_filters", ParamGroup::Filters},
                                                          {"l2_biases", ParamGroup::Biases},
                                                          {"l2_dense", ParamGroup::Dense}};
  for (const auto& [key, group] : per_group) {
    if (r.has("train", key)) t.l2[group] = r.real("train", key);
  }
  if (r.has("train", "batch_size")) t.batch_size = r.count("train", "batch_size");
  if (r.has("train", "max_epochs")) t.max_epochs = r.count("train", "max_epochs");
  if (r.has("train", "patience")) t.patience = r.count("train", "patience");
  if (r.has("run", "seed")) t.seed = r.u64("run", "seed");
  if (r.has("run", "threads")) t.threads = r.count("run", "threads");
  if (r.has("run", "deterministic")) t.deterministic = r.flag("run", "deterministic");
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(ini.source() + ": [train] " + e.what());
  }

  DataConfig& d = cfg.data;
  if (r.has("data", "format")) {
    const std::string f = r.text("data", "format");
    if (f == "tsv") {
      d.format = CorpusFormat::Tsv;
    } else if (f == "treebank") {
      d.format = CorpusFormat::Treebank;
    } else {
      r.fail("data", "format", "expected tsv or treebank, got '" + f + "'");
    }
  }
  d.train = r.path("data", "train");
  if (d.format == CorpusFormat::Treebank) {
    d.phrases = r.path("data", "phrases");
    if (r.has("data", "dev") || r.has("data", "test")) {
      r.fail("data", "dev", "treebank splits come from the sentences file");
    }
  } else {
    if (r.has("data", "phrases")) r.fail("data", "phrases", "only used with format = treebank");
    if (r.has("data", "dev")) d.dev = r.path("data", "dev");
    if (r.has("data", "test")) d.test = r.path("data", "test");
  }
  if (r.has("data", "embeddings")) d.embeddings = r.path("data", "embeddings");
  if (r.has("data", "tokenize")) {
    try {
      d.tokenizer.mode = parse_tokenize_mode(r.text("data", "tokenize"));
    } catch (const std::exception& e) {
      r.fail("data", "tokenize", e.what());
    }
  }
  if (r.has("data", "lowercase")) d.tokenizer.lowercase = r.flag("data", "lowercase");
  if (r.has("data", "normalize_users")) d.tokenizer.normalize_users = r.flag("data", "normalize_users");
  if (r.has("data", "normalize_urls")) d.tokenizer.normalize_urls = r.flag("data", "normalize_urls");
  if (r.has("data", "squeeze_letters")) d.tokenizer.squeeze_letters = r.flag("data", "squeeze_letters");
  if (r.has("data", "strip_emoticons")) d.tokenizer.strip_emoticons = r.flag("data", "strip_emoticons");
  if (r.has("data", "min_count")) d.min_count = r.count("data", "min_count");
  if (d.min_count == 0) r.fail("data", "min_count", "must be at least 1");

  cfg.output_dir = r.path("run", "output_dir");

  // Structural checks that do not depend on the data.
  NetworkSpec probe = m;
  probe.vocab_size = 2;
  try {
    probe.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(ini.source() + ": [model] " + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const IniFile ini = IniFile::load(path);
  return parse_run_config(ini, path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

}  // namespace dcnn
