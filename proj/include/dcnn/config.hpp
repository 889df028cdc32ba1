#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "dcnn/data.hpp"
#include "dcnn/network.hpp"
#include "dcnn/training.hpp"

namespace dcnn {

/// `[section]` headers and `key = value` lines; `#` and `;` start comments.
class IniFile {
 public:
  static IniFile parse(std::string_view text, const std::string& source = "<config>");
  static IniFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;  // throws ConfigError
  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class CorpusFormat { Tsv, Treebank };

struct DataConfig {
  CorpusFormat format = CorpusFormat::Tsv;
  std::filesystem::path train;    // tsv: label<TAB>text; treebank: the sentences file
  std::filesystem::path dev;      // optional (tsv only)
  std::filesystem::path test;     // optional (tsv only)
  std::filesystem::path phrases;  // treebank only
  std::filesystem::path embeddings;  // optional pretrained vectors
  TokenizerOptions tokenizer;
  std::size_t min_count = 1;
};

/// Everything a `train` run needs. vocab_size and classes in `model` are
/// filled in once the data has been read.
struct RunConfig {
  NetworkSpec model;
  TrainConfig train;
  DataConfig data;
  std::filesystem::path output_dir;
};

/// Unknown sections or keys and missing required keys raise ConfigError.
/// Relative paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const IniFile& ini, const std::filesystem::path& base_dir);

}  // namespace dcnn
