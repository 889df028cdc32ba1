#include "dcnn/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "dcnn/error.hpp"

namespace dcnn {
namespace {

constexpr char kMagic[8] = {'D', 'C', 'N', 'N', 'C', 'K', 'P', 'T'};

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T v) {
    v = to_little(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_string(const std::string& s) {
    put(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string where) : in_(in), where_(std::move(where)) {}

  template <typename T>
  T get() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in_) throw DataError(where_ + ": truncated checkpoint");
    return to_little(v);
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    std::string s(n, '\0');
    in_.read(s.data(), n);
    if (!in_) throw DataError(where_ + ": truncated checkpoint");
    return s;
  }

 private:
  std::istream& in_;
  std::string where_;
};

template <typename T>
std::string join_numbers(const std::vector<ConvLayerSpec>& layers, T ConvLayerSpec::*field) {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(static_cast<std::size_t>(layers[i].*field));
  }
  return out;
}

std::vector<std::size_t> parse_list(const std::string& value) {
  std::vector<std::size_t> out;
  if (value.empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw DataError("checkpoint spec: bad list entry '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::size_t parse_count(const std::string& value) {
  std::size_t v = 0;
  auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw DataError("checkpoint spec: bad count '" + value + "'");
  }
  return v;
}

}  // namespace

std::string spec_to_text(const NetworkSpec& spec) {
  std::ostringstream out;
  out.precision(17);
  out << "kind=" << model_kind_name(spec.kind) << '\n'
      << "vocab_size=" << spec.vocab_size << '\n'
      << "embed_dim=" << spec.embed_dim << '\n'
      << "widths=" << join_numbers(spec.layers, &ConvLayerSpec::width) << '\n'
      << "maps=" << join_numbers(spec.layers, &ConvLayerSpec::maps) << '\n'
      << "folding=" << join_numbers(spec.layers, &ConvLayerSpec::fold) << '\n'
      << "fixed_k=" << join_numbers(spec.layers, &ConvLayerSpec::fixed_k) << '\n'
      << "k_top=" << spec.k_top << '\n'
      << "classes=" << spec.classes << '\n'
      << "dropout=" << spec.dropout << '\n';
  return out.str();
}

NetworkSpec spec_from_text(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("checkpoint spec: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto field = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError(std::string("checkpoint spec: missing key '") + key + "'");
    return it->second;
  };

  NetworkSpec spec;
  spec.kind = parse_model_kind(field("kind"));
  spec.vocab_size = parse_count(field("vocab_size"));
  spec.embed_dim = parse_count(field("embed_dim"));
  const auto widths = parse_list(field("widths"));
  const auto maps = parse_list(field("maps"));
  const auto folding = parse_list(field("folding"));
  const auto fixed = parse_list(field("fixed_k"));
  if (maps.size() != widths.size() || folding.size() != widths.size() || fixed.size() != widths.size()) {
    throw DataError("checkpoint spec: per-layer lists differ in length");
  }
  for (std::size_t i = 0; i < widths.size(); ++i) spec.layers.push_back({widths[i], maps[i], folding[i] != 0, fixed[i]});
  spec.k_top = parse_count(field("k_top"));
  spec.classes = parse_count(field("classes"));
  spec.dropout = std::stod(field("dropout"));
  return spec;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp.string() + "' for writing");
    Writer w(out);
    out.write(kMagic, sizeof(kMagic));
    w.put(kCheckpointVersion);
    w.put_string(spec_to_text(ckpt.spec));
    w.put(ckpt.vocab_hash);
    w.put(static_cast<std::uint32_t>(ckpt.meta.size()));
    for (const auto& [k, v] : ckpt.meta) {
      w.put_string(k);
      w.put_string(v);
    }
    w.put(static_cast<std::uint32_t>(ckpt.params.size()));
    for (const Parameter& p : ckpt.params) {
      w.put_string(p.name);
      w.put(static_cast<std::uint8_t>(p.group));
      w.put(static_cast<std::uint64_t>(p.value.rows()));
      w.put(static_cast<std::uint64_t>(p.value.cols()));
      for (double v : p.value.values()) w.put_f64(v);
    }
    if (!out) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  Reader r(in, path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError(path.string() + ": not a checkpoint file");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw DataError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.spec = spec_from_text(r.get_string());
  ckpt.vocab_hash = r.get<std::uint64_t>();
  const auto meta_count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    std::string k = r.get_string();
    ckpt.meta[std::move(k)] = r.get_string();
  }
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.get_string();
    const auto group = r.get<std::uint8_t>();
    if (group >= kParamGroupCount) throw DataError(path.string() + ": bad parameter group for '" + name + "'");
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    const std::size_t idx = ckpt.params.add(name, static_cast<ParamGroup>(group), rows, cols);
    for (double& v : ckpt.params[idx].value.values()) v = r.get_f64();
  }
  // Shapes must agree with the stored spec.
  Network(ckpt.spec).layout(ckpt.params);
  return ckpt;
}

}  // namespace dcnn
