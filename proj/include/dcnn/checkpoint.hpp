#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "dcnn/network.hpp"
#include "dcnn/params.hpp"

namespace dcnn {

// Binary layout, all integers and reals little-endian:
//
//   magic      8 bytes  "DCNNCKPT"
//   version    u32      kCheckpointVersion
//   spec       string   NetworkSpec as `key=value` lines
//   vocab_hash u64
//   meta_count u32, then meta_count pairs of (string key, string value)
//   param_count u32, then per parameter:
//     name string, group u8, rows u64, cols u64, rows*cols f64 (row-major)
//
// where `string` is a u32 byte length followed by the bytes.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetworkSpec spec;
  std::uint64_t vocab_hash = 0;
  std::map<std::string, std::string> meta;  // tokenizer settings, label names, ...
  ParameterStore params;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws DataError on a truncated, foreign or newer-version file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string spec_to_text(const NetworkSpec& spec);
NetworkSpec spec_from_text(const std::string& text);

}  // namespace dcnn
