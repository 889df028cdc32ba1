#pragma once

#include <stdexcept>
#include <string>

namespace dcnn {

// Bad shapes, out-of-range ids, inconsistent specs.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unreadable files and malformed input. Messages carry path and line.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config files and command-line usage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace dcnn
