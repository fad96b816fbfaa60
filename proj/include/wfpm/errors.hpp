#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wfpm {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable transaction file.
class DatasetError : public Error {
 public:
  explicit DatasetError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  // 1-based line number of the offending token, 0 when not line-specific.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Out-of-bounds or otherwise inconsistent access to simulated memory.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Simulated address space exhausted, or oracle guard exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wfpm
