#pragma once

#include <stdexcept>
#include <string>

namespace autoqsar {

// Base class for everything thrown by the library. The what() string is
// always a complete, user-presentable message.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration or usage: invalid grid, unknown method name, parameter
// out of range. Maps to exit code 1 at the CLI boundary.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Bad input data: CSV problems, SMILES that do not parse, duplicate
// conflicts. Maps to exit code 2.
class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

// SMILES syntax/semantic failure with the offending position (0-based
// offset into the input string).
class SmilesError : public DataError {
 public:
  SmilesError(const std::string& msg, std::size_t position)
      : DataError(msg + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Every model in a sweep failed to fit. Maps to exit code 3.
class NoModelsError : public Error {
 public:
  explicit NoModelsError(const std::string& msg) : Error(msg) {}
};

// Model archive problems: schema mismatch, corruption, probe mismatch.
class ArchiveError : public Error {
 public:
  explicit ArchiveError(const std::string& msg) : Error(msg) {}
};

}  // namespace autoqsar
