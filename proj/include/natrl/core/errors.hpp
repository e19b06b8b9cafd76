#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace natrl {

// Caller broke a documented precondition (stepping a finished episode,
// out-of-range action, mismatched shapes).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Malformed on-disk data. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit FormatError(const std::string& what)
      : std::runtime_error(what), offset_(0) {}

  std::uint64_t offset() const { return offset_; }

  // Same error with extra context appended; the offset is kept.
  FormatError annotated(const std::string& context) const {
    FormatError e(std::string(what()) + " " + context);
    e.offset_ = offset_;
    return e;
  }

 private:
  std::uint64_t offset_;
};

// Invalid experiment or environment configuration, raised before any work.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Synthetic data generation could not satisfy its constraints.
class GenerationError : public std::runtime_error {
 public:
  explicit GenerationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace natrl
