#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace layoutlab {

/// Malformed input text (JSON syntax and friends). Carries the byte offset
/// of the first offending byte.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset)
      : std::runtime_error(message), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_ = 0;
};

/// Structurally well-formed input that violates a domain invariant
/// (missing field, non-positive dimension, duplicate node id, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constraint system or generation request that cannot be satisfied.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failures, annotated with the path involved.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace layoutlab
