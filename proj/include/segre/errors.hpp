#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace segre {

// Base of every exception thrown by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Arity mismatches, index out of range, malformed maps.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its domain (e.g. substitution of a map
// with a nonzero constant term).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Expression text that does not conform to the grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), message_(what), position_(position) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t position_;
};

// Manifold data rejected at load time.
class LoadError : public Error {
 public:
  enum class Kind { format, genericity, reality, split, degenerate };

  LoadError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// A computation could not certify its result at the configured bounds.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

// An identity that must hold exactly was observed to fail. Indicates a
// truncation artifact or an engine bug.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace segre
