#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ordlab {

// Precondition / input failures. CLI exit code 1.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Syntax errors carry a byte offset into the source text.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, size_t offset)
      : DomainError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

// A computation left the supported range (stages above omega, etc.).
// CLI exit code 2.
class OutOfRangeError : public std::runtime_error {
 public:
  explicit OutOfRangeError(const std::string& what) : std::runtime_error(what) {}
};

// A bounded search ran out of budget. CLI exit code 2.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// The presentation lacks the exact oracle an operation needs.
class UnsupportedPresentationError : public DomainError {
 public:
  explicit UnsupportedPresentationError(const std::string& what) : DomainError(what) {}
};

// A supplied witness is not defined on a sampled point.
class IncompleteWitnessError : public DomainError {
 public:
  explicit IncompleteWitnessError(const std::string& what) : DomainError(what) {}
};

// Consistency checks that can only fail on a library bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ordlab
