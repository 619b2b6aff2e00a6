#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dspecies {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation route was requested where it is not valid
/// (e.g. the alternating sum beyond its cancellation limit).
class MethodError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested model does not define the quantity (e.g. an occupancy
/// vector under the Kingman limit).
class UnsupportedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bracketing root search exhausted its expansions without a sign change.
class NoSolutionError : public std::runtime_error {
 public:
  NoSolutionError(const std::string& what, double last_lo, double last_hi)
      : std::runtime_error(what), last_lo_(last_lo), last_hi_(last_hi) {}
  double last_lo() const noexcept { return last_lo_; }
  double last_hi() const noexcept { return last_hi_; }

 private:
  double last_lo_;
  double last_hi_;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text that does not follow the spectrum grammar.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input that violates a data invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dspecies
