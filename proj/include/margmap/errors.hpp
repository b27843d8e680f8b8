#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace margmap {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A model, potential or evidence whose structure is inconsistent
// (scope out of range, bad table length, negative entries, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

// A caller broke an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Conditioning on evidence of probability zero.
class ZeroProbabilityEvidence : public Error {
 public:
  using Error::Error;
};

// Brute-force enumeration would exceed the configured joint-state cap.
class OracleTooLarge : public Error {
 public:
  using Error::Error;
};

// Malformed UAI / evidence text. Carries the 1-based line and token position
// of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t token)
      : Error("line " + std::to_string(line) + ", token " +
              std::to_string(token) + ": " + what),
        line_(line),
        token_(token) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t token() const noexcept { return token_; }

 private:
  std::size_t line_;
  std::size_t token_;
};

}  // namespace margmap
