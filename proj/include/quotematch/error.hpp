#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace quotematch {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input could not be parsed. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Input parsed but holds a value outside its domain.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Incompatible or invalid parameters (mismatched MinHash params, bad k, ...).
class ParamError : public Error {
 public:
  using Error::Error;
};

// A precondition of an operation does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Artifacts built from different inputs were combined.
class VersionMismatch : public Error {
 public:
  using Error::Error;
};

// A required input file or directory is absent.
class MissingInput : public Error {
 public:
  using Error::Error;
};

}  // namespace quotematch
