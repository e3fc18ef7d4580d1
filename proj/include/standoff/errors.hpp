#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace standoff {

// Root of every error the library throws. Callers that only care about
// "did it work" catch this; the CLI maps the subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicateError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

class OverlapError : public Error {
 public:
  using Error::Error;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Parse failure at a known position. `line` is 1-based when the input is
// line oriented; `offset` is a byte offset for free-form input. Either may
// be zero when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t offset)
      : Error(message), line_(line), offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

// Raised by whole-file imports. Nothing is applied when this is thrown.
class ImportError : public Error {
 public:
  ImportError(const std::string& message, std::vector<std::size_t> lines)
      : Error(message), lines_(std::move(lines)) {}

  const std::vector<std::size_t>& lines() const noexcept { return lines_; }

 private:
  std::vector<std::size_t> lines_;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class StoreUnreachableError : public StoreError {
 public:
  using StoreError::StoreError;
};

class MigrationRequiredError : public StoreError {
 public:
  using StoreError::StoreError;
};

class ForeignKeyError : public StoreError {
 public:
  using StoreError::StoreError;
};

class ConflictError : public StoreError {
 public:
  using StoreError::StoreError;
};

}  // namespace standoff
