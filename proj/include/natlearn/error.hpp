#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace natlearn {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file: bad cell, missing column, unreadable file.
class ParseError : public Error {
 public:
  using Error::Error;
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what + " (row " + std::to_string(row) + ", column " +
              std::to_string(column) + ")"),
        row_(row),
        column_(column) {}

  std::size_t row() const { return row_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t row_ = 0;
  std::size_t column_ = 0;
};

/// Label column does not hold exactly two distinct values.
class LabelCardinalityError : public Error {
 public:
  using Error::Error;
};

/// A class has too few samples for the requested operation.
class ClassSizeError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by the caller (bad argument, invalid feature set).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Feature width mismatch between a model/scaler and the data it is applied to.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Training produced no usable candidate.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search refused because the problem exceeds its size limits.
class OracleGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace natlearn
