#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rrnet {

enum class ErrorCode {
  InvalidArgument,
  Shape,
  Parse,
  Io,
  Numeric,
  Unsupported,
};

/// Base of every exception thrown by the library. The C API maps `code()`
/// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::InvalidArgument, what) {}
};

/// Dimension mismatch. `layer()` is 0 for the input layer, 1..L for hidden
/// layers and L+1 for the output layer.
class ShapeError : public Error {
 public:
  ShapeError(std::size_t layer, const std::string& what)
      : Error(ErrorCode::Shape, "layer " + std::to_string(layer) + ": " + what), layer_(layer) {}
  std::size_t layer() const noexcept { return layer_; }

 private:
  std::size_t layer_;
};

/// Malformed text input. Rows and columns are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t row, std::size_t column, const std::string& what)
      : Error(ErrorCode::Parse, format(source, row, column, what)), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& source, std::size_t row, std::size_t column,
                            const std::string& what) {
    std::string s = source;
    if (row > 0) s += ":" + std::to_string(row);
    if (column > 0) s += ":" + std::to_string(column);
    return s + ": " + what;
  }
  std::size_t row_;
  std::size_t column_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCode::Numeric, what) {}
};

class UnsupportedModel : public Error {
 public:
  explicit UnsupportedModel(const std::string& what) : Error(ErrorCode::Unsupported, what) {}
};

}  // namespace rrnet
