#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evtl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration, bad construction arguments.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Formula source that does not lex, parse or resolve.
class ParseError : public Error {
public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// Failures while simulating or estimating (bad kernel output, shape mismatches).
class NumericError : public Error {
public:
  using Error::Error;
};

} // namespace evtl
