#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace foodmap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input row; `row` is the 1-based record number (header = row 1).
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t row)
      : Error("row " + std::to_string(row) + ": " + msg), row(row) {}
  std::size_t row = 0;
};

struct DanglingReference : Error {
  using Error::Error;
};

struct InvalidCoordinate : Error {
  using Error::Error;
};

struct EmptyName : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct SpanTooLarge : Error {
  using Error::Error;
};

struct OutOfSpan : Error {
  using Error::Error;
};

struct EmptySample : Error {
  using Error::Error;
};

struct TooFewPoints : Error {
  using Error::Error;
};

struct DegenerateSample : Error {
  using Error::Error;
};

struct GridTooLarge : Error {
  using Error::Error;
};

struct InsufficientRows : Error {
  using Error::Error;
};

struct EmptyWindow : Error {
  using Error::Error;
};

struct InvalidSpec : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace foodmap
