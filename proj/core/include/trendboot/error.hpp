#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trendboot {

// Base of every domain error raised by the library. Argument-contract
// violations use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class CoverageError : public Error {
 public:
  using Error::Error;
};

class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

class CollinearityError : public Error {
 public:
  using Error::Error;
};

class EmptyOverlapError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

class DegenerateComponentError : public Error {
 public:
  DegenerateComponentError(std::size_t component, const std::string& what)
      : Error("component " + std::to_string(component) + ": " + what), component_(component) {}

  [[nodiscard]] std::size_t component() const noexcept { return component_; }

 private:
  std::size_t component_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace trendboot
