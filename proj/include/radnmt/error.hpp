#pragma once

#include <stdexcept>
#include <string>

namespace radnmt {

// Every failure carries a short class tag ("ParseError", "IoError", ...) that
// the CLI prints as the first token of its one-line error report.
class Error : public std::runtime_error {
 public:
  Error(std::string error_class, const std::string& what)
      : std::runtime_error(what), class_(std::move(error_class)) {}

  const std::string& error_class() const noexcept { return class_; }

 private:
  std::string class_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("ShapeError", what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error("NumericError", what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error("InputError", what) {}
};

}  // namespace radnmt
