#pragma once

#include <stdexcept>
#include <string>

namespace miura {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A denominator vanished at an evaluation point or a substitution.
class PoleError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Data violates a structural invariant (grading, conservation form, case preconditions).
class FormError : public Error {
 public:
  using Error::Error;
};

class RepeatedRootError : public Error {
 public:
  using Error::Error;
};

/// Mixed partials disagree while integrating a gradient system.
class IncompatibilityError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace miura
