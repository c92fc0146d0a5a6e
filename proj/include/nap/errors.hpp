#pragma once

#include <stdexcept>
#include <string>

namespace nap {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Evaluation time outside a schedule's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class MissingSymbolError : public Error {
 public:
  using Error::Error;
};

class LayoutError : public Error {
 public:
  using Error::Error;
};

// Schedules or plans that break a structural requirement (static angles, realizability, mapping).
class ConstraintError : public Error {
 public:
  using Error::Error;
};

class SingularDriveError : public Error {
 public:
  using Error::Error;
};

// Numerical health checks that fail during propagation.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message)
      : Error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace nap
