#pragma once

#include <stdexcept>
#include <string>

namespace semrad {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument to a numerical routine (orders, weights, ratios).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Degenerate or inverted geometry (J <= 0, impossible sizing, bad curving).
class GeometryError : public Error {
public:
  using Error::Error;
};

/// Malformed mesh file; carries the offending line number when known.
class ParseError : public Error {
public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// Mesh that parsed but violates conformity or tagging invariants.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Factorization breakdown or failed solve.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Time integration produced non-finite or runaway values.
class DivergenceError : public Error {
public:
  DivergenceError(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

private:
  long step_;
};

/// Bad configuration; the message names the offending key path.
class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace semrad
