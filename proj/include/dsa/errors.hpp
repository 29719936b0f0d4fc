#pragma once

#include <stdexcept>
#include <string>

namespace dsa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// ODE integration produced a non-finite state.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& msg, double t) : Error(msg), time(t) {}
  double time;
};

// Inconsistent run configuration (selector/data mismatch, missing N, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; `line` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg, long line = 0) : Error(msg), line(line) {}
  long line;
};

// Sampler could not start from the supplied initial point.
class InitError : public Error {
 public:
  using Error::Error;
};

// Sampler health check failed (e.g. chain stuck during adaptation).
class DiagnosticsError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsa
