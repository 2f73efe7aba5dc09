#pragma once

#include <stdexcept>
#include <string>

namespace ccamr {

// Base for every error the library raises.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// Solution does not satisfy the structural invariants (ids, coverage, empty trips).
class StructuralError : public Error {
public:
  using Error::Error;
};

// A closed-form moment came out negative beyond rounding noise.
class NumericError : public Error {
public:
  using Error::Error;
};

// A request cannot be served even alone on a fresh AMR.
class UnrepairableError : public Error {
public:
  explicit UnrepairableError(int request)
      : Error("request " + std::to_string(request) +
              " is infeasible even alone on a fresh AMR"),
        request_(request) {}

  int request() const noexcept { return request_; }

private:
  int request_;
};

class InfeasibleInstance : public Error {
public:
  using Error::Error;
};

}  // namespace ccamr
