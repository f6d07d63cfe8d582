#pragma once

#include <stdexcept>
#include <string>

namespace pact {

/// Base class of every error raised by the counter and its front ends.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedScript : public Error {
 public:
  MalformedScript(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("unknown projection variable '" + name + "'") {}
};

/// Projection variable is not a bitvector (or too wide to be held as a
/// 64-bit model value).
class NonDiscreteProjection : public Error {
 public:
  using Error::Error;
};

class SolverCrashed : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// The solver answered `unknown`; treated as fatal because a count built on
/// it would be unsound.
class SolverUnknown : public Error {
 public:
  using Error::Error;
};

class OracleTimeout : public Error {
 public:
  using Error::Error;
};

class StackUnderflow : public Error {
 public:
  StackUnderflow() : Error("pop on an empty assertion stack") {}
};

class RangeExceeded : public Error {
 public:
  using Error::Error;
};

class EmptyStack : public Error {
 public:
  EmptyStack() : Error("replace_last on an empty hash stack") {}
};

class ExhaustedIndices : public Error {
 public:
  using Error::Error;
};

class CounterFailed : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class EmptyList : public Error {
 public:
  EmptyList() : Error("median of an empty list") {}
};

}  // namespace pact
