#pragma once

#include <stdexcept>
#include <string>

namespace ppc {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DivisionAtSingularPoint : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class SyntaxError : public Error {
public:
  SyntaxError(std::size_t offset, std::string expected, const std::string &msg)
      : Error("syntax error at byte " + std::to_string(offset) + ": " + msg +
              (expected.empty() ? "" : " (expected " + expected + ")")),
        offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::string &expected() const { return expected_; }

private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownFunction : public Error {
public:
  using Error::Error;
};

class UnboundIdentifier : public Error {
public:
  using Error::Error;
};

class NotApplicable : public Error {
public:
  using Error::Error;
};

class FrameNotInvertible : public Error {
public:
  using Error::Error;
};

class SingularMetric : public Error {
public:
  using Error::Error;
};

class PreconditionViolated : public Error {
public:
  PreconditionViolated(const std::string &msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

class ConstraintViolated : public Error {
public:
  ConstraintViolated(const std::string &msg, double residual)
      : Error(msg), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

class ZeroParameter : public Error {
public:
  using Error::Error;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class VariantMismatch : public Error {
public:
  using Error::Error;
};

} // namespace ppc
