#pragma once

#include <stdexcept>
#include <string>

namespace infocommit {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands drawn from two different fields.
class FieldMismatch : public Error {
 public:
  FieldMismatch() : Error("field mismatch: operands belong to different fields") {}
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Invalid public parameters (field, degree, prohibited set, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  enum class Kind { version, truncated, out_of_range, malformed };
  DecodeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// A protocol step that may simply be re-run with fresh randomness.
class RetriableError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  enum class Code { order_violation, refusal, malformed, aborted };
  ProtocolError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace infocommit
