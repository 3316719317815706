#pragma once

#include <stdexcept>
#include <string>

namespace effet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A constructed object or table would exceed the configured slot budget.
struct SizeLimitExceeded : Error {
  using Error::Error;
};

/// A saturation fixpoint grew past the configured bound.
struct SaturationLimitExceeded : Error {
  using Error::Error;
};

struct SyntaxError : Error {
  int line, col;
  SyntaxError(const std::string& msg, int line_, int col_)
      : Error(msg + " (line " + std::to_string(line_) + ", col " +
              std::to_string(col_) + ")"),
        line(line_), col(col_) {}
};

/// A name used as an operation, constant, or base type is not declared.
struct UnknownName : Error {
  using Error::Error;
};

struct TypeError : Error {
  using Error::Error;
};

struct TypeMismatch : TypeError {
  using TypeError::TypeError;
};

struct UnboundVariable : TypeError {
  using TypeError::TypeError;
};

struct UnknownOperation : TypeError {
  using TypeError::TypeError;
};

struct EffectExceeded : TypeError {
  using TypeError::TypeError;
};

struct MonoidLawViolation : Error {
  using Error::Error;
};

struct IncompatibleConstant : Error {
  using Error::Error;
};

struct SquareDoesNotCommute : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// Raised when a property that is a theorem in this setting fails to hold;
/// always indicates a kernel bug, never a user error.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace effet
