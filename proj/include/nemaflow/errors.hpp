#pragma once

#include <stdexcept>
#include <string>

namespace nemaflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: grid sizes, bounds, unsupported norm exponents, bad config keys.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Config file problem tied to a location in the file.
class ConfigParseError : public ConfigurationError {
 public:
  ConfigParseError(const std::string& key, int line, const std::string& what)
      : ConfigurationError("config error at line " + std::to_string(line) + " (key '" + key +
                           "'): " + what),
        key_(key),
        line_(line) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Initial-data feature narrower than the grid can resolve.
class ResolutionError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// Operands living on different grids.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Director field violating |d| = 1 beyond tolerance.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

/// Input the solver deliberately does not handle (vacuum densities).
class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

/// Density left its admissible range; transport has failed.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a degenerated director during time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(long step, const std::string& what)
      : Error("blow-up at step " + std::to_string(step) + ": " + what), step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_;
};

/// API misuse: too-short windows, missing stored quantities.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace nemaflow
