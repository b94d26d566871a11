#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace edbench {

// Root of every error raised by the library. Domain errors (bad input data,
// infeasible demand, parse failures) derive from DomainError; the CLI maps
// them to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid system file. `row` is 1-based over data rows
// (0 when the error is not tied to a row).
class SystemFileError : public DomainError {
 public:
  SystemFileError(std::size_t row, std::string field, const std::string& what)
      : DomainError(format(row, field, what)), row_(row), field_(std::move(field)) {}

  std::size_t row() const { return row_; }
  const std::string& field() const { return field_; }

 private:
  static std::string format(std::size_t row, const std::string& field,
                            const std::string& what) {
    std::string msg = "system file";
    if (row > 0) msg += ": row " + std::to_string(row);
    if (!field.empty()) msg += ", field '" + field + "'";
    return msg + ": " + what;
  }

  std::size_t row_;
  std::string field_;
};

class DimensionError : public DomainError {
 public:
  DimensionError(std::size_t expected, std::size_t actual)
      : DomainError("dispatch has " + std::to_string(actual) +
                    " entries, system has " + std::to_string(expected) +
                    " units"),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

// Demand outside [pd_min, pd_max]. `bound()` is the violated bound.
class InfeasibleError : public DomainError {
 public:
  enum class Side { kBelowMin, kAboveMax };

  InfeasibleError(double pd, double bound, Side side);

  double pd() const { return pd_; }
  double bound() const { return bound_; }
  Side side() const { return side_; }

 private:
  double pd_;
  double bound_;
  Side side_;
};

class ValidationError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Bad GA / benchmark / CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Gateway failures always name the model they were talking to.
class GatewayError : public Error {
 public:
  GatewayError(std::string model, const std::string& what)
      : Error(model + ": " + what), model_(std::move(model)) {}

  const std::string& model() const { return model_; }

 private:
  std::string model_;
};

class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class AuthError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class TimeoutError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class RateLimitError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class FixtureMissError : public GatewayError {
 public:
  FixtureMissError(const std::string& fingerprint, const std::string& model)
      : GatewayError(model, "no replay fixture for fingerprint " + fingerprint),
        fingerprint_(fingerprint) {}

  const std::string& fingerprint() const { return fingerprint_; }

 private:
  std::string fingerprint_;
};

}  // namespace edbench
