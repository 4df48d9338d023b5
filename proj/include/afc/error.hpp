#pragma once

#include <stdexcept>
#include <string>

namespace afc {

/// Bad user-supplied configuration (unknown key, malformed value, violated precondition).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation ran but its result cannot be trusted (instability, failed
/// calibration, non-converged quadrature).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

}  // namespace afc
