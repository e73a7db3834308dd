#pragma once

#include <stdexcept>
#include <string>

namespace ifc {

/// Invalid configuration or experiment spec; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure during a run (NaN potential, broken invariant); carries
/// the step index and maps to CLI exit code 3.
class SimRuntimeError : public std::runtime_error {
 public:
  SimRuntimeError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_ = 0;
};

}  // namespace ifc
