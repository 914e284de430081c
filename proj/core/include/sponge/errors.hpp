#pragma once

#include <stdexcept>
#include <string>

namespace sponge {

/// Invalid parameters, malformed config files, inconsistent dimensions.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the integrated state stops being finite.
class SimulationFault : public std::runtime_error {
 public:
  explicit SimulationFault(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sponge
