#pragma once

#include <stdexcept>
#include <string>

namespace vclab {

/// Raised when a caller breaks an operation's precondition (wrong dimensions,
/// parameters outside the family's domain, unordered knots, ...).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for invalid fixed data or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractError(message);
}

}  // namespace vclab
