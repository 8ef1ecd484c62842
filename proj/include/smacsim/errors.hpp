#pragma once

#include <stdexcept>
#include <string>

namespace smacsim {

// Malformed config, unknown names, bad stat tables. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario that cannot be instantiated (bounds, separation, counts).
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Illegal action submitted while the available-actions mask is enforced.
class ActionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector does not conform to the feature layout it is used with.
class LayoutError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RegressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smacsim
