#pragma once

#include <stdexcept>
#include <string>

namespace fluidnet {

// Invalid scenario, topology or configuration. Reported before a run starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario text that cannot be parsed. `field` is a JSON-pointer style path
// ("/users/1/route") or "line N" for syntax errors.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& field, const std::string& what)
      : ConfigError(field + ": " + what), field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A read of data that is not recorded yet (future sample), a read of pruned
// history, or an out-of-order append. Always an engine scheduling bug.
class CausalityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The backward delay operator is undefined: a congested queue whose input
// flow was zero at the arrival time being looked up.
class InvertibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN, divergence or a failed internal consistency check during a run.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fluidnet
