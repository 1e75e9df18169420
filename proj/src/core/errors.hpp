#pragma once

#include <stdexcept>
#include <string>

namespace witlab {

// Shape/dimension problems: mismatched level sizes, policy/model mismatch, ...
struct StructuralError : std::runtime_error {
  explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

// An invariant of a model failed.  Location is 1-based level h and 0-based
// state/action indices; -1 means "not applicable".
struct ValidationError : std::runtime_error {
  int h = -1, x = -1, a = -1;
  ValidationError(const std::string& msg, int h_ = -1, int x_ = -1, int a_ = -1)
      : std::runtime_error(msg), h(h_), x(x_), a(a_) {}
};

// Expansion / enumeration caps exceeded.
struct CapacityError : std::runtime_error {
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Trajectory budget exhausted during a sampling run.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad experiment configuration.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Internal consistency failure (e.g. the two Bellman-error forms disagree).
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace witlab
