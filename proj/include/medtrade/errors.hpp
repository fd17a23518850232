#pragma once

#include <stdexcept>
#include <string>

namespace medtrade {

/// Malformed user input: config files, CLI arguments, unreadable paths.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A model assumption the solver relies on does not hold for the instance
/// (non-trivial price range, monotone hazard rate, valuation shape).
struct assumption_error : std::runtime_error {
  explicit assumption_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace medtrade
