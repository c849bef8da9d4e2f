#pragma once

#include <stdexcept>
#include <string>

namespace axbnet {

/// A matrix or state dimension exceeds the configured desk-scale cap.
struct CapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integration produced a non-finite state entry; t is the offending time.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, double t_at)
      : std::runtime_error(what), t(t_at) {}
  double t;
};

/// A solver was handed a disconnected communication graph.
struct DisconnectedError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A problem or matrix file could not be parsed.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace axbnet
