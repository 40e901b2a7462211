#pragma once
///
/// Error taxonomy.  Config/validation problems, numerical failures and I/O
/// failures are distinct types so the CLI can map them to exit codes
/// (1, 2, 3 respectively).

#include <stdexcept>
#include <string>
#include <vector>

namespace qhd {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-convergence carries the residual history for post-mortems.
struct ConvergenceError : NumericalError {
  std::vector<double> residual_history;
  ConvergenceError(const std::string& msg, std::vector<double> history)
      : NumericalError(msg), residual_history(std::move(history)) {}
};

}  // namespace qhd
