#pragma once
///
/// Command execution: turns a validated RunConfig into artifacts on disk
/// (CSV data + JSON metadata sidecar per command).  The CLI is a thin shell
/// around run_command; tests drive it directly.

#include <string>

#include "qhd/config.hpp"

namespace qhd {

struct RunOutcome {
  std::vector<std::string> artifacts;  // paths written
  std::string metadata_path;
};

/// Executes cfg.command, writing into cfg.output_dir (created if needed).
/// Throws ConfigError / NumericalError / IOError; the CLI maps these to
/// exit codes 1 / 2 / 3.
RunOutcome run_command(const RunConfig& cfg);

}  // namespace qhd
