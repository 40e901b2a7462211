///
/// qhd: one binary, one command per run, everything driven by a JSON config.
/// Exit codes: 0 success, 1 config error, 2 numerical error, 3 I/O error.
/// Failures print a machine-readable error object on stderr.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qhd/errors.hpp"
#include "qhd/runner.hpp"

namespace {

int fail(const char* type, const std::string& message, int code) {
  nlohmann::ordered_json err;
  err["error"] = {{"type", type}, {"message", message}, {"exit_code", code}};
  std::cerr << err.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qhd: quantum-hydrodynamic plasma toolkit"};
  std::string config_path;
  std::string output_dir;
  int workers = 0;
  app.add_option("--config", config_path, "JSON run configuration")
      ->required();
  app.add_option("--output", output_dir,
                 "output directory (overrides the config)");
  app.add_option("--workers", workers,
                 "sweep worker count (overrides the config)");
  CLI11_PARSE(app, argc, argv);

  try {
    qhd::RunConfig cfg = qhd::parse_config_file(config_path);
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (workers > 0) cfg.sweep.workers = workers;
    qhd::RunOutcome out = qhd::run_command(cfg);

    nlohmann::ordered_json ok;
    ok["status"] = "ok";
    ok["command"] = qhd::command_name(cfg.command);
    ok["metadata"] = out.metadata_path;
    ok["artifacts"] = out.artifacts;
    std::cout << ok.dump(2) << "\n";
    return 0;
  } catch (const qhd::ConfigError& e) {
    return fail("config", e.what(), 1);
  } catch (const qhd::IOError& e) {
    return fail("io", e.what(), 3);
  } catch (const qhd::NumericalError& e) {
    return fail("numerical", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 2);
  }
}
