#pragma once
///
/// Run configuration: strict JSON in, validated struct out.  Unknown keys
/// are rejected with the offending path; physical preconditions are checked
/// with messages naming the key and the violated constraint.
///
/// The same parser accepts an emitted run-metadata record (the config is
/// embedded under "config"), so re-running from metadata reproduces the
/// identical RunConfig.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhd/dispersion.hpp"
#include "qhd/solver.hpp"
#include "qhd/spectral.hpp"
#include "qhd/variational.hpp"

namespace qhd {

enum class Command {
  dispersion,
  ground_state,
  dynamics,
  spectrum_cmd,
  variational_1d,
  variational_3d,
  poincare,
  sweep,
};

std::string command_name(Command c);
Command command_from_name(const std::string& name);

struct GeometryConfig {
  Geometry geometry = Geometry::spherical_radial;
  double r_max = 0.0;            // spherical
  double x_min = 0.0, x_max = 0.0;  // cartesian
  int n_points = 0;
  Grid make_grid() const;
};

struct ShellConfig {
  double R = 0.0, Delta = 0.0;
};

struct WellConfig {
  double A = 1.0, H = 0.5, n_bar = 1.0;
};

struct DispersionConfig {
  Branch branch = Branch::langmuir;
  LangmuirParams langmuir;
  AcousticParams acoustic;
  double gamma = 3.0, zeta = 1.0;
  double k_min = 0.0, k_max = 0.0;
  int n_k = 200;
};

struct KickConfig {
  Excitation::Kind kind = Excitation::Kind::coulomb_kick;
  double z = 1.0, tau = 0.1;
  double delta = 0.0, eps = 0.0;
  Excitation to_excitation() const;
};

struct SpectrumConfig {
  std::string input_csv;      // time-series artifact to transform
  int column = 1;             // which value column (1 = first after t)
  Window window = Window::hann;
  double min_prominence = 0.05;
};

struct Variational3DConfig {
  std::array<double, 3> k = {5.0, 5.0, 1.0};
  double zeta_anh = 0.01;
  double N = 50.0;
  double delta = 0.01;   // excitation amplitude (d_i = delta, crossed kicks)
  double t_end = 2000.0;
  double dt = 0.0;
  int sample_stride = 10;
  double lyapunov_renorm = 1.0;
  bool run_lyapunov = false;
};

struct Variational1DConfig {
  WellConfig well;
  double t_end = 200.0;
  double dt = 0.0;
  int sample_stride = 1;
  double perturb_sigma = 1e-3;
  // Frequency scan bounds for the sweep output (A, Omega).
  double scan_A_min = 0.0, scan_A_max = 0.0;
  int scan_points = 0;
};

struct SweepConfig {
  int workers = 1;
  // Flattened key -> value overrides per run, e.g. "well.A" -> "2.0".
  std::vector<std::map<std::string, std::string>> overrides;
};

struct RunConfig {
  Command command = Command::ground_state;
  std::string output_dir = ".";
  MaterialSpec material{4.0, "Na"};
  double T_e = 0.0;
  GeometryConfig geometry;
  ShellConfig shell;
  WellConfig well;
  ClosureParams closure{3.0, 1.0, XCModel::lda_exchange_plus_brey};
  std::string pressure = "fermi";  // fermi | polytropic | none
  PolytropicEOS eos;
  KickConfig kick;
  SolverConfig numerics;
  DispersionConfig dispersion;
  SpectrumConfig spectrum;
  Variational1DConfig var1d;
  Variational3DConfig var3d;
  SweepConfig sweep;
  bool deterministic = true;  // no RNG anywhere; recorded in metadata
};

/// Parse + validate a config (or metadata) file.  Throws ConfigError.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& json_text);

/// Serialized round-trippable form (JSON object as text).
std::string config_to_json(const RunConfig& cfg);

/// Apply a flattened "a.b.c" -> value override set (used by sweep).
RunConfig apply_overrides(const RunConfig& base,
                          const std::map<std::string, std::string>& kv);

}  // namespace qhd
