#include "qhd/config.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "json.hpp"
#include "qhd/errors.hpp"
#include "qhd/io.hpp"

namespace qhd {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        ok = true;
        break;
      }
    if (!ok) fail(path + "." + it.key(), "unknown key");
  }
}

double num(const json& j, const std::string& path, const char* key,
           double def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path + "." + key, "must be finite");
  return x;
}

int integer(const json& j, const std::string& path, const char* key, int def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

bool boolean(const json& j, const std::string& path, const char* key,
             bool def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
  return v.get<bool>();
}

std::string str(const json& j, const std::string& path, const char* key,
                const std::string& def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be > 0");
}

void require_nonnegative(double v, const std::string& path) {
  if (!(v >= 0.0)) fail(path, "must be >= 0");
}

}  // namespace

std::string command_name(Command c) {
  switch (c) {
    case Command::dispersion: return "dispersion";
    case Command::ground_state: return "ground-state";
    case Command::dynamics: return "dynamics";
    case Command::spectrum_cmd: return "spectrum";
    case Command::variational_1d: return "variational-1d";
    case Command::variational_3d: return "variational-3d";
    case Command::poincare: return "poincare";
    case Command::sweep: return "sweep";
  }
  return "ground-state";
}

Command command_from_name(const std::string& name) {
  std::string canon = name;  // accept foo_bar as an alias for foo-bar
  for (char& ch : canon)
    if (ch == '_') ch = '-';
  for (Command c : {Command::dispersion, Command::ground_state,
                    Command::dynamics, Command::spectrum_cmd,
                    Command::variational_1d, Command::variational_3d,
                    Command::poincare, Command::sweep})
    if (command_name(c) == canon) return c;
  throw ConfigError(
      "command: unknown value '" + name +
      "' (expected dispersion, ground-state, dynamics, spectrum, "
      "variational-1d, variational-3d, poincare or sweep)");
}

Grid GeometryConfig::make_grid() const {
  if (geometry == Geometry::spherical_radial)
    return Grid::spherical(r_max, n_points);
  return Grid::cartesian(x_min, x_max, n_points);
}

Excitation KickConfig::to_excitation() const {
  Excitation e;
  e.kind = kind;
  e.z = z;
  e.tau = tau;
  e.delta = delta;
  e.eps = eps;
  return e;
}

namespace {

RunConfig from_json(const json& j) {
  RunConfig cfg;
  check_keys(j, "config",
             {"command", "output_dir", "material", "T_e", "geometry", "shell",
              "well", "closure", "pressure", "eos", "kick", "numerics",
              "dispersion", "spectrum", "var1d", "var3d", "sweep",
              "deterministic"});

  cfg.command = command_from_name(str(j, "config", "command", "ground-state"));
  cfg.output_dir = str(j, "config", "output_dir", ".");
  cfg.deterministic = boolean(j, "config", "deterministic", true);
  cfg.T_e = num(j, "config", "T_e", 0.0);
  require_nonnegative(cfg.T_e, "T_e");

  if (j.contains("material")) {
    const json& m = j.at("material");
    check_keys(m, "material", {"r_s", "label"});
    cfg.material.r_s = num(m, "material", "r_s", cfg.material.r_s);
    cfg.material.label = str(m, "material", "label", cfg.material.label);
    require_positive(cfg.material.r_s, "material.r_s");
  }

  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    check_keys(g, "geometry", {"type", "r_max", "x_min", "x_max", "n_points"});
    const std::string type = str(g, "geometry", "type", "spherical");
    if (type == "spherical")
      cfg.geometry.geometry = Geometry::spherical_radial;
    else if (type == "cartesian")
      cfg.geometry.geometry = Geometry::cartesian1d;
    else
      fail("geometry.type", "expected 'spherical' or 'cartesian'");
    cfg.geometry.r_max = num(g, "geometry", "r_max", 0.0);
    cfg.geometry.x_min = num(g, "geometry", "x_min", 0.0);
    cfg.geometry.x_max = num(g, "geometry", "x_max", 0.0);
    cfg.geometry.n_points = integer(g, "geometry", "n_points", 0);
    if (cfg.geometry.n_points != 0 && cfg.geometry.n_points < 16)
      fail("geometry.n_points", "must be >= 16");
    // Zero extents mean "derive from the system"; explicit ones must be sane.
    require_nonnegative(cfg.geometry.r_max, "geometry.r_max");
    if ((cfg.geometry.x_min != 0.0 || cfg.geometry.x_max != 0.0) &&
        !(cfg.geometry.x_max > cfg.geometry.x_min))
      fail("geometry.x_max", "must exceed geometry.x_min");
  }

  if (j.contains("shell")) {
    const json& s = j.at("shell");
    check_keys(s, "shell", {"R", "Delta"});
    cfg.shell.R = num(s, "shell", "R", 0.0);
    cfg.shell.Delta = num(s, "shell", "Delta", 0.0);
    if (cfg.shell.R > 0.0 || cfg.shell.Delta > 0.0) {
      require_positive(cfg.shell.R, "shell.R");
      require_positive(cfg.shell.Delta, "shell.Delta");
      if (cfg.shell.R - 0.5 * cfg.shell.Delta < 0.0)
        fail("shell.Delta", "R - Delta/2 must be >= 0");
    }
  }

  if (j.contains("well")) {
    const json& w = j.at("well");
    check_keys(w, "well", {"A", "H", "n_bar"});
    cfg.well.A = num(w, "well", "A", cfg.well.A);
    cfg.well.H = num(w, "well", "H", cfg.well.H);
    cfg.well.n_bar = num(w, "well", "n_bar", cfg.well.n_bar);
    require_positive(cfg.well.A, "well.A");
    require_positive(cfg.well.H, "well.H");
    require_positive(cfg.well.n_bar, "well.n_bar");
  }

  if (j.contains("closure")) {
    const json& c = j.at("closure");
    check_keys(c, "closure", {"gamma", "zeta", "xc"});
    cfg.closure.gamma = num(c, "closure", "gamma", cfg.closure.gamma);
    cfg.closure.zeta = num(c, "closure", "zeta", cfg.closure.zeta);
    require_positive(cfg.closure.gamma, "closure.gamma");
    require_nonnegative(cfg.closure.zeta, "closure.zeta");
    const std::string xc = str(c, "closure", "xc", "lda_exchange_plus_brey");
    if (xc == "none")
      cfg.closure.xc = XCModel::none;
    else if (xc == "lda_exchange")
      cfg.closure.xc = XCModel::lda_exchange;
    else if (xc == "lda_exchange_plus_brey")
      cfg.closure.xc = XCModel::lda_exchange_plus_brey;
    else
      fail("closure.xc",
           "expected 'none', 'lda_exchange' or 'lda_exchange_plus_brey'");
  }

  cfg.pressure = str(j, "config", "pressure", "fermi");
  if (cfg.pressure != "fermi" && cfg.pressure != "polytropic" &&
      cfg.pressure != "none")
    fail("pressure", "expected 'fermi', 'polytropic' or 'none'");

  if (j.contains("eos")) {
    const json& e = j.at("eos");
    check_keys(e, "eos", {"gamma", "n_ref", "P_ref"});
    cfg.eos.gamma = num(e, "eos", "gamma", cfg.eos.gamma);
    cfg.eos.n_ref = num(e, "eos", "n_ref", cfg.eos.n_ref);
    cfg.eos.P_ref = num(e, "eos", "P_ref", cfg.eos.P_ref);
    require_positive(cfg.eos.n_ref, "eos.n_ref");
    require_positive(cfg.eos.P_ref, "eos.P_ref");
    require_positive(cfg.eos.gamma, "eos.gamma");
    if (cfg.eos.gamma == 1.0)
      fail("eos.gamma", "isothermal gamma = 1 is not supported");
  }

  if (j.contains("kick")) {
    const json& k = j.at("kick");
    check_keys(k, "kick", {"kind", "z", "tau", "delta", "eps"});
    const std::string kind = str(k, "kick", "kind", "coulomb_kick");
    if (kind == "none")
      cfg.kick.kind = Excitation::Kind::none;
    else if (kind == "coulomb_kick")
      cfg.kick.kind = Excitation::Kind::coulomb_kick;
    else if (kind == "rigid_displacement")
      cfg.kick.kind = Excitation::Kind::rigid_displacement;
    else if (kind == "width_pinch")
      cfg.kick.kind = Excitation::Kind::width_pinch;
    else
      fail("kick.kind",
           "expected 'none', 'coulomb_kick', 'rigid_displacement' or "
           "'width_pinch'");
    cfg.kick.z = num(k, "kick", "z", cfg.kick.z);
    cfg.kick.tau = num(k, "kick", "tau", cfg.kick.tau);
    cfg.kick.delta = num(k, "kick", "delta", cfg.kick.delta);
    cfg.kick.eps = num(k, "kick", "eps", cfg.kick.eps);
    require_nonnegative(cfg.kick.tau, "kick.tau");
  }

  if (j.contains("numerics")) {
    const json& n = j.at("numerics");
    check_keys(n, "numerics",
               {"dt", "t_end", "density_floor", "relax_friction", "relax_tol",
                "relax_t_max", "sample_stride", "blowup_velocity",
                "check_interval"});
    cfg.numerics.dt = num(n, "numerics", "dt", 0.0);
    cfg.numerics.t_end = num(n, "numerics", "t_end", 0.0);
    cfg.numerics.density_floor = num(n, "numerics", "density_floor", 0.0);
    cfg.numerics.relax_friction = num(n, "numerics", "relax_friction", 0.0);
    cfg.numerics.relax_tol =
        num(n, "numerics", "relax_tol", cfg.numerics.relax_tol);
    cfg.numerics.relax_t_max =
        num(n, "numerics", "relax_t_max", cfg.numerics.relax_t_max);
    cfg.numerics.sample_stride = integer(n, "numerics", "sample_stride", 0);
    cfg.numerics.blowup_velocity =
        num(n, "numerics", "blowup_velocity", cfg.numerics.blowup_velocity);
    cfg.numerics.check_interval =
        integer(n, "numerics", "check_interval", cfg.numerics.check_interval);
    require_nonnegative(cfg.numerics.dt, "numerics.dt");
    require_nonnegative(cfg.numerics.t_end, "numerics.t_end");
    require_nonnegative(cfg.numerics.density_floor, "numerics.density_floor");
    require_nonnegative(cfg.numerics.relax_friction,
                        "numerics.relax_friction");
    require_positive(cfg.numerics.relax_tol, "numerics.relax_tol");
    require_positive(cfg.numerics.relax_t_max, "numerics.relax_t_max");
    if (cfg.numerics.sample_stride < 0)
      fail("numerics.sample_stride", "must be >= 0");
    require_positive(cfg.numerics.blowup_velocity,
                     "numerics.blowup_velocity");
    if (cfg.numerics.check_interval < 1)
      fail("numerics.check_interval", "must be >= 1");
  }

  if (j.contains("dispersion")) {
    const json& d = j.at("dispersion");
    check_keys(d, "dispersion",
               {"branch", "langmuir", "acoustic", "gamma", "zeta", "k_min",
                "k_max", "n_k"});
    const std::string br = str(d, "dispersion", "branch", "langmuir");
    if (br == "langmuir")
      cfg.dispersion.branch = Branch::langmuir;
    else if (br == "acoustic")
      cfg.dispersion.branch = Branch::acoustic;
    else
      fail("dispersion.branch", "expected 'langmuir' or 'acoustic'");
    if (d.contains("langmuir")) {
      const json& l = d.at("langmuir");
      check_keys(l, "dispersion.langmuir", {"omega_p", "v2_mean"});
      cfg.dispersion.langmuir.omega_p =
          num(l, "dispersion.langmuir", "omega_p", 0.0);
      cfg.dispersion.langmuir.v2_mean =
          num(l, "dispersion.langmuir", "v2_mean", 0.0);
      require_nonnegative(cfg.dispersion.langmuir.v2_mean,
                          "dispersion.langmuir.v2_mean");
    }
    if (d.contains("acoustic")) {
      const json& a = d.at("acoustic");
      check_keys(a, "dispersion.acoustic",
                 {"omega_pe", "omega_pi", "lambda_D", "H"});
      cfg.dispersion.acoustic.omega_pe =
          num(a, "dispersion.acoustic", "omega_pe", 0.0);
      cfg.dispersion.acoustic.omega_pi =
          num(a, "dispersion.acoustic", "omega_pi", 0.0);
      cfg.dispersion.acoustic.lambda_D =
          num(a, "dispersion.acoustic", "lambda_D", 0.0);
      cfg.dispersion.acoustic.H = num(a, "dispersion.acoustic", "H", 0.0);
      require_nonnegative(cfg.dispersion.acoustic.H,
                          "dispersion.acoustic.H");
    }
    cfg.dispersion.gamma = num(d, "dispersion", "gamma", cfg.dispersion.gamma);
    cfg.dispersion.zeta = num(d, "dispersion", "zeta", cfg.dispersion.zeta);
    require_positive(cfg.dispersion.gamma, "dispersion.gamma");
    require_nonnegative(cfg.dispersion.zeta, "dispersion.zeta");
    cfg.dispersion.k_min = num(d, "dispersion", "k_min", 0.0);
    cfg.dispersion.k_max = num(d, "dispersion", "k_max", 0.0);
    cfg.dispersion.n_k = integer(d, "dispersion", "n_k", cfg.dispersion.n_k);
    require_nonnegative(cfg.dispersion.k_min, "dispersion.k_min");
    require_nonnegative(cfg.dispersion.k_max, "dispersion.k_max");
    if (cfg.dispersion.k_max > 0.0 &&
        !(cfg.dispersion.k_max > cfg.dispersion.k_min))
      fail("dispersion.k_max", "must exceed dispersion.k_min");
    if (cfg.dispersion.n_k < 2) fail("dispersion.n_k", "must be >= 2");
  }

  if (j.contains("spectrum")) {
    const json& s = j.at("spectrum");
    check_keys(s, "spectrum",
               {"input_csv", "column", "window", "min_prominence"});
    cfg.spectrum.input_csv = str(s, "spectrum", "input_csv", "");
    cfg.spectrum.column = integer(s, "spectrum", "column", 1);
    if (cfg.spectrum.column < 1) fail("spectrum.column", "must be >= 1");
    const std::string w = str(s, "spectrum", "window", "hann");
    if (w == "hann")
      cfg.spectrum.window = Window::hann;
    else if (w == "none")
      cfg.spectrum.window = Window::none;
    else
      fail("spectrum.window", "expected 'hann' or 'none'");
    cfg.spectrum.min_prominence =
        num(s, "spectrum", "min_prominence", cfg.spectrum.min_prominence);
    if (!(cfg.spectrum.min_prominence >= 0.0 &&
          cfg.spectrum.min_prominence <= 1.0))
      fail("spectrum.min_prominence", "must lie in [0, 1]");
  }

  if (j.contains("var1d")) {
    const json& v = j.at("var1d");
    check_keys(v, "var1d",
               {"well", "t_end", "dt", "sample_stride", "perturb_sigma",
                "scan_A_min", "scan_A_max", "scan_points"});
    if (v.contains("well")) {
      const json& w = v.at("well");
      check_keys(w, "var1d.well", {"A", "H", "n_bar"});
      cfg.var1d.well.A = num(w, "var1d.well", "A", cfg.var1d.well.A);
      cfg.var1d.well.H = num(w, "var1d.well", "H", cfg.var1d.well.H);
      cfg.var1d.well.n_bar =
          num(w, "var1d.well", "n_bar", cfg.var1d.well.n_bar);
      require_nonnegative(cfg.var1d.well.A, "var1d.well.A");
      require_positive(cfg.var1d.well.H, "var1d.well.H");
      require_positive(cfg.var1d.well.n_bar, "var1d.well.n_bar");
    }
    cfg.var1d.t_end = num(v, "var1d", "t_end", cfg.var1d.t_end);
    cfg.var1d.dt = num(v, "var1d", "dt", 0.0);
    cfg.var1d.sample_stride =
        integer(v, "var1d", "sample_stride", cfg.var1d.sample_stride);
    cfg.var1d.perturb_sigma =
        num(v, "var1d", "perturb_sigma", cfg.var1d.perturb_sigma);
    cfg.var1d.scan_A_min = num(v, "var1d", "scan_A_min", 0.0);
    cfg.var1d.scan_A_max = num(v, "var1d", "scan_A_max", 0.0);
    cfg.var1d.scan_points = integer(v, "var1d", "scan_points", 0);
    require_positive(cfg.var1d.t_end, "var1d.t_end");
    require_nonnegative(cfg.var1d.dt, "var1d.dt");
    if (cfg.var1d.sample_stride < 1) fail("var1d.sample_stride", ">= 1");
    if (cfg.var1d.scan_points < 0) fail("var1d.scan_points", "must be >= 0");
    if (cfg.var1d.scan_points > 0) {
      require_nonnegative(cfg.var1d.scan_A_min, "var1d.scan_A_min");
      if (!(cfg.var1d.scan_A_max >= cfg.var1d.scan_A_min))
        fail("var1d.scan_A_max", "must be >= var1d.scan_A_min");
    }
  }

  if (j.contains("var3d")) {
    const json& v = j.at("var3d");
    check_keys(v, "var3d",
               {"k", "zeta_anh", "N", "delta", "t_end", "dt", "sample_stride",
                "lyapunov_renorm", "run_lyapunov"});
    if (v.contains("k")) {
      const json& k = v.at("k");
      if (!k.is_array() || k.size() != 3)
        fail("var3d.k", "expected an array of 3 numbers");
      for (int i = 0; i < 3; ++i) {
        if (!k[static_cast<std::size_t>(i)].is_number())
          fail("var3d.k", "expected an array of 3 numbers");
        cfg.var3d.k[static_cast<std::size_t>(i)] =
            k[static_cast<std::size_t>(i)].get<double>();
        require_positive(cfg.var3d.k[static_cast<std::size_t>(i)], "var3d.k");
      }
    }
    cfg.var3d.zeta_anh = num(v, "var3d", "zeta_anh", cfg.var3d.zeta_anh);
    cfg.var3d.N = num(v, "var3d", "N", cfg.var3d.N);
    cfg.var3d.delta = num(v, "var3d", "delta", cfg.var3d.delta);
    cfg.var3d.t_end = num(v, "var3d", "t_end", cfg.var3d.t_end);
    cfg.var3d.dt = num(v, "var3d", "dt", 0.0);
    cfg.var3d.sample_stride =
        integer(v, "var3d", "sample_stride", cfg.var3d.sample_stride);
    cfg.var3d.lyapunov_renorm =
        num(v, "var3d", "lyapunov_renorm", cfg.var3d.lyapunov_renorm);
    cfg.var3d.run_lyapunov =
        boolean(v, "var3d", "run_lyapunov", cfg.var3d.run_lyapunov);
    require_nonnegative(cfg.var3d.zeta_anh, "var3d.zeta_anh");
    require_positive(cfg.var3d.N, "var3d.N");
    require_positive(cfg.var3d.t_end, "var3d.t_end");
    require_nonnegative(cfg.var3d.dt, "var3d.dt");
    if (cfg.var3d.sample_stride < 1) fail("var3d.sample_stride", ">= 1");
    require_positive(cfg.var3d.lyapunov_renorm, "var3d.lyapunov_renorm");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    check_keys(s, "sweep", {"workers", "overrides"});
    cfg.sweep.workers = integer(s, "sweep", "workers", 1);
    if (cfg.sweep.workers < 1) fail("sweep.workers", "must be >= 1");
    if (s.contains("overrides")) {
      const json& ov = s.at("overrides");
      if (!ov.is_array()) fail("sweep.overrides", "expected an array");
      for (const json& entry : ov) {
        if (!entry.is_object())
          fail("sweep.overrides", "each entry must be an object");
        std::map<std::string, std::string> kv;
        for (auto it = entry.begin(); it != entry.end(); ++it) {
          const json& val = it.value();
          kv[it.key()] = val.is_string() ? val.get<std::string>() : val.dump();
        }
        cfg.sweep.overrides.push_back(std::move(kv));
      }
    }
  }

  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  if (j.is_object() && j.contains("config") && j.at("config").is_object())
    return from_json(j.at("config"));  // metadata record: config embedded
  return from_json(j);
}

RunConfig parse_config_file(const std::string& path) {
  return parse_config_text(read_text(path));
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["command"] = command_name(cfg.command);
  j["output_dir"] = cfg.output_dir;
  j["material"] = {{"r_s", cfg.material.r_s}, {"label", cfg.material.label}};
  j["T_e"] = cfg.T_e;
  j["geometry"] = {
      {"type", cfg.geometry.geometry == Geometry::spherical_radial
                   ? "spherical"
                   : "cartesian"},
      {"r_max", cfg.geometry.r_max},
      {"x_min", cfg.geometry.x_min},
      {"x_max", cfg.geometry.x_max},
      {"n_points", cfg.geometry.n_points}};
  j["shell"] = {{"R", cfg.shell.R}, {"Delta", cfg.shell.Delta}};
  j["well"] = {{"A", cfg.well.A}, {"H", cfg.well.H}, {"n_bar", cfg.well.n_bar}};
  const char* xc = "none";
  if (cfg.closure.xc == XCModel::lda_exchange) xc = "lda_exchange";
  if (cfg.closure.xc == XCModel::lda_exchange_plus_brey)
    xc = "lda_exchange_plus_brey";
  j["closure"] = {{"gamma", cfg.closure.gamma},
                  {"zeta", cfg.closure.zeta},
                  {"xc", xc}};
  j["pressure"] = cfg.pressure;
  j["eos"] = {{"gamma", cfg.eos.gamma},
              {"n_ref", cfg.eos.n_ref},
              {"P_ref", cfg.eos.P_ref}};
  const char* kick = "none";
  switch (cfg.kick.kind) {
    case Excitation::Kind::none: kick = "none"; break;
    case Excitation::Kind::coulomb_kick: kick = "coulomb_kick"; break;
    case Excitation::Kind::rigid_displacement:
      kick = "rigid_displacement";
      break;
    case Excitation::Kind::width_pinch: kick = "width_pinch"; break;
  }
  j["kick"] = {{"kind", kick},
               {"z", cfg.kick.z},
               {"tau", cfg.kick.tau},
               {"delta", cfg.kick.delta},
               {"eps", cfg.kick.eps}};
  j["numerics"] = {{"dt", cfg.numerics.dt},
                   {"t_end", cfg.numerics.t_end},
                   {"density_floor", cfg.numerics.density_floor},
                   {"relax_friction", cfg.numerics.relax_friction},
                   {"relax_tol", cfg.numerics.relax_tol},
                   {"relax_t_max", cfg.numerics.relax_t_max},
                   {"sample_stride", cfg.numerics.sample_stride},
                   {"blowup_velocity", cfg.numerics.blowup_velocity},
                   {"check_interval", cfg.numerics.check_interval}};
  j["dispersion"] = {
      {"branch",
       cfg.dispersion.branch == Branch::langmuir ? "langmuir" : "acoustic"},
      {"langmuir",
       {{"omega_p", cfg.dispersion.langmuir.omega_p},
        {"v2_mean", cfg.dispersion.langmuir.v2_mean}}},
      {"acoustic",
       {{"omega_pe", cfg.dispersion.acoustic.omega_pe},
        {"omega_pi", cfg.dispersion.acoustic.omega_pi},
        {"lambda_D", cfg.dispersion.acoustic.lambda_D},
        {"H", cfg.dispersion.acoustic.H}}},
      {"gamma", cfg.dispersion.gamma},
      {"zeta", cfg.dispersion.zeta},
      {"k_min", cfg.dispersion.k_min},
      {"k_max", cfg.dispersion.k_max},
      {"n_k", cfg.dispersion.n_k}};
  j["spectrum"] = {
      {"input_csv", cfg.spectrum.input_csv},
      {"column", cfg.spectrum.column},
      {"window", cfg.spectrum.window == Window::hann ? "hann" : "none"},
      {"min_prominence", cfg.spectrum.min_prominence}};
  j["var1d"] = {{"well",
                 {{"A", cfg.var1d.well.A},
                  {"H", cfg.var1d.well.H},
                  {"n_bar", cfg.var1d.well.n_bar}}},
                {"t_end", cfg.var1d.t_end},
                {"dt", cfg.var1d.dt},
                {"sample_stride", cfg.var1d.sample_stride},
                {"perturb_sigma", cfg.var1d.perturb_sigma},
                {"scan_A_min", cfg.var1d.scan_A_min},
                {"scan_A_max", cfg.var1d.scan_A_max},
                {"scan_points", cfg.var1d.scan_points}};
  j["var3d"] = {{"k", {cfg.var3d.k[0], cfg.var3d.k[1], cfg.var3d.k[2]}},
                {"zeta_anh", cfg.var3d.zeta_anh},
                {"N", cfg.var3d.N},
                {"delta", cfg.var3d.delta},
                {"t_end", cfg.var3d.t_end},
                {"dt", cfg.var3d.dt},
                {"sample_stride", cfg.var3d.sample_stride},
                {"lyapunov_renorm", cfg.var3d.lyapunov_renorm},
                {"run_lyapunov", cfg.var3d.run_lyapunov}};
  json ov = json::array();
  for (const auto& entry : cfg.sweep.overrides) {
    json e = json::object();
    for (const auto& [k, v] : entry) e[k] = v;
    ov.push_back(e);
  }
  j["sweep"] = {{"workers", cfg.sweep.workers}, {"overrides", ov}};
  j["deterministic"] = cfg.deterministic;
  return j.dump(2) + "\n";
}

RunConfig apply_overrides(const RunConfig& base,
                          const std::map<std::string, std::string>& kv) {
  json j = json::parse(config_to_json(base));
  for (const auto& [key, value] : kv) {
    json* cur = &j;
    std::size_t start = 0;
    while (true) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty())
        throw ConfigError("override '" + key + "': empty path segment");
      if (dot == std::string::npos) {
        json parsed;
        try {
          parsed = json::parse(value);
        } catch (const json::parse_error&) {
          parsed = value;  // bare strings stay strings
        }
        (*cur)[part] = parsed;
        break;
      }
      cur = &((*cur)[part]);
      start = dot + 1;
    }
  }
  return parse_config_text(j.dump());
}

}  // namespace qhd
