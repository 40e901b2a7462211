#include "qhd/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <thread>
#include <vector>

#include "json.hpp"
#include "qhd/errors.hpp"
#include "qhd/io.hpp"
#include "qhd/units.hpp"

namespace qhd {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IOError("cannot create directory '" + dir + "': " + ec.message());
}

std::string write_metadata(const RunConfig& cfg, const json& diagnostics,
                           const std::vector<std::string>& artifacts) {
  json meta;
  meta["tool"] = "qhd";
  meta["version"] = "1.0.0";
  meta["command"] = command_name(cfg.command);
  meta["deterministic"] = cfg.deterministic;
  meta["thread_count"] = 1;  // a single run never parallelizes internally
  json arts = json::array();
  for (const std::string& a : artifacts) arts.push_back(a);
  meta["artifacts"] = arts;
  meta["diagnostics"] = diagnostics;
  meta["config"] = json::parse(config_to_json(cfg));
  const std::string path = join(cfg.output_dir, "metadata.json");
  write_text_atomic(path, meta.dump(2) + "\n");
  return path;
}

json grid_record(const Grid& g) {
  return {{"geometry", g.geometry == Geometry::spherical_radial ? "spherical"
                                                                : "cartesian"},
          {"x_min", g.x_min},
          {"x_max", g.x_max},
          {"n_points", g.n_points},
          {"spacing", g.spacing()}};
}

/// Geometry defaults that depend on the physical system: shells get a box
/// reaching well past the outer edge, wells a box holding the Gaussian tail.
QhdSystem build_system(const RunConfig& cfg) {
  GeometryConfig geo = cfg.geometry;
  PressureModel pm = PressureModel::fermi();
  if (cfg.pressure == "polytropic") pm = PressureModel::polytropic(cfg.eos);
  if (cfg.pressure == "none") pm = PressureModel::none();

  if (geo.geometry == Geometry::spherical_radial) {
    if (!(cfg.shell.R > 0.0) || !(cfg.shell.Delta > 0.0))
      throw ConfigError(
          "shell.R: spherical runs need shell.R and shell.Delta > 0");
    JelliumShell shell =
        build_jellium(cfg.shell.R, cfg.shell.Delta, cfg.material.r_s);
    if (geo.n_points == 0) geo.n_points = 2048;
    // wall far enough out that spill-out charge never touches it
    if (geo.r_max <= 0.0)
      geo.r_max = std::max(1.5 * shell.R_e, shell.R_e + 30.0);
    return make_shell_system(shell, geo.make_grid(), cfg.closure, pm);
  }

  // Cartesian: the scaled nonlinear-well model.
  Well1DParams wp{cfg.well.A, cfg.well.H, cfg.well.n_bar};
  const double sig = equilibrium_sigma(wp);
  if (geo.n_points == 0) geo.n_points = 1024;
  if (!(geo.x_max > geo.x_min)) {
    const double L = 10.0 + 10.0 * sig;
    geo.x_min = -L;
    geo.x_max = L;
  }
  return make_well_system(cfg.well.A, cfg.well.H, cfg.well.n_bar,
                          geo.make_grid(), cfg.closure.zeta);
}

double floor_of(const RunConfig& cfg, const QhdSystem& sys) {
  return cfg.numerics.density_floor > 0.0 ? cfg.numerics.density_floor
                                          : default_density_floor(sys);
}

// ------------------------------------------------------------- dispersion

RunOutcome run_dispersion(const RunConfig& cfg) {
  const DispersionConfig& d = cfg.dispersion;
  double k_max = d.k_max;
  if (d.branch == Branch::langmuir) {
    if (!(d.langmuir.omega_p > 0.0))
      throw ConfigError(
          "dispersion.langmuir.omega_p: must be > 0 for the langmuir branch");
    if (k_max <= 0.0) {
      const double k_th = d.langmuir.v2_mean > 0.0
                              ? d.langmuir.omega_p / std::sqrt(d.langmuir.v2_mean)
                              : std::sqrt(2.0 * d.langmuir.omega_p);
      k_max = 0.5 * k_th;
    }
  } else {
    if (!(d.acoustic.omega_pe > 0.0) || !(d.acoustic.omega_pi > 0.0) ||
        !(d.acoustic.lambda_D > 0.0))
      throw ConfigError(
          "dispersion.acoustic: omega_pe, omega_pi and lambda_D must be > 0 "
          "for the acoustic branch");
    if (k_max <= 0.0) k_max = 0.5 / d.acoustic.lambda_D;
  }

  std::vector<double> k(static_cast<std::size_t>(d.n_k));
  std::vector<double> w2_kin(k.size()), w2_fl(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = d.k_min + (k_max - d.k_min) * static_cast<double>(i) /
                         static_cast<double>(d.n_k - 1);
    if (d.branch == Branch::langmuir) {
      w2_kin[i] = omega2_langmuir_kinetic(k[i], d.langmuir).omega2;
      w2_fl[i] = omega2_langmuir_fluid(k[i], d.langmuir, d.gamma, d.zeta);
    } else {
      w2_kin[i] = omega2_acoustic_kinetic(k[i], d.acoustic);
      w2_fl[i] = omega2_acoustic_fluid(k[i], d.acoustic, d.gamma, d.zeta);
    }
  }

  ClosureMatchReport rep =
      match_closure(d.branch, d.langmuir, d.acoustic, d.gamma, d.zeta);

  const std::string csv = join(cfg.output_dir, "dispersion.csv");
  write_csv(csv, {{"k", "1/a0", &k},
                  {"omega2_kinetic", "a.u.", &w2_kin},
                  {"omega2_fluid", "a.u.", &w2_fl}});

  json diag;
  diag["branch"] = d.branch == Branch::langmuir ? "langmuir" : "acoustic";
  diag["k_max_used"] = k_max;
  diag["closure_match"] = {{"coeff_kinetic", rep.coeff_kinetic},
                           {"coeff_fluid", rep.coeff_fluid},
                           {"abs_diff", rep.abs_diff},
                           {"rel_diff", rep.rel_diff},
                           {"fit_residual", rep.fit_residual}};
  RunOutcome out;
  out.artifacts = {csv};
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

// ----------------------------------------------- ground state and dynamics

json conservation_record(const DynamicsResult& dr) {
  return {{"particle_drift", dr.conservation.particle_drift},
          {"energy_drift", dr.conservation.energy_drift},
          {"dt_used", dr.dt_used},
          {"steps", dr.steps}};
}

RunOutcome run_ground_state(const RunConfig& cfg) {
  QhdSystem sys = build_system(cfg);
  RelaxResult rr = relax_ground_state(sys, cfg.numerics);
  const double floor = floor_of(cfg, sys);
  FieldSet f = assemble_fields(rr.state, sys, floor);
  std::vector<double> coords = sys.grid.coords();
  std::vector<double> bg = sys.background_profile();

  const bool spherical = sys.grid.geometry == Geometry::spherical_radial;
  const char* xname = spherical ? "r" : "x";
  const std::string csv = join(cfg.output_dir, "ground_state.csv");
  write_csv(csv, {{xname, "a0", &coords},
                  {"n", "a0^-3", &rr.state.n},
                  {"n_i", "a0^-3", &bg},
                  {"V_H", "Ha", &f.V_H},
                  {"V_x", "Ha", &f.V_x},
                  {"V_c", "Ha", &f.V_c},
                  {"V_B", "Ha", &f.V_B}});

  json diag;
  diag["grid"] = grid_record(sys.grid);
  const double N_num = particle_number(rr.state, sys.grid);
  double N_target = N_num;
  if (spherical) {
    N_target = sys.shell.electron_count();
    diag["shell"] = {{"R_i", sys.shell.R_i},
                     {"R_e", sys.shell.R_e},
                     {"n0", sys.shell.n0},
                     {"omega_mie_eV",
                      hartree_to_eV(plasma_frequency(cfg.material.r_s) /
                                    std::sqrt(3.0))}};
  } else {
    N_target = sys.well_A * std::sqrt(2.0 * 3.14159265358979323846);
  }
  diag["N_target"] = N_target;
  diag["N_numeric"] = N_num;
  diag["relax_iterations"] = rr.residual_u_history.size();
  diag["residual_u_final"] = rr.residual_u_history.empty()
                                 ? 0.0
                                 : rr.residual_u_history.back();
  diag["residual_f_final"] = rr.residual_f_history.empty()
                                 ? 0.0
                                 : rr.residual_f_history.back();
  diag["energy"] = total_energy(rr.state, sys, floor);

  RunOutcome out;
  out.artifacts = {csv};
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

RunOutcome run_dynamics_cmd(const RunConfig& cfg) {
  if (!(cfg.numerics.t_end > 0.0))
    throw ConfigError("numerics.t_end: must be > 0 for dynamics");
  QhdSystem sys = build_system(cfg);
  RelaxResult rr = relax_ground_state(sys, cfg.numerics);
  DynamicsResult dr =
      run_dynamics(rr.state, sys, cfg.kick.to_excitation(), cfg.numerics);

  const bool spherical = sys.grid.geometry == Geometry::spherical_radial;
  const std::string csv = join(cfg.output_dir, "dynamics.csv");
  if (spherical) {
    write_csv(csv, {{"t", "a.u.", &dr.t}, {"<r>", "a0", &dr.moment}});
  } else {
    write_csv(csv, {{"t", "a.u.", &dr.t},
                    {"<x>", "a0", &dr.moment},
                    {"sigma", "a0", &dr.sigma}});
  }

  json diag;
  diag["grid"] = grid_record(sys.grid);
  diag["conservation"] = conservation_record(dr);
  diag["N"] = particle_number(rr.state, sys.grid);
  RunOutcome out;
  out.artifacts = {csv};
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

// ---------------------------------------------------------------- spectrum

RunOutcome run_spectrum(const RunConfig& cfg) {
  if (cfg.spectrum.input_csv.empty())
    throw ConfigError("spectrum.input_csv: required for the spectrum command");
  CsvTable tab = read_csv(cfg.spectrum.input_csv);
  const std::size_t col = static_cast<std::size_t>(cfg.spectrum.column);
  if (tab.columns.size() <= col)
    throw ConfigError("spectrum.column: file has only " +
                      std::to_string(tab.columns.size()) + " columns");
  const std::vector<double>& t = tab.columns[0];
  if (t.size() < 8)
    throw ConfigError("spectrum.input_csv: need at least 8 samples");
  const double dt = t[1] - t[0];
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs(t[i] - t[i - 1] - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
      throw ConfigError(
          "spectrum.input_csv: time column is not uniformly sampled");

  TimeSeries ts;
  ts.t0 = t[0];
  ts.dt = dt;
  ts.values = tab.columns[col];
  ts.label = tab.names[col];
  Spectrum sp = spectrum(ts, cfg.spectrum.window);
  std::vector<SpectralPeak> peaks = find_peaks(sp, cfg.spectrum.min_prominence);

  const std::string spec_csv = join(cfg.output_dir, "spectrum.csv");
  write_csv(spec_csv, {{"omega", "a.u.", &sp.omega_au},
                       {"omega_eV", "eV", &sp.omega_eV},
                       {"amplitude", "a.u.", &sp.amplitude}});

  std::vector<double> p_au, p_eV, p_amp, p_prom;
  for (const SpectralPeak& p : peaks) {
    p_au.push_back(p.omega_au);
    p_eV.push_back(p.omega_eV);
    p_amp.push_back(p.amplitude);
    p_prom.push_back(p.prominence);
  }
  const std::string peaks_csv = join(cfg.output_dir, "peaks.csv");
  write_csv(peaks_csv, {{"omega", "a.u.", &p_au},
                        {"omega_eV", "eV", &p_eV},
                        {"amplitude", "a.u.", &p_amp},
                        {"prominence", "-", &p_prom}});

  json diag;
  diag["n_samples"] = ts.values.size();
  diag["dt"] = ts.dt;
  diag["delta_omega"] = sp.delta_omega;
  diag["delta_omega_eV"] = hartree_to_eV(sp.delta_omega);
  diag["n_peaks"] = peaks.size();
  json plist = json::array();
  for (const SpectralPeak& p : peaks)
    plist.push_back({{"omega_eV", p.omega_eV},
                     {"amplitude", p.amplitude},
                     {"prominence", p.prominence}});
  diag["peaks"] = plist;

  RunOutcome out;
  out.artifacts = {spec_csv, peaks_csv};
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

// ------------------------------------------------------- variational models

RunOutcome run_variational_1d(const RunConfig& cfg) {
  const Variational1DConfig& v = cfg.var1d;
  Well1DParams p{v.well.A, v.well.H, v.well.n_bar};
  const double sig_eq = equilibrium_sigma(p);
  const double omega_b = breathing_frequency(p);

  State1D init;
  init.sigma = sig_eq * (1.0 + v.perturb_sigma);
  Trajectory1D traj = integrate_1d(init, p, v.t_end, v.dt, v.sample_stride);

  std::vector<double> d(traj.state.size()), sg(traj.state.size()),
      dd(traj.state.size()), sd(traj.state.size());
  for (std::size_t i = 0; i < traj.state.size(); ++i) {
    d[i] = traj.state[i].d;
    sg[i] = traj.state[i].sigma;
    dd[i] = traj.state[i].d_dot;
    sd[i] = traj.state[i].sigma_dot;
  }
  const std::string csv = join(cfg.output_dir, "variational_1d.csv");
  write_csv(csv, {{"t", "t.u.", &traj.t},
                  {"d", "", &d},
                  {"sigma", "", &sg},
                  {"d_dot", "", &dd},
                  {"sigma_dot", "", &sd},
                  {"energy", "", &traj.energy}});
  RunOutcome out;
  out.artifacts = {csv};

  if (v.scan_points > 0) {
    std::vector<double> As(static_cast<std::size_t>(v.scan_points)),
        sigs(As.size()), oms(As.size());
    for (std::size_t i = 0; i < As.size(); ++i) {
      As[i] = v.scan_A_min +
              (v.scan_A_max - v.scan_A_min) *
                  (As.size() == 1
                       ? 0.0
                       : static_cast<double>(i) /
                             static_cast<double>(As.size() - 1));
      Well1DParams q{As[i], v.well.H, v.well.n_bar};
      sigs[i] = equilibrium_sigma(q);
      oms[i] = breathing_frequency(q);
    }
    const std::string scan = join(cfg.output_dir, "breathing_scan.csv");
    write_csv(scan, {{"A", "", &As}, {"sigma_eq", "", &sigs},
                     {"Omega", "", &oms}});
    out.artifacts.push_back(scan);
  }

  double e_drift = 0.0;
  for (double e : traj.energy)
    e_drift = std::max(e_drift, std::abs(e - traj.energy.front()) /
                                    std::max(std::abs(traj.energy.front()),
                                             1e-300));
  json diag;
  diag["sigma_eq"] = sig_eq;
  diag["breathing_frequency"] = omega_b;
  diag["energy_drift"] = e_drift;
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

State3D crossed_kick_state(const Variational3DConfig& v,
                           const Well3DParams& p) {
  State3D s;
  s.sigma = equilibrium_sigma3(p);
  s.d = {v.delta, v.delta, v.delta};
  s.d_dot = {v.delta, -v.delta, 0.0};
  s.sigma_dot = {0.0, 0.0, 0.0};
  return s;
}

RunOutcome run_variational_3d(const RunConfig& cfg) {
  const Variational3DConfig& v = cfg.var3d;
  Well3DParams p = make_well3d(v.k, v.zeta_anh, v.N);
  State3D init = crossed_kick_state(v, p);
  Trajectory3D traj =
      integrate_3d(init, p, v.t_end, v.dt, v.sample_stride);

  std::vector<double> dx(traj.state.size()), dy(traj.state.size()),
      dz(traj.state.size()), sx(traj.state.size()), sy(traj.state.size()),
      sz(traj.state.size());
  for (std::size_t i = 0; i < traj.state.size(); ++i) {
    dx[i] = traj.state[i].d[0];
    dy[i] = traj.state[i].d[1];
    dz[i] = traj.state[i].d[2];
    sx[i] = traj.state[i].sigma[0];
    sy[i] = traj.state[i].sigma[1];
    sz[i] = traj.state[i].sigma[2];
  }
  const std::string csv = join(cfg.output_dir, "variational_3d.csv");
  write_csv(csv, {{"t", "t.u.", &traj.t},
                  {"d_x", "", &dx},
                  {"d_y", "", &dy},
                  {"d_z", "", &dz},
                  {"sigma_x", "", &sx},
                  {"sigma_y", "", &sy},
                  {"sigma_z", "", &sz},
                  {"energy", "", &traj.energy}});
  RunOutcome out;
  out.artifacts = {csv};

  double e_drift = 0.0;
  for (double e : traj.energy)
    e_drift = std::max(e_drift, std::abs(e - traj.energy.front()) /
                                    std::max(std::abs(traj.energy.front()),
                                             1e-300));
  json diag;
  diag["alpha"] = {p.alpha1, p.alpha2, p.alpha3, p.alpha4};
  diag["beta"] = p.beta;
  std::array<double, 3> se = equilibrium_sigma3(p);
  diag["sigma_eq"] = {se[0], se[1], se[2]};
  diag["energy_drift"] = e_drift;

  if (v.run_lyapunov) {
    LyapunovEstimate le =
        lyapunov_max(init, p, v.t_end, v.dt, v.lyapunov_renorm);
    const std::string lcsv = join(cfg.output_dir, "lyapunov.csv");
    write_csv(lcsv, {{"t", "t.u.", &le.t_trace},
                     {"lambda", "1/t.u.", &le.lambda_trace}});
    out.artifacts.push_back(lcsv);
    diag["lyapunov"] = le.lambda;
  }
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

RunOutcome run_poincare(const RunConfig& cfg) {
  const Variational3DConfig& v = cfg.var3d;
  Well3DParams p = make_well3d(v.k, v.zeta_anh, v.N);
  State3D init = crossed_kick_state(v, p);
  PoincareSet ps = poincare_section(init, p, v.t_end, v.dt);

  const std::string csv = join(cfg.output_dir, "poincare.csv");
  write_csv(csv, {{"d_x", "", &ps.d_x}, {"d_y", "", &ps.d_y}});
  RunOutcome out;
  out.artifacts = {csv};

  json diag;
  diag["surface"] = ps.surface.kind == SurfaceSpec::Kind::dz_zero
                        ? "dz_zero"
                        : "sigma_z_eq";
  diag["n_crossings"] = ps.d_x.size();
  diag["area_coverage"] = ps.area_coverage;
  if (v.run_lyapunov) {
    LyapunovEstimate le =
        lyapunov_max(init, p, v.t_end, v.dt, v.lyapunov_renorm);
    const std::string lcsv = join(cfg.output_dir, "lyapunov.csv");
    write_csv(lcsv, {{"t", "t.u.", &le.t_trace},
                     {"lambda", "1/t.u.", &le.lambda_trace}});
    out.artifacts.push_back(lcsv);
    diag["lyapunov"] = le.lambda;
  }
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

// ------------------------------------------------------------------- sweep

RunOutcome run_sweep(const RunConfig& cfg) {
  if (cfg.sweep.overrides.empty())
    throw ConfigError("sweep.overrides: at least one entry is required");

  std::vector<RunConfig> runs;
  RunConfig base = cfg;
  base.sweep = SweepConfig{};  // sub-runs must not recurse
  for (std::size_t i = 0; i < cfg.sweep.overrides.size(); ++i) {
    const auto& kv = cfg.sweep.overrides[i];
    RunConfig sub = apply_overrides(base, kv);
    if (sub.command == Command::sweep)
      throw ConfigError(
          "sweep.overrides: each entry must set command to a non-sweep "
          "command");
    if (kv.find("output_dir") == kv.end()) {
      char name[32];
      std::snprintf(name, sizeof name, "run_%03zu", i);
      sub.output_dir = join(cfg.output_dir, name);
    }
    runs.push_back(std::move(sub));
  }

  std::vector<RunOutcome> outcomes(runs.size());
  std::vector<std::exception_ptr> errors(runs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        outcomes[i] = run_command(runs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(
      static_cast<std::size_t>(cfg.sweep.workers), runs.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  RunOutcome out;
  json diag;
  diag["workers"] = cfg.sweep.workers;
  json rec = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    rec.push_back({{"output_dir", runs[i].output_dir},
                   {"command", command_name(runs[i].command)},
                   {"metadata", outcomes[i].metadata_path}});
    for (const std::string& a : outcomes[i].artifacts)
      out.artifacts.push_back(a);
    out.artifacts.push_back(outcomes[i].metadata_path);
  }
  diag["runs"] = rec;
  out.metadata_path = write_metadata(cfg, diag, out.artifacts);
  return out;
}

}  // namespace

RunOutcome run_command(const RunConfig& cfg) {
  ensure_dir(cfg.output_dir);
  switch (cfg.command) {
    case Command::dispersion: return run_dispersion(cfg);
    case Command::ground_state: return run_ground_state(cfg);
    case Command::dynamics: return run_dynamics_cmd(cfg);
    case Command::spectrum_cmd: return run_spectrum(cfg);
    case Command::variational_1d: return run_variational_1d(cfg);
    case Command::variational_3d: return run_variational_3d(cfg);
    case Command::poincare: return run_poincare(cfg);
    case Command::sweep: return run_sweep(cfg);
  }
  throw ConfigError("command: unhandled command");
}

}  // namespace qhd
