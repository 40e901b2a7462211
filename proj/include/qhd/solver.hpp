#pragma once
///
/// The nonlinear QHD solver: continuity + momentum for an electron fluid on
/// a 1D grid, with Hartree, external, pressure, Bohm and xc forces.
///
/// Three system flavors share the same integrator:
///
///  - spherical_jellium: radial breathing dynamics of a jellium nanoshell in
///    atomic units.  Momentum convention: du/dt + u u' = +V_H' + V_ext'
///    - h(n)' - V_B' - V_xc', with lap V_H = 4 pi (n - n_i).  V_H is the
///    electrostatic potential; the electron charge sign is folded in, which
///    is what makes the force +V_H'.
///
///  - cartesian_well: the scaled harmonic-well problem (omega0 = 1, length
///    and energy scaled out, quantum parameter H).  du/dt + u u' =
///    -(V_conf + V_H)' - h(n)' - V_B^{(H)}', with V_H'' = -n and
///    V_conf = x^2/2.  Here potentials are energies, hence the minus sign.
///
///  - cartesian_slab: a.u. Cartesian variant with a rigid uniform background
///    (lap V_H = 4 pi (n - n_bg), force +V_H'), used by the neutral-slab and
///    slab-plasmon force oracles.
///
/// Time stepping is classic RK4 with a Poisson re-solve per stage.  The
/// default dt obeys the Bohm-dispersion CFL bound dt <= 0.2 * dx^2 * 2
/// (grid-scale omega ~ k^2/2) scaled by the effective quantum parameter,
/// and an advective bound.  Densities are floored at 1e-12 * max(n_i);
/// Bohm and pressure terms see the floored density, and velocities are
/// zeroed where n < 10 * floor.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qhd/closures.hpp"
#include "qhd/grid.hpp"
#include "qhd/units.hpp"

namespace qhd {

/// Jellium shell with sharp radii and interior density n0.
struct JelliumShell {
  double R_i = 0.0;
  double R_e = 0.0;
  double n0 = 0.0;
  double electron_count() const;  // 4 pi/3 (R_e^3 - R_i^3) n0
};

/// Shell from (mean radius R, thickness Delta, r_s); N = (R_e^3 - R_i^3)/r_s^3.
JelliumShell build_jellium(double R, double Delta, double r_s);

struct HarmonicWell {
  double omega0 = 1.0;
  /// Equivalent jellium density of the confinement, n0 = omega0^2 in the
  /// scaled units (the large-A density plateau sits at this value).
  double background_density() const { return omega0 * omega0; }
};

enum class SystemKind { spherical_jellium, cartesian_well, cartesian_slab };

struct PressureModel {
  enum class Kind { fermi, polytropic, none };
  Kind kind = Kind::fermi;
  PolytropicEOS eos;
  static PressureModel fermi() { return {Kind::fermi, {}}; }
  static PressureModel polytropic(const PolytropicEOS& e) {
    return {Kind::polytropic, e};
  }
  static PressureModel none() { return {Kind::none, {}}; }
};

struct QhdSystem {
  SystemKind kind = SystemKind::spherical_jellium;
  Grid grid;
  JelliumShell shell;                 // spherical_jellium
  HarmonicWell well;                  // cartesian_well
  double well_A = 0.0;                // Gaussian amplitude; N = A sqrt(2 pi)
  double slab_background = 0.0;       // cartesian_slab
  PressureModel pressure;
  ClosureParams closure;
  /// Quantum scale multiplying the Bohm term as hbar_eff^2: 1 in a.u.,
  /// H for the scaled well.
  double hbar_eff = 1.0;

  /// Background / ion density sampled on the grid.  Shell edges get
  /// volume-fraction weighting in their boundary cells, and the profile is
  /// rescaled so its discrete volume integral equals electron_count().
  std::vector<double> background_profile() const;
};

QhdSystem make_shell_system(const JelliumShell& shell, const Grid& grid,
                            const ClosureParams& closure,
                            const PressureModel& pressure = PressureModel::fermi());
QhdSystem make_well_system(double A, double H, double n_bar, const Grid& grid,
                           double zeta = 1.0);
QhdSystem make_slab_system(double n_bg, const Grid& grid,
                           const ClosureParams& closure,
                           const PressureModel& pressure = PressureModel::none());

struct FluidState {
  std::vector<double> n;
  std::vector<double> u;
  double t = 0.0;
};

struct SolverConfig {
  double dt = 0.0;             // 0: derive from the CFL bounds
  double t_end = 0.0;
  double density_floor = 0.0;  // 0: 1e-12 * max background
  double relax_friction = 0.0; // 0: 0.5 * omega_p of the system
  double relax_tol = 1e-8;  // on masked ||u||_inf and ||(n/n_max) f||_inf
  double relax_t_max = 2000.0;
  int sample_stride = 0;       // 0: aim for ~0.5 time units per sample
  double blowup_velocity = 50.0;
  int check_interval = 200;    // steps between relaxation residual checks
};

/// Per-point force (acceleration) assembly described in the header comment.
/// V_ext is optional and enters as +dV_ext/dr (spherical/slab convention).
/// Below ~1e-7 of the peak density the force is gated smoothly to zero
/// (quadratic in n), which keeps the vacuum front stable without touching
/// physical densities.
std::vector<double> effective_force(const FluidState& s, const QhdSystem& sys,
                                    double density_floor,
                                    std::span<const double> V_ext = {});

/// Individual potential fields of a state, for profile output.
struct FieldSet {
  std::vector<double> V_H, V_x, V_c, V_B;
};
FieldSet assemble_fields(const FluidState& s, const QhdSystem& sys,
                         double density_floor);

/// Damped fictitious dynamics to the stationary state.  Residuals are
/// measured where n > 1e-6 * max(n): max |u| and max |force|.
/// Throws ConvergenceError (with the residual history attached) when
/// relax_t_max is exceeded.
struct RelaxResult {
  FluidState state;
  std::vector<double> residual_u_history;
  std::vector<double> residual_f_history;
  double t_relaxed = 0.0;
  long steps = 0;
};
RelaxResult relax_ground_state(const QhdSystem& sys, const SolverConfig& cfg);

struct ConvergenceError;  // defined in errors.hpp

/// Impulsive Coulomb-type kick: u(r) += tau * z / r^2, r = 0 untouched.
/// Density unchanged; tau = 0 or z = 0 is an exact no-op.
void coulomb_kick(FluidState& s, const Grid& g, double z, double tau);

/// 1D excitations for the well runs.
void rigid_displacement(FluidState& s, const Grid& g, double delta);
void width_pinch(FluidState& s, const Grid& g, double eps);

struct Excitation {
  enum class Kind { none, coulomb_kick, rigid_displacement, width_pinch };
  Kind kind = Kind::none;
  double z = 1.0, tau = 0.0;  // coulomb_kick
  double delta = 0.0;         // rigid_displacement
  double eps = 0.0;           // width_pinch
};
void apply_excitation(FluidState& s, const QhdSystem& sys, const Excitation& e);

/// One RK4 step with Poisson re-solve per stage, then floor/velocity-zeroing.
/// friction > 0 adds -friction * u to du/dt (relaxation mode).
void step(FluidState& s, const QhdSystem& sys, double dt, double density_floor,
          double friction = 0.0);

/// Derived dt from the stability bounds for this system/grid.
double default_dt(const QhdSystem& sys);
double default_density_floor(const QhdSystem& sys);

/// <r> = int r n 4 pi r^2 dr / int n 4 pi r^2 dr (spherical);
/// <x> and the rms width for Cartesian runs.
double mean_radius(const FluidState& s, const Grid& g);
double mean_x(const FluidState& s, const Grid& g);
double width_sigma(const FluidState& s, const Grid& g);
double particle_number(const FluidState& s, const Grid& g);

/// Total energy of a state (kinetic + internal + field + external), used by
/// the conservation diagnostics.  Same convention per system kind.
double total_energy(const FluidState& s, const QhdSystem& sys,
                    double density_floor);

struct ConservationDiagnostics {
  double particle_drift = 0.0;  // max |N(t)/N(0) - 1|
  double energy_drift = 0.0;    // max |E(t) - E(0)| / max(|E(0)|, 1e-300)
};

struct DynamicsResult {
  std::vector<double> t;
  std::vector<double> moment;  // <r> or <x>
  std::vector<double> sigma;   // rms width; empty for spherical runs
  std::vector<double> energy;
  ConservationDiagnostics conservation;
  double dt_used = 0.0;
  long steps = 0;
};

/// Excite a ground state and integrate, sampling observables every
/// sample_stride steps.  Throws NumericalError on NaN/blow-up.
DynamicsResult run_dynamics(const FluidState& ground, const QhdSystem& sys,
                            const Excitation& exc, const SolverConfig& cfg);

/// Stationary-limit diagnostic: residual field
///   -(3 pi^2 n)^{2/3}/2 + V_H + V_ext - mu
/// with mu the least-squares constant over {n > 0.1 max n}.  Small where the
/// Bohm term is negligible (interior plateaus), Bohm-sized at edges.
struct TFResidual {
  std::vector<double> residual;
  double mu = 0.0;
};
TFResidual thomas_fermi_residual(const FluidState& s, const QhdSystem& sys,
                                 std::span<const double> V_ext = {});

}  // namespace qhd
