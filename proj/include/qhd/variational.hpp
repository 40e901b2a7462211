#pragma once
///
/// Reduced-order models from a Gaussian ansatz: the 1D (d, sigma) system in
/// scaled well units, and the 3D anisotropic/anharmonic 12-dim system with
/// Hartree, Fermi, exchange and correlation couplings plus chaos
/// diagnostics (Poincare sections, largest Lyapunov exponent).
///
/// No RNG anywhere: the Lyapunov shadow offset is a fixed documented vector.

#include <array>
#include <string>
#include <vector>

namespace qhd {

// ---------------------------------------------------------------- 1D model

struct Well1DParams {
  double A = 0.0;      // ansatz amplitude, N = A sqrt(2 pi)
  double H = 1.0;      // quantum parameter
  double n_bar = 1.0;  // reference density of the gamma = 3 EOS
};

struct State1D {
  double d = 0.0, sigma = 1.0;
  double d_dot = 0.0, sigma_dot = 0.0;
};

/// U(d, sigma) = d^2/2 + sigma^2/2 - (sqrt2/2) A sigma
///             + sqrt3 A^2/(6 n_bar^2 sigma^2) + H^2/(8 sigma^2).
double potential_1d(const State1D& s, const Well1DParams& p);

/// Width equation right-hand side terms; dipole is exactly dd/dt = -d.
void accel_1d(const State1D& s, const Well1DParams& p, double& d_acc,
              double& sigma_acc);

/// Positive root of sigma = sqrt2 A/2 + sqrt3 A^2/(3 n_bar^2 sigma^3)
///                        + H^2/(4 sigma^3).
/// Closed form (H^2/4)^{1/4} at A = 0.  Safeguarded Newton, tol 1e-13.
double equilibrium_sigma(const Well1DParams& p);

/// Omega = sqrt(U''(sigma*)), U'' = 1 + (sqrt3 A^2/n_bar^2 + 3 H^2/4)/sigma*^4.
/// Equals 2 exactly at A = 0 and decreases toward 1 for large A.
double breathing_frequency(const Well1DParams& p);

struct Trajectory1D {
  std::vector<double> t;
  std::vector<State1D> state;
  std::vector<double> energy;
};

/// RK4; dt <= min period/1000 by default (see integrate_3d note).
Trajectory1D integrate_1d(const State1D& init, const Well1DParams& p,
                          double t_end, double dt = 0.0,
                          int sample_stride = 1);

// ---------------------------------------------------------------- 3D model

struct Well3DParams {
  std::array<double, 3> k = {1.0, 1.0, 1.0};  // trap curvatures
  double zeta_anh = 0.0;                      // quartic anharmonicity
  double N = 1.0;                             // particle number
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0, alpha4 = 0.0;
  double beta = 0.0;  // correlation constant convention, see AlphaReport
};

struct State3D {
  std::array<double, 3> d{}, sigma{}, d_dot{}, sigma_dot{};
};

/// Quadrature of the energy terms on the anisotropic Gaussian ansatz.
/// alpha1 (Hartree), alpha3 (Fermi), alpha4 (exchange) factor exactly and
/// come out independent of the reference point; the Brey correlation does
/// not reduce to the printed power law, so alpha2 is defined at the
/// reference (N, sigma) with beta = the Brey strength constant 0.03349.
/// The convention string spells this out.
struct AlphaReport {
  double alpha1 = 0.0, alpha2 = 0.0, alpha3 = 0.0, alpha4 = 0.0;
  double beta = 0.0;
  std::array<double, 4> quad_error{};  // node-doubling estimates
  std::string convention;
};

struct AnsatzReference {
  double N = 50.0;
  std::array<double, 3> sigma = {1.0, 1.0, 1.0};
};

AlphaReport derive_alpha_coefficients(int quadrature_order = 200,
                                      const AnsatzReference& ref = {});

/// Convenience: params with the derived coefficients filled in.
Well3DParams make_well3d(const std::array<double, 3>& k, double zeta_anh,
                         double N, int quadrature_order = 200);

/// U = U_d + U_sigma + U_dsigma as printed in the model:
///  U_d      = 1/2 sum k_i d_i^2
///  U_sigma  = 1/2 sum k_i sigma_i^2
///           + (sum 1/sigma_i^2)(1/8 + alpha1 N V^{1/3} - alpha2 beta (V/N)^{1/3})
///           + alpha3 (N/V)^{2/3} - alpha4 (N/V)^{1/3},  V = sigma_x sigma_y sigma_z
///  U_dsigma = zeta [ sum_i (3 sigma_i^4 + 6 d_i^2 sigma_i^2 + d_i^4)
///           + sum_{i != k} (sigma_i^2 + d_i^2)(sigma_k^2 + d_k^2) ].
double potential_3d(const State3D& s, const Well3DParams& p);

/// Analytic gradient of potential_3d wrt (d, sigma); validated against
/// central differences in the tests.
void grad_potential_3d(const State3D& s, const Well3DParams& p,
                       std::array<double, 3>& dU_dd,
                       std::array<double, 3>& dU_dsigma);

double energy_3d(const State3D& s, const Well3DParams& p);

/// Equilibrium widths at d = 0: damped Newton on grad U_sigma+dsigma = 0.
std::array<double, 3> equilibrium_sigma3(const Well3DParams& p);

struct Trajectory3D {
  std::vector<double> t;
  std::vector<State3D> state;
  std::vector<double> energy;
};

/// RK4 with fixed dt; default dt = min(2 pi/sqrt(max k), 2 pi/Omega_max)/1000.
/// The /1000 (rather than a looser divisor) keeps the relative energy drift
/// below 1e-7 over 1e4 time units, which the diagnostics assert.
Trajectory3D integrate_3d(const State3D& init, const Well3DParams& p,
                          double t_end, double dt = 0.0,
                          int sample_stride = 10);

double default_dt_3d(const Well3DParams& p);

// ------------------------------------------------------- chaos diagnostics

struct SurfaceSpec {
  enum class Kind { dz_zero, sigma_z_eq };
  Kind kind = Kind::dz_zero;
  double sigma_z_eq = 0.0;  // crossing level for the fallback surface
};

struct PoincareSet {
  std::vector<double> d_x, d_y;
  SurfaceSpec surface;
  /// Occupied-cell fraction of a fixed 48x48 histogram over the point
  /// bounding box; thin curves score low, chaotic seas high.
  double area_coverage = 0.0;
};

/// Integrates and records section crossings (d_z = 0, rising) located by
/// cubic Hermite interpolation within the step.  When the d_z amplitude
/// stays below 1e-8 the section automatically switches to sigma_z crossing
/// its equilibrium value, and the result records which surface was used.
PoincareSet poincare_section(const State3D& init, const Well3DParams& p,
                             double t_end, double dt = 0.0);

double area_coverage(const std::vector<double>& x,
                     const std::vector<double>& y, int bins = 48);

struct LyapunovEstimate {
  double lambda = 0.0;
  std::vector<double> t_trace;
  std::vector<double> lambda_trace;  // running estimate at each renormalization
};

/// Benettin two-trajectory estimate: fixed offset 1e-8/sqrt(3) on each d_i,
/// renormalization every 1.0 time units, lambda = sum ln(growth)/t.
LyapunovEstimate lyapunov_max(const State3D& init, const Well3DParams& p,
                              double t_end, double dt = 0.0,
                              double renorm_interval = 1.0,
                              double eps0 = 1e-8);

}  // namespace qhd
