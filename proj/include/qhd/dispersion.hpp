#pragma once
///
/// Linear dispersion relations (kinetic and fluid branches) and the
/// closure-matching machinery that compares their small-k Taylor expansions.
///
/// All in atomic units.  Frequencies are returned as omega^2; callers decide
/// how to present them.

#include <array>
#include <vector>

namespace qhd {

struct LangmuirParams {
  double omega_p = 0.0;  // electron plasma frequency
  double v2_mean = 0.0;  // <v^2> along k; thermal interpretation v_th^2
};

struct AcousticParams {
  double omega_pe = 0.0;
  double omega_pi = 0.0;
  double lambda_D = 0.0;  // v_th,e / omega_pe
  double H = 0.0;         // hbar omega_pe / k_B T_e
  /// c_s (kinetic convention, no gamma): lambda_D * omega_pi.
  double c_s_kinetic() const { return lambda_D * omega_pi; }
};

struct SpinDispersionParams {
  double omega_p = 0.0;
  double T_e = 0.0;    // hartree
  double gamma = 3.0;
  double n0 = 0.0;
  double eta0 = 0.0;   // equilibrium spin polarization
  double dVxc_dn = 0.0;
  double dVxc_dmz = 0.0;
  double dBxc_dn = 0.0;
  double dBxc_dmz = 0.0;
  bool include_magnetostatic = true;
};

struct KineticOmega2 {
  double omega2 = 0.0;
  /// Raised when k sqrt(v2)/omega exceeds 0.3: the long-wavelength expansion
  /// behind the kinetic form is no longer trustworthy there.
  bool outside_validity = false;
};

/// omega^2 = omega_p^2 + 3 k^2 <v^2> + k^4/4.
KineticOmega2 omega2_langmuir_kinetic(double k, const LangmuirParams& p);

/// omega^2 = omega_p^2 + gamma k^2 v_th^2 + zeta k^4/4.
double omega2_langmuir_fluid(double k, const LangmuirParams& p, double gamma,
                             double zeta);

/// omega^2 = c_s^2 k^2 / (1 + (1 - H^2/12) k^2 lambda_D^2), c_s = lambda_D omega_pi.
/// Throws std::domain_error when the denominator is not positive.
double omega2_acoustic_kinetic(double k, const AcousticParams& p);

/// Fluid ion-acoustic branch,
///   omega^2 = omega_pi^2 (gamma u + zeta H^2/4 u^2) / (1 + gamma u + zeta H^2/4 u^2),
/// u = k^2 lambda_D^2.  Equivalently (c_s^2 k^2 + zeta H^2/4 k^4 lambda_D^4
/// omega_pi^2) / (same bracket), with c_s^2 = gamma k_B T_e/m_i carrying the
/// gamma factor.  Saturates at omega_pi^2 for large k when zeta > 0.
double omega2_acoustic_fluid(double k, const AcousticParams& p, double gamma,
                             double zeta);

/// Spin-corrected Langmuir branch with xc-response and magnetostatic terms,
/// assembled in a.u. (mu_B = 1/2, mu0 = 4 pi / c^2).
double omega2_spin(double k, const SpinDispersionParams& p);

/// Small-k Taylor coefficients of an omega^2(k) branch, fitted by least
/// squares on an even-power basis over a stencil k in (0, k_max].
struct TaylorFit {
  std::vector<double> coeff;  // c0, c2, c4, ... (coefficients of k^{2j})
  double residual = 0.0;      // max abs fit residual over the stencil
  double condition = 0.0;     // condition estimate of the scaled normal matrix
};

TaylorFit fit_even_taylor(const std::vector<double>& k,
                          const std::vector<double>& omega2, int n_terms);

enum class Branch { langmuir, acoustic };

/// Side-by-side Taylor comparison of the kinetic and fluid forms of one
/// branch.  For Langmuir the k^0, k^2, k^4 coefficients of omega^2 are
/// compared; for acoustic the k^0 and k^2 coefficients of
/// omega^2/(c_s^2 k^2), each branch normalized by its own k->0 sound speed,
/// in units of lambda_D.
struct ClosureMatchReport {
  Branch branch = Branch::langmuir;
  std::vector<double> coeff_kinetic;
  std::vector<double> coeff_fluid;
  std::vector<double> abs_diff;
  std::vector<double> rel_diff;  // relative to the kinetic coefficient
  double fit_residual = 0.0;
  double condition = 0.0;
};

struct MatchConfig {
  double k_max = 0.0;   // 0: pick a branch-appropriate default
  int n_stencil = 12;
  int n_terms = 3;      // Langmuir; acoustic uses 2
};

ClosureMatchReport match_closure(Branch branch, const LangmuirParams& lp,
                                 const AcousticParams& ap, double gamma,
                                 double zeta, const MatchConfig& cfg = {});

}  // namespace qhd
