#pragma once
///
/// Hartree atomic units and material-derived plasma quantities.
///
/// All internal physics runs in Hartree atomic units (hbar = m_e = e = 1,
/// 4*pi*eps0 = 1, energies in hartree, lengths in bohr).  Conversion factors
/// live here and nowhere else.

#include <optional>
#include <string>

namespace qhd {

namespace consts {
inline constexpr double hartree_to_eV = 27.211386;
inline constexpr double bohr_to_nm = 0.0529177210903;
inline constexpr double au_time_to_fs = 0.024188843265857;
// Fine structure constant and derived magnetic constants (a.u.).
inline constexpr double fine_structure = 1.0 / 137.035999084;
inline constexpr double speed_of_light = 137.035999084;
inline constexpr double mu_bohr = 0.5;                 // e*hbar/(2 m_e)
inline constexpr double mu0 = 4.0 * 3.14159265358979323846 *
                              fine_structure * fine_structure;  // 4*pi/c^2
}  // namespace consts

double hartree_to_eV(double e_hartree);
double eV_to_hartree(double e_eV);
double bohr_to_nm(double r_bohr);
double nm_to_bohr(double r_nm);
double au_time_to_fs(double t_au);
double fs_to_au_time(double t_fs);

/// A metallic element reduced to its Wigner-Seitz radius r_s (bohr).
struct MaterialSpec {
  double r_s = 0.0;
  std::string label;
};

/// Validates r_s > 0, throws std::invalid_argument otherwise.
MaterialSpec make_material(double r_s, std::string label = "");

/// n0 = 3/(4 pi r_s^3), the homogeneous electron density.
double equilibrium_density(double r_s);

/// omega_p = sqrt(4 pi n0) = sqrt(3/r_s^3), in a.u.
double plasma_frequency(double r_s);
double plasma_frequency_eV(double r_s);

/// Everything derived from (r_s, T_e).  T_e in hartree; T_e = 0 is the
/// fully degenerate case, where lambda_D and H have no meaning and are
/// left unset.
struct DerivedQuantities {
  double n0 = 0.0;         // bohr^-3
  double omega_p = 0.0;    // a.u.
  double E_F = 0.0;        // hartree
  double T_F = 0.0;        // hartree (k_B = 1)
  double lambda_TF = 0.0;  // bohr
  std::optional<double> lambda_D;  // bohr, absent at T_e = 0
  std::optional<double> H;         // hbar*omega_p/(k_B T_e), absent at T_e = 0

  /// Throw std::domain_error with an explicit message when absent.
  double lambda_D_value() const;
  double H_value() const;
};

DerivedQuantities derive_quantities(const MaterialSpec& mat, double T_e = 0.0);

}  // namespace qhd
