#include "qhd/units.hpp"

#include <cmath>
#include <stdexcept>

namespace qhd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double hartree_to_eV(double e) { return e * consts::hartree_to_eV; }
double eV_to_hartree(double e) { return e / consts::hartree_to_eV; }
double bohr_to_nm(double r) { return r * consts::bohr_to_nm; }
double nm_to_bohr(double r) { return r / consts::bohr_to_nm; }
double au_time_to_fs(double t) { return t * consts::au_time_to_fs; }
double fs_to_au_time(double t) { return t / consts::au_time_to_fs; }

MaterialSpec make_material(double r_s, std::string label) {
  if (!(r_s > 0.0) || !std::isfinite(r_s))
    throw std::invalid_argument("material r_s must be finite and > 0, got " +
                                std::to_string(r_s));
  return {r_s, std::move(label)};
}

double equilibrium_density(double r_s) {
  if (!(r_s > 0.0))
    throw std::invalid_argument("equilibrium_density: r_s must be > 0");
  return 3.0 / (4.0 * kPi * r_s * r_s * r_s);
}

double plasma_frequency(double r_s) {
  if (!(r_s > 0.0))
    throw std::invalid_argument("plasma_frequency: r_s must be > 0");
  return std::sqrt(3.0 / (r_s * r_s * r_s));
}

double plasma_frequency_eV(double r_s) {
  return hartree_to_eV(plasma_frequency(r_s));
}

double DerivedQuantities::lambda_D_value() const {
  if (!lambda_D)
    throw std::domain_error(
        "lambda_D undefined at zero temperature (T_e = 0)");
  return *lambda_D;
}

double DerivedQuantities::H_value() const {
  if (!H)
    throw std::domain_error("H undefined at zero temperature (T_e = 0)");
  return *H;
}

DerivedQuantities derive_quantities(const MaterialSpec& mat, double T_e) {
  if (!(mat.r_s > 0.0))
    throw std::invalid_argument("derive_quantities: r_s must be > 0");
  if (T_e < 0.0)
    throw std::invalid_argument("derive_quantities: T_e must be >= 0");
  DerivedQuantities q;
  q.n0 = equilibrium_density(mat.r_s);
  q.omega_p = plasma_frequency(mat.r_s);
  const double kf2 = std::cbrt(3.0 * kPi * kPi * q.n0);  // (3 pi^2 n0)^{1/3}
  q.E_F = 0.5 * kf2 * kf2;
  q.T_F = q.E_F;  // k_B = 1
  q.lambda_TF = std::sqrt(2.0 * q.E_F / (4.0 * kPi * q.n0));
  if (T_e > 0.0) {
    q.lambda_D = std::sqrt(T_e) / q.omega_p;
    q.H = q.omega_p / T_e;
  }
  return q;
}

}  // namespace qhd
