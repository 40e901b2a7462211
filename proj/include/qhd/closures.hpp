#pragma once
///
/// Closure ingredients for the fluid hierarchy: equations of state, the Bohm
/// potential, the isotropic quantum pressure, local exchange-correlation
/// potentials, and the spin-resolved pressure.
///
/// Everything is in Hartree atomic units.

#include <span>
#include <vector>

#include "qhd/grid.hpp"

namespace qhd {

/// P(n) = P_ref * (n/n_ref)^gamma.
struct PolytropicEOS {
  double gamma = 5.0 / 3.0;
  double n_ref = 1.0;
  double P_ref = 1.0;
};

enum class XCModel { none, lda_exchange, lda_exchange_plus_brey };

/// (gamma, zeta) closure knobs plus the xc selection carried by a run.
/// gamma applies to the polytropic EOS; zeta scales the Bohm term.
struct ClosureParams {
  double gamma = 3.0;
  double zeta = 1.0;
  XCModel xc = XCModel::none;
};

struct SpinDensityPair {
  double n = 0.0;      // total density
  double S_mag = 0.0;  // |S|, with 2|S| <= n
};

/// Zero-temperature Fermi pressure, P = (3 pi^2)^{2/3} n^{5/3} / 5.
double pressure_fermi(double n);

/// Polytropic EOS; throws on n < 0 or invalid reference values.
double pressure_polytropic(double n, const PolytropicEOS& eos);

/// Barotropic specific enthalpy h(n) = int dP/n.  For the Fermi EOS this is
/// the local Fermi energy (3 pi^2 n)^{2/3}/2; the pressure force in the
/// solver is assembled as -grad h, which balances the stationary
/// Thomas-Fermi form exactly on the grid.
double enthalpy_fermi(double n);
double enthalpy_polytropic(double n, const PolytropicEOS& eos);

/// LDA exchange potential, V_x = -(3/pi)^{1/3} n^{1/3}.
double v_exchange_lda(double n);

/// Brey et al. correlation potential, V_c = -gamma_c ln(1 + delta_c n^{1/3}).
double v_correlation_brey(double n);
namespace brey {
inline constexpr double gamma_c = 0.03349;
inline constexpr double delta_c = 18.376;
}

/// Correlation energy density e_c(n) with d e_c/dn = v_correlation_brey(n),
/// in closed form (used by the variational coefficient quadratures).
double correlation_energy_density_brey(double n);

/// Spin-resolved maximum-entropy pressure,
///   P = (1/5) (6 pi^2)^{2/3} / 2^{5/3} * [(n-2|S|)^{5/3} + (n+2|S|)^{5/3}].
/// Reduces to pressure_fermi at |S| = 0 and to 2^{2/3} * pressure_fermi at
/// full polarization 2|S| = n.  Throws if 2|S| > n or n < 0.
double spin_pressure_mep(const SpinDensityPair& s);

/// Bohm potential V_B = -zeta/2 * lap(sqrt n)/sqrt(n) on the grid.
/// Discretization: sqrt first, centered-difference Laplacian, then divide.
/// Throws if any n <= min_density (strict positivity is the caller's job;
/// the solver guarantees it through its density floor).
std::vector<double> bohm_potential(std::span<const double> n, const Grid& g,
                                   double zeta, double min_density = 0.0);

/// Isotropic quantum pressure P^Q = ((grad sqrt n)^2 - sqrt n lap sqrt n)/2.
/// Satisfies grad P^Q = n grad V_B (zeta = 1) at second order on the grid.
std::vector<double> quantum_pressure_iso(std::span<const double> n,
                                         const Grid& g,
                                         double min_density = 0.0);

}  // namespace qhd
