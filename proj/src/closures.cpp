#include "qhd/closures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qhd {

namespace {
constexpr double kPi = 3.14159265358979323846;
// (3 pi^2)^{2/3}
const double kFermiC = std::pow(3.0 * kPi * kPi, 2.0 / 3.0);
// (3/pi)^{1/3}
const double kXC = std::cbrt(3.0 / kPi);
// (6 pi^2)^{2/3} / 2^{5/3}
const double kMepC = std::pow(6.0 * kPi * kPi, 2.0 / 3.0) / std::pow(2.0, 5.0 / 3.0);

void require_nonneg(double n, const char* who) {
  if (!(n >= 0.0))
    throw std::invalid_argument(std::string(who) +
                                ": density must be >= 0, got " +
                                std::to_string(n));
}

double pow53(double n) {
  const double c = std::cbrt(n);
  return n * c * c;
}

void check_positive(std::span<const double> n, double min_density,
                    const char* who) {
  for (std::size_t i = 0; i < n.size(); ++i)
    if (!(n[i] > 0.0) || n[i] < min_density)
      throw std::invalid_argument(
          std::string(who) + ": density at index " + std::to_string(i) +
          " is " + std::to_string(n[i]) +
          ", below the required positive floor");
}
}  // namespace

double pressure_fermi(double n) {
  require_nonneg(n, "pressure_fermi");
  return kFermiC / 5.0 * pow53(n);
}

double pressure_polytropic(double n, const PolytropicEOS& eos) {
  require_nonneg(n, "pressure_polytropic");
  if (!(eos.n_ref > 0.0) || !(eos.P_ref > 0.0))
    throw std::invalid_argument(
        "pressure_polytropic: n_ref and P_ref must be > 0");
  if (!(eos.gamma > 0.0))
    throw std::invalid_argument("pressure_polytropic: gamma must be > 0");
  return eos.P_ref * std::pow(n / eos.n_ref, eos.gamma);
}

double enthalpy_fermi(double n) {
  require_nonneg(n, "enthalpy_fermi");
  const double c = std::cbrt(n);
  return 0.5 * kFermiC * c * c;
}

double enthalpy_polytropic(double n, const PolytropicEOS& eos) {
  require_nonneg(n, "enthalpy_polytropic");
  const double a = eos.P_ref / eos.n_ref;
  if (eos.gamma == 1.0) return a * std::log(n / eos.n_ref);
  return a * eos.gamma / (eos.gamma - 1.0) *
         std::pow(n / eos.n_ref, eos.gamma - 1.0);
}

double v_exchange_lda(double n) {
  require_nonneg(n, "v_exchange_lda");
  return -kXC * std::cbrt(n);
}

double v_correlation_brey(double n) {
  require_nonneg(n, "v_correlation_brey");
  return -brey::gamma_c * std::log1p(brey::delta_c * std::cbrt(n));
}

double correlation_energy_density_brey(double n) {
  require_nonneg(n, "correlation_energy_density_brey");
  // e_c(n) = -gamma_c [ n ln(1+U) - (U^3/3 - U^2/2 + U - ln(1+U))/delta_c^3 ],
  // U = delta_c n^{1/3}; d e_c/dn = v_correlation_brey(n).
  const double U = brey::delta_c * std::cbrt(n);
  const double d3 = brey::delta_c * brey::delta_c * brey::delta_c;
  const double l = std::log1p(U);
  return -brey::gamma_c * (n * l - (U * U * U / 3.0 - U * U / 2.0 + U - l) / d3);
}

double spin_pressure_mep(const SpinDensityPair& s) {
  require_nonneg(s.n, "spin_pressure_mep");
  if (s.S_mag < 0.0)
    throw std::invalid_argument("spin_pressure_mep: |S| must be >= 0");
  if (2.0 * s.S_mag > s.n * (1.0 + 1e-15))
    throw std::invalid_argument(
        "spin_pressure_mep: polarization bound violated, need 2|S| <= n");
  const double lo = std::max(s.n - 2.0 * s.S_mag, 0.0);
  const double hi = s.n + 2.0 * s.S_mag;
  return kMepC / 5.0 * (pow53(lo) + pow53(hi));
}

std::vector<double> bohm_potential(std::span<const double> n, const Grid& g,
                                   double zeta, double min_density) {
  check_positive(n, min_density, "bohm_potential");
  std::vector<double> root(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) root[i] = std::sqrt(n[i]);
  std::vector<double> lap = laplacian(root, g);
  // The Madelung form is singular against vacuum: lap(sqrt n)/sqrt(n) is
  // unbounded where a floored cell neighbors a real density cliff.  No
  // resolvable profile exceeds |lap psi / psi| = 4/h^2 (the alternating
  // mode), so clamp there; smooth densities sit far below the bound.
  const double h = g.spacing();
  const double bound = 2.0 * zeta / (h * h);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double v = -0.5 * zeta * lap[i] / root[i];
    lap[i] = std::clamp(v, -bound, bound);
  }
  return lap;
}

std::vector<double> quantum_pressure_iso(std::span<const double> n,
                                         const Grid& g, double min_density) {
  check_positive(n, min_density, "quantum_pressure_iso");
  std::vector<double> root(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) root[i] = std::sqrt(n[i]);
  const std::vector<double> grad = gradient(root, g);
  const std::vector<double> lap = laplacian(root, g);
  std::vector<double> p(n.size());
  for (std::size_t i = 0; i < n.size(); ++i)
    p[i] = 0.5 * (grad[i] * grad[i] - root[i] * lap[i]);
  return p;
}

}  // namespace qhd
