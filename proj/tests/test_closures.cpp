#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qhd/closures.hpp"
#include "qhd/grid.hpp"

using namespace qhd;

TEST_CASE("Fermi pressure: pinned value and homogeneity") {
  CHECK(pressure_fermi(0.0) == 0.0);
  CHECK(pressure_fermi(1.0) == doctest::Approx(1.9141560001254607).epsilon(1e-13));
  const double p1 = pressure_fermi(0.37);
  CHECK(pressure_fermi(2.0 * 0.37) ==
        doctest::Approx(std::pow(2.0, 5.0 / 3.0) * p1).epsilon(1e-13));
  CHECK_THROWS_AS(pressure_fermi(-1e-9), std::invalid_argument);
}

TEST_CASE("polytropic EOS: reference point, linear case, Fermi identity") {
  PolytropicEOS eos{2.0, 0.5, 3.0};
  CHECK(pressure_polytropic(0.5, eos) == doctest::Approx(3.0).epsilon(1e-14));
  PolytropicEOS lin{1.0, 1.0, 2.5};
  CHECK(pressure_polytropic(0.4, lin) == doctest::Approx(1.0).epsilon(1e-14));
  PolytropicEOS fermi_fit{5.0 / 3.0, 0.7, pressure_fermi(0.7)};
  for (double n : {0.01, 0.3, 0.7, 2.0, 9.0})
    CHECK(pressure_polytropic(n, fermi_fit) ==
          doctest::Approx(pressure_fermi(n)).epsilon(1e-12));
  CHECK_THROWS_AS(pressure_polytropic(-0.1, eos), std::invalid_argument);
}

TEST_CASE("enthalpy obeys dh/dn = (dP/dn)/n") {
  const double d = 1e-6;
  for (double n : {0.05, 0.4, 1.3}) {
    const double dh = (enthalpy_fermi(n + d) - enthalpy_fermi(n - d)) / (2 * d);
    const double dP = (pressure_fermi(n + d) - pressure_fermi(n - d)) / (2 * d);
    CHECK(dh == doctest::Approx(dP / n).epsilon(1e-7));
  }
  PolytropicEOS eos{3.0, 1.0, 0.8};
  for (double n : {0.2, 1.0, 2.5}) {
    const double dh =
        (enthalpy_polytropic(n + d, eos) - enthalpy_polytropic(n - d, eos)) /
        (2 * d);
    const double dP =
        (pressure_polytropic(n + d, eos) - pressure_polytropic(n - d, eos)) /
        (2 * d);
    CHECK(dh == doctest::Approx(dP / n).epsilon(1e-7));
  }
}

TEST_CASE("LDA exchange potential") {
  CHECK(v_exchange_lda(0.0) == 0.0);
  CHECK(v_exchange_lda(1.0) == doctest::Approx(-0.9847450218426965).epsilon(1e-13));
  CHECK(v_exchange_lda(8.0) == doctest::Approx(2.0 * v_exchange_lda(1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(v_exchange_lda(-0.5), std::invalid_argument);
}

TEST_CASE("Brey correlation potential and its energy density") {
  CHECK(v_correlation_brey(0.0) == 0.0);
  CHECK(v_correlation_brey(1.0) ==
        doctest::Approx(-0.09926553840629157).epsilon(1e-12));
  CHECK(v_correlation_brey(0.5) > v_correlation_brey(2.0));  // more binding at higher n
  // e_c'(n) = V_c(n)
  const double d = 1e-7;
  for (double n : {0.01, 0.2, 1.0, 5.0}) {
    const double de = (correlation_energy_density_brey(n + d) -
                       correlation_energy_density_brey(n - d)) /
                      (2 * d);
    CHECK(de == doctest::Approx(v_correlation_brey(n)).epsilon(1e-6));
  }
}

TEST_CASE("spin MEP pressure reduces to the Fermi gas at zero polarization") {
  for (double n = 1e-6; n <= 10.0; n *= 3.1623)
    CHECK(spin_pressure_mep({n, 0.0}) ==
          doctest::Approx(pressure_fermi(n)).epsilon(1e-12));
  // full polarization picks up the 2^{2/3} factor
  for (double n : {0.1, 1.0, 4.0})
    CHECK(spin_pressure_mep({n, 0.5 * n}) ==
          doctest::Approx(1.5874010519681994 * pressure_fermi(n)).epsilon(1e-12));
  // strictly increasing in |S| at fixed n
  for (double n : {0.5, 2.0}) {
    double prev = spin_pressure_mep({n, 0.0});
    for (double s = 0.05 * n; s <= 0.5 * n; s += 0.05 * n) {
      const double p = spin_pressure_mep({n, s});
      CHECK(p > prev);
      prev = p;
    }
  }
  CHECK_THROWS_AS(spin_pressure_mep({1.0, 0.51}), std::invalid_argument);
  CHECK_THROWS_AS(spin_pressure_mep({-1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("Bohm potential vanishes on constant densities in both geometries") {
  Grid c = Grid::cartesian(-3.0, 3.0, 64);
  Grid s = Grid::spherical(6.0, 64);
  std::vector<double> n(64, 0.37);
  // radial form builds r*f products, so allow h^-2-amplified rounding noise
  for (double v : bohm_potential(n, c, 1.0)) CHECK(std::abs(v) < 1e-13);
  for (double v : bohm_potential(n, s, 1.0)) CHECK(std::abs(v) < 1e-12);
  for (double v : quantum_pressure_iso(n, c)) CHECK(std::abs(v) < 1e-13);
}

namespace {
double bohm_gaussian_error(int n_points, double zeta) {
  const double sigma = 0.8;
  Grid g = Grid::cartesian(-4.0, 4.0, n_points);
  std::vector<double> n(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    n[i] = 0.6 * std::exp(-0.5 * x * x / (sigma * sigma));
  }
  std::vector<double> vb = bohm_potential(n, g, zeta);
  double err = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    if (std::abs(x) > 2.5) continue;  // keep away from wall ghosts
    const double exact =
        zeta * (1.0 / (4.0 * sigma * sigma) -
                x * x / (8.0 * sigma * sigma * sigma * sigma));
    err = std::max(err, std::abs(vb[i] - exact));
  }
  return err;
}
}  // namespace

TEST_CASE("Bohm potential matches the Gaussian closed form at second order") {
  const double e1 = bohm_gaussian_error(201, 1.0);
  const double e2 = bohm_gaussian_error(401, 1.0);
  CHECK(e1 < 4e-4);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
  // zeta scales the whole field linearly
  CHECK(bohm_gaussian_error(201, 2.0) == doctest::Approx(2.0 * e1).epsilon(1e-10));
}

TEST_CASE("discrete identity grad P^Q = n grad V_B at second order") {
  auto identity_error = [](int n_points) {
    const double sigma = 1.1;
    Grid g = Grid::cartesian(-5.0, 5.0, n_points);
    std::vector<double> n(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
      const double x = g.x(i);
      n[i] = 0.9 * std::exp(-0.5 * x * x / (sigma * sigma)) + 1e-4;
    }
    std::vector<double> pq = quantum_pressure_iso(n, g);
    std::vector<double> vb = bohm_potential(n, g, 1.0);
    std::vector<double> dpq = gradient(pq, g);
    std::vector<double> dvb = gradient(vb, g);
    double err = 0.0;
    for (int i = 2; i < g.n_points - 2; ++i)
      err = std::max(err, std::abs(dpq[i] - n[i] * dvb[i]));
    return err;
  };
  const double e1 = identity_error(201);
  const double e2 = identity_error(401);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.6);
}

TEST_CASE("Bohm potential rejects densities at or below the floor") {
  Grid g = Grid::cartesian(-1.0, 1.0, 32);
  std::vector<double> n(32, 1.0);
  n[7] = 1e-15;
  CHECK_THROWS_AS(bohm_potential(n, g, 1.0, 1e-12), std::invalid_argument);
}
