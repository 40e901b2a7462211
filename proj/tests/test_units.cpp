#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "qhd/units.hpp"

using namespace qhd;

TEST_CASE("energy/length/time conversions round-trip") {
  CHECK(hartree_to_eV(1.0) == doctest::Approx(27.211386).epsilon(1e-12));
  CHECK(eV_to_hartree(hartree_to_eV(0.3217)) == doctest::Approx(0.3217).epsilon(1e-14));
  CHECK(nm_to_bohr(bohr_to_nm(7.5)) == doctest::Approx(7.5).epsilon(1e-14));
  CHECK(fs_to_au_time(au_time_to_fs(123.0)) == doctest::Approx(123.0).epsilon(1e-14));
  CHECK(bohr_to_nm(1.0) == doctest::Approx(0.0529177210903).epsilon(1e-12));
}

TEST_CASE("plasma quantities at r_s = 4 (sodium-like)") {
  CHECK(equilibrium_density(4.0) == doctest::Approx(0.003730193978716297).epsilon(1e-13));
  CHECK(plasma_frequency(4.0) == doctest::Approx(0.21650635094610965).epsilon(1e-13));
  // omega_p = sqrt(4 pi n0) and sqrt(3/r_s^3) must agree identically
  CHECK(plasma_frequency(4.0) ==
        doctest::Approx(std::sqrt(4.0 * 3.14159265358979323846 *
                                  equilibrium_density(4.0))).epsilon(1e-14));
  CHECK(plasma_frequency_eV(4.0) == doctest::Approx(5.8914).epsilon(1e-4));
}

TEST_CASE("derive_quantities: degenerate case") {
  DerivedQuantities q = derive_quantities(make_material(4.0, "Na"));
  CHECK(q.n0 == doctest::Approx(0.003730193978716297).epsilon(1e-13));
  CHECK(q.E_F == doctest::Approx(0.11509901726102709).epsilon(1e-12));
  CHECK(q.T_F == q.E_F);
  CHECK(q.lambda_TF == doctest::Approx(2.2160531137897297).epsilon(1e-12));
  CHECK(!q.lambda_D.has_value());
  CHECK(!q.H.has_value());
  CHECK_THROWS_AS(q.lambda_D_value(), std::domain_error);
  CHECK_THROWS_AS(q.H_value(), std::domain_error);
}

TEST_CASE("derive_quantities: finite temperature defines lambda_D and H") {
  DerivedQuantities q = derive_quantities(make_material(4.0), 0.01);
  REQUIRE(q.lambda_D.has_value());
  REQUIRE(q.H.has_value());
  CHECK(q.lambda_D_value() == doctest::Approx(std::sqrt(0.01) / q.omega_p).epsilon(1e-14));
  CHECK(q.H_value() == doctest::Approx(q.omega_p / 0.01).epsilon(1e-14));
}

TEST_CASE("invalid material parameters are rejected") {
  CHECK_THROWS_AS(make_material(0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_material(-2.0), std::invalid_argument);
  CHECK_THROWS_AS(equilibrium_density(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(derive_quantities(make_material(4.0), -0.1), std::invalid_argument);
}
