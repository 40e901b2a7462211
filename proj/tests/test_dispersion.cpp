#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "qhd/dispersion.hpp"

using namespace qhd;

TEST_CASE("Langmuir branches at k = 0 and the pinned sample point") {
  LangmuirParams p{1.0, 1.0};
  CHECK(omega2_langmuir_kinetic(0.0, p).omega2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(omega2_langmuir_fluid(0.0, p, 3.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // omega_p=1, v_th=1, gamma=3, zeta=1, k=0.1 -> 1 + 0.03 + 2.5e-5
  CHECK(omega2_langmuir_fluid(0.1, p, 3.0, 1.0) ==
        doctest::Approx(1.030025).epsilon(1e-14));
  CHECK(omega2_langmuir_kinetic(0.1, p).omega2 ==
        doctest::Approx(1.030025).epsilon(1e-14));
}

TEST_CASE("Maxwell-Boltzmann closure: gamma=3, zeta=1 matches kinetic exactly") {
  LangmuirParams p{0.7, 0.3};
  for (double k : {0.01, 0.05, 0.11, 0.2})
    CHECK(omega2_langmuir_fluid(k, p, 3.0, 1.0) ==
          doctest::Approx(omega2_langmuir_kinetic(k, p).omega2).epsilon(1e-14));
  // zeta=0 drops the k^4 term
  CHECK(omega2_langmuir_fluid(0.2, p, 3.0, 0.0) ==
        doctest::Approx(0.49 + 3 * 0.04 * 0.3).epsilon(1e-14));
}

TEST_CASE("kinetic validity flag raises once k sqrt(v2)/omega passes 0.3") {
  LangmuirParams p{1.0, 1.0};
  CHECK(!omega2_langmuir_kinetic(0.2, p).outside_validity);
  CHECK(omega2_langmuir_kinetic(0.5, p).outside_validity);
}

TEST_CASE("acoustic kinetic branch: limits and pinned points") {
  AcousticParams p;
  p.omega_pe = 1.0;
  p.omega_pi = 1.0 / 42.85;
  p.lambda_D = 1.0;
  p.H = 0.0;
  const double cs = p.c_s_kinetic();
  // small-k sound speed
  const double k0 = 1e-4;
  CHECK(std::sqrt(omega2_acoustic_kinetic(k0, p)) / k0 ==
        doctest::Approx(cs).epsilon(1e-7));
  // H=0, k lambda_D = 1 -> cs^2 k^2 / 2
  CHECK(omega2_acoustic_kinetic(1.0, p) ==
        doctest::Approx(0.5 * cs * cs).epsilon(1e-13));
  // H^2 = 12 collapses the denominator
  p.H = std::sqrt(12.0);
  for (double k : {0.3, 1.0, 2.5})
    CHECK(omega2_acoustic_kinetic(k, p) ==
          doctest::Approx(cs * cs * k * k).epsilon(1e-13));
  // denominator <= 0 is out of validity
  p.H = 4.0;  // 1 - H^2/12 = -1/3
  CHECK_THROWS_AS(omega2_acoustic_kinetic(2.0, p), std::domain_error);
}

TEST_CASE("acoustic fluid branch: classical reduction and saturation") {
  AcousticParams p;
  p.omega_pe = 1.0;
  p.omega_pi = 0.023;
  p.lambda_D = 1.0;
  p.H = 0.0;
  const double cs = p.c_s_kinetic();
  // zeta=0, gamma=1: cs^2 k^2/(1 + k^2 lambda_D^2)
  for (double k : {0.1, 0.7, 2.0})
    CHECK(omega2_acoustic_fluid(k, p, 1.0, 0.0) ==
          doctest::Approx(cs * cs * k * k / (1.0 + k * k)).epsilon(1e-13));
  // large k with zeta > 0 saturates at omega_pi^2
  p.H = 1.5;
  const double w2 = omega2_acoustic_fluid(200.0, p, 1.0, 1.0 / 3.0);
  CHECK(w2 == doctest::Approx(p.omega_pi * p.omega_pi).epsilon(1e-3));
  CHECK(w2 < p.omega_pi * p.omega_pi);
}

TEST_CASE("spin dispersion reduces term by term") {
  SpinDispersionParams p;
  p.omega_p = 1.0;
  p.T_e = 0.04;
  p.gamma = 3.0;
  p.n0 = 0.01;
  const double k = 0.2;
  // no xc, no polarization: fluid Langmuir with zeta=0
  CHECK(omega2_spin(k, p) ==
        doctest::Approx(1.0 + 3.0 * k * k * 0.04).epsilon(1e-13));
  // density-exchange response only
  p.dVxc_dn = -0.5;
  CHECK(omega2_spin(k, p) ==
        doctest::Approx(1.0 + 3.0 * k * k * 0.04 + k * k * 0.01 * (-0.5))
            .epsilon(1e-13));
  // full polarization, xc off, magnetostatic on: subtract mu_B^2 mu0 n0 k^2
  p.dVxc_dn = 0.0;
  p.eta0 = 1.0;
  p.include_magnetostatic = true;
  const double mu_b = 0.5;
  const double mu0 = 4.0 * 3.14159265358979323846 /
                     (137.035999084 * 137.035999084);
  CHECK(omega2_spin(k, p) ==
        doctest::Approx(1.0 + 3.0 * k * k * 0.04 -
                        k * k * mu_b * mu_b * mu0 * 0.01)
            .epsilon(1e-12));
}

TEST_CASE("match_closure langmuir: gamma=3, zeta=1 coefficients coincide") {
  LangmuirParams lp{1.0, 1.0};
  AcousticParams ap;
  ClosureMatchReport rep = match_closure(Branch::langmuir, lp, ap, 3.0, 1.0);
  REQUIRE(rep.coeff_kinetic.size() == 3);
  CHECK(rep.coeff_kinetic[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.coeff_kinetic[1] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(rep.coeff_kinetic[2] == doctest::Approx(0.25).epsilon(1e-6));
  for (double d : rep.rel_diff) CHECK(std::abs(d) < 1e-10);
}

TEST_CASE("match_closure langmuir: gamma=1 mismatch is exactly 2 v_th^2") {
  LangmuirParams lp{1.0, 0.3};
  AcousticParams ap;
  ClosureMatchReport rep = match_closure(Branch::langmuir, lp, ap, 1.0, 1.0);
  CHECK(rep.coeff_kinetic[1] - rep.coeff_fluid[1] ==
        doctest::Approx(2.0 * 0.3).epsilon(1e-8));
}

TEST_CASE("match_closure acoustic: gamma=1, zeta=1/3 matches for several H") {
  LangmuirParams lp;
  AcousticParams ap;
  ap.omega_pe = 1.0;
  ap.omega_pi = 0.0233;
  ap.lambda_D = 1.0;
  for (double H : {0.0, 0.5, 1.0, 2.0}) {
    ap.H = H;
    ClosureMatchReport rep =
        match_closure(Branch::acoustic, lp, ap, 1.0, 1.0 / 3.0);
    REQUIRE(rep.abs_diff.size() == 2);
    CHECK(std::abs(rep.abs_diff[0]) < 1e-10);
    CHECK(std::abs(rep.abs_diff[1]) < 1e-10);
  }
}

TEST_CASE("omega^2 is nondecreasing in k for physical parameters") {
  LangmuirParams lp{0.9, 0.25};
  AcousticParams ap;
  ap.omega_pe = 1.0;
  ap.omega_pi = 0.02;
  ap.lambda_D = 0.8;
  ap.H = 1.0;
  double prev_l = 0.0, prev_a = 0.0;
  for (double k = 0.0; k <= 2.0; k += 0.05) {
    const double wl = omega2_langmuir_fluid(k, lp, 3.0, 1.0);
    const double wa = omega2_acoustic_fluid(k, ap, 1.0, 1.0 / 3.0);
    CHECK(wl >= prev_l);
    CHECK(wa >= prev_a - 1e-15);
    prev_l = wl;
    prev_a = wa;
  }
}

TEST_CASE("Taylor fit residual shrinks with the stencil span") {
  LangmuirParams lp{1.0, 1.0};
  AcousticParams ap;
  MatchConfig c1, c2;
  c1.k_max = 0.2;
  c2.k_max = 0.1;
  ClosureMatchReport r1 = match_closure(Branch::langmuir, lp, ap, 2.5, 1.0, c1);
  ClosureMatchReport r2 = match_closure(Branch::langmuir, lp, ap, 2.5, 1.0, c2);
  // the branch is an exact polynomial in k^2, so both fits are machine-level
  CHECK(r1.fit_residual < 1e-10);
  CHECK(r2.fit_residual < 1e-10);
}

TEST_CASE("match_closure validates its inputs") {
  LangmuirParams lp{1.0, 1.0};
  AcousticParams ap;
  ap.omega_pe = 1.0;
  ap.omega_pi = 0.02;
  ap.lambda_D = 0.0;  // invalid for the acoustic branch
  CHECK_THROWS_AS(match_closure(Branch::acoustic, lp, ap, 1.0, 1.0 / 3.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(match_closure(Branch::langmuir, lp, ap, -1.0, 1.0),
                  std::invalid_argument);
}
