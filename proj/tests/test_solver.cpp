#include "doctest.h"
#include "qhd/grid.hpp"
#include "qhd/solver.hpp"
#include "qhd/variational.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace qhd;

namespace {

constexpr double kN0Na = 0.003730193978716297;  // 3/(4 pi 4^3)

ClosureParams bare_closure(double gamma, double zeta) {
  ClosureParams c;
  c.gamma = gamma;
  c.zeta = zeta;
  c.xc = XCModel::none;
  return c;
}

}  // namespace

TEST_CASE("jellium construction: radii, density, electron count") {
  const JelliumShell big = build_jellium(40.0, 25.0, 4.0);
  CHECK(big.R_i == doctest::Approx(27.5).epsilon(1e-14));
  CHECK(big.R_e == doctest::Approx(52.5).epsilon(1e-14));
  CHECK(big.n0 == doctest::Approx(kN0Na).epsilon(1e-14));
  CHECK(big.electron_count() == doctest::Approx(1936.03515625).epsilon(1e-12));
  const JelliumShell small = build_jellium(40.0, 10.0, 4.0);
  CHECK(small.R_i == doctest::Approx(35.0).epsilon(1e-14));
  CHECK(small.electron_count() == doctest::Approx(753.90625).epsilon(1e-12));
  CHECK_THROWS_AS(build_jellium(40.0, 90.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(build_jellium(40.0, -1.0, 4.0), std::invalid_argument);
  CHECK_THROWS_AS(build_jellium(40.0, 10.0, 0.0), std::invalid_argument);
}

TEST_CASE("shell background: plateau value, exact discrete neutrality") {
  const JelliumShell sh = build_jellium(40.0, 10.0, 4.0);
  const Grid g = Grid::spherical(75.0, 600);
  const QhdSystem sys = make_shell_system(sh, g, bare_closure(3.0, 1.0));
  const std::vector<double> bg = sys.background_profile();
  CHECK(volume_integral(bg, g) ==
        doctest::Approx(sh.electron_count()).epsilon(1e-12));
  const double h = g.spacing();
  for (int i = 0; i < g.n_points; ++i) {
    const double r = g.x(i);
    if (r > sh.R_i + h && r < sh.R_e - h)
      CHECK(bg[static_cast<std::size_t>(i)] ==
            doctest::Approx(sh.n0).epsilon(1e-3));
    if (r < sh.R_i - h || r > sh.R_e + h)
      CHECK(bg[static_cast<std::size_t>(i)] == 0.0);
  }
}

TEST_CASE("uniform shell moments: closed-form mean radius, particle count") {
  const JelliumShell sh = build_jellium(40.0, 10.0, 4.0);
  const Grid g = Grid::spherical(75.0, 1024);
  const QhdSystem sys = make_shell_system(sh, g, bare_closure(3.0, 1.0));
  FluidState s;
  s.n = sys.background_profile();
  s.u.assign(s.n.size(), 0.0);
  CHECK(particle_number(s, g) ==
        doctest::Approx(sh.electron_count()).epsilon(1e-12));
  // (3/4)(R_e^4 - R_i^4)/(R_e^3 - R_i^3)
  CHECK(mean_radius(s, g) == doctest::Approx(40.41450777202073).epsilon(5e-4));
}

TEST_CASE("neutral uniform slab feels no force") {
  const Grid g = Grid::cartesian(-20.0, 20.0, 256);
  const QhdSystem sys =
      make_slab_system(kN0Na, g, bare_closure(3.0, 1.0), PressureModel::fermi());
  FluidState s;
  s.n.assign(256, kN0Na);
  s.u.assign(256, 0.0);
  const std::vector<double> f =
      effective_force(s, sys, default_density_floor(sys));
  for (double v : f) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("cold slab density wave rings at the plasma frequency") {
  // pressure and Bohm off: the restoring force is purely electrostatic and
  // the mode frequency must be sqrt(4 pi n_bg) independent of k
  const double wp = std::sqrt(4.0 * M_PI * kN0Na);
  const Grid g = Grid::cartesian(0.0, 40.0, 256);
  const QhdSystem sys =
      make_slab_system(kN0Na, g, bare_closure(3.0, 0.0), PressureModel::none());
  const double k = 2.0 * M_PI / 40.0;  // even at both walls
  FluidState s;
  s.n.resize(256);
  s.u.assign(256, 0.0);
  std::vector<double> probe(256);
  for (int i = 0; i < 256; ++i) {
    probe[static_cast<std::size_t>(i)] = std::cos(k * g.x(i));
    s.n[static_cast<std::size_t>(i)] =
        kN0Na * (1.0 + 1e-3 * probe[static_cast<std::size_t>(i)]);
  }
  const FluidState init = s;
  const double floor = default_density_floor(sys);
  const double dt = default_dt(sys);
  const long half = std::lround(M_PI / wp / dt);
  auto amplitude = [&](const FluidState& st) {
    double a = 0.0;
    for (std::size_t i = 0; i < st.n.size(); ++i)
      a += (st.n[i] - kN0Na) * probe[i];
    return a;
  };
  const double a0 = amplitude(s);
  const double N0 = particle_number(s, g);
  for (long it = 0; it < half; ++it) step(s, sys, dt, floor);
  CHECK(amplitude(s) == doctest::Approx(-a0).epsilon(4e-3));
  for (long it = 0; it < half; ++it) step(s, sys, dt, floor);
  CHECK(amplitude(s) == doctest::Approx(a0).epsilon(4e-3));
  CHECK(std::abs(particle_number(s, g) / N0 - 1.0) < 1e-9);

  // time reversal: flip u and integrate back to the start.  RK4 is not
  // time-symmetric, so the return error is the accumulated O(dt^5)
  // asymmetry -- about 1e-3 of the wave amplitude at 20 steps/period.
  for (double& u : s.u) u = -u;
  for (long it = 0; it < 2 * half; ++it) step(s, sys, dt, floor);
  double worst = 0.0;
  for (std::size_t i = 0; i < s.n.size(); ++i)
    worst = std::max(worst, std::abs(s.n[i] - init.n[i]));
  CHECK(worst < 1e-3 * 1e-3 * kN0Na);
}

TEST_CASE("coulomb kick: zero strength is a no-op, origin untouched, additive") {
  const Grid g = Grid::spherical(10.0, 64);
  FluidState s;
  s.n.assign(64, 1.0);
  s.u.assign(64, 0.0);
  coulomb_kick(s, g, 0.0, 0.5);
  for (double u : s.u) CHECK(u == 0.0);
  coulomb_kick(s, g, 1.0, 0.1);
  CHECK(s.u[0] == 0.0);
  for (int i = 1; i < 64; ++i) {
    const double r = g.x(i);
    CHECK(s.u[static_cast<std::size_t>(i)] ==
          doctest::Approx(0.1 / (r * r)).epsilon(1e-14));
  }
  coulomb_kick(s, g, 2.0, 0.1);
  CHECK(s.u[10] == doctest::Approx(0.3 / (g.x(10) * g.x(10))).epsilon(1e-13));
}

TEST_CASE("excitation dispatch: none is identity, kick needs spherical") {
  const Grid g = Grid::spherical(15.0, 64);
  const QhdSystem sys =
      make_shell_system(build_jellium(5.0, 2.0, 4.0), g, bare_closure(3.0, 1.0));
  FluidState s;
  s.n.assign(64, 1.0);
  s.u.assign(64, 0.25);
  Excitation e;
  apply_excitation(s, sys, e);
  for (double u : s.u) CHECK(u == 0.25);

  const Grid gc = Grid::cartesian(-5.0, 5.0, 64);
  const QhdSystem slab = make_slab_system(0.1, gc, bare_closure(3.0, 1.0));
  e.kind = Excitation::Kind::coulomb_kick;
  e.tau = 0.1;
  CHECK_THROWS(apply_excitation(s, slab, e));
}

TEST_CASE("width pinch scales u with -x; displacement moves the profile") {
  const Grid g = Grid::cartesian(-5.0, 5.0, 128);
  FluidState s;
  s.n.resize(128);
  s.u.assign(128, 0.0);
  for (int i = 0; i < 128; ++i)
    s.n[static_cast<std::size_t>(i)] = std::exp(-0.5 * g.x(i) * g.x(i));
  width_pinch(s, g, 0.02);
  for (int i = 0; i < 128; ++i)
    CHECK(s.u[static_cast<std::size_t>(i)] ==
          doctest::Approx(-0.02 * g.x(i)).epsilon(1e-14));

  FluidState d;
  d.n = s.n;
  d.u.assign(128, 0.0);
  const double m0 = mean_x(d, g);
  rigid_displacement(d, g, 0.3);
  CHECK(mean_x(d, g) - m0 == doctest::Approx(0.3).epsilon(5e-3));
  CHECK(particle_number(d, g) ==
        doctest::Approx(particle_number(s, g)).epsilon(1e-4));
}

TEST_CASE("well ground state: neutral, stationary, ansatz-sized") {
  const Grid g = Grid::cartesian(-10.0, 10.0, 256);
  const QhdSystem sys = make_well_system(1.0, 1.0, 1.0, g);
  SolverConfig cfg;
  const RelaxResult res = relax_ground_state(sys, cfg);
  REQUIRE(!res.residual_u_history.empty());
  CHECK(res.residual_u_history.back() <= cfg.relax_tol);
  CHECK(res.residual_f_history.back() <= cfg.relax_tol);
  const double N = particle_number(res.state, g);
  CHECK(N == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-8));
  for (double u : res.state.u) CHECK(u == 0.0);
  // independent stationarity probe with the mass-weighted norm
  const double floor = default_density_floor(sys);
  const std::vector<double> f = effective_force(res.state, sys, floor);
  double n_max = 0.0;
  for (double v : res.state.n) n_max = std::max(n_max, v);
  double rf = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (res.state.n[i] > 1e-6 * n_max)
      rf = std::max(rf, std::abs(f[i]) * (res.state.n[i] / n_max));
  CHECK(rf < 10.0 * cfg.relax_tol);
  // PDE width lands near the Gaussian-ansatz equilibrium
  Well1DParams p;
  p.A = 1.0;
  p.H = 1.0;
  const double sg = width_sigma(res.state, g);
  CHECK(sg == doctest::Approx(equilibrium_sigma(p)).epsilon(0.2));
}

TEST_CASE("thomas-fermi residual vanishes on a constructed equilibrium") {
  const Grid g = Grid::cartesian(-10.0, 10.0, 256);
  const QhdSystem sys =
      make_slab_system(1e-3, g, bare_closure(3.0, 1.0), PressureModel::fermi());
  FluidState s;
  s.n.resize(256);
  s.u.assign(256, 0.0);
  for (int i = 0; i < 256; ++i) {
    const double x = g.x(i);
    s.n[static_cast<std::size_t>(i)] = 1e-3 * (1.0 + 0.5 * std::exp(-x * x / 8.0));
  }
  const FieldSet fld = assemble_fields(s, sys, default_density_floor(sys));
  const double mu0 = 0.37;
  std::vector<double> V_ext(256);
  for (int i = 0; i < 256; ++i) {
    const std::size_t j = static_cast<std::size_t>(i);
    const double ef = 0.5 * std::cbrt(3.0 * M_PI * M_PI * s.n[j] * 3.0 * M_PI *
                                      M_PI * s.n[j]);
    V_ext[j] = mu0 + ef - fld.V_H[j];
  }
  const TFResidual tf = thomas_fermi_residual(s, sys, V_ext);
  CHECK(tf.mu == doctest::Approx(mu0).epsilon(1e-10));
  for (double v : tf.residual) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("derived step and floor scales") {
  const Grid g = Grid::cartesian(-10.0, 10.0, 256);
  const QhdSystem h1 = make_well_system(1.0, 1.0, 1.0, g);
  const QhdSystem h2 = make_well_system(1.0, 2.0, 1.0, g);
  const double dt1 = default_dt(h1), dt2 = default_dt(h2);
  CHECK(dt1 > 0.0);
  CHECK(dt2 > 0.0);
  CHECK(dt2 < dt1);  // stronger Bohm dispersion tightens the bound
  const double h = g.spacing();
  CHECK(dt1 <= 0.4 * h * h * 1.0000001);

  const JelliumShell sh = build_jellium(40.0, 10.0, 4.0);
  const Grid gs = Grid::spherical(75.0, 512);
  const QhdSystem shell = make_shell_system(sh, gs, bare_closure(3.0, 1.0));
  CHECK(default_density_floor(shell) ==
        doctest::Approx(1e-12 * sh.n0).epsilon(1e-2));
}
