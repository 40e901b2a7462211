#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qhd/grid.hpp"

using namespace qhd;

namespace {
constexpr double kPi = 3.14159265358979323846;

std::vector<double> sample(const Grid& g, double (*f)(double)) {
  std::vector<double> v(g.n_points);
  for (int i = 0; i < g.n_points; ++i) v[i] = f(g.x(i));
  return v;
}
}  // namespace

TEST_CASE("grid constructors validate their arguments") {
  CHECK_THROWS_AS(Grid::cartesian(0.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(Grid::cartesian(1.0, 1.0, 32), std::invalid_argument);
  CHECK_THROWS_AS(Grid::spherical(-1.0, 32), std::invalid_argument);
  Grid g = Grid::cartesian(-2.0, 2.0, 17);
  CHECK(g.spacing() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g.x(0) == -2.0);
  CHECK(g.x(16) == doctest::Approx(2.0).epsilon(1e-15));
  Grid s = Grid::spherical(10.0, 101);
  CHECK(s.x_min == 0.0);
  CHECK(s.coords().front() == 0.0);
  CHECK(s.coords().back() == doctest::Approx(10.0).epsilon(1e-15));
}

TEST_CASE("gradient is exact on quadratics away from special points") {
  Grid g = Grid::cartesian(-1.0, 3.0, 65);
  std::vector<double> f(g.n_points);
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    f[i] = 2.0 + 0.5 * x - 1.25 * x * x;
  }
  std::vector<double> d = gradient(f, g);
  for (int i = 0; i < g.n_points; ++i)
    CHECK(d[i] == doctest::Approx(0.5 - 2.5 * g.x(i)).epsilon(1e-11));
}

TEST_CASE("gradient forces zero slope at r = 0 for radial fields") {
  Grid g = Grid::spherical(5.0, 51);
  std::vector<double> f = sample(g, +[](double r) { return 1.0 + r * r; });
  std::vector<double> d = gradient(f, g);
  CHECK(d[0] == 0.0);
  CHECK(d[25] == doctest::Approx(2.0 * g.x(25)).epsilon(1e-11));
}

TEST_CASE("laplacian of r^2 is 6 in spherical geometry") {
  Grid g = Grid::spherical(4.0, 41);
  std::vector<double> f = sample(g, +[](double r) { return r * r; });
  std::vector<double> lap = laplacian(f, g);
  // interior only; the outer point uses an even-reflection ghost
  for (int i = 0; i < g.n_points - 1; ++i)
    CHECK(lap[i] == doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("laplacian converges at second order on a sine") {
  auto err = [](int n) {
    Grid g = Grid::cartesian(0.25, 2.0, n);
    std::vector<double> f(g.n_points);
    for (int i = 0; i < g.n_points; ++i) f[i] = std::sin(3.0 * g.x(i));
    std::vector<double> lap = laplacian(f, g);
    double e = 0.0;
    for (int i = 1; i < g.n_points - 1; ++i)
      e = std::max(e, std::abs(lap[i] + 9.0 * std::sin(3.0 * g.x(i))));
    return e;
  };
  const double e1 = err(101), e2 = err(201);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("volume integral reproduces sphere and box volumes") {
  // trapezoid against the r^2 measure carries a 2 pi h^2 Euler-Maclaurin
  // term even for f = 1, so the match is second order rather than exact
  Grid s = Grid::spherical(3.0, 601);
  std::vector<double> one(s.n_points, 1.0);
  CHECK(volume_integral(one, s) ==
        doctest::Approx(4.0 / 3.0 * kPi * 27.0).epsilon(3e-6));
  Grid c = Grid::cartesian(-1.5, 2.5, 401);
  std::vector<double> onec(c.n_points, 1.0);
  CHECK(volume_integral(onec, c) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("weighted volume integral matches the fused product") {
  Grid s = Grid::spherical(2.0, 301);
  std::vector<double> f(s.n_points), w(s.n_points), fw(s.n_points);
  for (int i = 0; i < s.n_points; ++i) {
    const double r = s.x(i);
    f[i] = std::exp(-r);
    w[i] = 1.0 + r;
    fw[i] = f[i] * w[i];
  }
  CHECK(volume_integral_weighted(f, w, s) ==
        doctest::Approx(volume_integral(fw, s)).epsilon(1e-14));
}

TEST_CASE("mismatched field length is rejected") {
  Grid g = Grid::cartesian(0.0, 1.0, 32);
  std::vector<double> wrong(31, 1.0);
  CHECK_THROWS_AS(gradient(wrong, g), std::invalid_argument);
  CHECK_THROWS_AS(laplacian(wrong, g), std::invalid_argument);
  CHECK_THROWS_AS(volume_integral(wrong, g), std::invalid_argument);
}
