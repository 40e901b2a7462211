#include "qhd/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qhd {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check(const Grid& g, std::size_t n) {
  if (n != static_cast<std::size_t>(g.n_points))
    throw std::invalid_argument("field length " + std::to_string(n) +
                                " does not match grid n_points " +
                                std::to_string(g.n_points));
}
}  // namespace

std::vector<double> Grid::coords() const {
  std::vector<double> c(n_points);
  for (int i = 0; i < n_points; ++i) c[i] = x(i);
  return c;
}

Grid Grid::cartesian(double x_min, double x_max, int n_points) {
  if (n_points < 16)
    throw std::invalid_argument("grid needs n_points >= 16, got " +
                                std::to_string(n_points));
  if (!(x_max > x_min))
    throw std::invalid_argument("grid needs x_max > x_min");
  return {Geometry::cartesian1d, x_min, x_max, n_points};
}

Grid Grid::spherical(double r_max, int n_points) {
  if (n_points < 16)
    throw std::invalid_argument("grid needs n_points >= 16, got " +
                                std::to_string(n_points));
  if (!(r_max > 0.0))
    throw std::invalid_argument("spherical grid needs r_max > 0");
  return {Geometry::spherical_radial, 0.0, r_max, n_points};
}

std::vector<double> gradient(std::span<const double> f, const Grid& g) {
  check(g, f.size());
  const int n = g.n_points;
  const double h = g.spacing();
  std::vector<double> d(n);
  for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  if (g.geometry == Geometry::spherical_radial) d[0] = 0.0;  // even parity
  return d;
}

std::vector<double> laplacian(std::span<const double> f, const Grid& g) {
  check(g, f.size());
  const int n = g.n_points;
  const double h = g.spacing();
  const double ih2 = 1.0 / (h * h);
  std::vector<double> lap(n);
  if (g.geometry == Geometry::cartesian1d) {
    for (int i = 1; i < n - 1; ++i)
      lap[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * ih2;
    // even-reflection ghosts at the walls
    lap[0] = 2.0 * (f[1] - f[0]) * ih2;
    lap[n - 1] = 2.0 * (f[n - 2] - f[n - 1]) * ih2;
  } else {
    // (r f)'' / r away from the origin; 3 f'' with even ghost at r = 0
    for (int i = 1; i < n - 1; ++i) {
      const double r = g.x(i);
      lap[i] =
          (g.x(i + 1) * f[i + 1] - 2.0 * r * f[i] + g.x(i - 1) * f[i - 1]) *
          ih2 / r;
    }
    lap[0] = 6.0 * (f[1] - f[0]) * ih2;
    const double r = g.x(n - 1);
    // even ghost beyond the wall: f[n] := f[n-2], r[n] := r[n-1] + h
    lap[n - 1] = ((r + h) * f[n - 2] - 2.0 * r * f[n - 1] +
                  g.x(n - 2) * f[n - 2]) *
                 ih2 / r;
  }
  return lap;
}

double volume_integral(std::span<const double> f, const Grid& g) {
  check(g, f.size());
  const int n = g.n_points;
  const double h = g.spacing();
  double s = 0.0;
  if (g.geometry == Geometry::cartesian1d) {
    for (int i = 0; i < n; ++i) s += f[i];
    s -= 0.5 * (f[0] + f[n - 1]);
  } else {
    for (int i = 0; i < n; ++i) {
      const double w = 4.0 * kPi * g.x(i) * g.x(i);
      s += (i == 0 || i == n - 1) ? 0.5 * w * f[i] : w * f[i];
    }
  }
  return s * h;
}

double volume_integral_weighted(std::span<const double> f,
                                std::span<const double> w, const Grid& g) {
  check(g, f.size());
  check(g, w.size());
  const int n = g.n_points;
  const double h = g.spacing();
  double s = 0.0;
  if (g.geometry == Geometry::cartesian1d) {
    for (int i = 0; i < n; ++i) s += f[i] * w[i];
    s -= 0.5 * (f[0] * w[0] + f[n - 1] * w[n - 1]);
  } else {
    for (int i = 0; i < n; ++i) {
      const double vw = 4.0 * kPi * g.x(i) * g.x(i) * f[i] * w[i];
      s += (i == 0 || i == n - 1) ? 0.5 * vw : vw;
    }
  }
  return s * h;
}

}  // namespace qhd
