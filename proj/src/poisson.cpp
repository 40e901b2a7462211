#include "qhd/poisson.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qhd/errors.hpp"

namespace qhd {

namespace {

// Tridiagonal solve (Thomas), diag/lower/upper of length n, rhs modified copy.
std::vector<double> thomas(std::vector<double> a, std::vector<double> b,
                           std::vector<double> c, std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

double trapezoid(std::span<const double> f, double h) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

}  // namespace

std::vector<double> solve_poisson(std::span<const double> source,
                                  const Grid& g) {
  const std::size_t n = static_cast<std::size_t>(g.n_points);
  if (source.size() != n)
    throw std::invalid_argument("solve_poisson: source size " +
                                std::to_string(source.size()) +
                                " does not match grid (" + std::to_string(n) +
                                ")");
  const double h = g.spacing();
  const double h2 = h * h;

  if (g.geometry == Geometry::spherical_radial) {
    // Substitute u = r V: u'' = r s, u(0) = 0, and at the outer edge the
    // monopole tail V = q/r with q = -(1/4pi) * integral of s dV, so
    // u(r_max) = -int s r^2 dr.
    std::vector<double> sr2(n);
    for (std::size_t i = 0; i < n; ++i) sr2[i] = source[i] * g.x(i) * g.x(i);
    const double u_outer = -trapezoid(sr2, h);

    std::vector<double> a(n, 1.0), b(n, -2.0), c(n, 1.0), d(n);
    a[0] = 0.0;
    c[0] = 0.0;
    b[0] = 1.0;
    d[0] = 0.0;  // u(0) = 0
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = h2 * g.x(i) * source[i];
    a[n - 1] = 0.0;
    c[n - 1] = 0.0;
    b[n - 1] = 1.0;
    d[n - 1] = u_outer;

    std::vector<double> u = thomas(a, b, c, d);
    std::vector<double> V(n);
    for (std::size_t i = 1; i < n; ++i) V[i] = u[i] / g.x(i);
    // V(0) from the odd expansion u = V(0) r + u''' r^3/6 + ...
    V[0] = (8.0 * u[1] - u[2]) / (6.0 * h);
    return V;
  }

  // Cartesian: V'' = s.  Left boundary takes the symmetric far-field slope
  // V'(x_min) = -Q/2 with Q = int s dx (zero for neutral sources); the right
  // boundary pins the gauge V(x_max) = 0.
  const double slope_left = -0.5 * trapezoid(source, h);
  std::vector<double> a(n, 1.0), b(n, -2.0), c(n, 1.0), d(n);
  a[0] = 0.0;
  c[0] = 2.0;  // ghost row: -2 V0 + 2 V1 = h^2 s0 + 2 h V'(x_min)
  d[0] = h2 * source[0] + 2.0 * h * slope_left;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = h2 * source[i];
  a[n - 1] = 0.0;
  c[n - 1] = 0.0;
  b[n - 1] = 1.0;
  d[n - 1] = 0.0;
  return thomas(a, b, c, d);
}

double poisson_residual(std::span<const double> V,
                        std::span<const double> source, const Grid& g) {
  const std::size_t n = static_cast<std::size_t>(g.n_points);
  if (V.size() != n || source.size() != n)
    throw std::invalid_argument("poisson_residual: size mismatch");
  std::vector<double> lap = laplacian(V, g);
  double r = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i)
    r = std::max(r, std::abs(lap[i] - source[i]));
  return r;
}

}  // namespace qhd
