#pragma once
///
/// Uniform 1D grids (Cartesian or spherical-radial) and the finite-difference
/// kernels shared by the closure and solver code.
///
/// Conventions, used consistently everywhere:
///  - second-order centered differences in the interior;
///  - spherical Laplacian written as (r f)'' / r away from the origin and as
///    the regularized 3*f'' at r = 0 (ghost-point even symmetry);
///  - spherical grids always start at r = 0.

#include <span>
#include <vector>

namespace qhd {

enum class Geometry { cartesian1d, spherical_radial };

struct Grid {
  Geometry geometry = Geometry::cartesian1d;
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;

  double spacing() const { return (x_max - x_min) / (n_points - 1); }
  double x(int i) const { return x_min + spacing() * i; }
  std::vector<double> coords() const;

  static Grid cartesian(double x_min, double x_max, int n_points);
  static Grid spherical(double r_max, int n_points);
};

/// Centered first derivative; second-order one-sided stencils at the ends.
/// On spherical grids the r = 0 value is forced to 0 (even-parity fields).
std::vector<double> gradient(std::span<const double> f, const Grid& g);

/// Geometry-aware Laplacian (d^2/dx^2 or r^-2 d/dr(r^2 d/dr)).
/// End points use even-reflection ghosts.
std::vector<double> laplacian(std::span<const double> f, const Grid& g);

/// Volume integral: trapezoid of f dx (Cartesian) or 4 pi r^2 f dr (radial).
double volume_integral(std::span<const double> f, const Grid& g);

/// Trapezoid of w*f over the volume measure, fused to avoid temporaries.
double volume_integral_weighted(std::span<const double> f,
                                std::span<const double> w, const Grid& g);

}  // namespace qhd
