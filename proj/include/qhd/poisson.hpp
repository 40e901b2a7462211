#pragma once
///
/// Direct (tridiagonal) Poisson solves on the project grids.
///
/// The equation solved is  lap V = s  with the geometry's discrete Laplacian:
///  - Cartesian: V'' = s, Neumann condition V'(x_min) = -1/2 int s dx
///    (symmetric sheet field, no externally applied field), gauge V = 0 at
///    the last grid point;
///  - spherical: (rV)'' = r s via u = rV, u(0) = 0, outer Dirichlet value
///    from the monopole tail V(r_max) = -Q/r_max with Q = int s r^2 dr
///    (zero for neutral sources).
///
/// The returned potential satisfies the same discrete operator used by
/// qhd::laplacian at interior points to machine precision.

#include <span>
#include <vector>

#include "qhd/grid.hpp"

namespace qhd {

std::vector<double> solve_poisson(std::span<const double> source,
                                  const Grid& g);

/// Max abs of (discrete lap V - source) over interior points, for diagnostics.
double poisson_residual(std::span<const double> V,
                        std::span<const double> source, const Grid& g);

}  // namespace qhd
