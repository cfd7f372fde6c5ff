#pragma once

#include <vector>

#include <Eigen/Core>

namespace cmg {

// Radical-inverse (van der Corput) value of index in the given base.
double radical_inverse(unsigned long long index, unsigned base);

// Deterministic low-discrepancy directions on the unit sphere S^{dim-1}.
// dim == 2 yields equally spaced circle points; higher dimensions map a
// Halton sequence through Box-Muller and normalize. `stream` offsets the
// sequence so independent direction sets never share points.
std::vector<Eigen::VectorXd> sphere_directions(int dim, int count,
                                               unsigned long long stream = 0);

// Deterministic low-discrepancy points in the open ball of the given radius.
std::vector<Eigen::VectorXd> ball_points(int dim, int count, double radius,
                                         unsigned long long stream = 0);

}  // namespace cmg
