#pragma once

#include <functional>
#include <optional>

#include "cmgkit/geometry.hpp"

namespace cmg {

enum class IndexMethod { winding_2d, simplicial_3d, jacobian_sign };

const char* to_string(IndexMethod m);

struct IndexResult {
  int index = 0;
  IndexMethod method = IndexMethod::jacobian_sign;
  double radius = 0.0;
  int samples = 0;
  double min_field_norm = 0.0;  // over the sampling sphere
};

// A vector field given in chart coordinates.
using ChartField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Poincare-Hopf index of an isolated zero of `field` at p, as the degree of
// the normalized field on the radius-eps sphere. Dimension 2 sums signed
// angle increments over a 4096-gon (with refinement when a step reaches
// pi/2); dimension 3 sums signed solid angles over a level-4 icosphere
// (5120 triangles, adaptive splitting of overstretched image triangles).
// Passing IndexMethod::jacobian_sign uses the sign of the determinant of a
// finite-difference Jacobian at p instead (nondegenerate zeros only).
// Throws index_inconclusive when the field gets too close to zero on the
// sampling sphere or the angular resolution is exhausted.
IndexResult ph_index(const ChartField& field, const ChartPoint& p, double eps,
                     std::optional<IndexMethod> method = {});

// Index of the coordinate gradient field g^{ij} d_j f of a Morse germ; uses
// the degree methods for n in {2,3} and the (exact) Hessian determinant sign
// otherwise. Equals (-1)^k for Morse index k, independently of the metric.
IndexResult index_of_gradient(const MetricChart& m, const GermSpec& f, double eps);

// The coordinate gradient field of a germ, for feeding ph_index directly.
ChartField gradient_field(const MetricChart& m, const GermSpec& f);

struct Attainment {
  double radius = 0.0;
  ChartPoint q;
  double angle = 0.0;
  bool attained = false;
};

// For each radius, searches the chart sphere of that radius around the germ
// base for the point where the direction of nabla f best matches v (angles
// measured with g at the base; components compared chart-wise, which is
// exact in the small-radius limit). A Morse germ attains every direction,
// so angle > tol_angle flags a counterexample candidate.
std::vector<Attainment> direction_attainment(const MetricChart& m, const GermSpec& f,
                                             const TangentVector& v,
                                             const std::vector<double>& radii,
                                             double tol_angle);

// Shared-sweep variant: evaluates the gradient sweep once per radius and
// reuses it for every target direction. Results are indexed [v][radius].
std::vector<std::vector<Attainment>> direction_attainment_many(
    const MetricChart& m, const GermSpec& f, const std::vector<Eigen::VectorXd>& vs,
    const std::vector<double>& radii, double tol_angle);

}  // namespace cmg
