#pragma once

#include <optional>

#include "cmgkit/geometry.hpp"

namespace cmg {

enum class ModelSpace { euclidean, sphere, hyperbolic };

// Chart metric, germ, and nominal sectional curvature of one of the three
// constant-curvature model constructions.
struct ModelGerm {
  MetricChart chart;
  GermSpec germ;
  double curvature;  // 0, +c, or -c
};

// Model germs based at the chart origin:
//   euclidean   g = delta,                  f = |x|^2
//   sphere(c)   g = 4 delta/(1+c|x|^2)^2,   f = (1-c|x|^2)/(1+c|x|^2)
//   hyperbolic  g = 4 delta/(1-c|x|^2)^2,   f = (1+c|x|^2)/(1-c|x|^2)
// The sphere/hyperbolic expressions are the chart forms of cos(sqrt(c) d)
// and cosh(sqrt(c) d) for the geodesic distance d to the origin.
ModelGerm model_germ(ModelSpace model, double c, int n);

// Verdict of the conformal-Morse-germ check at the germ's base point.
struct CmgVerdict {
  double grad_norm_at_p = 0.0;
  double hessian_min_abs_eigenvalue = 0.0;  // generalized eigenvalues w.r.t. g
  double h_at_p = 0.0;
  double defect_sup = 0.0;
  int morse_index = 0;  // negative generalized eigenvalues of the Hessian at p
  bool is_cmg = false;
  int samples_used = 0;
  int samples_skipped = 0;
  bool reliable = true;  // false when >10% of samples fell outside the chart
};

struct CmgTolerances {
  double grad = 1e-10;        // scaled by the germ's Hessian magnitude
  double nondegenerate = 1e-8;
  double conformal = 1e-7;
  double factor = 1e-8;
  double gradient_floor = 1e-6;
};

// Neighborhood of the base point sampled for the conformality defect:
// low-discrepancy points on spherical shells, radii relative to the chart
// scale.
struct NeighborhoodSpec {
  std::vector<double> shell_radii = {0.05, 0.1, 0.2};
  int points_per_shell = 64;
  int threads = 1;
};

// h(q) = trace_g(nabla^2 f)(q) / n: the unique candidate conformal factor.
double conformal_factor(const MetricChart& m, const GermSpec& f, const ChartPoint& q);

// g-operator norm of g^{-1}(nabla^2 f - h g) at q; zero exactly when the
// Hessian is a pointwise multiple of the metric.
double conformal_defect(const MetricChart& m, const GermSpec& f, const ChartPoint& q);

// Operator-norm deviation of the Hessian from a *given* factor h(q) * g.
double defect_against_factor(const MetricChart& m, const GermSpec& f,
                             const ChartPoint& q, double h);

CmgVerdict verify_cmg(const MetricChart& m, const GermSpec& f,
                      const NeighborhoodSpec& sampling = {},
                      const CmgTolerances& tols = {});

// Sectional curvature of the plane spanned by nabla f(q) and z, evaluated as
// -<nabla f, nabla h>/|nabla f|^2 where nabla h differentiates the candidate
// conformal factor. Valid when f is a conformal Morse germ; the value does
// not depend on z (z is orthogonalized and only fixes the plane the claim
// refers to).
double curvature_via_germ(const MetricChart& m, const GermSpec& f,
                          const ChartPoint& q, const TangentVector& z,
                          double gradient_floor = 1e-6);

// Same sectional curvature through the antisymmetrized third covariant
// derivative; holds for any germ with nabla f(q) != 0, conformal or not.
double curvature_via_third_derivative(const MetricChart& m, const GermSpec& f,
                                      const ChartPoint& q, const TangentVector& z,
                                      double gradient_floor = 1e-6);

// nabla h at q as a tangent vector (jet-differentiates trace_g(nabla^2 f)/n;
// needs order-3 jets of both the germ and the metric).
TangentVector conformal_factor_gradient(const MetricChart& m, const GermSpec& f,
                                        const ChartPoint& q);

// Generalized eigenvalues of the covariant Hessian with respect to g at q,
// ascending. Shared by the verdict, the defect, and the Morse index.
Eigen::VectorXd hessian_spectrum(const MetricChart& m, const GermSpec& f,
                                 const ChartPoint& q);

}  // namespace cmg
