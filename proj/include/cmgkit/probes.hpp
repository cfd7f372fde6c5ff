#pragma once

#include <functional>
#include <optional>
#include <span>

#include "cmgkit/germs.hpp"

namespace cmg {

// Sampling and refinement budget for the Grassmannian sweep.
struct OscBudget {
  int samples = 20000;       // low-discrepancy orthonormal pairs
  int multistarts = 32;      // local refinements seeded from the best samples
  int refine_eval_cap = 400000;
  int threads = 1;
};

// Extrema of the sectional curvature over the 2-plane Grassmannian of one
// tangent space.
struct CurvatureReport {
  ChartPoint point;
  double k_max = 0.0;
  double k_min = 0.0;
  double osc = 0.0;  // k_max - k_min
  Plane2 argmax_plane;
  Plane2 argmin_plane;
  int samples = 0;
  bool refined = false;
};

// Oscillation of the sectional curvature over G(2, T_pM). Dimension 2 has a
// single plane (osc = 0 by definition). Higher dimensions sample orthonormal
// pairs, then polish the extrema by projected pattern search with step
// halving down to 1e-10.
CurvatureReport osc_k(const MetricChart& m, const ChartPoint& p,
                      const OscBudget& budget = {});

// Gradient of the Gaussian curvature field at p (dimension 2 only), through
// the full curvature pipeline on order-3 metric jets.
TangentVector curvature_gradient(const MetricChart& m, const ChartPoint& p);

// The two gradient identities tying a 2-dimensional conformal Morse germ to
// the curvature: returns (|nabla h + K nabla f|_g, |component of nabla K
// orthogonal to nabla f|_g) at q.
std::pair<double, double> two_dim_identities(const MetricChart& m, const GermSpec& f,
                                             const ChartPoint& q,
                                             double gradient_floor = 1e-6);

struct RegionSpec {
  ChartPoint center;
  double radius = 0.3;  // relative to the chart scale
  int count = 200;
  int threads = 1;
  bool keep_reports = false;  // retain per-sample reports (CSV emission)
};

struct SchurWitness {
  ChartPoint point;
  CurvatureReport report;
  double reference_c = 0.0;
  std::string reason;  // "plane-dependent" or "point-dependent"
};

struct SchurScanResult {
  bool constant = false;
  double c_mean = 0.0;
  std::optional<SchurWitness> witness;
  int samples = 0;
  double tol = 0.0;
  std::vector<CurvatureReport> sample_reports;  // filled when keep_reports is set
};

// Samples the region, computes the curvature oscillation at every sample,
// and checks pointwise values for constancy: the numerical face of the
// constancy-propagation argument in dimension >= 3.
SchurScanResult schur_scan(const MetricChart& m, const RegionSpec& region,
                           double tol = 1e-6, const OscBudget& per_point = {
                               .samples = 2000, .multistarts = 8,
                               .refine_eval_cap = 200000, .threads = 1});

// One row of the quasiconformality sweep: deviation-from-conformal proxy
// against the curvature oscillation at the base point.
struct SweepRow {
  double param = 0.0;
  double kappa_proxy = 1.0;  // 1 + sup of the conformal defect near p
  double k_max = 0.0;
  double k_min = 0.0;
  double osc = 0.0;
  bool refined = false;
};

// A family of (metric, germ) pairs indexed by a deformation parameter.
struct GermFamily {
  std::function<std::pair<MetricChart, GermSpec>(double)> member;
  std::string label;
};

// Emits (kappa_proxy, osc) rows over the parameter grid. The family member
// at parameter 0 must pass verify_cmg, otherwise the sweep is refused. Only
// the endpoint is contractual (kappa -> 1 forces osc -> 0); no monotonicity
// beyond it is asserted.
std::vector<SweepRow> quasiconformal_sweep(const GermFamily& family,
                                           std::span<const double> eps_grid,
                                           const NeighborhoodSpec& sampling = {},
                                           const OscBudget& budget = {});

}  // namespace cmg
