#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmgkit/jets.hpp"

namespace cmg {

// A scalar function on a chart, evaluable in jet arithmetic: it receives the
// lifted coordinate jets at the evaluation point and combines them with jet
// operations, so derivatives of any supported order come out exactly.
using ScalarField = std::function<TaylorScalar(std::span<const TaylorScalar>)>;

using DomainGuard = std::function<bool(const ChartPoint&)>;

// Contravariant tangent vector attached to a chart point.
struct TangentVector {
  ChartPoint base;
  Eigen::VectorXd comps;

  int dim() const { return static_cast<int>(comps.size()); }
};

// Riemannian metric on a coordinate chart, given by jet-evaluable component
// functions g_ij. Symmetry is structural: only the upper triangle is stored.
class MetricChart {
 public:
  MetricChart(int dim, std::string name, std::vector<ScalarField> upper_triangle,
              DomainGuard guard = {}, double chart_scale = 1.0);

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double chart_scale() const { return chart_scale_; }

  bool in_domain(const ChartPoint& q) const;
  // Throws chart_domain_error when q fails the guard.
  void require_in_domain(const ChartPoint& q) const;

  const ScalarField& component(int i, int j) const;

  // All n*n component jets at q (mirrored from the upper triangle).
  std::vector<TaylorScalar> metric_jets(const ChartPoint& q, int order) const;
  Eigen::MatrixXd metric_value(const ChartPoint& q) const;

 private:
  int dim_;
  std::string name_;
  std::vector<ScalarField> upper_;  // packed row-major upper triangle
  DomainGuard guard_;
  double chart_scale_;
};

// A scalar function germ: a jet-evaluable function together with its base
// point. The label identifies the germ in reports.
struct GermSpec {
  ChartPoint base;
  ScalarField f;
  std::string label;
};

// Coordinate jets (x_0, ..., x_{n-1}) at q.
std::vector<TaylorScalar> lift_point(const ChartPoint& q, int order);

// Evaluates a scalar field as a jet at q. Throws if the field degrades the
// requested order.
TaylorScalar eval_field(const ScalarField& field, const ChartPoint& q, int order);

// Builds an isotropic (conformally flat) metric w(x) * delta_ij from a
// jet-evaluable weight.
MetricChart isotropic_metric(int dim, std::string name, ScalarField weight,
                             DomainGuard guard = {}, double chart_scale = 1.0);

// Sum of squares of the coordinate jets; the workhorse of every model chart.
TaylorScalar squared_norm_jet(std::span<const TaylorScalar> x);

// Constant jet shaped like the given coordinate jets. Fields must build
// constants this way: on product charts they receive a slice of a larger
// jet, so x.size() is not the variable count.
inline TaylorScalar jet_like(double value, std::span<const TaylorScalar> x) {
  return TaylorScalar::constant(value, x[0].n_vars(), x[0].order());
}

}  // namespace cmg
