#include "cmgkit/chart.hpp"

namespace cmg {

MetricChart::MetricChart(int dim, std::string name,
                         std::vector<ScalarField> upper_triangle, DomainGuard guard,
                         double chart_scale)
    : dim_(dim),
      name_(std::move(name)),
      upper_(std::move(upper_triangle)),
      guard_(std::move(guard)),
      chart_scale_(chart_scale) {
  const std::size_t expected = static_cast<std::size_t>(dim) * (dim + 1) / 2;
  if (dim < 1 || dim > kMaxJetVars)
    throw std::invalid_argument("chart dimension must be in [1, 6]");
  if (upper_.size() != expected)
    throw std::invalid_argument("metric needs n(n+1)/2 upper-triangle components");
}

bool MetricChart::in_domain(const ChartPoint& q) const {
  if (q.dim() != dim_) return false;
  if (!q.coords.allFinite()) return false;
  return guard_ ? guard_(q) : true;
}

void MetricChart::require_in_domain(const ChartPoint& q) const {
  if (!in_domain(q))
    throw chart_domain_error("point outside the domain of chart '" + name_ + "'");
}

const ScalarField& MetricChart::component(int i, int j) const {
  if (i > j) std::swap(i, j);
  // row-major upper triangle offset
  const int pos = i * dim_ - i * (i - 1) / 2 + (j - i);
  return upper_[pos];
}

std::vector<TaylorScalar> MetricChart::metric_jets(const ChartPoint& q,
                                                   int order) const {
  require_in_domain(q);
  const auto x = lift_point(q, order);
  std::vector<TaylorScalar> g(static_cast<std::size_t>(dim_) * dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = i; j < dim_; ++j) {
      TaylorScalar v = component(i, j)(x);
      if (v.order() != order)
        throw std::invalid_argument("metric component degraded the jet order");
      g[i * dim_ + j] = v;
      if (i != j) g[j * dim_ + i] = std::move(v);
    }
  }
  return g;
}

Eigen::MatrixXd MetricChart::metric_value(const ChartPoint& q) const {
  const auto g = metric_jets(q, 0);
  Eigen::MatrixXd m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = g[i * dim_ + j].value();
  return m;
}

std::vector<TaylorScalar> lift_point(const ChartPoint& q, int order) {
  std::vector<TaylorScalar> x;
  x.reserve(q.dim());
  for (int v = 0; v < q.dim(); ++v) x.push_back(lift(q, v, order));
  return x;
}

TaylorScalar eval_field(const ScalarField& field, const ChartPoint& q, int order) {
  const auto x = lift_point(q, order);
  TaylorScalar r = field(x);
  if (r.order() != order)
    throw std::invalid_argument("scalar field degraded the jet order");
  return r;
}

MetricChart isotropic_metric(int dim, std::string name, ScalarField weight,
                             DomainGuard guard, double chart_scale) {
  std::vector<ScalarField> upper;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      if (i == j) {
        upper.push_back(weight);
      } else {
        upper.push_back(
            [](std::span<const TaylorScalar> x) { return jet_like(0.0, x); });
      }
    }
  }
  return MetricChart(dim, std::move(name), std::move(upper), std::move(guard),
                     chart_scale);
}

TaylorScalar squared_norm_jet(std::span<const TaylorScalar> x) {
  TaylorScalar s = x[0] * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return s;
}

}  // namespace cmg
