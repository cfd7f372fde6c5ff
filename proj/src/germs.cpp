#include "cmgkit/germs.hpp"

#include <cmath>

#include "cmgkit/parallel.hpp"
#include "cmgkit/sampling.hpp"

namespace cmg {

namespace {

ScalarField constant_field(double v) {
  return [v](std::span<const TaylorScalar> x) { return jet_like(v, x); };
}

Eigen::VectorXd generalized_spectrum(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, g);
  return eig.eigenvalues();
}

}  // namespace

ModelGerm model_germ(ModelSpace model, double c, int n) {
  if (n < 2 || n > kMaxJetVars)
    throw std::invalid_argument("model germs need dimension in [2, 6]");
  if (model != ModelSpace::euclidean && !(c > 0.0))
    throw std::invalid_argument("model curvature parameter c must be positive");

  const ChartPoint origin{Eigen::VectorXd::Zero(n)};
  switch (model) {
    case ModelSpace::euclidean: {
      MetricChart chart = isotropic_metric(n, "euclidean", constant_field(1.0), {}, 1.0);
      GermSpec germ{origin,
                    [](std::span<const TaylorScalar> x) { return squared_norm_jet(x); },
                    "sqdist"};
      return ModelGerm{std::move(chart), std::move(germ), 0.0};
    }
    case ModelSpace::sphere: {
      auto weight = [c](std::span<const TaylorScalar> x) {
        auto d = 1.0 + c * squared_norm_jet(x);
        return 4.0 / (d * d);
      };
      MetricChart chart = isotropic_metric(n, "sphere", weight, {}, 0.5 / std::sqrt(c));
      GermSpec germ{origin,
                    [c](std::span<const TaylorScalar> x) {
                      auto s = squared_norm_jet(x);
                      return (1.0 - c * s) / (1.0 + c * s);
                    },
                    "cos_dist"};
      return ModelGerm{std::move(chart), std::move(germ), c};
    }
    case ModelSpace::hyperbolic: {
      auto weight = [c](std::span<const TaylorScalar> x) {
        auto d = 1.0 - c * squared_norm_jet(x);
        return 4.0 / (d * d);
      };
      DomainGuard guard = [c](const ChartPoint& q) {
        return c * q.coords.squaredNorm() < 0.99;
      };
      MetricChart chart =
          isotropic_metric(n, "hyperbolic", weight, guard, 0.5 / std::sqrt(c));
      GermSpec germ{origin,
                    [c](std::span<const TaylorScalar> x) {
                      auto s = squared_norm_jet(x);
                      return (1.0 + c * s) / (1.0 - c * s);
                    },
                    "cosh_dist"};
      return ModelGerm{std::move(chart), std::move(germ), -c};
    }
  }
  throw std::invalid_argument("unknown model space");
}

double conformal_factor(const MetricChart& m, const GermSpec& f, const ChartPoint& q) {
  const Eigen::MatrixXd h = covariant_hessian(m, f, q);
  const Eigen::MatrixXd gi = spd_inverse(m.metric_value(q), m.name());
  return (gi * h).trace() / m.dim();
}

double conformal_defect(const MetricChart& m, const GermSpec& f, const ChartPoint& q) {
  const Eigen::VectorXd mu = hessian_spectrum(m, f, q);
  const double h = mu.mean();
  return (mu.array() - h).abs().maxCoeff();
}

double defect_against_factor(const MetricChart& m, const GermSpec& f,
                             const ChartPoint& q, double h) {
  const Eigen::VectorXd mu = hessian_spectrum(m, f, q);
  return (mu.array() - h).abs().maxCoeff();
}

Eigen::VectorXd hessian_spectrum(const MetricChart& m, const GermSpec& f,
                                 const ChartPoint& q) {
  return generalized_spectrum(covariant_hessian(m, f, q), m.metric_value(q));
}

CmgVerdict verify_cmg(const MetricChart& m, const GermSpec& f,
                      const NeighborhoodSpec& sampling, const CmgTolerances& tols) {
  CmgVerdict v;
  const ChartPoint& p = f.base;
  m.require_in_domain(p);

  const Eigen::VectorXd mu = hessian_spectrum(m, f, p);
  v.hessian_min_abs_eigenvalue = mu.array().abs().minCoeff();
  v.morse_index = static_cast<int>((mu.array() < 0.0).count());
  v.h_at_p = mu.mean();
  v.grad_norm_at_p = metric_norm(m, p, gradient(m, f, p).comps);

  // defect over low-discrepancy shells around p
  const int n = m.dim();
  std::vector<ChartPoint> pts;
  unsigned long long stream = 0;
  for (double rel : sampling.shell_radii) {
    const double r = rel * m.chart_scale();
    for (const auto& dir : sphere_directions(n, sampling.points_per_shell, stream)) {
      pts.push_back(ChartPoint{p.coords + r * dir});
    }
    ++stream;
  }
  std::vector<double> defects(pts.size(), -1.0);
  parallel_for(static_cast<int>(pts.size()), sampling.threads, [&](int i) {
    if (m.in_domain(pts[i])) defects[i] = conformal_defect(m, f, pts[i]);
  });
  for (double d : defects) {
    if (d < 0.0) {
      ++v.samples_skipped;
    } else {
      ++v.samples_used;
      v.defect_sup = std::max(v.defect_sup, d);
    }
  }
  v.reliable = v.samples_skipped <= static_cast<int>(pts.size()) / 10;

  const double germ_scale = std::max(1.0, mu.array().abs().maxCoeff());
  v.is_cmg = v.grad_norm_at_p <= tols.grad * germ_scale &&
             v.hessian_min_abs_eigenvalue >= tols.nondegenerate &&
             v.defect_sup <= tols.conformal && std::abs(v.h_at_p) >= tols.factor;
  return v;
}

TangentVector conformal_factor_gradient(const MetricChart& m, const GermSpec& f,
                                        const ChartPoint& q) {
  const ChartFrame fr = build_frame(m, q, 3);
  const TaylorScalar fj = eval_field(f.f, q, 3);
  const auto hess = hessian_jets(fr, fj);  // order-1 jets
  const int n = fr.n;
  TaylorScalar trace = fr.inverse(0, 0) * hess[0];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i + j > 0) trace += fr.inverse(i, j) * hess[i * n + j];
  const TaylorScalar h = trace / static_cast<double>(n);

  Eigen::VectorXd dh(n);
  for (int vv = 0; vv < n; ++vv) dh[vv] = h.coeff_at(1 + vv);
  return TangentVector{q, fr.inverse_value() * dh};
}

namespace {

struct GradContext {
  Eigen::VectorXd grad;
  double grad_norm;
  Eigen::MatrixXd g;
};

GradContext gradient_context(const MetricChart& m, const GermSpec& f,
                             const ChartPoint& q, double floor) {
  GradContext c;
  c.g = m.metric_value(q);
  c.grad = gradient(m, f, q).comps;
  c.grad_norm = std::sqrt(c.grad.dot(c.g * c.grad));
  if (c.grad_norm < floor)
    throw std::invalid_argument(
        "gradient norm below floor: point too close to the germ base");
  return c;
}

// z orthonormalized against the gradient direction; rejects z parallel to it.
Eigen::VectorXd admissible_z(const GradContext& c, const Eigen::VectorXd& z) {
  const Eigen::VectorXd u = c.grad / c.grad_norm;
  Eigen::VectorXd p = z - z.dot(c.g * u) * u;
  const double np = std::sqrt(p.dot(c.g * p));
  if (np < 1e-10)
    throw std::invalid_argument("z is parallel to the gradient: no plane spanned");
  return p / np;
}

}  // namespace

double curvature_via_germ(const MetricChart& m, const GermSpec& f, const ChartPoint& q,
                          const TangentVector& z, double gradient_floor) {
  const GradContext c = gradient_context(m, f, q, gradient_floor);
  admissible_z(c, z.comps);  // validates the plane
  const Eigen::VectorXd dh = conformal_factor_gradient(m, f, q).comps;
  return -c.grad.dot(c.g * dh) / (c.grad_norm * c.grad_norm);
}

double curvature_via_third_derivative(const MetricChart& m, const GermSpec& f,
                                      const ChartPoint& q, const TangentVector& z,
                                      double gradient_floor) {
  const GradContext c = gradient_context(m, f, q, gradient_floor);
  const Eigen::VectorXd zu = admissible_z(c, z.comps);
  const TangentVector grad{q, c.grad};
  const TangentVector zv{q, zu};
  const Eigen::VectorXd num =
      third_covariant(m, f, q, zv, grad).comps - third_covariant(m, f, q, grad, zv).comps;
  return zu.dot(c.g * num) / (c.grad_norm * c.grad_norm);
}

}  // namespace cmg
