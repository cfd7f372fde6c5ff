#include "cmgkit/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace cmg {

namespace {

using JetMat = std::vector<TaylorScalar>;  // n*n row-major

JetMat jet_mat_mul(int n, const JetMat& a, const JetMat& b) {
  JetMat r(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      TaylorScalar s = a[i * n] * b[j];
      for (int k = 1; k < n; ++k) s += a[i * n + k] * b[k * n + j];
      r[i * n + j] = std::move(s);
    }
  }
  return r;
}

// First-derivative value d_v of a jet (degree-1 coefficients sit at 1..n).
double d1(const TaylorScalar& a, int v) { return a.coeff_at(1 + v); }

Eigen::VectorXd lower_with(const Eigen::MatrixXd& g, const Eigen::VectorXd& v) {
  return g * v;
}

void check_vector(const MetricChart& m, const TangentVector& v, const ChartPoint& q) {
  if (v.dim() != m.dim())
    throw std::invalid_argument("tangent vector dimension does not match chart");
  if ((v.base.coords - q.coords).norm() > 1e-12)
    throw std::invalid_argument("tangent vector attached to a different point");
}

}  // namespace

Eigen::MatrixXd ChartFrame::metric_value() const {
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = metric(i, j).value();
  return r;
}

Eigen::MatrixXd ChartFrame::inverse_value() const {
  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = inverse(i, j).value();
  return r;
}

Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& g, const std::string& chart_name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw chart_domain_error("metric of chart '" + chart_name +
                             "' is singular or badly conditioned at this point");
  return g.partialPivLu().inverse();
}

ChartFrame build_frame(const MetricChart& m, const ChartPoint& q, int order) {
  if (order < 1 || order > kMaxJetOrder)
    throw std::invalid_argument("frame order must be in [1, 3]");
  ChartFrame fr;
  fr.n = m.dim();
  fr.order = order;
  fr.q = q;
  fr.x = lift_point(q, order);
  fr.g = m.metric_jets(q, order);

  const int n = fr.n;
  const Eigen::MatrixXd g0 = fr.metric_value();
  const Eigen::MatrixXd m0 = spd_inverse(g0, m.name());

  // Inverse metric jets: (G0 + E)^{-1} = (I - T + T^2 - ...) M with T = M E;
  // E has zero constant term, so the series terminates at the jet order.
  JetMat em(static_cast<std::size_t>(n) * n);
  JetMat mm(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      em[i * n + j] = fr.g[i * n + j] - g0(i, j);
      mm[i * n + j] = TaylorScalar::constant(m0(i, j), n, order);
    }
  }
  const JetMat t = jet_mat_mul(n, mm, em);
  JetMat acc(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      acc[i * n + j] = TaylorScalar::constant(i == j ? 1.0 : 0.0, n, order);
  JetMat term = acc;
  double sign = -1.0;
  for (int k = 1; k <= order; ++k) {
    term = jet_mat_mul(n, term, t);
    for (int i = 0; i < n * n; ++i) acc[i] = acc[i] + sign * term[i];
    sign = -sign;
  }
  fr.ginv = jet_mat_mul(n, acc, mm);

  // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij})
  std::vector<TaylorScalar> dg(static_cast<std::size_t>(n) * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int v = 0; v < n; ++v)
        dg[(v * n + i) * n + j] = fr.g[i * n + j].derivative_jet(v);
  fr.gamma.resize(static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        TaylorScalar s = TaylorScalar::constant(0.0, n, order - 1);
        for (int l = 0; l < n; ++l) {
          s += fr.ginv[k * n + l] * (dg[(i * n + j) * n + l] + dg[(j * n + i) * n + l] -
                                     dg[(l * n + i) * n + j]);
        }
        s = s * 0.5;
        fr.gamma[(k * n + i) * n + j] = s;
        if (i != j) fr.gamma[(k * n + j) * n + i] = std::move(s);
      }
    }
  }
  return fr;
}

Tensor3 christoffel(const MetricChart& m, const ChartPoint& q) {
  const ChartFrame fr = build_frame(m, q, 1);
  const int n = fr.n;
  Tensor3 out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(k, i, j) = fr.christoffel(k, i, j).value();
  return out;
}

Tensor4 riemann(const MetricChart& m, const ChartPoint& q) {
  const ChartFrame fr = build_frame(m, q, 2);
  const int n = fr.n;

  // flatten values for the contraction loops
  std::vector<double> gam(static_cast<std::size_t>(n) * n * n);
  std::vector<double> dgam(static_cast<std::size_t>(n) * n * n * n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const TaylorScalar& c = fr.christoffel(k, i, j);
        gam[(k * n + i) * n + j] = c.value();
        for (int v = 0; v < n; ++v) dgam[((v * n + k) * n + i) * n + j] = d1(c, v);
      }
    }
  }
  const Eigen::MatrixXd g0 = fr.metric_value();

  Tensor4 out(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int mm = 0; mm < n; ++mm) {
            double r = dgam[((i * n + mm) * n + j) * n + k] -
                       dgam[((j * n + mm) * n + i) * n + k];
            for (int p = 0; p < n; ++p) {
              r += gam[(mm * n + i) * n + p] * gam[(p * n + j) * n + k] -
                   gam[(mm * n + j) * n + p] * gam[(p * n + i) * n + k];
            }
            s += g0(l, mm) * r;
          }
          out(i, j, k, l) = s;
        }
      }
    }
  }
  return out;
}

std::vector<TaylorScalar> riemann_jets(const ChartFrame& fr) {
  const int n = fr.n;
  if (fr.order < 2)
    throw std::invalid_argument("curvature jets need a frame of order >= 2");
  std::vector<TaylorScalar> dgam(static_cast<std::size_t>(n) * n * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int v = 0; v < n; ++v)
          dgam[((v * n + k) * n + i) * n + j] =
              fr.christoffel(k, i, j).derivative_jet(v);

  std::vector<TaylorScalar> out(static_cast<std::size_t>(n) * n * n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          TaylorScalar s = TaylorScalar::constant(0.0, n, fr.order - 2);
          for (int mm = 0; mm < n; ++mm) {
            TaylorScalar r = dgam[((i * n + mm) * n + j) * n + k] -
                             dgam[((j * n + mm) * n + i) * n + k];
            for (int p = 0; p < n; ++p) {
              r += fr.christoffel(mm, i, p) * fr.christoffel(p, j, k) -
                   fr.christoffel(mm, j, p) * fr.christoffel(p, i, k);
            }
            s += fr.metric(l, mm) * r;
          }
          out[((i * n + j) * n + k) * n + l] = std::move(s);
        }
      }
    }
  }
  return out;
}

Plane2 make_plane(const MetricChart& m, const ChartPoint& base,
                  const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
  PointCurvature pc(m, base);
  auto [uu, ww] = pc.orthonormalize(u, w);
  return Plane2{base, TangentVector{base, uu}, TangentVector{base, ww}};
}

double sectional(const MetricChart& m, const Plane2& sigma) {
  PointCurvature pc(m, sigma.base);
  return pc.plane_curvature(sigma.u.comps, sigma.w.comps);
}

TangentVector gradient(const MetricChart& m, const GermSpec& f, const ChartPoint& q) {
  m.require_in_domain(q);
  const Eigen::MatrixXd g = m.metric_value(q);
  const Eigen::MatrixXd ginv = spd_inverse(g, m.name());
  const TaylorScalar fj = eval_field(f.f, q, 1);
  Eigen::VectorXd df(m.dim());
  for (int v = 0; v < m.dim(); ++v) df[v] = d1(fj, v);
  return TangentVector{q, ginv * df};
}

Eigen::MatrixXd covariant_hessian(const MetricChart& m, const GermSpec& f,
                                  const ChartPoint& q) {
  const ChartFrame fr = build_frame(m, q, 1);
  const int n = fr.n;
  const TaylorScalar fj = eval_field(f.f, q, 2);
  Eigen::VectorXd df(n);
  for (int v = 0; v < n; ++v) df[v] = d1(fj, v);
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      MultiIndex a{};
      a[i] = static_cast<std::uint8_t>(a[i] + 1);
      a[j] = static_cast<std::uint8_t>(a[j] + 1);
      double v = fj.derivative(a);
      for (int k = 0; k < n; ++k) v -= fr.christoffel(k, i, j).value() * df[k];
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

std::vector<TaylorScalar> hessian_jets(const ChartFrame& fr, const TaylorScalar& f_jet) {
  const int n = fr.n;
  std::vector<TaylorScalar> df(n);
  for (int v = 0; v < n; ++v) df[v] = f_jet.derivative_jet(v);
  std::vector<TaylorScalar> h(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      TaylorScalar s = df[i].derivative_jet(j);
      for (int k = 0; k < n; ++k) s = s - fr.christoffel(k, i, j) * df[k];
      h[i * n + j] = s;
      if (i != j) h[j * n + i] = std::move(s);
    }
  }
  return h;
}

namespace {

// Coordinate components of (nabla_Z (nabla^2 f))(X) from a frame of order >= 2
// and an order-3 germ jet, via the (1,1) Hessian operator A = g^{-1} H.
Eigen::VectorXd third_covariant_components(const ChartFrame& fr,
                                           const TaylorScalar& f_jet,
                                           const Eigen::VectorXd& z,
                                           const Eigen::VectorXd& x) {
  const int n = fr.n;
  const auto h = hessian_jets(fr, f_jet);
  std::vector<TaylorScalar> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      TaylorScalar s = fr.inverse(i, 0) * h[0 * n + j];
      for (int k = 1; k < n; ++k) s += fr.inverse(i, k) * h[k * n + j];
      a[i * n + j] = std::move(s);
    }
  }
  // (nabla_k A)^i_j = d_k A^i_j + Gamma^i_{km} A^m_j - Gamma^m_{kj} A^i_m
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < n; ++j) {
        double cov = d1(a[i * n + j], k);
        for (int mm = 0; mm < n; ++mm) {
          cov += fr.christoffel(i, k, mm).value() * a[mm * n + j].value() -
                 fr.christoffel(mm, k, j).value() * a[i * n + mm].value();
        }
        acc += z[k] * x[j] * cov;
      }
    }
    out[i] = acc;
  }
  return out;
}

}  // namespace

TangentVector third_covariant(const MetricChart& m, const GermSpec& f,
                              const ChartPoint& q, const TangentVector& Z,
                              const TangentVector& X) {
  check_vector(m, Z, q);
  check_vector(m, X, q);
  const ChartFrame fr = build_frame(m, q, 2);
  const TaylorScalar fj = eval_field(f.f, q, 3);
  return TangentVector{q, third_covariant_components(fr, fj, Z.comps, X.comps)};
}

double ricci_identity_residual(const MetricChart& m, const GermSpec& f,
                               const ChartPoint& q, const TangentVector& Z,
                               const TangentVector& X) {
  check_vector(m, Z, q);
  check_vector(m, X, q);
  const ChartFrame fr = build_frame(m, q, 2);
  const TaylorScalar fj = eval_field(f.f, q, 3);
  const Eigen::VectorXd lhs = third_covariant_components(fr, fj, Z.comps, X.comps) -
                              third_covariant_components(fr, fj, X.comps, Z.comps);

  // R(Z,X) nabla f through the curvature tensor (independent of the path above)
  const Tensor4 rm = riemann(m, q);
  const int n = fr.n;
  const Eigen::MatrixXd g0 = fr.metric_value();
  const Eigen::MatrixXd gi = fr.inverse_value();
  Eigen::VectorXd df(n);
  for (int v = 0; v < n; ++v) df[v] = d1(fj, v);
  const Eigen::VectorXd grad = gi * df;
  Eigen::VectorXd lowered = Eigen::VectorXd::Zero(n);
  for (int l = 0; l < n; ++l) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) s += rm(i, j, k, l) * Z.comps[i] * X.comps[j] * grad[k];
    lowered[l] = s;
  }
  const Eigen::VectorXd rhs = gi * lowered;

  const Eigen::VectorXd diff = lhs - rhs;
  return std::sqrt(diff.dot(lower_with(g0, diff)));
}

double metric_inner(const MetricChart& m, const ChartPoint& q,
                    const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.dot(m.metric_value(q) * b);
}

double metric_norm(const MetricChart& m, const ChartPoint& q,
                   const Eigen::VectorXd& a) {
  return std::sqrt(metric_inner(m, q, a, a));
}

PointCurvature::PointCurvature(const MetricChart& m, const ChartPoint& q)
    : q_(q), g_(m.metric_value(q)), riem_(riemann(m, q)) {}

std::pair<Eigen::VectorXd, Eigen::VectorXd> PointCurvature::orthonormalize(
    const Eigen::VectorXd& u, const Eigen::VectorXd& w) const {
  const double nu = norm(u);
  if (nu < 1e-14) throw std::invalid_argument("degenerate plane: zero first vector");
  const Eigen::VectorXd e1 = u / nu;
  Eigen::VectorXd p = w - inner(w, e1) * e1;
  const double np = norm(p);
  if (np < 1e-10 * std::max(1.0, norm(w)))
    throw std::invalid_argument("degenerate plane: vectors are linearly dependent");
  return {e1, p / np};
}

double PointCurvature::k_orthonormal(const Eigen::VectorXd& u,
                                     const Eigen::VectorXd& w) const {
  const int n = static_cast<int>(u.size());
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    if (u[i] == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (w[j] == 0.0) continue;
      const double uw = u[i] * w[j];
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          s += riem_(i, j, k, l) * uw * w[k] * u[l];
        }
      }
    }
  }
  return s;
}

double PointCurvature::plane_curvature(const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& w) const {
  auto [e1, e2] = orthonormalize(u, w);
  return k_orthonormal(e1, e2);
}

}  // namespace cmg
