#pragma once

#include <utility>
#include <vector>

#include "cmgkit/chart.hpp"

namespace cmg {

// Rank-3 array indexed (k, i, j): Christoffel symbols Gamma^k_{ij}.
class Tensor3 {
 public:
  explicit Tensor3(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n, 0.0) {}
  double& operator()(int k, int i, int j) { return v_[(k * n_ + i) * n_ + j]; }
  double operator()(int k, int i, int j) const { return v_[(k * n_ + i) * n_ + j]; }
  int dim() const { return n_; }

 private:
  int n_;
  std::vector<double> v_;
};

// Fully lowered curvature tensor, indexed so that
// (i, j, k, l) = <R(e_i, e_j) e_k, e_l> with
// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z.
// Sectional curvature of an orthonormal pair (u, w) is R(u, w, w, u).
class Tensor4 {
 public:
  explicit Tensor4(int n) : n_(n), v_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}
  double& operator()(int i, int j, int k, int l) {
    return v_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  double operator()(int i, int j, int k, int l) const {
    return v_[((i * n_ + j) * n_ + k) * n_ + l];
  }
  int dim() const { return n_; }

 private:
  int n_;
  std::vector<double> v_;
};

// A 2-plane in the tangent space at `base`, stored as a g-orthonormal pair.
// Build through make_plane so the orthonormality invariant always holds.
struct Plane2 {
  ChartPoint base;
  TangentVector u;
  TangentVector w;
};

Plane2 make_plane(const MetricChart& m, const ChartPoint& base,
                  const Eigen::VectorXd& u, const Eigen::VectorXd& w);

// Everything derived from the metric jets at one point, at one jet order.
// Orders drop as derivatives are taken: with g at order O, Gamma holds
// order O-1 and the curvature jets order O-2.
struct ChartFrame {
  int n = 0;
  int order = 0;
  ChartPoint q;
  std::vector<TaylorScalar> x;      // coordinate jets
  std::vector<TaylorScalar> g;      // n*n metric jets
  std::vector<TaylorScalar> ginv;   // n*n inverse-metric jets
  std::vector<TaylorScalar> gamma;  // n*n*n jets, Gamma^k_{ij} at (k*n+i)*n+j

  const TaylorScalar& metric(int i, int j) const { return g[i * n + j]; }
  const TaylorScalar& inverse(int i, int j) const { return ginv[i * n + j]; }
  const TaylorScalar& christoffel(int k, int i, int j) const {
    return gamma[(k * n + i) * n + j];
  }
  Eigen::MatrixXd metric_value() const;
  Eigen::MatrixXd inverse_value() const;
};

// Builds the frame at q with metric jets of the given order (2 when only
// curvature values are needed, 3 when curvature or conformal-factor
// gradients are requested). Throws chart_domain_error when the metric at q
// is not positive definite or its condition number exceeds 1e12.
ChartFrame build_frame(const MetricChart& m, const ChartPoint& q, int order);

// Inverse of a symmetric positive definite metric value with the chart
// condition guard applied.
Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& g, const std::string& chart_name);

Tensor3 christoffel(const MetricChart& m, const ChartPoint& q);
Tensor4 riemann(const MetricChart& m, const ChartPoint& q);

// Curvature jets R_{ijkl} from a frame built at order >= 2; entries are jets
// of order (frame order - 2).
std::vector<TaylorScalar> riemann_jets(const ChartFrame& fr);

double sectional(const MetricChart& m, const Plane2& sigma);

TangentVector gradient(const MetricChart& m, const GermSpec& f, const ChartPoint& q);

// Covariant Hessian (nabla^2 f)_{ij} = d_i d_j f - Gamma^k_{ij} d_k f, lowered.
Eigen::MatrixXd covariant_hessian(const MetricChart& m, const GermSpec& f,
                                  const ChartPoint& q);

// Hessian jets from a prebuilt frame and the germ jet at the same point;
// entries hold order (min(f order, gamma order + 1) - 2).
std::vector<TaylorScalar> hessian_jets(const ChartFrame& fr, const TaylorScalar& f_jet);

// (nabla_Z (nabla^2 f))(X) as a tangent vector at q; bilinear in (Z, X).
TangentVector third_covariant(const MetricChart& m, const GermSpec& f,
                              const ChartPoint& q, const TangentVector& Z,
                              const TangentVector& X);

// g-norm of nabla^3 f(Z,X) - nabla^3 f(X,Z) - R(Z,X) nabla f; the toolkit's
// master self-consistency check (both sides go through independent formulas).
double ricci_identity_residual(const MetricChart& m, const GermSpec& f,
                               const ChartPoint& q, const TangentVector& Z,
                               const TangentVector& X);

double metric_inner(const MetricChart& m, const ChartPoint& q,
                    const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double metric_norm(const MetricChart& m, const ChartPoint& q,
                   const Eigen::VectorXd& a);

// Metric, inverse and curvature values cached at one point, for repeated
// plane evaluations (Grassmannian sweeps).
class PointCurvature {
 public:
  PointCurvature(const MetricChart& m, const ChartPoint& q);

  const ChartPoint& point() const { return q_; }
  const Eigen::MatrixXd& metric() const { return g_; }
  const Tensor4& curvature() const { return riem_; }

  // Sectional curvature of the plane spanned by (u, w); orthonormalizes
  // internally. Throws std::invalid_argument on a degenerate pair.
  double plane_curvature(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;

  // g-Gram-Schmidt; returns the orthonormalized pair.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> orthonormalize(
      const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;

  double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(g_ * b);
  }
  double norm(const Eigen::VectorXd& a) const { return std::sqrt(inner(a, a)); }

  // R(u,w,w,u) for an already g-orthonormal pair.
  double k_orthonormal(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;

 private:
  ChartPoint q_;
  Eigen::MatrixXd g_;
  Tensor4 riem_;
};

}  // namespace cmg
