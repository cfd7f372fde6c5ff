#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmgkit/catalog.hpp"
#include "cmgkit/geometry.hpp"
#include "cmgkit/germs.hpp"
#include "cmgkit/sampling.hpp"
#include "support/finite_diff.hpp"
#include "support/oracles.hpp"

using namespace cmg;

namespace {

MetricChart polar_plane() {
  std::vector<ScalarField> upper = {
      [](std::span<const TaylorScalar> x) { return jet_like(1.0, x); },
      [](std::span<const TaylorScalar> x) { return jet_like(0.0, x); },
      [](std::span<const TaylorScalar> x) { return x[0] * x[0]; }};
  return MetricChart(2, "polar", std::move(upper),
                     [](const ChartPoint& q) { return q[0] > 0.05; });
}

// Christoffel symbols from central differences of metric values; independent
// of the jet pipeline.
Tensor3 christoffel_fd(const MetricChart& m, const ChartPoint& q, double h = 1e-4) {
  const int n = m.dim();
  std::vector<Eigen::MatrixXd> dg(n);
  for (int v = 0; v < n; ++v) {
    Eigen::VectorXd p = q.coords, mns = q.coords;
    p[v] += h;
    mns[v] -= h;
    dg[v] = (m.metric_value(ChartPoint{p}) - m.metric_value(ChartPoint{mns})) /
            (2.0 * h);
  }
  const Eigen::MatrixXd ginv = m.metric_value(q).inverse();
  Tensor3 out(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        out(k, i, j) = 0.5 * s;
      }
  return out;
}

std::vector<std::pair<MetricChart, double>> sample_charts() {
  std::vector<std::pair<MetricChart, double>> out;
  out.push_back({model_germ(ModelSpace::euclidean, 1.0, 3).chart, 0.4});
  out.push_back({model_germ(ModelSpace::sphere, 1.0, 3).chart, 0.2});
  out.push_back({model_germ(ModelSpace::sphere, 2.0, 4).chart, 0.15});
  out.push_back({model_germ(ModelSpace::hyperbolic, 1.0, 3).chart, 0.2});
  {
    CatalogEntry rev;
    rev.kind = CatalogEntry::Kind::revolution;
    rev.phi = "cubic";
    out.push_back({build_chart(rev), 0.3});
  }
  out.push_back({build_chart(parse_space("product:s2xs2")), 0.2});
  return out;
}

}  // namespace

TEST_CASE("christoffel symbols: flat, polar, and symmetry") {
  const MetricChart euc = model_germ(ModelSpace::euclidean, 1.0, 3).chart;
  const Tensor3 flat = christoffel(euc, ChartPoint{0.3, -0.7, 1.2});
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(flat(k, i, j) == 0.0);

  const MetricChart polar = polar_plane();
  const ChartPoint q{2.0, 0.9};
  const Tensor3 gam = christoffel(polar, q);
  CHECK(gam(0, 1, 1) == doctest::Approx(-2.0));   // Gamma^r_{tt} = -r
  CHECK(gam(1, 0, 1) == doctest::Approx(0.5));    // Gamma^t_{rt} = 1/r
  const Tensor3 ref = christoffel_fd(polar, q);
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(std::abs(gam(k, i, j) - ref(k, i, j)) < 1e-5);

  const MetricChart sph = model_germ(ModelSpace::sphere, 1.0, 3).chart;
  const Tensor3 sg = christoffel(sph, ChartPoint{0.2, -0.1, 0.3});
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(std::abs(sg(k, i, j) - sg(k, j, i)) < 1e-14);
}

TEST_CASE("christoffel and riemann match metric finite differences") {
  for (const auto& [chart, radius] : sample_charts()) {
    const auto pts = ball_points(chart.dim(), 3, radius, 21);
    for (const auto& d : pts) {
      const ChartPoint q{d};
      if (!chart.in_domain(q)) continue;
      const Tensor3 got = christoffel(chart, q);
      const Tensor3 ref = christoffel_fd(chart, q);
      const int n = chart.dim();
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            CHECK(std::abs(got(k, i, j) - ref(k, i, j)) < 1e-5);
    }
  }

  // curvature tensor against a double finite difference of the metric
  for (const auto& [chart, radius] : sample_charts()) {
    const int n = chart.dim();
    if (n > 3) continue;  // keep the stencil cost bounded
    const ChartPoint q{ball_points(n, 1, radius, 22)[0]};
    if (!chart.in_domain(q)) continue;
    const double h = 1e-4;
    std::vector<Tensor3> dgam;  // dgam[v](k,i,j) = d_v Gamma^k_{ij}
    for (int v = 0; v < n; ++v) {
      Eigen::VectorXd p = q.coords, mns = q.coords;
      p[v] += h;
      mns[v] -= h;
      const Tensor3 gp = christoffel_fd(chart, ChartPoint{p});
      const Tensor3 gm = christoffel_fd(chart, ChartPoint{mns});
      Tensor3 dv(n);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            dv(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
      dgam.push_back(dv);
    }
    const Tensor3 gam = christoffel_fd(chart, q);
    const Eigen::MatrixXd g0 = chart.metric_value(q);
    const Tensor4 exact = riemann(chart, q);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int m2 = 0; m2 < n; ++m2) {
              double r = dgam[i](m2, j, k) - dgam[j](m2, i, k);
              for (int p2 = 0; p2 < n; ++p2)
                r += gam(m2, i, p2) * gam(p2, j, k) - gam(m2, j, p2) * gam(p2, i, k);
              s += g0(l, m2) * r;
            }
            CHECK(std::abs(exact(i, j, k, l) - s) < 1e-5);
          }
  }
}

TEST_CASE("riemann tensor: flat space, model spaces, products") {
  const MetricChart euc = model_germ(ModelSpace::euclidean, 1.0, 4).chart;
  const Tensor4 flat = riemann(euc, ChartPoint{0.1, 0.2, -0.4, 0.9});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) CHECK(flat(i, j, k, l) == 0.0);

  // sphere: closed-form constant-curvature tensor as the oracle
  for (double c : {0.5, 1.0, 2.0}) {
    const MetricChart sph = model_germ(ModelSpace::sphere, c, 3).chart;
    const ChartPoint q{0.21, -0.05, 0.13};
    const Tensor4 got = riemann(sph, q);
    const Tensor4 want =
        oracle::constant_curvature_tensor(sph.metric_value(q), c);
    CHECK(oracle::tensor_max_abs_diff(got, want) < 1e-10);
  }

  // product of spheres: block structure
  {
    const MetricChart prod = build_chart(parse_space("product:s2xs2"));
    const ChartPoint q{0.1, 0.2, 0.1, 0.3};
    const MetricChart s2 = model_germ(ModelSpace::sphere, 1.0, 2).chart;
    const Tensor4 blk1 = oracle::constant_curvature_tensor(
        s2.metric_value(ChartPoint{0.1, 0.2}), 1.0);
    const Tensor4 blk2 = oracle::constant_curvature_tensor(
        s2.metric_value(ChartPoint{0.1, 0.3}), 1.0);
    const Tensor4 want = oracle::product_tensor(blk1, blk2);
    CHECK(oracle::tensor_max_abs_diff(riemann(prod, q), want) < 1e-10);
  }
}

TEST_CASE("riemann symmetries and first Bianchi identity across the catalog") {
  int points = 0;
  for (const auto& [chart, radius] : sample_charts()) {
    for (const auto& d : ball_points(chart.dim(), 17, radius, 31)) {
      const ChartPoint q{d};
      if (!chart.in_domain(q)) continue;
      const Tensor4 R = riemann(chart, q);
      const int n = chart.dim();
      double scale = 1.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
              scale = std::max(scale, std::abs(R(i, j, k, l)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              CHECK(std::abs(R(i, j, k, l) + R(j, i, k, l)) < 1e-10 * scale);
              CHECK(std::abs(R(i, j, k, l) + R(i, j, l, k)) < 1e-10 * scale);
              CHECK(std::abs(R(i, j, k, l) - R(k, l, i, j)) < 1e-10 * scale);
              CHECK(std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)) <
                    1e-10 * scale);
            }
      ++points;
    }
  }
  CHECK(points >= 100);
}

TEST_CASE("sectional curvature of model spaces and products") {
  oracle::Rng rng(5);
  for (double c : {0.5, 1.0, 2.0}) {
    const MetricChart sph = model_germ(ModelSpace::sphere, c, 4).chart;
    const MetricChart hyp = model_germ(ModelSpace::hyperbolic, c, 2).chart;
    for (int t = 0; t < 5; ++t) {
      const ChartPoint q{0.1 * rng.vec(4)};
      const Plane2 ps = make_plane(sph, q, rng.vec(4), rng.vec(4));
      CHECK(sectional(sph, ps) == doctest::Approx(c).epsilon(1e-9));
      const ChartPoint q2{0.1 * rng.vec(2)};
      const Plane2 ph = make_plane(hyp, q2, rng.vec(2), rng.vec(2));
      CHECK(sectional(hyp, ph) == doctest::Approx(-c).epsilon(1e-9));
    }
  }
  const MetricChart prod = build_chart(parse_space("product:s2xs2"));
  const ChartPoint q{0.1, 0.2, 0.1, 0.3};
  Eigen::VectorXd u = Eigen::VectorXd::Zero(4), w = Eigen::VectorXd::Zero(4);
  u[0] = 1.0;
  w[1] = 1.0;
  CHECK(sectional(prod, make_plane(prod, q, u, w)) == doctest::Approx(1.0));
  Eigen::VectorXd mixed = Eigen::VectorXd::Zero(4);
  mixed[2] = 1.0;
  CHECK(sectional(prod, make_plane(prod, q, u, mixed)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sectional curvature is basis independent") {
  const MetricChart prod = build_chart(parse_space("product:s2xs2"));
  const ChartPoint q{0.05, -0.1, 0.2, 0.15};
  const PointCurvature pc(prod, q);
  oracle::Rng rng(9);
  const Eigen::VectorXd u0 = rng.vec(4), w0 = rng.vec(4);
  auto [u, w] = pc.orthonormalize(u0, w0);
  const double k0 = pc.k_orthonormal(u, w);
  for (int t = 0; t < 20; ++t) {
    // rotate the orthonormal frame inside the plane
    const double a = 0.1 + 1.2 * rng.next01();
    const Eigen::VectorXd u2 = std::cos(a) * u + std::sin(a) * w;
    const Eigen::VectorXd w2 = -std::sin(a) * u + std::cos(a) * w;
    CHECK(std::abs(pc.k_orthonormal(u2, w2) - k0) < 1e-10);
    CHECK(std::abs(pc.plane_curvature(u2, w) - k0) < 1e-10);
  }
  // same plane expressed through a different spanning pair
  const Eigen::VectorXd a1 = 0.7 * u0 + 0.2 * w0, a2 = -1.1 * u0 + 0.4 * w0;
  CHECK(std::abs(pc.plane_curvature(a1, a2) - k0) < 1e-10);
}

TEST_CASE("gradient: euclidean closed form, critical at germ bases, radial on spheres") {
  const auto euc = model_germ(ModelSpace::euclidean, 1.0, 2);
  const ChartPoint q{0.4, -1.2};
  const Eigen::VectorXd g = gradient(euc.chart, euc.germ, q).comps;
  CHECK(g[0] == doctest::Approx(0.8));
  CHECK(g[1] == doctest::Approx(-2.4));

  for (ModelSpace ms : {ModelSpace::euclidean, ModelSpace::sphere, ModelSpace::hyperbolic}) {
    const auto mg = model_germ(ms, 1.3, 3);
    CHECK(metric_norm(mg.chart, mg.germ.base,
                      gradient(mg.chart, mg.germ, mg.germ.base).comps) < 1e-12);
  }

  // sphere germ gradient is radial: follow the geodesic it points along and
  // land at the base
  const auto sph = model_germ(ModelSpace::sphere, 1.0, 2);
  const ChartPoint q2{0.25, 0.1};
  Eigen::VectorXd dir = gradient(sph.chart, sph.germ, q2).comps;
  const double cross = dir[0] * q2.coords[1] - dir[1] * q2.coords[0];
  CHECK(std::abs(cross) < 1e-12);       // collinear with the radial line
  CHECK(dir.dot(q2.coords) < 0.0);      // points toward the maximum at the base
  Eigen::VectorXd x = q2.coords, v = dir / metric_norm(sph.chart, q2, dir);
  double traveled = 0.0;
  bool reached = false;
  for (int step = 0; step < 4000 && !reached; ++step) {
    oracle::geodesic_step(sph.chart, x, v, 1e-3);
    traveled += 1e-3;
    reached = x.norm() < 2e-3;
  }
  CHECK(reached);
  // and the arc length traveled matches the quadrature distance oracle
  // (up to the stopping band around the origin)
  const double want = oracle::radial_distance(
      [](double r) { return 2.0 / (1.0 + r * r); }, q2.coords.norm());
  CHECK(traveled == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("covariant hessian: model identities and symmetry") {
  const auto euc = model_germ(ModelSpace::euclidean, 1.0, 3);
  const ChartPoint q{0.3, 0.4, -0.2};
  const Eigen::MatrixXd h = covariant_hessian(euc.chart, euc.germ, q);
  CHECK((h - 2.0 * euc.chart.metric_value(q)).norm() < 1e-13);

  for (double c : {0.5, 2.0}) {
    const auto sph = model_germ(ModelSpace::sphere, c, 3);
    const auto hyp = model_germ(ModelSpace::hyperbolic, c, 3);
    oracle::Rng rng(13);
    for (int t = 0; t < 10; ++t) {
      const ChartPoint p{0.15 * rng.vec(3)};
      const double fs = eval_field(sph.germ.f, p, 0).value();
      const Eigen::MatrixXd hs = covariant_hessian(sph.chart, sph.germ, p);
      CHECK((hs + c * fs * sph.chart.metric_value(p)).norm() < 1e-9);
      const double fh = eval_field(hyp.germ.f, p, 0).value();
      const Eigen::MatrixXd hh = covariant_hessian(hyp.chart, hyp.germ, p);
      CHECK((hh - c * fh * hyp.chart.metric_value(p)).norm() < 1e-9);
      CHECK((hs - hs.transpose()).norm() < 1e-13);
    }
  }
}

TEST_CASE("third covariant derivative: flat vanishing and bilinearity") {
  const auto euc = model_germ(ModelSpace::euclidean, 1.0, 3);
  const ChartPoint q{0.2, -0.5, 0.7};
  oracle::Rng rng(17);
  const TangentVector Z{q, rng.vec(3)}, X{q, rng.vec(3)};
  CHECK(third_covariant(euc.chart, euc.germ, q, Z, X).comps.norm() < 1e-14);

  const auto sph = model_germ(ModelSpace::sphere, 1.0, 3);
  const GermSpec poly = polynomial_germ(3, 99, false);
  const ChartPoint p{0.11, 0.21, -0.08};
  const TangentVector A{p, rng.vec(3)}, B{p, rng.vec(3)}, C{p, rng.vec(3)};
  const double s1 = 0.7, s2 = -1.3;
  const TangentVector AB{p, s1 * A.comps + s2 * B.comps};
  const Eigen::VectorXd left = third_covariant(sph.chart, poly, p, AB, C).comps;
  const Eigen::VectorXd right = s1 * third_covariant(sph.chart, poly, p, A, C).comps +
                                s2 * third_covariant(sph.chart, poly, p, B, C).comps;
  CHECK((left - right).norm() < 1e-11);
  const Eigen::VectorXd left2 = third_covariant(sph.chart, poly, p, C, AB).comps;
  const Eigen::VectorXd right2 = s1 * third_covariant(sph.chart, poly, p, C, A).comps +
                                 s2 * third_covariant(sph.chart, poly, p, C, B).comps;
  CHECK((left2 - right2).norm() < 1e-11);
}

TEST_CASE("ricci identity residual stays below 1e-8 across the catalog") {
  oracle::Rng rng(23);
  int count = 0;
  for (const auto& [chart, radius] : sample_charts()) {
    const int n = chart.dim();
    const GermSpec germ = polynomial_germ(n, 1000 + n, false);
    for (int t = 0; t < 17; ++t) {
      const ChartPoint q{radius * rng.vec(n)};
      if (!chart.in_domain(q)) continue;
      Eigen::VectorXd z = rng.vec(n), x = rng.vec(n);
      const TangentVector Z{q, z / metric_norm(chart, q, z)};
      const TangentVector X{q, x / metric_norm(chart, q, x)};
      CHECK(ricci_identity_residual(chart, germ, q, Z, X) < 1e-8);
      ++count;
    }
  }
  CHECK(count >= 100);
}

TEST_CASE("euclidean polynomial germs have exactly commuting third derivatives") {
  const auto euc = model_germ(ModelSpace::euclidean, 1.0, 2);
  const GermSpec poly = polynomial_germ(2, 5, false);
  const ChartPoint q{0.4, 0.6};
  const TangentVector Z{q, Eigen::Vector2d(1.0, 2.0)};
  const TangentVector X{q, Eigen::Vector2d(-0.5, 0.3)};
  CHECK(ricci_identity_residual(euc.chart, poly, q, Z, X) < 1e-13);
}

TEST_CASE("domain guards and degenerate planes raise the documented errors") {
  const MetricChart polar = polar_plane();
  CHECK_THROWS_AS(christoffel(polar, ChartPoint{0.01, 0.0}), chart_domain_error);

  // nearly singular metric within the guard: condition blows past 1e12
  std::vector<ScalarField> upper = {
      [](std::span<const TaylorScalar> x) { return jet_like(1.0, x); },
      [](std::span<const TaylorScalar> x) { return jet_like(0.0, x); },
      [](std::span<const TaylorScalar> x) { return x[0] * x[0]; }};
  const MetricChart bad(2, "unguarded_polar", std::move(upper));
  CHECK_THROWS_AS(riemann(bad, ChartPoint{1e-9, 0.0}), chart_domain_error);

  const MetricChart euc = model_germ(ModelSpace::euclidean, 1.0, 2).chart;
  const ChartPoint q{0.0, 0.0};
  CHECK_THROWS_AS(
      make_plane(euc, q, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(2.0, 2.0)),
      std::invalid_argument);
  const auto hyp = model_germ(ModelSpace::hyperbolic, 1.0, 2);
  CHECK_THROWS_AS(gradient(hyp.chart, hyp.germ, ChartPoint{1.2, 0.0}),
                  chart_domain_error);
}
