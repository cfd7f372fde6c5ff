// Acceptance suite: every contract the toolkit ships with, one pass/fail
// line each, with pinned tolerances and runtime budgets.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "cmgkit/catalog.hpp"
#include "cmgkit/index.hpp"
#include "cmgkit/probes.hpp"
#include "cmgkit/sampling.hpp"
#include "cmgkit/selftest.hpp"
#include "support/oracles.hpp"

using namespace cmg;

namespace {

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void line(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] C%02d %-34s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  if (!pass) ++failures;
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

// C1: model-germ Hessian identities with the closed-form factors.
void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int samples = 0;
  for (double c : {0.5, 1.0, 2.0}) {
    for (int n : {2, 3, 4}) {
      for (ModelSpace ms :
           {ModelSpace::euclidean, ModelSpace::sphere, ModelSpace::hyperbolic}) {
        const auto mg = model_germ(ms, c, n);
        int used = 0;
        unsigned long long stream = 0;
        for (double rel : {0.05, 0.1, 0.2}) {
          const double r = rel * mg.chart.chart_scale();
          for (const auto& dir : sphere_directions(n, 64, stream)) {
            const ChartPoint q{mg.germ.base.coords + r * dir};
            if (!mg.chart.in_domain(q)) continue;
            const double f = eval_field(mg.germ.f, q, 0).value();
            const double h = ms == ModelSpace::euclidean ? 2.0
                             : ms == ModelSpace::sphere  ? -c * f
                                                         : c * f;
            worst = std::max(worst, defect_against_factor(mg.chart, mg.germ, q, h));
            ++used;
          }
          ++stream;
        }
        samples = used;
      }
    }
  }
  const double secs = seconds_since(t0);
  line(1, "model-germ-identities", worst <= 1e-9 && secs < 10.0,
       "worst defect " + num(worst) + " tol 1e-9 over " + std::to_string(samples) +
           " samples/germ, " + num(secs) + " s (< 10)");
}

// C2: commutation of third covariant derivatives against the curvature tensor.
void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Case {
    MetricChart chart;
    GermSpec germ;
    double radius;
  };
  std::vector<Case> cases;
  cases.push_back({model_germ(ModelSpace::euclidean, 1.0, 3).chart,
                   polynomial_germ(3, 11, false), 0.3});
  {
    auto mg = model_germ(ModelSpace::sphere, 1.0, 3);
    cases.push_back({mg.chart, mg.germ, 0.15});
  }
  {
    auto mg = model_germ(ModelSpace::sphere, 0.5, 4);
    cases.push_back({mg.chart, polynomial_germ(4, 23, false), 0.2});
  }
  {
    auto mg = model_germ(ModelSpace::hyperbolic, 2.0, 3);
    cases.push_back({mg.chart, mg.germ, 0.1});
  }
  {
    CatalogEntry rev;
    rev.kind = CatalogEntry::Kind::revolution;
    rev.phi = "cubic";
    cases.push_back({build_chart(rev), revolution_germ("cubic"), 0.25});
  }
  {
    CatalogEntry rev;
    rev.kind = CatalogEntry::Kind::revolution;
    rev.phi = "sin";
    cases.push_back({build_chart(rev), revolution_germ("sin"), 0.25});
  }
  cases.push_back({build_chart(parse_space("product:s2xs2")),
                   polynomial_germ(4, 37, false), 0.2});
  {
    auto base = model_germ(ModelSpace::sphere, 1.0, 3);
    cases.push_back({conformal_rescale(base.chart, "offgauss", 0.15),
                     polynomial_germ(3, 41, false), 0.2});
  }

  double worst = 0.0;
  int count = 0;
  std::size_t ci = 0;
  unsigned long long salt = 0;
  while (count < 100) {
    const auto& c = cases[ci++ % cases.size()];
    ++salt;
    const int n = c.chart.dim();
    const ChartPoint q{c.germ.base.coords + ball_points(n, 1, c.radius, 900 + salt)[0]};
    if (!c.chart.in_domain(q)) continue;
    const auto dirs = sphere_directions(n, 2, 950 + salt);
    Eigen::VectorXd z = dirs[0], x = dirs[1];
    const TangentVector Z{q, z / metric_norm(c.chart, q, z)};
    const TangentVector X{q, x / metric_norm(c.chart, q, x)};
    worst = std::max(worst, ricci_identity_residual(c.chart, c.germ, q, Z, X));
    ++count;
  }
  const double secs = seconds_since(t0);
  line(2, "ricci-curvature-identity", worst <= 1e-8 && secs < 30.0,
       "worst residual " + num(worst) + " tol 1e-8 over 100 tuples, " + num(secs) +
           " s (< 30)");
}

// C3: the two curvature-from-germ formulas against the curvature tensor.
void criterion3() {
  double worst_any = 0.0;
  int count = 0;
  unsigned long long salt = 0;
  const auto sph = model_germ(ModelSpace::sphere, 1.0, 3);
  const auto hyp = model_germ(ModelSpace::hyperbolic, 1.0, 3);
  while (count < 50) {
    ++salt;
    const auto& chart = (count % 2 == 0) ? sph.chart : hyp.chart;
    const GermSpec germ = polynomial_germ(3, 2000 + salt, false);
    const ChartPoint q{ball_points(3, 1, 0.15, 1000 + salt)[0]};
    if (!chart.in_domain(q)) continue;
    const Eigen::VectorXd grad = gradient(chart, germ, q).comps;
    if (metric_norm(chart, q, grad) < 1e-3) continue;
    const Eigen::VectorXd zc = sphere_directions(3, 1, 1050 + salt)[0];
    double k3;
    try {
      k3 = curvature_via_third_derivative(chart, germ, q, TangentVector{q, zc});
    } catch (const std::invalid_argument&) {
      continue;
    }
    const double ks = sectional(chart, make_plane(chart, q, grad, zc));
    worst_any = std::max(worst_any, std::abs(k3 - ks));
    ++count;
  }

  std::vector<ModelGerm> germs;
  for (double c : {0.5, 1.0, 2.0})
    for (int n : {3, 4}) {
      germs.push_back(model_germ(ModelSpace::sphere, c, n));
      germs.push_back(model_germ(ModelSpace::hyperbolic, c, n));
    }
  bool all_verified = true;
  for (const auto& mg : germs)
    all_verified = all_verified && verify_cmg(mg.chart, mg.germ).is_cmg;

  double worst_conf = 0.0, spread = 0.0;
  count = 0;
  salt = 0;
  while (count < 50) {
    const auto& mg = germs[count % germs.size()];
    ++salt;
    const int n = mg.chart.dim();
    const ChartPoint q{ball_points(n, 1, 0.2 * mg.chart.chart_scale(), 1100 + salt)[0]};
    if (!mg.chart.in_domain(q)) continue;
    const Eigen::VectorXd grad = gradient(mg.chart, mg.germ, q).comps;
    if (metric_norm(mg.chart, q, grad) < 1e-5) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    bool any = false;
    for (const auto& zc : sphere_directions(n, 8, 1200 + salt)) {
      try {
        const TangentVector z{q, zc};
        const double kc = curvature_via_germ(mg.chart, mg.germ, q, z);
        const double k3 = curvature_via_third_derivative(mg.chart, mg.germ, q, z);
        const double ks = sectional(mg.chart, make_plane(mg.chart, q, grad, zc));
        worst_conf = std::max(worst_conf, std::abs(kc - ks));
        lo = std::min({lo, kc, k3});
        hi = std::max({hi, kc, k3});
        any = true;
      } catch (const std::invalid_argument&) {
      }
    }
    if (!any) continue;
    spread = std::max(spread, hi - lo);
    ++count;
  }
  line(3, "curvature-formula-equivalence",
       worst_any <= 1e-7 && worst_conf <= 1e-7 && spread <= 1e-9 && all_verified,
       "arbitrary " + num(worst_any) + " (tol 1e-7), conformal " + num(worst_conf) +
           " (tol 1e-7), z-spread " + num(spread) + " (tol 1e-9)");
}

// C4: pointwise constancy at germ bases; product control case.
void criterion4() {
  double worst = 0.0;
  for (int n : {3, 4}) {
    const auto euc = model_germ(ModelSpace::euclidean, 1.0, n);
    worst = std::max(worst, osc_k(euc.chart, euc.germ.base).osc);
    for (double c : {0.5, 1.0, 2.0}) {
      for (ModelSpace ms : {ModelSpace::sphere, ModelSpace::hyperbolic}) {
        const auto mg = model_germ(ms, c, n);
        worst = std::max(worst, osc_k(mg.chart, mg.germ.base).osc);
      }
    }
  }
  const MetricChart prod = build_chart(parse_space("product:s2xs2"));
  const CurvatureReport control = osc_k(prod, ChartPoint{0.0, 0.0, 0.0, 0.0});
  const double control_err = std::abs(control.osc - 1.0);
  line(4, "pointwise-constancy-at-base", worst <= 1e-6 && control_err <= 1e-6,
       "worst germ-base osc " + num(worst) + " (tol 1e-6), control |osc-1| " +
           num(control_err));
}

// C5: the curvature gradient vanishes at the germ base of the revolution
// surface and matches the radial closed form away from it.
void criterion5() {
  CatalogEntry rev;
  rev.kind = CatalogEntry::Kind::revolution;
  rev.phi = "cubic";
  const MetricChart chart = build_chart(rev);
  const GermSpec germ = revolution_germ("cubic");
  const CmgVerdict v = verify_cmg(chart, germ);
  const double at_base =
      metric_norm(chart, germ.base, curvature_gradient(chart, germ.base).comps);
  double oracle_err = 0.0;
  for (double r : {0.1, 0.3}) {
    const ChartPoint q{Eigen::Vector2d(r, 0.0)};
    const double got = metric_norm(chart, q, curvature_gradient(chart, q).comps);
    const double want = 12.0 * r / std::pow(1.0 + r * r, 2);
    oracle_err = std::max(oracle_err, std::abs(got - want));
  }
  line(5, "curvature-critical-point-2d",
       v.is_cmg && at_base <= 1e-6 && oracle_err <= 1e-5,
       "|grad K| at base " + num(at_base) + " (tol 1e-6), off-base oracle error " +
           num(oracle_err) + " (tol 1e-5)");
}

// C6: index parity table, exact integers, metric independence.
void criterion6() {
  bool ok = true;
  std::string detail = "(-1)^k exact for n in {2,3}, k in {0..n}";
  for (int n : {2, 3}) {
    const auto euc = model_germ(ModelSpace::euclidean, 1.0, n);
    for (int k = 0; k <= n; ++k) {
      const IndexResult r = index_of_gradient(euc.chart, morse_quadratic_germ(n, k), 0.1);
      if (r.index != (k % 2 == 0 ? 1 : -1)) {
        ok = false;
        detail = "parity broke at n=" + std::to_string(n) + " k=" + std::to_string(k);
      }
    }
  }
  const char* bumps[5] = {"gauss", "offgauss", "linear", "quad", "offgauss"};
  const double eps[5] = {0.3, 0.4, -0.25, -0.35, 0.6};
  for (int i = 0; i < 5; ++i) {
    const auto euc = model_germ(ModelSpace::euclidean, 1.0, 2);
    const MetricChart rescaled = conformal_rescale(euc.chart, bumps[i], eps[i]);
    for (int k = 0; k <= 2; ++k) {
      const IndexResult r =
          index_of_gradient(rescaled, morse_quadratic_germ(2, k), 0.1);
      if (r.index != (k % 2 == 0 ? 1 : -1)) {
        ok = false;
        detail = std::string("metric dependence under rescaling ") + bumps[i];
      }
    }
  }
  line(6, "index-parity-table", ok, detail);
}

// C7: gradient directions attain every target near the base point.
void criterion7() {
  const std::vector<double> radii = {0.1, 0.01, 0.001};
  double worst = 0.0;
  auto run = [&](const MetricChart& chart, const GermSpec& germ) {
    const auto vs = sphere_directions(chart.dim(), 100, 17);
    const auto res = direction_attainment_many(chart, germ, vs, radii, 1e-3);
    for (const auto& row : res)
      for (const auto& a : row) worst = std::max(worst, a.angle);
  };
  const auto euc = model_germ(ModelSpace::euclidean, 1.0, 2);
  run(euc.chart, saddle_germ_2d());
  for (ModelSpace ms :
       {ModelSpace::euclidean, ModelSpace::sphere, ModelSpace::hyperbolic}) {
    const auto mg = model_germ(ms, 1.0, 2);
    run(mg.chart, mg.germ);
  }
  line(7, "direction-attainment", worst <= 1e-3,
       "worst angle " + num(worst) + " (tol 1e-3) over 100 targets x 4 germs x 3 radii");
}

// C8: constant-curvature scan with verified witnesses.
void criterion8() {
  bool ok = true;
  std::string detail = "constant on 3 models; witnesses on product and perturbation";
  auto scan = [&](const CatalogEntry& e, bool expect_constant, double nominal) {
    const MetricChart chart = build_chart(e);
    RegionSpec region;
    region.center = ChartPoint{Eigen::VectorXd::Zero(chart.dim())};
    const SchurScanResult r = schur_scan(chart, region);
    if (r.constant != expect_constant) {
      ok = false;
      detail = e.describe() + " wrong verdict";
      return;
    }
    if (expect_constant && std::abs(r.c_mean - nominal) > 1e-6) {
      ok = false;
      detail = e.describe() + " constant off by " + num(std::abs(r.c_mean - nominal));
    }
    if (!expect_constant) {
      if (!r.witness) {
        ok = false;
        detail = e.describe() + " missing witness";
        return;
      }
      const CurvatureReport& w = r.witness->report;
      if (std::abs(sectional(chart, w.argmax_plane) - w.k_max) > 1e-10 ||
          std::abs(sectional(chart, w.argmin_plane) - w.k_min) > 1e-10) {
        ok = false;
        detail = e.describe() + " witness failed re-verification";
      }
    }
  };
  CatalogEntry e;
  e.kind = CatalogEntry::Kind::euclidean;
  e.n = 3;
  scan(e, true, 0.0);
  e.kind = CatalogEntry::Kind::sphere;
  scan(e, true, 1.0);
  e.kind = CatalogEntry::Kind::hyperbolic;
  scan(e, true, -1.0);
  scan(parse_space("product:s2xr"), false, 0.0);
  CatalogEntry sphere3;
  sphere3.kind = CatalogEntry::Kind::sphere;
  sphere3.n = 3;
  CatalogEntry pert;
  pert.kind = CatalogEntry::Kind::conformal_perturbation;
  pert.children.push_back(sphere3);
  pert.eps = 0.1;
  scan(pert, false, 0.0);
  line(8, "schur-constancy-scan", ok, detail);
}

// C9: quasiconformal sweep endpoint.
void criterion9() {
  GermFamily family;
  family.label = "sphere_offgauss";
  family.member = [](double eps) {
    auto mg = model_germ(ModelSpace::sphere, 1.0, 3);
    if (eps == 0.0) return std::make_pair(mg.chart, mg.germ);
    return std::make_pair(conformal_rescale(mg.chart, "offgauss", eps), mg.germ);
  };
  const std::vector<double> grid = {0.0, 0.05, 0.1, 0.2};
  const auto rows = quasiconformal_sweep(family, grid);
  const double kappa0 = rows[0].kappa_proxy - 1.0;
  const double osc0 = rows[0].osc;
  bool positive = true;
  for (std::size_t i = 1; i < rows.size(); ++i)
    positive = positive && rows[i].kappa_proxy > 1.0;
  line(9, "quasiconformal-endpoint", kappa0 <= 1e-7 && osc0 <= 1e-6 && positive,
       "endpoint kappa-1 " + num(kappa0) + " (tol 1e-7), osc " + num(osc0) +
           " (tol 1e-6), deformed rows positive: " + (positive ? "yes" : "no"));
}

// C10: full selftest under the wall budget, byte-reproducible.
void criterion10() {
  const auto t0 = std::chrono::steady_clock::now();
  const SelftestReport a = run_selftest(1);
  const double secs = seconds_since(t0);
  const SelftestReport b = run_selftest(1);
  const std::string ja = a.to_json().dump(2);
  const std::string jb = b.to_json().dump(2);
  line(10, "selftest-budget-and-reproducibility",
       a.pass() && secs < 120.0 && ja == jb,
       std::string("selftest ") + (a.pass() ? "green" : "RED") + " in " + num(secs) +
           " s (< 120), reports byte-identical: " + (ja == jb ? "yes" : "no"));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d/10 criteria passed in %.1f s\n", 10 - failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
