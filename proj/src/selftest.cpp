#include "cmgkit/selftest.hpp"

#include <cmath>
#include <sstream>

#include "cmgkit/catalog.hpp"
#include "cmgkit/index.hpp"
#include "cmgkit/probes.hpp"
#include "cmgkit/sampling.hpp"

namespace cmg {

namespace {

struct MetricGermCase {
  MetricChart chart;
  GermSpec germ;
  double point_radius;  // sampling radius for off-base points
};

std::vector<MetricGermCase> tuple_catalog() {
  std::vector<MetricGermCase> cases;
  {
    auto mg = model_germ(ModelSpace::euclidean, 1.0, 3);
    cases.push_back({mg.chart, polynomial_germ(3, 11, false), 0.3});
  }
  {
    auto mg = model_germ(ModelSpace::sphere, 1.0, 3);
    cases.push_back({mg.chart, mg.germ, 0.15});
  }
  {
    auto mg = model_germ(ModelSpace::sphere, 0.5, 4);
    cases.push_back({mg.chart, polynomial_germ(4, 23, false), 0.2});
  }
  {
    auto mg = model_germ(ModelSpace::hyperbolic, 1.0, 3);
    cases.push_back({mg.chart, mg.germ, 0.15});
  }
  {
    CatalogEntry rev;
    rev.kind = CatalogEntry::Kind::revolution;
    rev.phi = "cubic";
    cases.push_back({build_chart(rev), revolution_germ("cubic"), 0.25});
  }
  {
    CatalogEntry prod = parse_space("product:s2xs2");
    cases.push_back({build_chart(prod), polynomial_germ(4, 37, false), 0.2});
  }
  {
    auto base = model_germ(ModelSpace::sphere, 1.0, 3);
    cases.push_back(
        {conformal_rescale(base.chart, "gauss", 0.15), polynomial_germ(3, 41, false), 0.2});
  }
  return cases;
}

// g-unit vector obtained from a raw direction at q.
Eigen::VectorXd g_unit(const MetricChart& m, const ChartPoint& q,
                       const Eigen::VectorXd& v) {
  const double n = metric_norm(m, q, v);
  return v / n;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

bool SelftestReport::pass() const {
  for (const auto& s : statements)
    if (!s.pass) return false;
  return true;
}

nlohmann::json SelftestReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : statements) {
    arr.push_back({{"statement", s.key},
                   {"pass", s.pass},
                   {"worst", s.worst},
                   {"tolerance", s.tolerance},
                   {"detail", s.detail}});
  }
  return {{"statements", arr}, {"pass", pass()}};
}

SelftestReport run_selftest(int threads) {
  SelftestReport report;
  auto add = [&](const std::string& key, double worst, double tol,
                 const std::string& detail) {
    report.statements.push_back({key, worst <= tol, worst, tol, detail});
  };
  auto add_flag = [&](const std::string& key, bool ok, const std::string& detail) {
    report.statements.push_back({key, ok, ok ? 0.0 : 1.0, 0.5, detail});
  };

  const auto cases = tuple_catalog();

  // --- curvature tensor symmetries and first Bianchi identity ---
  {
    double worst = 0.0;
    int points = 0;
    for (const auto& c : cases) {
      for (const auto& d : ball_points(c.chart.dim(), 15, c.point_radius, 5)) {
        const ChartPoint q{c.germ.base.coords + d};
        if (!c.chart.in_domain(q)) continue;
        const Tensor4 R = riemann(c.chart, q);
        const int n = c.chart.dim();
        double scale = 0.0, res = 0.0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l) scale = std::max(scale, std::abs(R(i, j, k, l)));
        scale = std::max(scale, 1.0);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
              for (int l = 0; l < n; ++l) {
                res = std::max(res, std::abs(R(i, j, k, l) + R(j, i, k, l)));
                res = std::max(res, std::abs(R(i, j, k, l) + R(i, j, l, k)));
                res = std::max(res, std::abs(R(i, j, k, l) - R(k, l, i, j)));
                res = std::max(res,
                               std::abs(R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l)));
              }
            }
          }
        }
        worst = std::max(worst, res / scale);
        ++points;
      }
    }
    add("riemann-symmetries", worst, 1e-10,
        "antisymmetry, pair symmetry, first Bianchi at " + std::to_string(points) +
            " catalog points");
  }

  // --- commutation of third covariant derivatives against the curvature ---
  {
    double worst = 0.0;
    int count = 0;
    std::size_t ci = 0;
    while (count < 100) {
      const auto& c = cases[ci % cases.size()];
      const int n = c.chart.dim();
      const auto pts = ball_points(n, 1, c.point_radius, 100 + count);
      const ChartPoint q{c.germ.base.coords + pts[0]};
      ++ci;
      if (!c.chart.in_domain(q)) continue;
      const auto dirs = sphere_directions(n, 2, 200 + count);
      const TangentVector Z{q, g_unit(c.chart, q, dirs[0])};
      const TangentVector X{q, g_unit(c.chart, q, dirs[1])};
      worst = std::max(worst, ricci_identity_residual(c.chart, c.germ, q, Z, X));
      ++count;
    }
    add("covariant-derivative-commutation", worst, 1e-8,
        "100 (metric, germ, point, Z, X) tuples across the catalog");
  }

  // --- conformal Morse germ verdicts (definition + sign flip) ---
  {
    bool ok = true;
    std::string detail;
    for (double c : {0.5, 1.0, 2.0}) {
      for (int n : {2, 3}) {
        for (ModelSpace ms :
             {ModelSpace::euclidean, ModelSpace::sphere, ModelSpace::hyperbolic}) {
          auto mg = model_germ(ms, c, n);
          const CmgVerdict v = verify_cmg(mg.chart, mg.germ, {.threads = threads});
          GermSpec neg = mg.germ;
          ScalarField pos_f = mg.germ.f;
          neg.f = [pos_f](std::span<const TaylorScalar> x) { return -pos_f(x); };
          const CmgVerdict vn = verify_cmg(mg.chart, neg, {.threads = threads});
          const bool case_ok = v.is_cmg && vn.is_cmg &&
                               v.morse_index + vn.morse_index == n &&
                               std::abs(v.h_at_p + vn.h_at_p) < 1e-9;
          if (!case_ok && ok) {
            ok = false;
            detail = "first failure: " + mg.chart.name() + " c=" + fmt(c) +
                     " n=" + std::to_string(n);
          }
        }
      }
    }
    const CmgVerdict saddle =
        verify_cmg(model_germ(ModelSpace::euclidean, 1.0, 2).chart, saddle_germ_2d());
    if (saddle.is_cmg || saddle.morse_index != 1) {
      ok = false;
      detail = "saddle was not rejected";
    }
    add_flag("cmg-definition", ok,
             detail.empty() ? "model germs accepted (both signs), saddle rejected"
                            : detail);
  }

  // --- model-germ Hessian identities ---
  {
    double worst = 0.0;
    for (double c : {0.5, 1.0, 2.0}) {
      for (int n : {2, 3, 4}) {
        for (ModelSpace ms :
             {ModelSpace::euclidean, ModelSpace::sphere, ModelSpace::hyperbolic}) {
          auto mg = model_germ(ms, c, n);
          const NeighborhoodSpec spec{.threads = threads};
          for (double rel : spec.shell_radii) {
            const double r = rel * mg.chart.chart_scale();
            for (const auto& dir : sphere_directions(n, spec.points_per_shell, 9)) {
              const ChartPoint q{mg.germ.base.coords + r * dir};
              if (!mg.chart.in_domain(q)) continue;
              const double fq = eval_field(mg.germ.f, q, 0).value();
              double h = 0.0;
              if (ms == ModelSpace::euclidean) h = 2.0;
              if (ms == ModelSpace::sphere) h = -c * fq;
              if (ms == ModelSpace::hyperbolic) h = c * fq;
              worst = std::max(worst, defect_against_factor(mg.chart, mg.germ, q, h));
            }
          }
        }
      }
    }
    add("model-germ-identities", worst, 1e-9,
        "|hessian - h g| for h = 2, -c f, c f over c in {0.5,1,2}, n in {2,3,4}");
  }

  // --- index parity table and metric independence ---
  {
    bool ok = true;
    std::string detail = "(-1)^k over n in {2,3}, k in {0..n}; conformal rescalings";
    for (int n : {2, 3}) {
      auto euc = model_germ(ModelSpace::euclidean, 1.0, n).chart;
      for (int k = 0; k <= n; ++k) {
        const GermSpec germ = morse_quadratic_germ(n, k);
        const IndexResult r = index_of_gradient(euc, germ, 0.1);
        const int expected = k % 2 == 0 ? 1 : -1;
        if (r.index != expected) {
          ok = false;
          detail = "parity failed at n=" + std::to_string(n) + " k=" + std::to_string(k);
        }
      }
    }
    // index is metric-independent: rescale and re-run the saddle
    for (int i = 0; i < 5 && ok; ++i) {
      auto euc = model_germ(ModelSpace::euclidean, 1.0, 2).chart;
      const std::string bumps[] = {"gauss", "linear", "quad", "gauss", "linear"};
      const double eps[] = {0.3, 0.4, -0.25, -0.35, 0.2};
      const MetricChart rescaled = conformal_rescale(euc, bumps[i], eps[i]);
      const IndexResult r = index_of_gradient(rescaled, saddle_germ_2d(), 0.1);
      if (r.index != -1) {
        ok = false;
        detail = "saddle index changed under conformal rescaling " + bumps[i];
      }
    }
    add_flag("index-parity", ok, detail);
  }

  // --- direction attainment ---
  {
    double worst = 0.0;
    const std::vector<double> radii = {0.1, 0.01, 0.001};
    auto run_germ = [&](const MetricChart& chart, const GermSpec& germ, int n_dirs) {
      const auto vs = sphere_directions(chart.dim(), n_dirs, 17);
      const auto res = direction_attainment_many(chart, germ, vs, radii, 1e-3);
      for (const auto& row : res)
        for (const auto& a : row) worst = std::max(worst, a.angle);
    };
    run_germ(model_germ(ModelSpace::euclidean, 1.0, 2).chart, saddle_germ_2d(), 25);
    for (ModelSpace ms :
         {ModelSpace::euclidean, ModelSpace::sphere, ModelSpace::hyperbolic}) {
      auto mg = model_germ(ms, 1.0, 2);
      run_germ(mg.chart, mg.germ, 25);
    }
    add("gradient-direction-density", worst, 1e-3,
        "gradient directions reach 25 targets per germ at radii 0.1/0.01/0.001");
  }

  // --- curvature from the third covariant derivative (any germ) ---
  {
    double worst = 0.0;
    int count = 0;
    std::size_t ci = 0;
    unsigned long long salt = 0;
    while (count < 50) {
      const auto& c = cases[ci % cases.size()];
      ++ci;
      ++salt;
      const int n = c.chart.dim();
      const ChartPoint q{c.germ.base.coords +
                         ball_points(n, 1, c.point_radius, 300 + salt)[0]};
      if (!c.chart.in_domain(q)) continue;
      Eigen::VectorXd grad = gradient(c.chart, c.germ, q).comps;
      if (metric_norm(c.chart, q, grad) < 1e-4) continue;
      const Eigen::VectorXd zr = sphere_directions(n, 1, 400 + salt)[0];
      const TangentVector z{q, zr};
      double k3;
      try {
        k3 = curvature_via_third_derivative(c.chart, c.germ, q, z);
      } catch (const std::invalid_argument&) {
        continue;  // z parallel to the gradient
      }
      const Plane2 plane = make_plane(c.chart, q, grad, zr);
      worst = std::max(worst, std::abs(k3 - sectional(c.chart, plane)));
      ++count;
    }
    add("curvature-from-third-derivative", worst, 1e-7,
        "matches the curvature-tensor sectional value on 50 arbitrary germs");
  }

  // --- curvature from the conformal factor (CMGs only) + z-independence ---
  {
    double worst = 0.0, spread = 0.0;
    int count = 0;
    unsigned long long salt = 0;
    std::vector<ModelGerm> germs;
    for (double c : {0.5, 1.0, 2.0})
      for (int n : {3, 4}) {
        germs.push_back(model_germ(ModelSpace::sphere, c, n));
        germs.push_back(model_germ(ModelSpace::hyperbolic, c, n));
      }
    germs.push_back(model_germ(ModelSpace::euclidean, 1.0, 3));
    while (count < 50) {
      const auto& mg = germs[count % germs.size()];
      ++salt;
      const int n = mg.chart.dim();
      const double radius = 0.2 * mg.chart.chart_scale();
      const ChartPoint q{mg.germ.base.coords + ball_points(n, 1, radius, 500 + salt)[0]};
      if (!mg.chart.in_domain(q)) continue;
      const Eigen::VectorXd grad = gradient(mg.chart, mg.germ, q).comps;
      if (metric_norm(mg.chart, q, grad) < 1e-5) continue;
      const auto zs = sphere_directions(n, 8, 600 + salt);
      double kmin = std::numeric_limits<double>::infinity(), kmax = -kmin;
      double k_conf = 0.0;
      bool any = false;
      for (const auto& zr : zs) {
        try {
          const TangentVector z{q, zr};
          k_conf = curvature_via_germ(mg.chart, mg.germ, q, z);
          const double k3 = curvature_via_third_derivative(mg.chart, mg.germ, q, z);
          kmin = std::min({kmin, k3, k_conf});
          kmax = std::max({kmax, k3, k_conf});
          const Plane2 plane = make_plane(mg.chart, q, grad, zr);
          worst = std::max(worst, std::abs(k_conf - sectional(mg.chart, plane)));
          any = true;
        } catch (const std::invalid_argument&) {
          continue;
        }
      }
      if (!any) continue;
      spread = std::max(spread, kmax - kmin);
      ++count;
    }
    add("curvature-from-conformal-factor", worst, 1e-7,
        "matches the curvature-tensor sectional value on 50 conformal germs");
    add("curvature-z-independence", spread, 1e-9,
        "value spread over 8 admissible z per case, both formulas");
  }

  // --- 2d: germ base is a critical point of the curvature ---
  {
    CatalogEntry rev;
    rev.kind = CatalogEntry::Kind::revolution;
    rev.phi = "cubic";
    const MetricChart chart = build_chart(rev);
    const GermSpec germ = revolution_germ("cubic");
    const double at_base =
        metric_norm(chart, germ.base, curvature_gradient(chart, germ.base).comps);
    double oracle_err = 0.0;
    for (double r : {0.1, 0.3}) {
      const ChartPoint q{Eigen::Vector2d(r, 0.0)};
      const double got = metric_norm(chart, q, curvature_gradient(chart, q).comps);
      const double expected = 12.0 * r / ((1.0 + r * r) * (1.0 + r * r));
      oracle_err = std::max(oracle_err, std::abs(got - expected));
    }
    add("curvature-critical-point-2d", at_base, 1e-6,
        "revolution r+r^3: |grad K| vanishes at the germ base");
    add("curvature-gradient-oracle-2d", oracle_err, 1e-5,
        "|grad K| matches 12r/(1+r^2)^2 at r = 0.1, 0.3");
  }

  // --- 2d gradient identities ---
  {
    double worst = 0.0;
    std::vector<std::pair<MetricChart, GermSpec>> two_d;
    for (ModelSpace ms : {ModelSpace::sphere, ModelSpace::hyperbolic}) {
      auto mg = model_germ(ms, 1.0, 2);
      two_d.push_back({mg.chart, mg.germ});
    }
    {
      CatalogEntry rev;
      rev.kind = CatalogEntry::Kind::revolution;
      rev.phi = "cubic";
      two_d.push_back({build_chart(rev), revolution_germ("cubic")});
    }
    for (const auto& [chart, germ] : two_d) {
      int done = 0;
      unsigned long long salt = 0;
      while (done < 34) {
        ++salt;
        const double radius = 0.25 * chart.chart_scale();
        const ChartPoint q{germ.base.coords + ball_points(2, 1, radius, 700 + salt)[0]};
        if (!chart.in_domain(q)) continue;
        if (metric_norm(chart, q, gradient(chart, germ, q).comps) < 1e-4) continue;
        const auto [r1, r2] = two_dim_identities(chart, germ, q);
        worst = std::max({worst, r1, r2});
        ++done;
      }
    }
    add("two-dim-gradient-identities", worst, 1e-7,
        "grad h = -K grad f and grad K parallel to grad f on 2d conformal germs");
  }

  // --- pointwise constancy at the germ base; product control case ---
  {
    double worst = 0.0;
    OscBudget budget{.threads = threads};
    for (int n : {3, 4}) {
      auto euc = model_germ(ModelSpace::euclidean, 1.0, n);
      worst = std::max(worst, osc_k(euc.chart, euc.germ.base, budget).osc);
      for (double c : {0.5, 1.0, 2.0}) {
        for (ModelSpace ms : {ModelSpace::sphere, ModelSpace::hyperbolic}) {
          auto mg = model_germ(ms, c, n);
          worst = std::max(worst, osc_k(mg.chart, mg.germ.base, budget).osc);
        }
      }
    }
    add("pointwise-constancy", worst, 1e-6,
        "curvature oscillation at conformal-germ bases, n in {3,4}");

    const MetricChart prod = build_chart(parse_space("product:s2xs2"));
    const ChartPoint p{Eigen::VectorXd::Zero(4)};
    const CurvatureReport rep = osc_k(prod, p, budget);
    add("curvature-oscillation", std::abs(rep.osc - 1.0), 1e-6,
        "sphere-product control case has oscillation 1 (max " + fmt(rep.k_max) +
            ", min " + fmt(rep.k_min) + ")");
  }

  // --- constant-curvature region scan ---
  {
    bool ok = true;
    std::string detail = "constant on models, witnesses on product and perturbation";
    auto scan_entry = [&](const CatalogEntry& e, bool expect_constant,
                          std::optional<double> nominal) {
      const std::string label = e.describe();
      const MetricChart chart = build_chart(e);
      RegionSpec region;
      region.center = ChartPoint{Eigen::VectorXd::Zero(chart.dim())};
      region.threads = threads;
      const SchurScanResult r = schur_scan(chart, region);
      if (r.constant != expect_constant) {
        ok = false;
        detail = label + (expect_constant ? " not constant" : " not flagged");
        return;
      }
      if (expect_constant && nominal && std::abs(r.c_mean - *nominal) > 1e-6) {
        ok = false;
        detail =
            label + " constant value off nominal by " + fmt(std::abs(r.c_mean - *nominal));
      }
      if (!expect_constant && r.witness) {
        // a witness must reproduce its extrema through the sectional op
        const CurvatureReport& w = r.witness->report;
        const double k1 = sectional(chart, w.argmax_plane);
        const double k2 = sectional(chart, w.argmin_plane);
        if (std::abs(k1 - w.k_max) > 1e-10 || std::abs(k2 - w.k_min) > 1e-10) {
          ok = false;
          detail = label + " witness planes do not reproduce the extrema";
        }
      }
    };
    CatalogEntry e3;
    e3.kind = CatalogEntry::Kind::euclidean;
    e3.n = 3;
    scan_entry(e3, true, 0.0);
    CatalogEntry s3;
    s3.kind = CatalogEntry::Kind::sphere;
    s3.n = 3;
    scan_entry(s3, true, 1.0);
    CatalogEntry h3;
    h3.kind = CatalogEntry::Kind::hyperbolic;
    h3.n = 3;
    scan_entry(h3, true, -1.0);
    scan_entry(parse_space("product:s2xr"), false, std::nullopt);
    CatalogEntry ps;
    ps.kind = CatalogEntry::Kind::conformal_perturbation;
    ps.children.push_back(s3);
    ps.eps = 0.1;
    scan_entry(ps, false, std::nullopt);
    add_flag("constant-curvature-scan", ok, detail);
  }

  // --- quasiconformal sweep endpoint ---
  {
    GermFamily family;
    family.label = "sphere_offgauss";
    family.member = [](double eps) {
      auto mg = model_germ(ModelSpace::sphere, 1.0, 3);
      if (eps == 0.0) return std::make_pair(mg.chart, mg.germ);
      return std::make_pair(conformal_rescale(mg.chart, "offgauss", eps), mg.germ);
    };
    const std::vector<double> grid = {0.0, 0.05, 0.1, 0.2};
    NeighborhoodSpec sampling{.threads = threads};
    OscBudget budget{.threads = threads};
    const auto rows = quasiconformal_sweep(family, grid, sampling, budget);
    bool positive = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
      positive = positive && rows[i].kappa_proxy - 1.0 > 1e-9 && rows[i].osc > 1e-9;
    add("quasiconformal-endpoint-kappa", rows[0].kappa_proxy - 1.0, 1e-7,
        "kappa proxy reaches 1 at the conformal endpoint");
    add("quasiconformal-endpoint-osc", rows[0].osc, 1e-6,
        "curvature oscillation vanishes at the conformal endpoint");
    add_flag("quasiconformal-deviation", positive,
             "every deformed row shows positive defect and oscillation");
  }

  return report;
}

}  // namespace cmg
