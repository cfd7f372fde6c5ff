#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "cmgkit/catalog.hpp"
#include "cmgkit/index.hpp"
#include "cmgkit/parallel.hpp"
#include "cmgkit/probes.hpp"
#include "cmgkit/report.hpp"
#include "cmgkit/selftest.hpp"

namespace {

using nlohmann::json;

constexpr int kExitChecksFailed = 1;
constexpr int kExitParseError = 2;
constexpr int kExitDomainError = 3;

struct CommonOpts {
  std::string space = "sphere";
  std::string germ = "model";
  std::string config;
  std::string report_dir;
  int threads = cmg::default_thread_count();
  double c = -1.0;  // negative: keep the entry default
  int n = -1;
  double a = -1.0;
  double eps = -1.0;
};

cmg::CatalogEntry entry_from_json(const json& j) {
  cmg::CatalogEntry e;
  const std::string kind = j.at("kind").get<std::string>();
  using Kind = cmg::CatalogEntry::Kind;
  if (kind == "euclidean") e.kind = Kind::euclidean;
  else if (kind == "sphere") e.kind = Kind::sphere;
  else if (kind == "hyperbolic") e.kind = Kind::hyperbolic;
  else if (kind == "revolution") e.kind = Kind::revolution;
  else if (kind == "product") e.kind = Kind::product;
  else if (kind == "conformal_perturbation") e.kind = Kind::conformal_perturbation;
  else throw std::invalid_argument("config: unknown space kind '" + kind + "'");
  if (j.contains("c")) e.c = j["c"].get<double>();
  if (j.contains("n")) e.n = j["n"].get<int>();
  if (j.contains("phi")) e.phi = j["phi"].get<std::string>();
  if (j.contains("a")) e.a = j["a"].get<double>();
  if (j.contains("bump")) e.bump = j["bump"].get<std::string>();
  if (j.contains("eps")) e.eps = j["eps"].get<double>();
  if (j.contains("factors"))
    for (const auto& f : j["factors"]) e.children.push_back(entry_from_json(f));
  if (j.contains("base")) e.children.push_back(entry_from_json(j["base"]));
  return e;
}

cmg::CatalogEntry resolve_space(const CommonOpts& opts) {
  cmg::CatalogEntry entry;
  bool found = false;
  if (!opts.config.empty()) {
    std::ifstream in(opts.config);
    if (!in) throw std::invalid_argument("cannot open config file " + opts.config);
    json cfg;
    in >> cfg;
    if (cfg.contains("spaces") && cfg["spaces"].contains(opts.space)) {
      entry = entry_from_json(cfg["spaces"][opts.space]);
      found = true;
    }
  }
  if (!found) entry = cmg::parse_space(opts.space);
  // flags override scalar fields only
  if (opts.c > 0.0) entry.c = opts.c;
  if (opts.n > 0) entry.n = opts.n;
  if (opts.a > 0.0) entry.a = opts.a;
  if (opts.eps >= 0.0) entry.eps = opts.eps;
  return entry;
}

cmg::GermSpec resolve_germ(const CommonOpts& opts, const cmg::CatalogEntry& entry) {
  if (opts.germ == "model") {
    auto g = cmg::default_germ(entry);
    if (!g)
      throw std::invalid_argument("space '" + entry.describe() +
                                  "' has no companion germ; pass --germ");
    return *g;
  }
  if (opts.germ == "saddle2d") return cmg::saddle_germ_2d();
  if (opts.germ.rfind("morse:", 0) == 0) {
    const int k = std::stoi(opts.germ.substr(6));
    return cmg::morse_quadratic_germ(cmg::entry_dim(entry), k);
  }
  if (opts.germ.rfind("poly:", 0) == 0) {
    const unsigned long long seed = std::stoull(opts.germ.substr(5));
    return cmg::polynomial_germ(cmg::entry_dim(entry), seed, true);
  }
  throw std::invalid_argument("unknown germ '" + opts.germ + "'");
}

Eigen::VectorXd parse_point(const std::string& csv) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok = csv.substr(start, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - start);
    if (!tok.empty()) vals.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<long>(vals.size()));
}

json inputs_echo(const CommonOpts& opts, const cmg::CatalogEntry& entry) {
  return {{"space", opts.space},
          {"space_resolved", entry.describe()},
          {"germ", opts.germ},
          {"config", opts.config}};
}

int finish(cmg::RunReport& report, const CommonOpts& opts,
           std::chrono::steady_clock::time_point t0) {
  const auto path = cmg::write_report(report, cmg::report_directory(opts.report_dir));
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  for (const auto& c : report.checks) {
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << c.value
              << " tol=" << c.tolerance << "\n";
  }
  std::cout << "report: " << path.string() << "  (wall " << ms << " ms)\n";
  return report.pass() ? 0 : kExitChecksFailed;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_germ = true) {
  cmd->add_option("--space", opts.space, "catalog space or config entry name");
  if (with_germ) cmd->add_option("--germ", opts.germ, "model|saddle2d|morse:K|poly:SEED");
  cmd->add_option("--config", opts.config, "JSON config with named spaces");
  cmd->add_option("--report-dir", opts.report_dir,
                  "report directory (default: $CMGKIT_REPORT_DIR or .)");
  cmd->add_option("--threads", opts.threads, "worker pool size");
  cmd->add_option("--c", opts.c, "model curvature parameter");
  cmd->add_option("--n", opts.n, "model dimension");
  cmd->add_option("--a", opts.a, "cubic revolution profile coefficient");
  cmd->add_option("--eps", opts.eps, "conformal perturbation amplitude");
}

int run_verify(const CommonOpts& opts, bool expect_not_cmg) {
  const auto t0 = std::chrono::steady_clock::now();
  const cmg::CatalogEntry entry = resolve_space(opts);
  const cmg::MetricChart chart = cmg::build_chart(entry);
  const cmg::GermSpec germ = resolve_germ(opts, entry);
  cmg::NeighborhoodSpec sampling;
  sampling.threads = opts.threads;
  const cmg::CmgTolerances tols;
  const cmg::CmgVerdict v = cmg::verify_cmg(chart, germ, sampling, tols);

  cmg::RunReport report;
  report.command = "verify-cmg";
  report.inputs = inputs_echo(opts, entry);
  // the four definition criteria, each judged against its tolerance; they
  // explain the verdict rather than gate the exit code (the verdict does)
  const json criteria = {
      {{"name", "gradient-vanishes-at-base"},
       {"value", v.grad_norm_at_p},
       {"tolerance", tols.grad},
       {"satisfied", v.grad_norm_at_p <= tols.grad}},
      {{"name", "hessian-nondegenerate"},
       {"value", v.hessian_min_abs_eigenvalue},
       {"tolerance", tols.nondegenerate},
       {"satisfied", v.hessian_min_abs_eigenvalue >= tols.nondegenerate}},
      {{"name", "conformal-defect-sup"},
       {"value", v.defect_sup},
       {"tolerance", tols.conformal},
       {"satisfied", v.defect_sup <= tols.conformal}},
      {{"name", "factor-nonzero"},
       {"value", std::abs(v.h_at_p)},
       {"tolerance", tols.factor},
       {"satisfied", std::abs(v.h_at_p) >= tols.factor}}};
  report.results = {{"grad_norm_at_p", v.grad_norm_at_p},
                    {"hessian_min_abs_eigenvalue", v.hessian_min_abs_eigenvalue},
                    {"h_at_p", v.h_at_p},
                    {"defect_sup", v.defect_sup},
                    {"morse_index", v.morse_index},
                    {"is_cmg", v.is_cmg},
                    {"criteria", criteria},
                    {"samples_used", v.samples_used},
                    {"samples_skipped", v.samples_skipped},
                    {"reliable", v.reliable},
                    {"defect_definition",
                     "g-operator norm of g^{-1}(hessian - h g), h = trace_g/n"}};
  report.checks.push_back({"verdict-reliable", v.reliable,
                           static_cast<double>(v.samples_skipped), 0.5,
                           "share of skipped samples below 10%"});
  report.checks.push_back({expect_not_cmg ? "is-not-cmg" : "is-cmg",
                           v.is_cmg != expect_not_cmg, v.is_cmg ? 1.0 : 0.0, 0.5,
                           "conformal Morse germ verdict"});
  return finish(report, opts, t0);
}

int run_curvature(const CommonOpts& opts, const std::string& point_csv,
                  const std::string& z_csv) {
  const auto t0 = std::chrono::steady_clock::now();
  const cmg::CatalogEntry entry = resolve_space(opts);
  const cmg::MetricChart chart = cmg::build_chart(entry);
  const cmg::GermSpec germ = resolve_germ(opts, entry);
  const cmg::ChartPoint q{parse_point(point_csv)};
  if (q.dim() != chart.dim())
    throw std::invalid_argument("--point has wrong dimension for the space");

  Eigen::VectorXd z;
  if (!z_csv.empty()) {
    z = parse_point(z_csv);
  } else {
    const Eigen::VectorXd grad = cmg::gradient(chart, germ, q).comps;
    // deterministic direction not parallel to the gradient
    int axis = 0;
    double best = std::abs(grad.normalized()[0]);
    for (int i = 1; i < chart.dim(); ++i) {
      const double c = std::abs(grad.normalized()[i]);
      if (c < best) {
        best = c;
        axis = i;
      }
    }
    z = Eigen::VectorXd::Unit(chart.dim(), axis);
  }
  const cmg::TangentVector zv{q, z};
  const double k_conf = cmg::curvature_via_germ(chart, germ, q, zv);
  const double k_third = cmg::curvature_via_third_derivative(chart, germ, q, zv);
  const Eigen::VectorXd grad = cmg::gradient(chart, germ, q).comps;
  const cmg::Plane2 plane = cmg::make_plane(chart, q, grad, z);
  const double k_sect = cmg::sectional(chart, plane);

  cmg::RunReport report;
  report.command = "curvature";
  report.inputs = inputs_echo(opts, entry);
  report.inputs["point"] = point_csv;
  report.results = {{"sectional", k_sect},
                    {"via_conformal_factor", k_conf},
                    {"via_third_derivative", k_third}};
  report.checks.push_back({"conformal-factor-route", std::abs(k_conf - k_sect) <= 1e-7,
                           std::abs(k_conf - k_sect), 1e-7,
                           "matches the curvature-tensor value"});
  report.checks.push_back({"third-derivative-route", std::abs(k_third - k_sect) <= 1e-7,
                           std::abs(k_third - k_sect), 1e-7,
                           "matches the curvature-tensor value"});
  if (chart.dim() == 2) {
    const auto [r1, r2] = cmg::two_dim_identities(chart, germ, q);
    report.results["grad_h_residual"] = r1;
    report.results["grad_k_alignment_residual"] = r2;
    report.checks.push_back({"grad-h-identity", r1 <= 1e-7, r1, 1e-7,
                             "grad h = -K grad f"});
    report.checks.push_back({"grad-k-alignment", r2 <= 1e-7, r2, 1e-7,
                             "grad K parallel to grad f"});
  }
  return finish(report, opts, t0);
}

int run_osc(const CommonOpts& opts, const std::string& point_csv, int samples,
            double max_osc) {
  const auto t0 = std::chrono::steady_clock::now();
  const cmg::CatalogEntry entry = resolve_space(opts);
  const cmg::MetricChart chart = cmg::build_chart(entry);
  const cmg::ChartPoint p{point_csv.empty()
                              ? Eigen::VectorXd::Zero(chart.dim()).eval()
                              : parse_point(point_csv)};
  cmg::OscBudget budget;
  budget.samples = samples;
  budget.threads = opts.threads;
  const cmg::CurvatureReport rep = cmg::osc_k(chart, p, budget);

  cmg::RunReport report;
  report.command = "osc";
  report.inputs = inputs_echo(opts, entry);
  report.inputs["point"] = point_csv;
  report.results = {{"k_max", rep.k_max}, {"k_min", rep.k_min},
                    {"osc", rep.osc},     {"samples", rep.samples},
                    {"refined", rep.refined}};
  if (max_osc >= 0.0)
    report.checks.push_back(
        {"osc-below-bound", rep.osc <= max_osc, rep.osc, max_osc, ""});
  const auto dir = cmg::report_directory(opts.report_dir);
  std::filesystem::create_directories(dir);
  cmg::write_csv(dir / "osc.csv", {"id", "k_max", "k_min", "osc", "refined", "samples"},
                 {{0.0, rep.k_max, rep.k_min, rep.osc, rep.refined ? 1.0 : 0.0,
                   static_cast<double>(rep.samples)}});
  return finish(report, opts, t0);
}

int run_index(const CommonOpts& opts, double radius) {
  const auto t0 = std::chrono::steady_clock::now();
  const cmg::CatalogEntry entry = resolve_space(opts);
  const cmg::MetricChart chart = cmg::build_chart(entry);
  const cmg::GermSpec germ = resolve_germ(opts, entry);
  const double eps = radius > 0.0 ? radius : 0.1 * chart.chart_scale();
  const cmg::IndexResult r = cmg::index_of_gradient(chart, germ, eps);

  const Eigen::VectorXd mu = cmg::hessian_spectrum(chart, germ, germ.base);
  const int morse_index = static_cast<int>((mu.array() < 0.0).count());
  const int expected = morse_index % 2 == 0 ? 1 : -1;

  cmg::RunReport report;
  report.command = "index";
  report.inputs = inputs_echo(opts, entry);
  report.results = {{"index", r.index},
                    {"method", cmg::to_string(r.method)},
                    {"radius", r.radius},
                    {"samples", r.samples},
                    {"min_field_norm", r.min_field_norm},
                    {"morse_index", morse_index}};
  report.checks.push_back({"index-parity", r.index == expected,
                           static_cast<double>(r.index - expected), 0.5,
                           "index equals (-1)^{morse index}"});
  return finish(report, opts, t0);
}

int run_schur(const CommonOpts& opts, const std::string& center_csv, double radius,
              int count, double tol, const std::string& expect) {
  const auto t0 = std::chrono::steady_clock::now();
  const cmg::CatalogEntry entry = resolve_space(opts);
  const cmg::MetricChart chart = cmg::build_chart(entry);
  cmg::RegionSpec region;
  region.center = cmg::ChartPoint{center_csv.empty()
                                      ? Eigen::VectorXd::Zero(chart.dim()).eval()
                                      : parse_point(center_csv)};
  region.radius = radius;
  region.count = count;
  region.threads = opts.threads;
  region.keep_reports = true;
  const cmg::SchurScanResult r = cmg::schur_scan(chart, region, tol);

  cmg::RunReport report;
  report.command = "scan-schur";
  report.inputs = inputs_echo(opts, entry);
  report.results = {{"constant", r.constant}, {"samples", r.samples}, {"tol", r.tol}};
  if (r.constant) report.results["c_mean"] = r.c_mean;
  if (r.witness) {
    std::vector<double> coords(r.witness->point.coords.begin(),
                               r.witness->point.coords.end());
    report.results["witness"] = {{"point", coords},
                                 {"k_max", r.witness->report.k_max},
                                 {"k_min", r.witness->report.k_min},
                                 {"osc", r.witness->report.osc},
                                 {"reason", r.witness->reason}};
  }
  if (expect == "constant")
    report.checks.push_back({"scan-verdict", r.constant, r.constant ? 1.0 : 0.0, 0.5,
                             "region scanned as constant curvature"});
  else if (expect == "nonconstant")
    report.checks.push_back({"scan-verdict", !r.constant, r.constant ? 1.0 : 0.0, 0.5,
                             "region scanned as nonconstant curvature"});
  if (auto nominal = cmg::nominal_curvature(entry); nominal && r.constant) {
    report.checks.push_back({"constant-matches-nominal",
                             std::abs(r.c_mean - *nominal) <= tol,
                             std::abs(r.c_mean - *nominal), tol, ""});
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < r.sample_reports.size(); ++i) {
    const auto& rep = r.sample_reports[i];
    rows.push_back({static_cast<double>(i), rep.k_max, rep.k_min, rep.osc,
                    rep.refined ? 1.0 : 0.0, static_cast<double>(rep.samples)});
  }
  const auto dir = cmg::report_directory(opts.report_dir);
  std::filesystem::create_directories(dir);
  cmg::write_csv(dir / "scan-schur.csv",
                 {"id", "k_max", "k_min", "osc", "refined", "samples"}, rows);
  return finish(report, opts, t0);
}

int run_sweep(const CommonOpts& opts, const std::string& grid_csv,
              const std::string& bump) {
  const auto t0 = std::chrono::steady_clock::now();
  const cmg::CatalogEntry entry = resolve_space(opts);
  if (entry.kind == cmg::CatalogEntry::Kind::product)
    throw std::invalid_argument("sweep-qc needs a space with a companion germ");

  const Eigen::VectorXd grid_v = parse_point(grid_csv);
  std::vector<double> grid(grid_v.begin(), grid_v.end());

  cmg::GermFamily family;
  family.label = entry.describe() + "+" + bump;
  family.member = [entry, bump](double eps) {
    const cmg::MetricChart base = cmg::build_chart(entry);
    const cmg::GermSpec germ = *cmg::default_germ(entry);
    if (eps == 0.0) return std::make_pair(base, germ);
    return std::make_pair(cmg::conformal_rescale(base, bump, eps), germ);
  };
  cmg::NeighborhoodSpec sampling;
  sampling.threads = opts.threads;
  cmg::OscBudget budget;
  budget.threads = opts.threads;
  const auto rows = cmg::quasiconformal_sweep(family, grid, sampling, budget);

  cmg::RunReport report;
  report.command = "sweep-qc";
  report.inputs = inputs_echo(opts, entry);
  report.inputs["bump"] = bump;
  report.inputs["eps_grid"] = grid;
  report.results["kappa_definition"] =
      "kappa_proxy = 1 + sup of g-operator-norm conformal defect over the "
      "sampled neighborhood";
  json jrows = json::array();
  std::vector<std::vector<double>> csv_rows;
  for (const auto& row : rows) {
    jrows.push_back({{"param", row.param},
                     {"kappa_proxy", row.kappa_proxy},
                     {"k_max", row.k_max},
                     {"k_min", row.k_min},
                     {"osc", row.osc},
                     {"refined", row.refined}});
    csv_rows.push_back({row.param, row.kappa_proxy, row.k_max, row.k_min, row.osc,
                        row.refined ? 1.0 : 0.0});
  }
  report.results["rows"] = jrows;
  for (const auto& row : rows) {
    if (row.param == 0.0) {
      report.checks.push_back({"endpoint-kappa", row.kappa_proxy - 1.0 <= 1e-7,
                               row.kappa_proxy - 1.0, 1e-7,
                               "conformal endpoint has kappa = 1"});
      report.checks.push_back({"endpoint-osc", row.osc <= 1e-6, row.osc, 1e-6,
                               "conformal endpoint has zero oscillation"});
    } else {
      report.checks.push_back({"positive-defect-at-" + cmg::format_double(row.param),
                               row.kappa_proxy > 1.0, row.kappa_proxy - 1.0, 1e300,
                               "deformed member deviates from conformal"});
    }
  }
  const auto dir = cmg::report_directory(opts.report_dir);
  std::filesystem::create_directories(dir);
  cmg::write_csv(dir / "sweep-qc.csv",
                 {"param", "kappa_proxy", "k_max", "k_min", "osc", "refined"},
                 csv_rows);
  return finish(report, opts, t0);
}

int run_selftest_cmd(const CommonOpts& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const cmg::SelftestReport st = cmg::run_selftest(opts.threads);
  cmg::RunReport report;
  report.command = "selftest";
  report.inputs = {{"threads", opts.threads}};
  report.results = st.to_json();
  for (const auto& s : st.statements)
    report.checks.push_back({s.key, s.pass, s.worst, s.tolerance, s.detail});
  return finish(report, opts, t0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical probes for conformal Morse germs and constant curvature"};
  app.require_subcommand(1);

  CommonOpts opts;
  bool expect_not_cmg = false;
  std::string point_csv, z_csv, center_csv, expect;
  std::string grid_csv = "0,0.05,0.1,0.2";
  std::string bump = "offgauss";
  int samples = 20000, count = 200;
  double radius = -1.0, region_radius = 0.3, tol = 1e-6, max_osc = -1.0;

  auto* verify = app.add_subcommand("verify-cmg", "conformal Morse germ verdict");
  add_common(verify, opts);
  verify->add_flag("--expect-not-cmg", expect_not_cmg,
                   "pass when the germ is rejected");

  auto* curvature =
      app.add_subcommand("curvature", "sectional curvature through germ formulas");
  add_common(curvature, opts);
  curvature->add_option("--point", point_csv, "evaluation point (comma separated)")
      ->required();
  curvature->add_option("--z", z_csv, "plane direction (defaults to a chart axis)");

  auto* osc = app.add_subcommand("osc", "curvature oscillation over the Grassmannian");
  add_common(osc, opts, false);
  osc->add_option("--point", point_csv, "base point (default: origin)");
  osc->add_option("--samples", samples, "plane sample budget");
  osc->add_option("--max-osc", max_osc, "fail when the oscillation exceeds this");

  auto* index = app.add_subcommand("index", "Poincare-Hopf index of the gradient");
  add_common(index, opts);
  index->add_option("--radius", radius, "sampling sphere radius");

  auto* schur = app.add_subcommand("scan-schur", "constant-curvature region scan");
  add_common(schur, opts, false);
  schur->add_option("--center", center_csv, "region center (default: origin)");
  schur->add_option("--radius", region_radius, "region radius relative to chart scale");
  schur->add_option("--count", count, "region sample count");
  schur->add_option("--tol", tol, "constancy tolerance");
  schur->add_option("--expect", expect, "constant|nonconstant");

  auto* sweep = app.add_subcommand("sweep-qc", "quasiconformality vs oscillation sweep");
  add_common(sweep, opts);
  sweep->add_option("--eps-grid", grid_csv, "deformation parameters (comma separated)");
  sweep->add_option("--bump", bump, "conformal bump profile: gauss|offgauss|linear|quad");

  auto* selftest = app.add_subcommand("selftest", "full invariant suite");
  add_common(selftest, opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParseError;
  }

  try {
    if (verify->parsed()) return run_verify(opts, expect_not_cmg);
    if (curvature->parsed()) return run_curvature(opts, point_csv, z_csv);
    if (osc->parsed()) return run_osc(opts, point_csv, samples, max_osc);
    if (index->parsed()) return run_index(opts, radius);
    if (schur->parsed()) return run_schur(opts, center_csv, region_radius, count, tol,
                                          expect);
    if (sweep->parsed()) return run_sweep(opts, grid_csv, bump);
    if (selftest->parsed()) return run_selftest_cmd(opts);
  } catch (const cmg::chart_domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const cmg::jet_domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const cmg::index_inconclusive& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitParseError;
}
