#include "cmgkit/probes.hpp"

#include <algorithm>
#include <cmath>

#include "cmgkit/parallel.hpp"
#include "cmgkit/sampling.hpp"

namespace cmg {

namespace {

struct Extremum {
  Eigen::VectorXd u, w;
  double k = 0.0;
  bool converged = false;
};

// Greedy pattern search over orthonormal pairs: perturb either vector along
// a coordinate direction, re-orthonormalize, accept improvements, halve the
// step. `sign` +1 climbs, -1 descends.
Extremum refine_extremum(const PointCurvature& pc, Eigen::VectorXd u,
                         Eigen::VectorXd w, double sign, int& eval_budget) {
  const int n = static_cast<int>(u.size());
  Extremum ex;
  double k = pc.k_orthonormal(u, w);
  double step = 0.2;
  double last_move = std::numeric_limits<double>::infinity();
  while (step > 1e-10) {
    bool improved = false;
    for (int vec = 0; vec < 2; ++vec) {
      for (int i = 0; i < n; ++i) {
        for (double sgn : {1.0, -1.0}) {
          if (eval_budget <= 0) {
            ex.u = u; ex.w = w; ex.k = k;
            return ex;  // converged stays false
          }
          Eigen::VectorXd cu = u, cw = w;
          (vec == 0 ? cu : cw)[i] += sgn * step;
          std::pair<Eigen::VectorXd, Eigen::VectorXd> on;
          try {
            on = pc.orthonormalize(cu, cw);
          } catch (const std::invalid_argument&) {
            continue;
          }
          --eval_budget;
          const double ck = pc.k_orthonormal(on.first, on.second);
          if (sign * (ck - k) > 0.0) {
            last_move = std::abs(ck - k);
            k = ck;
            u = on.first;
            w = on.second;
            improved = true;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  ex.u = u;
  ex.w = w;
  ex.k = k;
  ex.converged = last_move < 1e-9 || !std::isfinite(last_move);
  return ex;
}

Plane2 plane_from(const ChartPoint& p, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& w) {
  return Plane2{p, TangentVector{p, u}, TangentVector{p, w}};
}

}  // namespace

CurvatureReport osc_k(const MetricChart& m, const ChartPoint& p,
                      const OscBudget& budget) {
  const int n = m.dim();
  if (n < 2) throw std::invalid_argument("osc_k needs dimension >= 2");
  m.require_in_domain(p);
  const PointCurvature pc(m, p);

  CurvatureReport rep;
  rep.point = p;

  if (n == 2) {
    Eigen::VectorXd e0 = Eigen::VectorXd::Unit(2, 0), e1 = Eigen::VectorXd::Unit(2, 1);
    auto [u, w] = pc.orthonormalize(e0, e1);
    const double k = pc.k_orthonormal(u, w);
    rep.k_max = rep.k_min = k;
    rep.osc = 0.0;
    rep.argmax_plane = rep.argmin_plane = plane_from(p, u, w);
    rep.samples = 1;
    rep.refined = true;
    return rep;
  }

  // low-discrepancy sample of orthonormal pairs
  const auto us = sphere_directions(n, budget.samples, 1);
  const auto ws = sphere_directions(n, budget.samples, 2);
  std::vector<double> ks(budget.samples, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs(budget.samples);
  parallel_for(budget.samples, budget.threads, [&](int i) {
    try {
      auto on = pc.orthonormalize(us[i], ws[i]);
      ks[i] = pc.k_orthonormal(on.first, on.second);
      pairs[i] = std::move(on);
    } catch (const std::invalid_argument&) {
      // parallel pair; skipped deterministically
    }
  });

  std::vector<int> valid;
  valid.reserve(budget.samples);
  for (int i = 0; i < budget.samples; ++i)
    if (std::isfinite(ks[i])) valid.push_back(i);
  if (valid.empty()) throw std::invalid_argument("no valid plane samples");

  std::vector<int> by_max = valid, by_min = valid;
  std::sort(by_max.begin(), by_max.end(), [&](int a, int b) {
    return ks[a] != ks[b] ? ks[a] > ks[b] : a < b;
  });
  std::sort(by_min.begin(), by_min.end(), [&](int a, int b) {
    return ks[a] != ks[b] ? ks[a] < ks[b] : a < b;
  });

  const int starts = std::max(1, budget.multistarts / 2);
  int eval_budget = budget.refine_eval_cap;
  const double sampled_max = ks[by_max[0]];
  const double sampled_min = ks[by_min[0]];

  Extremum best_max;
  best_max.k = -std::numeric_limits<double>::infinity();
  bool max_converged = true;
  for (int s = 0; s < starts && s < static_cast<int>(by_max.size()); ++s) {
    const auto& pr = pairs[by_max[s]];
    Extremum ex = refine_extremum(pc, pr.first, pr.second, +1.0, eval_budget);
    max_converged = max_converged && ex.converged;
    if (ex.k > best_max.k) best_max = std::move(ex);
  }
  Extremum best_min;
  best_min.k = std::numeric_limits<double>::infinity();
  bool min_converged = true;
  for (int s = 0; s < starts && s < static_cast<int>(by_min.size()); ++s) {
    const auto& pr = pairs[by_min[s]];
    Extremum ex = refine_extremum(pc, pr.first, pr.second, -1.0, eval_budget);
    min_converged = min_converged && ex.converged;
    if (ex.k < best_min.k) best_min = std::move(ex);
  }

  rep.k_max = std::max(best_max.k, sampled_max);
  rep.k_min = std::min(best_min.k, sampled_min);
  rep.osc = rep.k_max - rep.k_min;
  rep.argmax_plane = plane_from(p, best_max.u, best_max.w);
  rep.argmin_plane = plane_from(p, best_min.u, best_min.w);
  rep.samples = static_cast<int>(valid.size());
  rep.refined = max_converged && min_converged && eval_budget > 0;
  return rep;
}

TangentVector curvature_gradient(const MetricChart& m, const ChartPoint& p) {
  if (m.dim() != 2)
    throw std::invalid_argument("curvature_gradient is defined for dimension 2");
  const ChartFrame fr = build_frame(m, p, 3);
  const auto rj = riemann_jets(fr);  // order-1 jets
  const int n = 2;
  // K = R(e0,e1,e1,e0) / det g
  const TaylorScalar& r0110 = rj[((0 * n + 1) * n + 1) * n + 0];
  const TaylorScalar det =
      fr.metric(0, 0) * fr.metric(1, 1) - fr.metric(0, 1) * fr.metric(0, 1);
  const TaylorScalar k = r0110 / det.truncated(r0110.order());
  Eigen::VectorXd dk(n);
  for (int v = 0; v < n; ++v) dk[v] = k.coeff_at(1 + v);
  return TangentVector{p, fr.inverse_value() * dk};
}

std::pair<double, double> two_dim_identities(const MetricChart& m, const GermSpec& f,
                                             const ChartPoint& q, double gradient_floor) {
  if (m.dim() != 2)
    throw std::invalid_argument("two_dim_identities is defined for dimension 2");
  const Eigen::MatrixXd g = m.metric_value(q);
  const Eigen::VectorXd grad = gradient(m, f, q).comps;
  const double gn = std::sqrt(grad.dot(g * grad));
  if (gn < gradient_floor)
    throw std::invalid_argument(
        "gradient norm below floor: point too close to the germ base");

  const Eigen::VectorXd dh = conformal_factor_gradient(m, f, q).comps;
  const PointCurvature pc(m, q);
  const double k = pc.plane_curvature(Eigen::VectorXd::Unit(2, 0),
                                      Eigen::VectorXd::Unit(2, 1));
  const Eigen::VectorXd res1 = dh + k * grad;
  const double r1 = std::sqrt(res1.dot(g * res1));

  const Eigen::VectorXd dk = curvature_gradient(m, q).comps;
  const Eigen::VectorXd u = grad / gn;
  const Eigen::VectorXd res2 = dk - dk.dot(g * u) * u;
  const double r2 = std::sqrt(res2.dot(g * res2));
  return {r1, r2};
}

SchurScanResult schur_scan(const MetricChart& m, const RegionSpec& region, double tol,
                           const OscBudget& per_point) {
  if (m.dim() < 3) throw std::invalid_argument("schur_scan needs dimension >= 3");
  SchurScanResult out;
  out.tol = tol;

  const double radius = region.radius * m.chart_scale();
  std::vector<ChartPoint> pts;
  for (const auto& d : ball_points(m.dim(), region.count, radius, 3))
    pts.push_back(ChartPoint{region.center.coords + d});

  std::vector<std::optional<CurvatureReport>> reports(pts.size());
  OscBudget pp = per_point;
  pp.threads = 1;
  parallel_for(static_cast<int>(pts.size()), region.threads, [&](int i) {
    if (m.in_domain(pts[i])) reports[i] = osc_k(m, pts[i], pp);
  });

  // analyze in sample order; the first violation becomes the witness
  double c_ref = 0.0;
  bool have_ref = false;
  double c_sum = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (!reports[i]) continue;
    const CurvatureReport& rep = *reports[i];
    ++used;
    if (region.keep_reports) out.sample_reports.push_back(rep);
    if (out.witness) continue;
    if (rep.osc > tol) {
      out.witness =
          SchurWitness{pts[i], rep, have_ref ? c_ref : rep.k_max, "plane-dependent"};
      continue;
    }
    if (!have_ref) {
      c_ref = rep.k_max;
      have_ref = true;
    } else if (std::abs(rep.k_max - c_ref) > tol) {
      out.witness = SchurWitness{pts[i], rep, c_ref, "point-dependent"};
      continue;
    }
    c_sum += rep.k_max;
  }
  if (used == 0) throw chart_domain_error("no region samples inside the chart domain");
  out.constant = !out.witness;
  if (out.constant) out.c_mean = c_sum / used;
  out.samples = used;
  return out;
}

std::vector<SweepRow> quasiconformal_sweep(const GermFamily& family,
                                           std::span<const double> eps_grid,
                                           const NeighborhoodSpec& sampling,
                                           const OscBudget& budget) {
  {
    auto [m0, f0] = family.member(0.0);
    const CmgVerdict base = verify_cmg(m0, f0, sampling);
    if (!base.is_cmg)
      throw std::invalid_argument("sweep refused: family member at 0 is not a "
                                  "conformal Morse germ");
  }
  std::vector<SweepRow> rows;
  rows.reserve(eps_grid.size());
  for (const double eps : eps_grid) {
    auto [m, f] = family.member(eps);
    const CmgVerdict v = verify_cmg(m, f, sampling);
    const CurvatureReport rep = osc_k(m, f.base, budget);
    SweepRow row;
    row.param = eps;
    row.kappa_proxy = 1.0 + v.defect_sup;
    row.k_max = rep.k_max;
    row.k_min = rep.k_min;
    row.osc = rep.osc;
    row.refined = rep.refined;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cmg
