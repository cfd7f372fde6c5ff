#include "cmgkit/index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cmgkit/sampling.hpp"

namespace cmg {

namespace {

constexpr double kFieldFloor = 1e-12;

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a < -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

IndexResult winding_2d(const ChartField& field, const ChartPoint& p, double eps) {
  int samples = 4096;
  for (int attempt = 0; attempt < 4; ++attempt) {
    double total = 0.0;
    double min_norm = std::numeric_limits<double>::infinity();
    bool too_coarse = false;
    double prev_angle = 0.0;
    double first_angle = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double t = 2.0 * std::numbers::pi * i / samples;
      Eigen::VectorXd y = p.coords;
      y[0] += eps * std::cos(t);
      y[1] += eps * std::sin(t);
      const Eigen::VectorXd fv = field(y);
      const double norm = fv.norm();
      min_norm = std::min(min_norm, norm);
      if (norm < kFieldFloor)
        throw index_inconclusive("field vanishes on the sampling circle; shrink eps");
      const double ang = std::atan2(fv[1], fv[0]);
      if (i == 0) {
        first_angle = ang;
      } else {
        const double step = wrap_angle(ang - prev_angle);
        if (std::abs(step) >= std::numbers::pi / 2.0) {
          too_coarse = true;
          break;
        }
        total += step;
      }
      prev_angle = ang;
    }
    if (!too_coarse) {
      total += wrap_angle(first_angle - prev_angle);
      const double turns = total / (2.0 * std::numbers::pi);
      const int index = static_cast<int>(std::lround(turns));
      if (std::abs(turns - index) > 0.25)
        throw index_inconclusive("winding number did not settle on an integer");
      return IndexResult{index, IndexMethod::winding_2d, eps, samples, min_norm};
    }
    samples *= 2;
  }
  throw index_inconclusive("angle increments stayed too large after 3 refinements");
}

struct Tri {
  Eigen::Vector3d a, b, c;
};

std::vector<Tri> icosphere(int level) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {
      {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& x : v) x.normalize();
  const int faces[20][3] = {{0, 11, 5},  {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},   {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},   {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},   {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  std::vector<Tri> tris;
  for (const auto& f : faces) {
    Tri t{v[f[0]], v[f[1]], v[f[2]]};
    // enforce outward orientation
    if ((t.b - t.a).cross(t.c - t.a).dot(t.a + t.b + t.c) < 0.0) std::swap(t.b, t.c);
    tris.push_back(t);
  }
  for (int l = 0; l < level; ++l) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const auto& t : tris) {
      const Eigen::Vector3d ab = (t.a + t.b).normalized();
      const Eigen::Vector3d bc = (t.b + t.c).normalized();
      const Eigen::Vector3d ca = (t.c + t.a).normalized();
      next.push_back({t.a, ab, ca});
      next.push_back({ab, t.b, bc});
      next.push_back({ca, bc, t.c});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }
  return tris;
}

// Signed solid angle of the spherical triangle with unit vertices.
double solid_angle(const Eigen::Vector3d& w1, const Eigen::Vector3d& w2,
                   const Eigen::Vector3d& w3) {
  const double det = w1.dot(w2.cross(w3));
  const double den = 1.0 + w1.dot(w2) + w2.dot(w3) + w3.dot(w1);
  return 2.0 * std::atan2(det, den);
}

IndexResult simplicial_3d(const ChartField& field, const ChartPoint& p, double eps) {
  const auto base = icosphere(4);  // 5120 triangles
  double min_norm = std::numeric_limits<double>::infinity();
  int evals = 0;

  auto image = [&](const Eigen::Vector3d& dir) -> Eigen::Vector3d {
    Eigen::VectorXd y = p.coords + eps * dir;
    const Eigen::VectorXd fv = field(y);
    const double norm = fv.norm();
    min_norm = std::min(min_norm, norm);
    ++evals;
    if (norm < kFieldFloor)
      throw index_inconclusive("field vanishes on the sampling sphere; shrink eps");
    return Eigen::Vector3d(fv[0], fv[1], fv[2]) / norm;
  };

  double total = 0.0;
  // adaptive stack: split domain triangles whose images stretch too far
  std::vector<std::pair<Tri, int>> stack;
  stack.reserve(base.size());
  for (const auto& t : base) stack.push_back({t, 0});
  while (!stack.empty()) {
    auto [t, depth] = stack.back();
    stack.pop_back();
    const Eigen::Vector3d w1 = image(t.a), w2 = image(t.b), w3 = image(t.c);
    const double den = 1.0 + w1.dot(w2) + w2.dot(w3) + w3.dot(w1);
    const bool stretched =
        den <= 0.5 || w1.dot(w2) <= 0.0 || w2.dot(w3) <= 0.0 || w3.dot(w1) <= 0.0;
    if (stretched) {
      if (depth >= 8)
        throw index_inconclusive("image triangles stayed overstretched after refinement");
      const Eigen::Vector3d ab = (t.a + t.b).normalized();
      const Eigen::Vector3d bc = (t.b + t.c).normalized();
      const Eigen::Vector3d ca = (t.c + t.a).normalized();
      stack.push_back({{t.a, ab, ca}, depth + 1});
      stack.push_back({{ab, t.b, bc}, depth + 1});
      stack.push_back({{ca, bc, t.c}, depth + 1});
      stack.push_back({{ab, bc, ca}, depth + 1});
      continue;
    }
    total += solid_angle(w1, w2, w3);
  }
  const double degree = total / (4.0 * std::numbers::pi);
  const int index = static_cast<int>(std::lround(degree));
  if (std::abs(degree - index) > 0.25)
    throw index_inconclusive("solid-angle sum did not settle on an integer");
  return IndexResult{index, IndexMethod::simplicial_3d, eps, evals, min_norm};
}

IndexResult jacobian_sign_fd(const ChartField& field, const ChartPoint& p, double eps) {
  const int n = p.dim();
  const double h = std::max(1e-6, eps * 1e-3);
  Eigen::MatrixXd jac(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd yp = p.coords, ym = p.coords;
    yp[j] += h;
    ym[j] -= h;
    jac.col(j) = (field(yp) - field(ym)) / (2.0 * h);
  }
  const double det = jac.determinant();
  const double scale = std::pow(jac.norm() / std::sqrt(static_cast<double>(n)), n);
  if (std::abs(det) < 1e-8 * std::max(scale, 1e-30))
    throw index_inconclusive("Jacobian at the zero is numerically degenerate");
  return IndexResult{det > 0.0 ? 1 : -1, IndexMethod::jacobian_sign, 0.0, 2 * n,
                     std::abs(det)};
}

}  // namespace

const char* to_string(IndexMethod m) {
  switch (m) {
    case IndexMethod::winding_2d: return "winding_2d";
    case IndexMethod::simplicial_3d: return "simplicial_3d";
    case IndexMethod::jacobian_sign: return "jacobian_sign";
  }
  return "?";
}

IndexResult ph_index(const ChartField& field, const ChartPoint& p, double eps,
                     std::optional<IndexMethod> method) {
  const int n = p.dim();
  IndexMethod chosen;
  if (method) {
    chosen = *method;
  } else if (n == 2) {
    chosen = IndexMethod::winding_2d;
  } else if (n == 3) {
    chosen = IndexMethod::simplicial_3d;
  } else {
    chosen = IndexMethod::jacobian_sign;
  }
  switch (chosen) {
    case IndexMethod::winding_2d:
      if (n != 2) throw std::invalid_argument("winding_2d needs a 2-dimensional chart");
      return winding_2d(field, p, eps);
    case IndexMethod::simplicial_3d:
      if (n != 3) throw std::invalid_argument("simplicial_3d needs a 3-dimensional chart");
      return simplicial_3d(field, p, eps);
    case IndexMethod::jacobian_sign:
      return jacobian_sign_fd(field, p, eps);
  }
  throw std::invalid_argument("unknown index method");
}

ChartField gradient_field(const MetricChart& m, const GermSpec& f) {
  return [&m, &f](const Eigen::VectorXd& y) {
    const ChartPoint q{y};
    return gradient(m, f, q).comps;
  };
}

IndexResult index_of_gradient(const MetricChart& m, const GermSpec& f, double eps) {
  const int n = m.dim();
  const ChartPoint& p = f.base;
  // Morse precondition
  const TaylorScalar fj = eval_field(f.f, p, 2);
  Eigen::VectorXd df(n);
  Eigen::MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i) {
    df[i] = fj.coeff_at(1 + i);
    for (int j = i; j < n; ++j) {
      MultiIndex a{};
      a[i] = static_cast<std::uint8_t>(a[i] + 1);
      a[j] = static_cast<std::uint8_t>(a[j] + 1);
      hess(i, j) = hess(j, i) = fj.derivative(a);
    }
  }
  if (df.norm() > 1e-10 * std::max(1.0, hess.norm()))
    throw std::invalid_argument("germ is not critical at its base point");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  if (eig.eigenvalues().array().abs().minCoeff() < 1e-8)
    throw std::invalid_argument("germ is not Morse: degenerate Hessian at the base");

  if (n == 2 || n == 3) return ph_index(gradient_field(m, f), p, eps);
  const double det = hess.determinant();
  return IndexResult{det > 0.0 ? 1 : -1, IndexMethod::jacobian_sign, 0.0, 0,
                     std::abs(det)};
}

namespace {

struct Sweep {
  std::vector<Eigen::VectorXd> dirs;      // unit chart directions
  std::vector<Eigen::VectorXd> grad_dirs; // g(p)-unit gradient directions, or empty
};

Sweep evaluate_sweep(const MetricChart& m, const GermSpec& f, double radius,
                     const Eigen::MatrixXd& gp, int count) {
  Sweep s;
  s.dirs = sphere_directions(m.dim(), count, 7);
  s.grad_dirs.resize(s.dirs.size());
  for (std::size_t i = 0; i < s.dirs.size(); ++i) {
    const ChartPoint q{f.base.coords + radius * s.dirs[i]};
    if (!m.in_domain(q)) continue;
    Eigen::VectorXd gr = gradient(m, f, q).comps;
    const double norm = std::sqrt(gr.dot(gp * gr));
    if (norm < kFieldFloor) continue;
    s.grad_dirs[i] = gr / norm;
  }
  return s;
}

double angle_at(const MetricChart& m, const GermSpec& f, const Eigen::MatrixXd& gp,
                const Eigen::VectorXd& v_unit, double radius, const Eigen::VectorXd& dir) {
  const ChartPoint q{f.base.coords + radius * dir};
  if (!m.in_domain(q)) return std::numbers::pi;
  Eigen::VectorXd gr = gradient(m, f, q).comps;
  const double norm = std::sqrt(gr.dot(gp * gr));
  if (norm < kFieldFloor) return std::numbers::pi;
  const double c = std::clamp(gr.dot(gp * v_unit) / norm, -1.0, 1.0);
  return std::acos(c);
}

Attainment refine_direction(const MetricChart& m, const GermSpec& f,
                            const Eigen::MatrixXd& gp, const Eigen::VectorXd& v_unit,
                            double radius, Eigen::VectorXd dir) {
  const int n = m.dim();
  double best = angle_at(m, f, gp, v_unit, radius, dir);
  double step = 0.5;
  int sweeps = 0;
  while (step > 1e-9 && ++sweeps < 2000) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd cand = dir;
        cand[i] += sgn * step;
        cand.normalize();
        const double a = angle_at(m, f, gp, v_unit, radius, cand);
        if (a < best) {
          best = a;
          dir = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  Attainment r;
  r.radius = radius;
  r.q = ChartPoint{f.base.coords + radius * dir};
  r.angle = best;
  return r;
}

}  // namespace

std::vector<std::vector<Attainment>> direction_attainment_many(
    const MetricChart& m, const GermSpec& f, const std::vector<Eigen::VectorXd>& vs,
    const std::vector<double>& radii, double tol_angle) {
  const Eigen::MatrixXd gp = m.metric_value(f.base);
  const int sweep_count = m.dim() == 2 ? 2048 : 4096;

  std::vector<Eigen::VectorXd> v_units;
  v_units.reserve(vs.size());
  for (const auto& v : vs) {
    const double nv = std::sqrt(v.dot(gp * v));
    if (nv < 1e-14) throw std::invalid_argument("zero target direction");
    v_units.push_back(v / nv);
  }

  std::vector<std::vector<Attainment>> out(vs.size());
  for (auto& row : out) row.reserve(radii.size());

  for (const double radius : radii) {
    const Sweep sweep = evaluate_sweep(m, f, radius, gp, sweep_count);
    for (std::size_t vi = 0; vi < vs.size(); ++vi) {
      // best sweep sample for this target, then local refinement
      double best_dot = -2.0;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < sweep.dirs.size(); ++i) {
        if (sweep.grad_dirs[i].size() == 0) continue;
        const double d = sweep.grad_dirs[i].dot(gp * v_units[vi]);
        if (d > best_dot) {
          best_dot = d;
          best_i = i;
        }
      }
      if (best_dot < -1.5)
        throw chart_domain_error("attainment sweep found no valid chart points");
      Attainment a =
          refine_direction(m, f, gp, v_units[vi], radius, sweep.dirs[best_i]);
      a.attained = a.angle <= tol_angle;
      out[vi].push_back(std::move(a));
    }
  }
  return out;
}

std::vector<Attainment> direction_attainment(const MetricChart& m, const GermSpec& f,
                                             const TangentVector& v,
                                             const std::vector<double>& radii,
                                             double tol_angle) {
  return direction_attainment_many(m, f, {v.comps}, radii, tol_angle)[0];
}

}  // namespace cmg
