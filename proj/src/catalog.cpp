#include "cmgkit/catalog.hpp"

#include <cmath>

namespace cmg {

namespace {

double fact(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

constexpr int kSeriesTerms = 16;
constexpr double kSeriesSwitch = 0.25;  // use the power series for s below this

// Coefficients of A(s) = phi(sqrt(s))^2 / s as a power series in s.
std::vector<double> profile_a_series(bool hyperbolic_sign) {
  std::vector<double> c(kSeriesTerms);
  for (int k = 0; k < kSeriesTerms; ++k) {
    // sin:  A_k = (-1)^k 2^{2k+1} / (2k+2)!      sinh: same without the sign
    const double mag = std::ldexp(1.0, 2 * k + 1) / fact(2 * k + 2);
    c[k] = hyperbolic_sign ? mag : (k % 2 == 0 ? mag : -mag);
  }
  return c;
}

// Coefficients of F(s) = 1 -/+ cos/cosh(sqrt(s)) shifted to vanish at 0:
// sin profile: 1 - cos(sqrt(s)), sinh profile: cosh(sqrt(s)) - 1.
std::vector<double> profile_f_series(bool hyperbolic_sign) {
  std::vector<double> c(kSeriesTerms);
  c[0] = 0.0;
  for (int k = 1; k < kSeriesTerms; ++k) {
    const double mag = 1.0 / fact(2 * k);
    c[k] = hyperbolic_sign ? mag : (k % 2 == 1 ? mag : -mag);
  }
  return c;
}

TaylorScalar poly_in(const TaylorScalar& s, const std::vector<double>& c) {
  TaylorScalar r = jet_like(c.back(), std::span<const TaylorScalar>(&s, 1));
  for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) r = r * s + c[k];
  return r;
}

struct Profile {
  // A(s), B(s) = (1 - A(s))/s and the radial germ F(s); all jet-evaluable and
  // smooth across s = 0.
  std::function<TaylorScalar(const TaylorScalar&)> A, B, F;
  DomainGuard guard;
  double scale = 1.0;
};

Profile make_profile(const std::string& phi, double a) {
  Profile p;
  if (phi == "id") {
    p.A = [](const TaylorScalar& s) {
      return jet_like(1.0, std::span<const TaylorScalar>(&s, 1));
    };
    p.B = [](const TaylorScalar& s) {
      return jet_like(0.0, std::span<const TaylorScalar>(&s, 1));
    };
    p.F = [](const TaylorScalar& s) { return s * 0.5; };
    return p;
  }
  if (phi == "cubic") {
    if (!(a > 0.0))
      throw std::invalid_argument("cubic revolution profile needs a > 0");
    // phi = r + a r^3: A = (1 + a s)^2, B = -2a - a^2 s, F = s/2 + a s^2/4
    p.A = [a](const TaylorScalar& s) {
      auto t = 1.0 + a * s;
      return t * t;
    };
    p.B = [a](const TaylorScalar& s) { return -2.0 * a - (a * a) * s; };
    p.F = [a](const TaylorScalar& s) { return s * 0.5 + (a / 4.0) * s * s; };
    return p;
  }
  const bool hyper = phi == "sinh";
  if (!hyper && phi != "sin")
    throw std::invalid_argument("unknown revolution profile '" + phi + "'");
  const auto as = profile_a_series(hyper);
  std::vector<double> bs(as.size() - 1);
  for (std::size_t k = 0; k + 1 < as.size(); ++k) bs[k] = -as[k + 1];
  const auto fs = profile_f_series(hyper);
  p.A = [as, hyper](const TaylorScalar& s) {
    if (s.value() < kSeriesSwitch) return poly_in(s, as);
    auto r = cmg::sqrt(s);
    auto ph = hyper ? cmg::sinh(r) : cmg::sin(r);
    return ph * ph / s;
  };
  p.B = [bs, as, hyper](const TaylorScalar& s) {
    if (s.value() < kSeriesSwitch) return poly_in(s, bs);
    auto r = cmg::sqrt(s);
    auto ph = hyper ? cmg::sinh(r) : cmg::sin(r);
    return (1.0 - ph * ph / s) / s;
  };
  p.F = [fs, hyper](const TaylorScalar& s) {
    if (s.value() < kSeriesSwitch) return poly_in(s, fs);
    auto r = cmg::sqrt(s);
    return hyper ? cmg::cosh(r) - 1.0 : 1.0 - cmg::cos(r);
  };
  if (!hyper) {
    // keep away from the phi = sin zero at r = pi
    p.guard = [](const ChartPoint& q) { return q.coords.squaredNorm() < 6.25; };
    p.scale = 0.6;
  }
  return p;
}

MetricChart revolution_chart(const std::string& phi, double a) {
  Profile p = make_profile(phi, a);
  std::vector<ScalarField> upper;
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      upper.push_back([p, i, j](std::span<const TaylorScalar> x) {
        const TaylorScalar s = squared_norm_jet(x);
        // g_ij = A(s) delta_ij + B(s) x_i x_j
        TaylorScalar r = p.B(s) * (x[i] * x[j]);
        if (i == j) r += p.A(s);
        return r;
      });
    }
  }
  return MetricChart(2, "revolution_" + phi, std::move(upper), p.guard, p.scale);
}

ScalarField bump_field(const std::string& bump) {
  if (bump == "gauss") {
    return [](std::span<const TaylorScalar> x) {
      return exp(-squared_norm_jet(x));
    };
  }
  if (bump == "offgauss") {
    // off-center bump: breaks the rotational symmetry at the chart origin,
    // so the perturbation shows up in the oscillation there
    return [](std::span<const TaylorScalar> x) {
      TaylorScalar s = (x[0] - 0.3) * (x[0] - 0.3);
      for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
      return exp(-s);
    };
  }
  if (bump == "linear") {
    return [](std::span<const TaylorScalar> x) { return x[0]; };
  }
  if (bump == "quad") {
    return [](std::span<const TaylorScalar> x) { return squared_norm_jet(x); };
  }
  throw std::invalid_argument("unknown bump profile '" + bump + "'");
}

MetricChart product_chart(const MetricChart& a, const MetricChart& b) {
  const int na = a.dim(), nb = b.dim(), n = na + nb;
  if (n > kMaxJetVars)
    throw std::invalid_argument("product dimensions must sum to at most 6");
  std::vector<ScalarField> upper;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      if (i < na && j < na) {
        ScalarField comp = a.component(i, j);
        upper.push_back([comp, na](std::span<const TaylorScalar> x) {
          return comp(x.subspan(0, na));
        });
      } else if (i >= na && j >= na) {
        ScalarField comp = b.component(i - na, j - na);
        upper.push_back([comp, na](std::span<const TaylorScalar> x) {
          return comp(x.subspan(na));
        });
      } else {
        upper.push_back(
            [](std::span<const TaylorScalar> x) { return jet_like(0.0, x); });
      }
    }
  }
  // capture factor guards through point slicing
  MetricChart ac = a, bc = b;
  DomainGuard guard = [ac, bc, na, nb](const ChartPoint& q) {
    return ac.in_domain(ChartPoint{q.coords.head(na)}) &&
           bc.in_domain(ChartPoint{q.coords.tail(nb)});
  };
  return MetricChart(n, a.name() + "_x_" + b.name(), std::move(upper), guard,
                     std::min(a.chart_scale(), b.chart_scale()));
}

// 1-dimensional euclidean factor for line products.
MetricChart line_chart() {
  std::vector<ScalarField> upper = {
      [](std::span<const TaylorScalar> x) { return jet_like(1.0, x); }};
  return MetricChart(1, "line", std::move(upper), {}, 1.0);
}

MetricChart euclidean_chart(int n) {
  if (n == 1) return line_chart();
  return model_germ(ModelSpace::euclidean, 1.0, n).chart;
}

}  // namespace

std::string CatalogEntry::describe() const {
  switch (kind) {
    case Kind::euclidean: return "euclidean(n=" + std::to_string(n) + ")";
    case Kind::sphere:
      return "sphere(c=" + std::to_string(c) + ",n=" + std::to_string(n) + ")";
    case Kind::hyperbolic:
      return "hyperbolic(c=" + std::to_string(c) + ",n=" + std::to_string(n) + ")";
    case Kind::revolution:
      return "revolution(" + phi + (phi == "cubic" ? ",a=" + std::to_string(a) : "") +
             ")";
    case Kind::product:
      return children[0].describe() + " x " + children[1].describe();
    case Kind::conformal_perturbation:
      return children[0].describe() + " * e^{2*" + std::to_string(eps) + "*" + bump +
             "}";
  }
  return "?";
}

CatalogEntry parse_space(const std::string& token) {
  CatalogEntry e;
  if (token == "euclidean") {
    e.kind = CatalogEntry::Kind::euclidean;
    return e;
  }
  if (token == "sphere") {
    e.kind = CatalogEntry::Kind::sphere;
    return e;
  }
  if (token == "hyperbolic") {
    e.kind = CatalogEntry::Kind::hyperbolic;
    return e;
  }
  if (token.rfind("revolution:", 0) == 0) {
    e.kind = CatalogEntry::Kind::revolution;
    e.phi = token.substr(11);
    e.n = 2;
    return e;
  }
  if (token == "product:s2xs2" || token == "product:s2xr" || token == "product:s3xr") {
    e.kind = CatalogEntry::Kind::product;
    CatalogEntry s;
    s.kind = CatalogEntry::Kind::sphere;
    s.c = 1.0;
    s.n = token == "product:s3xr" ? 3 : 2;
    e.children.push_back(s);
    if (token == "product:s2xs2") {
      e.children.push_back(s);
    } else {
      CatalogEntry r;
      r.kind = CatalogEntry::Kind::euclidean;
      r.n = 1;
      e.children.push_back(r);
    }
    e.n = e.children[0].n + e.children[1].n;
    return e;
  }
  if (token == "perturbed-sphere") {
    e.kind = CatalogEntry::Kind::conformal_perturbation;
    CatalogEntry s;
    s.kind = CatalogEntry::Kind::sphere;
    e.children.push_back(s);
    e.eps = 0.1;
    return e;
  }
  throw std::invalid_argument("unknown space '" + token + "'");
}

int entry_dim(const CatalogEntry& entry) {
  switch (entry.kind) {
    case CatalogEntry::Kind::product:
      return entry_dim(entry.children[0]) + entry_dim(entry.children[1]);
    case CatalogEntry::Kind::conformal_perturbation:
      return entry_dim(entry.children[0]);
    case CatalogEntry::Kind::revolution:
      return 2;
    default:
      return entry.n;
  }
}

MetricChart build_chart(const CatalogEntry& entry) {
  switch (entry.kind) {
    case CatalogEntry::Kind::euclidean:
      return euclidean_chart(entry.n);
    case CatalogEntry::Kind::sphere:
      return model_germ(ModelSpace::sphere, entry.c, entry.n).chart;
    case CatalogEntry::Kind::hyperbolic:
      return model_germ(ModelSpace::hyperbolic, entry.c, entry.n).chart;
    case CatalogEntry::Kind::revolution:
      return revolution_chart(entry.phi, entry.a);
    case CatalogEntry::Kind::product: {
      if (entry.children.size() != 2)
        throw std::invalid_argument("product entry needs exactly two factors");
      return product_chart(build_chart(entry.children[0]),
                           build_chart(entry.children[1]));
    }
    case CatalogEntry::Kind::conformal_perturbation: {
      if (entry.children.size() != 1)
        throw std::invalid_argument("perturbation entry needs exactly one base");
      return conformal_rescale(build_chart(entry.children[0]), entry.bump, entry.eps);
    }
  }
  throw std::invalid_argument("unknown catalog kind");
}

std::optional<GermSpec> default_germ(const CatalogEntry& entry) {
  switch (entry.kind) {
    case CatalogEntry::Kind::euclidean:
      if (entry.n < 2) return std::nullopt;
      return model_germ(ModelSpace::euclidean, 1.0, entry.n).germ;
    case CatalogEntry::Kind::sphere:
      return model_germ(ModelSpace::sphere, entry.c, entry.n).germ;
    case CatalogEntry::Kind::hyperbolic:
      return model_germ(ModelSpace::hyperbolic, entry.c, entry.n).germ;
    case CatalogEntry::Kind::revolution:
      return revolution_germ(entry.phi, entry.a);
    case CatalogEntry::Kind::conformal_perturbation:
      return default_germ(entry.children[0]);
    case CatalogEntry::Kind::product:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> nominal_curvature(const CatalogEntry& entry) {
  switch (entry.kind) {
    case CatalogEntry::Kind::euclidean: return 0.0;
    case CatalogEntry::Kind::sphere: return entry.c;
    case CatalogEntry::Kind::hyperbolic: return -entry.c;
    case CatalogEntry::Kind::revolution:
      if (entry.phi == "sin") return 1.0;
      if (entry.phi == "sinh") return -1.0;
      if (entry.phi == "id") return 0.0;
      return std::nullopt;
    default: return std::nullopt;
  }
}

MetricChart conformal_rescale(const MetricChart& base, const std::string& bump,
                              double eps) {
  const ScalarField u = bump_field(bump);
  const int n = base.dim();
  std::vector<ScalarField> upper;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      ScalarField comp = base.component(i, j);
      upper.push_back([comp, u, eps](std::span<const TaylorScalar> x) {
        return exp((2.0 * eps) * u(x)) * comp(x);
      });
    }
  }
  MetricChart bc = base;
  DomainGuard guard = [bc](const ChartPoint& q) { return bc.in_domain(q); };
  return MetricChart(n, base.name() + "_rescaled", std::move(upper), guard,
                     base.chart_scale());
}

GermSpec morse_quadratic_germ(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("Morse index must lie in [0, n]");
  return GermSpec{ChartPoint{Eigen::VectorXd::Zero(n)},
                  [k](std::span<const TaylorScalar> x) {
                    TaylorScalar s = x[0] * x[0] * (0 < k ? -1.0 : 1.0);
                    for (std::size_t i = 1; i < x.size(); ++i)
                      s += x[i] * x[i] * (static_cast<int>(i) < k ? -1.0 : 1.0);
                    return s;
                  },
                  "morse_k" + std::to_string(k)};
}

GermSpec saddle_germ_2d() {
  GermSpec g = morse_quadratic_germ(2, 1);
  // -x^2 + y^2 and x^2 - y^2 share the index; use the conventional signs
  g.f = [](std::span<const TaylorScalar> x) { return x[0] * x[0] - x[1] * x[1]; };
  g.label = "saddle2d";
  return g;
}

GermSpec revolution_germ(const std::string& phi, double a) {
  Profile p = make_profile(phi, a);
  return GermSpec{ChartPoint{Eigen::VectorXd::Zero(2)},
                  [p](std::span<const TaylorScalar> x) {
                    return p.F(squared_norm_jet(x));
                  },
                  "radial_" + phi};
}

namespace {

// splitmix64: deterministic coefficient stream for pseudo-random germs
double seeded_coeff(unsigned long long& state) {
  state += 0x9e3779b97f4a7c15ull;
  unsigned long long z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

}  // namespace

GermSpec polynomial_germ(int n, unsigned long long seed, bool critical) {
  unsigned long long state = seed;
  std::vector<double> lin(n), quad(n * n), cubic(n), mixed(n);
  for (auto& v : lin) v = critical ? 0.0 : seeded_coeff(state);
  for (auto& v : quad) v = seeded_coeff(state);
  for (auto& v : cubic) v = 0.5 * seeded_coeff(state);
  for (auto& v : mixed) v = 0.5 * seeded_coeff(state);
  if (critical) {
    // keep the Hessian away from degeneracy
    for (int i = 0; i < n; ++i)
      quad[i * n + i] += quad[i * n + i] >= 0.0 ? 1.0 : -1.0;
  }
  return GermSpec{
      ChartPoint{Eigen::VectorXd::Zero(n)},
      [n, lin, quad, cubic, mixed](std::span<const TaylorScalar> x) {
        TaylorScalar s = jet_like(0.0, x);
        for (int i = 0; i < n; ++i) {
          s += lin[i] * x[i];
          s += cubic[i] * x[i] * x[i] * x[i];
          s += mixed[i] * x[i] * x[(i + 1) % n] * x[(i + 2) % n];
          for (int j = 0; j < n; ++j) s += quad[i * n + j] * x[i] * x[j];
        }
        return s;
      },
      "poly_seed" + std::to_string(seed)};
}

double revolution_curvature(const std::string& phi, double a, double r) {
  // K = -phi'' / phi
  if (phi == "id") return 0.0;
  if (phi == "sin") return 1.0;
  if (phi == "sinh") return -1.0;
  if (phi == "cubic") return -6.0 * a / (1.0 + a * r * r);
  throw std::invalid_argument("unknown revolution profile '" + phi + "'");
}

}  // namespace cmg
