#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmgkit/germs.hpp"

namespace cmg {

// Declarative description of a chart metric (and, where one exists, its
// companion germ). Recursive kinds keep their operands in `children`:
// product holds two entries, conformal_perturbation holds the base entry.
struct CatalogEntry {
  enum class Kind {
    euclidean,
    sphere,
    hyperbolic,
    revolution,
    product,
    conformal_perturbation,
  };

  Kind kind = Kind::euclidean;
  double c = 1.0;            // model curvature parameter
  int n = 2;                 // dimension (model kinds)
  std::string phi = "cubic"; // revolution profile: sin | sinh | id | cubic
  double a = 1.0;            // cubic profile coefficient
  std::string bump = "gauss";  // perturbation profile: gauss | linear | quad
  double eps = 0.0;            // perturbation amplitude
  std::vector<CatalogEntry> children;

  std::string describe() const;
};

// Named presets understood by the CLI: euclidean, sphere, hyperbolic,
// revolution:{sin,sinh,id,cubic}, product:{s2xs2,s2xr,s3xr},
// perturbed-sphere. Throws std::invalid_argument on unknown tokens.
CatalogEntry parse_space(const std::string& token);

MetricChart build_chart(const CatalogEntry& entry);

// The entry's companion conformal Morse germ, when the construction has one
// (model spaces, revolution surfaces, perturbations of those). Products
// have none.
std::optional<GermSpec> default_germ(const CatalogEntry& entry);

// Nominal constant sectional curvature for constant-curvature entries.
std::optional<double> nominal_curvature(const CatalogEntry& entry);

// Metric dimension of the entry.
int entry_dim(const CatalogEntry& entry);

// Conformally rescaled metric e^{2 eps u} g with a named bump profile.
MetricChart conformal_rescale(const MetricChart& base, const std::string& bump,
                              double eps);

// Germ with a Morse critical point of index k at the origin of an
// n-dimensional chart: -x_1^2 - ... - x_k^2 + x_{k+1}^2 + ... + x_n^2.
GermSpec morse_quadratic_germ(int n, int k);

// The 2-dimensional saddle x^2 - y^2.
GermSpec saddle_germ_2d();

// CMG on a revolution surface: the radial antiderivative of the profile.
GermSpec revolution_germ(const std::string& phi, double a = 1.0);

// Deterministic pseudo-random polynomial germ (degree <= 4, coefficients
// from the seed). `critical` forces a vanishing gradient at the origin.
GermSpec polynomial_germ(int n, unsigned long long seed, bool critical);

// Gaussian curvature of a revolution profile at radius r (the -phi''/phi
// closed form); test oracle against the chart pipeline.
double revolution_curvature(const std::string& phi, double a, double r);

}  // namespace cmg
