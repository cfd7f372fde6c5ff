#include "cmgkit/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cmg {

namespace {

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Gaussian pair from two uniforms in (0,1).
void box_muller(double u1, double u2, double& z0, double& z1) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(a);
  z1 = r * std::sin(a);
}

}  // namespace

double radical_inverse(unsigned long long index, unsigned base) {
  double inv_base = 1.0 / base;
  double f = inv_base;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv_base;
  }
  return r;
}

std::vector<Eigen::VectorXd> sphere_directions(int dim, int count,
                                               unsigned long long stream) {
  if (dim < 1) throw std::invalid_argument("sphere_directions: dim must be >= 1");
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  if (dim == 1) {
    for (int i = 0; i < count; ++i) {
      Eigen::VectorXd v(1);
      v[0] = (static_cast<unsigned long long>(i) + stream) % 2 == 0 ? 1.0 : -1.0;
      out.push_back(v);
    }
    return out;
  }
  if (dim == 2) {
    const double offset = radical_inverse(stream + 1, 2);
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * (i / static_cast<double>(count) + offset);
      Eigen::VectorXd v(2);
      v << std::cos(a), std::sin(a);
      out.push_back(v);
    }
    return out;
  }
  const int pairs = (dim + 1) / 2;
  for (int i = 0; i < count; ++i) {
    const unsigned long long idx = stream * static_cast<unsigned long long>(count + 1) + i + 1;
    Eigen::VectorXd v(dim);
    for (int p = 0; p < pairs; ++p) {
      const double u1 = radical_inverse(idx, kPrimes[2 * p]);
      const double u2 = radical_inverse(idx, kPrimes[2 * p + 1]);
      double z0, z1;
      box_muller(u1 <= 0.0 ? 1e-12 : u1, u2, z0, z1);
      v[2 * p] = z0;
      if (2 * p + 1 < dim) v[2 * p + 1] = z1;
    }
    const double norm = v.norm();
    if (norm < 1e-12) {
      v.setZero();
      v[0] = 1.0;
    } else {
      v /= norm;
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Eigen::VectorXd> ball_points(int dim, int count, double radius,
                                         unsigned long long stream) {
  if (dim < 1) throw std::invalid_argument("ball_points: dim must be >= 1");
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  unsigned long long idx = stream * static_cast<unsigned long long>(count + 1) + 1;
  while (static_cast<int>(out.size()) < count) {
    Eigen::VectorXd v(dim);
    for (int d = 0; d < dim; ++d)
      v[d] = radius * (2.0 * radical_inverse(idx, kPrimes[d]) - 1.0);
    ++idx;
    if (v.norm() < radius) out.push_back(v);
  }
  return out;
}

}  // namespace cmg
