#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "cmgkit/errors.hpp"

namespace cmg {

inline constexpr int kMaxJetVars = 6;
inline constexpr int kMaxJetOrder = 3;

// Coordinates of a point on a chart.
struct ChartPoint {
  Eigen::VectorXd coords;

  ChartPoint() = default;
  explicit ChartPoint(Eigen::VectorXd c) : coords(std::move(c)) {}
  ChartPoint(std::initializer_list<double> c)
      : coords(Eigen::Map<const Eigen::VectorXd>(c.begin(),
                                                 static_cast<long>(c.size()))) {}

  int dim() const { return static_cast<int>(coords.size()); }
  double operator[](int i) const { return coords[i]; }
};

// Exponent tuple of a monomial; entries beyond the active variable count
// are zero.
using MultiIndex = std::array<std::uint8_t, kMaxJetVars>;

MultiIndex multi_index(std::initializer_list<int> exponents);

// Shared enumeration of all multi-indices with |alpha| <= kMaxJetOrder for a
// fixed number of variables, in graded lexicographic order. Positions of
// indices with |alpha| <= m form a prefix, so jets of every truncation order
// share one table per variable count.
class JetTable {
 public:
  static const JetTable& get(int n_vars);

  int n_vars() const { return n_vars_; }
  int full_size() const { return static_cast<int>(alpha_.size()); }
  int size_at_order(int order) const { return size_at_order_[order]; }
  const MultiIndex& alpha(int pos) const { return alpha_[pos]; }
  int degree(int pos) const { return degree_[pos]; }
  double factorial(int pos) const { return factorial_[pos]; }

  // Position of a multi-index, or -1 when it is not representable.
  int position(const MultiIndex& a) const;
  // Position of alpha(i) + alpha(j), or -1 when past kMaxJetOrder.
  int product_position(int i, int j) const { return prod_[i * full_size() + j]; }
  const std::int32_t* product_row(int i) const { return &prod_[i * full_size()]; }
  // Position of alpha(pos) + e_var (always representable for degree <= 2).
  int shift_position(int pos, int var) const { return shift_[var][pos]; }

 private:
  explicit JetTable(int n_vars);

  int n_vars_;
  std::array<int, kMaxJetOrder + 1> size_at_order_{};
  std::vector<MultiIndex> alpha_;
  std::vector<int> degree_;
  std::vector<double> factorial_;
  std::vector<std::int16_t> key_to_pos_;
  std::vector<std::int32_t> prod_;
  std::array<std::vector<std::int32_t>, kMaxJetVars> shift_;
};

// Truncated multivariate Taylor polynomial (jet). Stored coefficients are
// partial derivatives divided by alpha!, so the constant coefficient is the
// function value at the expansion point. Immutable after construction; all
// operations return new values.
class TaylorScalar {
 public:
  TaylorScalar() = default;

  static TaylorScalar constant(double value, int n_vars, int order);
  // Jet of the coordinate function x_var at the given value.
  static TaylorScalar variable(double value, int var, int n_vars, int order);

  int n_vars() const { return n_vars_; }
  int order() const { return order_; }
  bool empty() const { return coeffs_.empty(); }

  double value() const { return coeffs_[0]; }
  double coeff(const MultiIndex& a) const;
  double coeff_at(int pos) const { return coeffs_[pos]; }
  // alpha! * coeff(alpha), i.e. the mixed partial derivative d^alpha.
  double derivative(const MultiIndex& a) const;

  TaylorScalar truncated(int new_order) const;
  // Jet of the partial derivative with respect to x_var; drops one order.
  TaylorScalar derivative_jet(int var) const;

  TaylorScalar operator-() const;
  TaylorScalar& operator+=(const TaylorScalar& b);

  friend TaylorScalar operator+(const TaylorScalar& a, const TaylorScalar& b);
  friend TaylorScalar operator-(const TaylorScalar& a, const TaylorScalar& b);
  friend TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b);
  friend TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b);

  friend TaylorScalar operator+(const TaylorScalar& a, double s);
  friend TaylorScalar operator+(double s, const TaylorScalar& a);
  friend TaylorScalar operator-(const TaylorScalar& a, double s);
  friend TaylorScalar operator-(double s, const TaylorScalar& a);
  friend TaylorScalar operator*(const TaylorScalar& a, double s);
  friend TaylorScalar operator*(double s, const TaylorScalar& a);
  friend TaylorScalar operator/(const TaylorScalar& a, double s);
  friend TaylorScalar operator/(double s, const TaylorScalar& a);

  // Composition with a univariate function given by its Taylor coefficients
  // c[k] = f^(k)(value())/k! up to the jet order.
  TaylorScalar compose_univariate(const double* c, int n_coeffs) const;

 private:
  TaylorScalar(int n_vars, int order);

  int n_vars_ = 0;
  int order_ = 0;
  const JetTable* table_ = nullptr;
  std::vector<double> coeffs_;

  friend TaylorScalar reciprocal(const TaylorScalar& a);
};

TaylorScalar reciprocal(const TaylorScalar& a);

TaylorScalar sin(const TaylorScalar& a);
TaylorScalar cos(const TaylorScalar& a);
TaylorScalar sinh(const TaylorScalar& a);
TaylorScalar cosh(const TaylorScalar& a);
TaylorScalar exp(const TaylorScalar& a);
TaylorScalar log(const TaylorScalar& a);
TaylorScalar sqrt(const TaylorScalar& a);
TaylorScalar atan(const TaylorScalar& a);
TaylorScalar artanh(const TaylorScalar& a);
TaylorScalar pow(const TaylorScalar& a, double exponent);

// Jet of the coordinate function x_{var} at the point.
TaylorScalar lift(const ChartPoint& p, int var, int order);

// alpha! * coeff(alpha): the mixed partial derivative of the underlying
// function at the expansion point.
double extract_derivative(const TaylorScalar& a, const MultiIndex& alpha);

}  // namespace cmg
