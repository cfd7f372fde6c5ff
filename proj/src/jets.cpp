#include "cmgkit/jets.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <string>

namespace cmg {

namespace {

// Exponents never exceed kMaxJetOrder, so 2 bits per variable pack a full
// multi-index into a table key.
constexpr int kKeyBits = 2;
constexpr int kKeySpace = 1 << (kKeyBits * kMaxJetVars);

int pack_key(const MultiIndex& a) {
  int key = 0;
  for (int v = 0; v < kMaxJetVars; ++v) key |= static_cast<int>(a[v]) << (kKeyBits * v);
  return key;
}

double fact(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

void check_compatible(const TaylorScalar& a, const TaylorScalar& b) {
  if (a.n_vars() != b.n_vars())
    throw std::invalid_argument("jet arithmetic requires matching variable counts");
}

}  // namespace

MultiIndex multi_index(std::initializer_list<int> exponents) {
  if (exponents.size() > static_cast<std::size_t>(kMaxJetVars))
    throw std::invalid_argument("multi-index has too many entries");
  MultiIndex a{};
  int v = 0;
  for (int e : exponents) {
    if (e < 0 || e > kMaxJetOrder)
      throw std::invalid_argument("multi-index exponent out of range");
    a[v++] = static_cast<std::uint8_t>(e);
  }
  return a;
}

JetTable::JetTable(int n_vars) : n_vars_(n_vars) {
  // Graded enumeration of all |alpha| <= kMaxJetOrder; within each degree the
  // first variable varies fastest, so the degree-1 block is e_0, e_1, ...
  for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
    MultiIndex a{};
    std::vector<int> stack(n_vars, 0);
    for (;;) {
      int sum = 0;
      for (int v = 0; v < n_vars; ++v) sum += stack[v];
      if (sum == deg) {
        for (int v = 0; v < kMaxJetVars; ++v)
          a[v] = v < n_vars ? static_cast<std::uint8_t>(stack[v]) : 0;
        alpha_.push_back(a);
        degree_.push_back(deg);
        double f = 1.0;
        for (int v = 0; v < n_vars; ++v) f *= fact(stack[v]);
        factorial_.push_back(f);
      }
      int pos = 0;
      while (pos < n_vars) {
        if (stack[pos] < deg) {
          ++stack[pos];
          for (int v = 0; v < pos; ++v) stack[v] = 0;
          break;
        }
        ++pos;
      }
      if (pos == n_vars) break;
    }
    size_at_order_[deg] = static_cast<int>(alpha_.size());
  }

  key_to_pos_.assign(kKeySpace, -1);
  for (int i = 0; i < full_size(); ++i)
    key_to_pos_[pack_key(alpha_[i])] = static_cast<std::int16_t>(i);

  const int fs = full_size();
  prod_.assign(static_cast<std::size_t>(fs) * fs, -1);
  for (int i = 0; i < fs; ++i) {
    for (int j = 0; j < fs; ++j) {
      if (degree_[i] + degree_[j] > kMaxJetOrder) continue;
      MultiIndex s{};
      for (int v = 0; v < kMaxJetVars; ++v)
        s[v] = static_cast<std::uint8_t>(alpha_[i][v] + alpha_[j][v]);
      prod_[static_cast<std::size_t>(i) * fs + j] = key_to_pos_[pack_key(s)];
    }
  }

  for (int v = 0; v < n_vars; ++v) {
    shift_[v].assign(fs, -1);
    for (int i = 0; i < fs; ++i) {
      if (degree_[i] >= kMaxJetOrder) continue;
      MultiIndex s = alpha_[i];
      s[v] = static_cast<std::uint8_t>(s[v] + 1);
      shift_[v][i] = key_to_pos_[pack_key(s)];
    }
  }
}

const JetTable& JetTable::get(int n_vars) {
  if (n_vars < 1 || n_vars > kMaxJetVars)
    throw std::invalid_argument("jet variable count must be in [1, " +
                                std::to_string(kMaxJetVars) + "]");
  static const std::array<std::unique_ptr<JetTable>, kMaxJetVars> tables = [] {
    std::array<std::unique_ptr<JetTable>, kMaxJetVars> t;
    for (int n = 1; n <= kMaxJetVars; ++n) t[n - 1].reset(new JetTable(n));
    return t;
  }();
  return *tables[n_vars - 1];
}

int JetTable::position(const MultiIndex& a) const {
  for (int v = n_vars_; v < kMaxJetVars; ++v)
    if (a[v] != 0) return -1;
  int deg = 0;
  for (int v = 0; v < n_vars_; ++v) deg += a[v];
  if (deg > kMaxJetOrder) return -1;
  return key_to_pos_[pack_key(a)];
}

TaylorScalar::TaylorScalar(int n_vars, int order)
    : n_vars_(n_vars), order_(order), table_(&JetTable::get(n_vars)) {
  if (order < 0 || order > kMaxJetOrder)
    throw std::invalid_argument("jet order must be in [0, " +
                                std::to_string(kMaxJetOrder) + "]");
  coeffs_.assign(table_->size_at_order(order), 0.0);
}

TaylorScalar TaylorScalar::constant(double value, int n_vars, int order) {
  TaylorScalar r(n_vars, order);
  r.coeffs_[0] = value;
  return r;
}

TaylorScalar TaylorScalar::variable(double value, int var, int n_vars, int order) {
  if (var < 0 || var >= n_vars)
    throw std::out_of_range("jet variable index out of range");
  TaylorScalar r(n_vars, order);
  r.coeffs_[0] = value;
  if (order >= 1) r.coeffs_[1 + var] = 1.0;  // graded order: degree-1 block starts at 1
  return r;
}

double TaylorScalar::coeff(const MultiIndex& a) const {
  const int pos = table_->position(a);
  if (pos < 0 || pos >= static_cast<int>(coeffs_.size()))
    throw std::out_of_range("multi-index exceeds jet order");
  return coeffs_[pos];
}

double TaylorScalar::derivative(const MultiIndex& a) const {
  const int pos = table_->position(a);
  if (pos < 0 || pos >= static_cast<int>(coeffs_.size()))
    throw std::out_of_range("multi-index exceeds jet order");
  return coeffs_[pos] * table_->factorial(pos);
}

TaylorScalar TaylorScalar::truncated(int new_order) const {
  if (new_order >= order_) return *this;
  TaylorScalar r(n_vars_, new_order);
  std::memcpy(r.coeffs_.data(), coeffs_.data(), r.coeffs_.size() * sizeof(double));
  return r;
}

TaylorScalar TaylorScalar::derivative_jet(int var) const {
  if (var < 0 || var >= n_vars_)
    throw std::out_of_range("jet variable index out of range");
  if (order_ == 0) throw std::invalid_argument("cannot differentiate an order-0 jet");
  TaylorScalar r(n_vars_, order_ - 1);
  for (int pos = 0; pos < static_cast<int>(r.coeffs_.size()); ++pos) {
    const int src = table_->shift_position(pos, var);
    r.coeffs_[pos] = coeffs_[src] * (table_->alpha(pos)[var] + 1);
  }
  return r;
}

TaylorScalar TaylorScalar::operator-() const {
  TaylorScalar r = *this;
  for (double& c : r.coeffs_) c = -c;
  return r;
}

TaylorScalar& TaylorScalar::operator+=(const TaylorScalar& b) {
  *this = *this + b;
  return *this;
}

TaylorScalar operator+(const TaylorScalar& a, const TaylorScalar& b) {
  check_compatible(a, b);
  const int m = std::min(a.order_, b.order_);
  TaylorScalar r(a.n_vars_, m);
  for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
    r.coeffs_[i] = a.coeffs_[i] + b.coeffs_[i];
  return r;
}

TaylorScalar operator-(const TaylorScalar& a, const TaylorScalar& b) {
  check_compatible(a, b);
  const int m = std::min(a.order_, b.order_);
  TaylorScalar r(a.n_vars_, m);
  for (std::size_t i = 0; i < r.coeffs_.size(); ++i)
    r.coeffs_[i] = a.coeffs_[i] - b.coeffs_[i];
  return r;
}

TaylorScalar operator*(const TaylorScalar& a, const TaylorScalar& b) {
  check_compatible(a, b);
  const int m = std::min(a.order_, b.order_);
  const JetTable& t = *a.table_;
  TaylorScalar r(a.n_vars_, m);
  const int na = t.size_at_order(m);
  for (int i = 0; i < na; ++i) {
    const double ai = a.coeffs_[i];
    if (ai == 0.0) continue;
    // positions are graded, so partners of complementary degree are a prefix
    const int nb = t.size_at_order(m - t.degree(i));
    const std::int32_t* prow = t.product_row(i);
    for (int j = 0; j < nb; ++j) r.coeffs_[prow[j]] += ai * b.coeffs_[j];
  }
  return r;
}

TaylorScalar reciprocal(const TaylorScalar& a) {
  const double a0 = a.value();
  if (a0 == 0.0 || !std::isfinite(a0))
    throw jet_domain_error("division by a jet with zero constant term (singular evaluation point)");
  // 1/(a0 + da) = (1/a0) * (1 - t + t^2 - t^3), t = da/a0
  TaylorScalar t = a * (1.0 / a0);
  t.coeffs_[0] = 0.0;
  TaylorScalar r = TaylorScalar::constant(1.0, a.n_vars(), a.order());
  for (int k = 0; k < a.order(); ++k) r = 1.0 - t * r;
  return r * (1.0 / a0);
}

TaylorScalar operator/(const TaylorScalar& a, const TaylorScalar& b) {
  check_compatible(a, b);
  const int m = std::min(a.order(), b.order());
  return a.truncated(m) * reciprocal(b.truncated(m));
}

TaylorScalar operator+(const TaylorScalar& a, double s) {
  TaylorScalar r = a;
  r.coeffs_[0] += s;
  return r;
}
TaylorScalar operator+(double s, const TaylorScalar& a) { return a + s; }
TaylorScalar operator-(const TaylorScalar& a, double s) { return a + (-s); }
TaylorScalar operator-(double s, const TaylorScalar& a) { return (-a) + s; }
TaylorScalar operator*(const TaylorScalar& a, double s) {
  TaylorScalar r = a;
  for (double& c : r.coeffs_) c *= s;
  return r;
}
TaylorScalar operator*(double s, const TaylorScalar& a) { return a * s; }
TaylorScalar operator/(const TaylorScalar& a, double s) { return a * (1.0 / s); }
TaylorScalar operator/(double s, const TaylorScalar& a) { return reciprocal(a) * s; }

TaylorScalar TaylorScalar::compose_univariate(const double* c, int n_coeffs) const {
  // Horner evaluation of sum c[k] * (a - a0)^k in jet arithmetic.
  TaylorScalar da = *this;
  da.coeffs_[0] = 0.0;
  TaylorScalar r = TaylorScalar::constant(c[n_coeffs - 1], n_vars_, order_);
  for (int k = n_coeffs - 2; k >= 0; --k) r = r * da + c[k];
  return r;
}

namespace {

TaylorScalar compose(const TaylorScalar& a, const std::array<double, 4>& c) {
  return a.compose_univariate(c.data(), a.order() + 1);
}

}  // namespace

TaylorScalar sin(const TaylorScalar& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, {s, c, -s / 2.0, -c / 6.0});
}

TaylorScalar cos(const TaylorScalar& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose(a, {c, -s, -c / 2.0, s / 6.0});
}

TaylorScalar sinh(const TaylorScalar& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, {s, c, s / 2.0, c / 6.0});
}

TaylorScalar cosh(const TaylorScalar& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, {c, s, c / 2.0, s / 6.0});
}

TaylorScalar exp(const TaylorScalar& a) {
  const double e = std::exp(a.value());
  return compose(a, {e, e, e / 2.0, e / 6.0});
}

TaylorScalar log(const TaylorScalar& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw jet_domain_error("log of a jet with nonpositive constant term");
  const double i = 1.0 / a0;
  return compose(a, {std::log(a0), i, -i * i / 2.0, i * i * i / 3.0});
}

TaylorScalar sqrt(const TaylorScalar& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw jet_domain_error("sqrt of a jet with nonpositive constant term");
  const double s = std::sqrt(a0), i = 1.0 / a0;
  return compose(a, {s, 0.5 * s * i, -0.125 * s * i * i, 0.0625 * s * i * i * i});
}

TaylorScalar atan(const TaylorScalar& a) {
  const double x = a.value();
  const double d = 1.0 / (1.0 + x * x);
  // f' = d, f'' = -2x d^2, f''' = (6x^2 - 2) d^3
  return compose(a, {std::atan(x), d, -x * d * d, (3.0 * x * x - 1.0) * d * d * d / 3.0});
}

TaylorScalar artanh(const TaylorScalar& a) {
  const double x = a.value();
  if (!(std::abs(x) < 1.0))
    throw jet_domain_error("artanh of a jet with |constant term| >= 1");
  const double d = 1.0 / (1.0 - x * x);
  // f' = d, f'' = 2x d^2, f''' = (2 + 6x^2) d^3
  return compose(a, {std::atanh(x), d, x * d * d, (1.0 + 3.0 * x * x) * d * d * d / 3.0});
}

TaylorScalar pow(const TaylorScalar& a, double r) {
  const double a0 = a.value();
  if (!(a0 > 0.0))
    throw jet_domain_error("pow of a jet with nonpositive constant term");
  const double p = std::pow(a0, r);
  return compose(a, {p, r * p / a0, r * (r - 1.0) * p / (a0 * a0) / 2.0,
                     r * (r - 1.0) * (r - 2.0) * p / (a0 * a0 * a0) / 6.0});
}

TaylorScalar lift(const ChartPoint& p, int var, int order) {
  if (var < 0 || var >= p.dim())
    throw std::out_of_range("lift: variable index out of range");
  return TaylorScalar::variable(p.coords[var], var, p.dim(), order);
}

double extract_derivative(const TaylorScalar& a, const MultiIndex& alpha) {
  return a.derivative(alpha);
}

}  // namespace cmg
