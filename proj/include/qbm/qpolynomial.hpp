#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qbm/polynomial.hpp"

namespace qbm {

enum class Basis { monomial, q_hermite };

/// Polynomial f(x, t) = sum_i a_i(t) x^i in the space variable x whose coefficients
/// a_i are polynomials in the time variable t. Stored in the monomial basis; the
/// q-Hermite representation is HermiteCoefficients.
template <Scalar T>
class QPolynomial {
 public:
  using Coefficient = Polynomial<T>;

  QPolynomial() = default;
  explicit QPolynomial(std::vector<Coefficient> coeffs) : c_(std::move(coeffs)) { trim(); }

  static QPolynomial constant(T value) { return QPolynomial({Coefficient::constant(std::move(value))}); }
  static QPolynomial time_only(Coefficient a) { return QPolynomial({std::move(a)}); }

  /// coeff(t) * x^n.
  static QPolynomial x_power(std::size_t n, Coefficient coeff = Coefficient::constant(T(1))) {
    std::vector<Coefficient> c(n + 1);
    c[n] = std::move(coeff);
    return QPolynomial(std::move(c));
  }

  /// Builds from a univariate polynomial in x with constant-in-time coefficients.
  static QPolynomial from_x_polynomial(const Polynomial<T>& p) {
    std::vector<Coefficient> c;
    for (const auto& a : p.coefficients()) c.push_back(Coefficient::constant(a));
    return QPolynomial(std::move(c));
  }

  static constexpr Basis basis() { return Basis::monomial; }

  /// Degree in x; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  int time_degree() const {
    int d = -1;
    for (const auto& a : c_) d = std::max(d, a.degree());
    return d;
  }
  bool is_zero() const { return c_.empty(); }

  const Coefficient& coefficient(std::size_t i) const {
    static const Coefficient zero;
    return i < c_.size() ? c_[i] : zero;
  }
  const std::vector<Coefficient>& coefficients() const { return c_; }

  T operator()(const T& x, const T& t) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + (*it)(t);
    return acc;
  }

  /// Freezes the time variable, leaving a polynomial in x.
  Polynomial<T> at_time(const T& t) const {
    std::vector<T> out;
    out.reserve(c_.size());
    for (const auto& a : c_) out.push_back(a(t));
    return Polynomial<T>(std::move(out));
  }

  /// f(x, t) -> f(x, factor * t).
  QPolynomial time_scaled(const T& factor) const {
    std::vector<Coefficient> out;
    out.reserve(c_.size());
    for (const auto& a : c_) out.push_back(a.scaled_argument(factor));
    return QPolynomial(std::move(out));
  }

  /// f(x, t) -> f(factor * x, t).
  QPolynomial x_scaled(const T& factor) const {
    std::vector<Coefficient> out(c_);
    T power(1);
    for (auto& a : out) {
      a *= power;
      power *= factor;
    }
    return QPolynomial(std::move(out));
  }

  /// Multiplies by x^n.
  QPolynomial shifted(std::size_t n) const {
    if (is_zero()) return {};
    std::vector<Coefficient> out(n);
    out.insert(out.end(), c_.begin(), c_.end());
    return QPolynomial(std::move(out));
  }

  QPolynomial& operator+=(const QPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  QPolynomial& operator-=(const QPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  QPolynomial& operator*=(const T& k) {
    for (auto& a : c_) a *= k;
    trim();
    return *this;
  }
  QPolynomial& operator*=(const Coefficient& a) {
    for (auto& c : c_) c = c * a;
    trim();
    return *this;
  }

  friend QPolynomial operator+(QPolynomial a, const QPolynomial& b) { return a += b; }
  friend QPolynomial operator-(QPolynomial a, const QPolynomial& b) { return a -= b; }
  friend QPolynomial operator*(QPolynomial a, const T& k) { return a *= k; }
  friend QPolynomial operator*(const T& k, QPolynomial a) { return a *= k; }
  friend QPolynomial operator*(QPolynomial f, const Coefficient& a) { return f *= a; }
  friend QPolynomial operator*(const Coefficient& a, QPolynomial f) { return f *= a; }

  friend QPolynomial operator*(const QPolynomial& a, const QPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Coefficient> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    }
    return QPolynomial(std::move(out));
  }

  friend bool operator==(const QPolynomial& a, const QPolynomial& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  std::vector<Coefficient> c_;
};

/// Coefficients b_0(t)..b_d(t) of f(x,t) = sum_m b_m(t) h_m(x;t) / [m]!.
template <Scalar T>
struct HermiteCoefficients {
  std::vector<Polynomial<T>> b;

  static constexpr Basis basis() { return Basis::q_hermite; }

  int degree() const {
    for (int m = static_cast<int>(b.size()) - 1; m >= 0; --m) {
      if (!b[static_cast<std::size_t>(m)].is_zero()) return m;
    }
    return -1;
  }

  const Polynomial<T>& operator[](std::size_t m) const {
    static const Polynomial<T> zero;
    return m < b.size() ? b[m] : zero;
  }

  friend bool operator==(const HermiteCoefficients& x, const HermiteCoefficients& y) {
    const auto n = std::max(x.b.size(), y.b.size());
    for (std::size_t m = 0; m < n; ++m) {
      if (!(x[m] == y[m])) return false;
    }
    return true;
  }
};

}  // namespace qbm
