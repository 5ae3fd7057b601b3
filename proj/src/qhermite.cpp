#include "qbm/qhermite.hpp"

#include <cmath>
#include <stdexcept>

#include "qbm/qcore.hpp"

namespace qbm {

template <Scalar T>
std::vector<QPolynomial<T>> qhermite_table(int n_max, const QContext<T>& ctx) {
  if (n_max < 0) throw std::invalid_argument("qhermite: n must be nonnegative");
  std::vector<QPolynomial<T>> h;
  h.reserve(static_cast<std::size_t>(n_max) + 1);
  h.push_back(QPolynomial<T>::constant(T(1)));
  if (n_max >= 1) h.push_back(QPolynomial<T>::x_power(1));
  for (int n = 1; n < n_max; ++n) {
    // h_{n+1} = x h_n - t [n] h_{n-1}
    const auto t_qn = Polynomial<T>::monomial(1, q_int(n, ctx));
    h.push_back(h[n].shifted(1) - h[n - 1] * t_qn);
  }
  return h;
}

template <Scalar T>
QPolynomial<T> qhermite(int n, const QContext<T>& ctx) {
  return qhermite_table(n, ctx).back();
}

template <Scalar T>
std::vector<T> hermite_values(int n_max, const T& x, const T& t, const QContext<T>& ctx) {
  std::vector<T> h(static_cast<std::size_t>(n_max) + 1);
  h[0] = T(1);
  if (n_max >= 1) h[1] = x;
  T qn(1);  // [n]
  T qpow(1);
  for (int n = 1; n < n_max; ++n) {
    if (n > 1) {
      qpow *= ctx.q();
      qn += qpow;
    }
    h[n + 1] = x * h[n] - t * qn * h[n - 1];
  }
  return h;
}

template <Scalar T>
HermiteCoefficients<T> to_hermite_basis(const QPolynomial<T>& f, const QContext<T>& ctx) {
  HermiteCoefficients<T> out;
  const int d = f.degree();
  if (d < 0) return out;
  const auto h = qhermite_table(d, ctx);
  out.b.resize(static_cast<std::size_t>(d) + 1);
  QPolynomial<T> rest = f;
  for (int m = d; m >= 0; --m) {
    const Polynomial<T> lead = rest.coefficient(static_cast<std::size_t>(m));
    if (lead.is_zero()) continue;
    out.b[m] = lead * q_factorial(m, ctx);
    rest -= h[m] * lead;
  }
  return out;
}

template <Scalar T>
QPolynomial<T> from_hermite_basis(const HermiteCoefficients<T>& coeffs, const QContext<T>& ctx) {
  const int d = coeffs.degree();
  if (d < 0) return {};
  const auto h = qhermite_table(d, ctx);
  QPolynomial<T> f;
  for (int m = 0; m <= d; ++m) {
    const auto& b = coeffs[static_cast<std::size_t>(m)];
    if (b.is_zero()) continue;
    f += h[m] * (b * (T(1) / q_factorial(m, ctx)));
  }
  return f;
}

bool scaling_check(int n, double x, double t, const FloatContext& ctx, double tol) {
  if (!(t > 0)) throw std::invalid_argument("scaling_check: t must be positive");
  const double lhs = hermite_values(n, x, t, ctx)[n];
  const double root = std::sqrt(t);
  const double rhs = std::pow(root, n) * hermite_values(n, x / root, 1.0, ctx)[n];
  return std::abs(lhs - rhs) <= tol * std::max(1.0, std::abs(lhs));
}

double growth_constant(int n, double q) {
  const FloatContext ctx(q);
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) sum += q_binomial(n, k, ctx);
  return std::pow(1.0 - q, -0.5 * n) * sum;
}

double growth_bound(int n, double t, const FloatContext& ctx) {
  if (t < 0) throw std::invalid_argument("growth_bound: t must be nonnegative");
  return growth_constant(n, ctx.q()) * std::pow(t, 0.5 * n);
}

double support_half_width(double t, double q) { return 2.0 * std::sqrt(t) / std::sqrt(1.0 - q); }

#define QBM_INSTANTIATE(T)                                                                       \
  template QPolynomial<T> qhermite<T>(int, const QContext<T>&);                                  \
  template std::vector<QPolynomial<T>> qhermite_table<T>(int, const QContext<T>&);               \
  template std::vector<T> hermite_values<T>(int, const T&, const T&, const QContext<T>&);        \
  template HermiteCoefficients<T> to_hermite_basis<T>(const QPolynomial<T>&, const QContext<T>&); \
  template QPolynomial<T> from_hermite_basis<T>(const HermiteCoefficients<T>&, const QContext<T>&);

QBM_INSTANTIATE(double)
QBM_INSTANTIATE(Rational)
#undef QBM_INSTANTIATE

}  // namespace qbm
