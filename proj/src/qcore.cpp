#include "qbm/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qbm {

template <Scalar T>
T q_int(int n, const QContext<T>& ctx) {
  if (n < 0) throw std::invalid_argument("q_int: n must be nonnegative");
  T acc(0);
  T power(1);
  for (int j = 0; j < n; ++j) {
    acc += power;
    power *= ctx.q();
  }
  return acc;
}

template <Scalar T>
T q_factorial(int n, const QContext<T>& ctx) {
  if (n < 0) throw std::invalid_argument("q_factorial: n must be nonnegative");
  T acc(1);
  for (int j = 1; j <= n; ++j) acc *= q_int(j, ctx);
  return acc;
}

template <Scalar T>
T q_binomial(int n, int k, const QContext<T>& ctx) {
  if (k < 0 || k > n) return T(0);
  return q_factorial(n, ctx) / (q_factorial(k, ctx) * q_factorial(n - k, ctx));
}

template <Scalar T>
SampledFunction<T> SampledFunction<T>::from_polynomial(Polynomial<T> p) {
  SampledFunction f;
  f.rule = [p](const T& s) { return p(s); };
  f.regularity = Regularity::holder;
  double constant = 0.0;
  int exponent = 0;
  const auto c = p.coefficients();
  for (std::size_t j = 1; j < c.size(); ++j) {
    if (c[j] == 0) continue;
    constant += to_double(abs_value(c[j]));
    if (exponent == 0) exponent = static_cast<int>(j);
  }
  f.holder_constant = constant;
  f.holder_exponent = exponent == 0 ? 1.0 : static_cast<double>(exponent);
  f.sup_bound = p.abs_bound(1.0);
  f.polynomial = std::move(p);
  return f;
}

template <Scalar T>
SampledFunction<T> SampledFunction<T>::bounded(std::function<T(const T&)> fn, double sup) {
  SampledFunction f;
  f.rule = std::move(fn);
  f.regularity = Regularity::bounded;
  f.sup_bound = sup;
  return f;
}

template <Scalar T>
SampledFunction<T> SampledFunction<T>::holder(std::function<T(const T&)> fn, double sup,
                                              double constant, double exponent) {
  if (!(exponent > 0) || constant < 0) {
    throw std::invalid_argument("Holder declaration needs constant >= 0 and exponent > 0");
  }
  SampledFunction f;
  f.rule = std::move(fn);
  f.regularity = Regularity::holder;
  f.sup_bound = sup;
  f.holder_constant = constant;
  f.holder_exponent = exponent;
  return f;
}

template <Scalar T>
T q_derivative(const SampledFunction<T>& f, const T& s, const QContext<T>& ctx) {
  if (!(s > 0)) throw std::invalid_argument("q_derivative: s must be positive");
  const T qs = ctx.q() * s;
  return (f(s) - f(qs)) / ((T(1) - ctx.q()) * s);
}

template <Scalar T>
Polynomial<T> q_derivative(const Polynomial<T>& p, const QContext<T>& ctx) {
  const auto c = p.coefficients();
  if (c.size() <= 1) return {};
  std::vector<T> out(c.size() - 1);
  for (std::size_t n = 1; n < c.size(); ++n) out[n - 1] = c[n] * q_int(static_cast<int>(n), ctx);
  return Polynomial<T>(std::move(out));
}

template <Scalar T>
QPolynomial<T> q_time_derivative(const QPolynomial<T>& f, const QContext<T>& ctx) {
  std::vector<Polynomial<T>> out;
  out.reserve(f.coefficients().size());
  for (const auto& a : f.coefficients()) out.push_back(q_derivative(a, ctx));
  return QPolynomial<T>(std::move(out));
}

template <Scalar T>
Polynomial<T> jackson_antiderivative(const Polynomial<T>& p, const QContext<T>& ctx) {
  const auto c = p.coefficients();
  if (c.empty()) return {};
  std::vector<T> out(c.size() + 1, T(0));
  for (std::size_t n = 0; n < c.size(); ++n) out[n + 1] = c[n] / q_int(static_cast<int>(n + 1), ctx);
  return Polynomial<T>(std::move(out));
}

int jackson_truncation_index(double q, double sup, double t, double tail_eps) {
  const double scale = std::max(1.0, sup) * std::max(t, 0.0);
  int k = 0;
  double power = 1.0;
  while (power * scale >= tail_eps) {
    power *= q;
    ++k;
    if (k > 10'000'000) throw std::runtime_error("jackson_truncation_index: no convergence");
  }
  return k;
}

namespace {

template <Scalar T>
double declared_sup(const SampledFunction<T>& a, double t) {
  if (a.polynomial) return a.polynomial->abs_bound(std::max(t, 0.0));
  return a.sup_bound;
}

int stieltjes_truncation_index(double q, double sup_a, double holder_c, double holder_delta,
                               double t, double tail_eps) {
  const double amp = 2.0 * std::max(1.0, sup_a) * holder_c / (1.0 - std::pow(q, holder_delta));
  if (amp == 0.0) return 0;
  int k = 0;
  double point = q * t;  // q^{K+1} t
  while (amp * std::pow(point, holder_delta) >= tail_eps) {
    point *= q;
    ++k;
    if (k > 10'000'000) throw std::runtime_error("jackson_stieltjes: no convergence");
  }
  return k;
}

}  // namespace

template <Scalar T>
T jackson_integral(const Polynomial<T>& a, const T& t, const QContext<T>& ctx) {
  return jackson_antiderivative(a, ctx)(t);
}

template <Scalar T>
T jackson_integral(const SampledFunction<T>& a, const T& t, const QContext<T>& ctx) {
  if (a.regularity == Regularity::unbounded) {
    throw std::invalid_argument("jackson_integral: integrand must be declared bounded near 0");
  }
  if (!(t >= 0)) throw std::invalid_argument("jackson_integral: t must be nonnegative");
  if constexpr (is_exact_v<T>) {
    if (a.polynomial) return jackson_integral(*a.polynomial, t, ctx);
  }
  const double td = to_double(t);
  const int K = jackson_truncation_index(ctx.q_double(), declared_sup(a, td), td, ctx.tail_eps());
  T acc(0);
  T point = t;
  T weight(1);
  for (int k = 0; k <= K; ++k) {
    acc += weight * a(point);
    weight *= ctx.q();
    point *= ctx.q();
  }
  return (T(1) - ctx.q()) * t * acc;
}

template <Scalar T>
T jackson_stieltjes(const Polynomial<T>& a, const Polynomial<T>& b, const T& t,
                    const QContext<T>& ctx) {
  const auto ac = a.coefficients();
  const auto bc = b.coefficients();
  T acc(0);
  for (std::size_t i = 0; i < ac.size(); ++i) {
    if (ac[i] == 0) continue;
    for (std::size_t j = 1; j < bc.size(); ++j) {
      if (bc[j] == 0) continue;
      const unsigned n = static_cast<unsigned>(i + j);
      const T qj = ipow(ctx.q(), static_cast<unsigned>(j));
      const T qn = ipow(ctx.q(), n);
      acc += ac[i] * bc[j] * ipow(t, n) * (T(1) - qj) / (T(1) - qn);
    }
  }
  return acc;
}

template <Scalar T>
T jackson_stieltjes(const SampledFunction<T>& a, const SampledFunction<T>& b, const T& t,
                    const QContext<T>& ctx) {
  if (a.regularity == Regularity::unbounded) {
    throw std::invalid_argument("jackson_stieltjes: integrand must be declared bounded near 0");
  }
  if (b.regularity != Regularity::holder) {
    throw std::invalid_argument("jackson_stieltjes: integrator needs a Holder declaration");
  }
  if constexpr (is_exact_v<T>) {
    if (a.polynomial && b.polynomial) return jackson_stieltjes(*a.polynomial, *b.polynomial, t, ctx);
  }
  const double td = to_double(t);
  const int K = stieltjes_truncation_index(ctx.q_double(), declared_sup(a, td), b.holder_constant,
                                           b.holder_exponent, td, ctx.tail_eps());
  T acc(0);
  T point = t;
  T b_here = b(point);
  for (int k = 0; k <= K; ++k) {
    const T next = point * ctx.q();
    const T b_next = b(next);
    acc += a(point) * (b_here - b_next);
    point = next;
    b_here = b_next;
  }
  return acc;
}

#define QBM_INSTANTIATE(T)                                                                      \
  template T q_int<T>(int, const QContext<T>&);                                                 \
  template T q_factorial<T>(int, const QContext<T>&);                                           \
  template T q_binomial<T>(int, int, const QContext<T>&);                                       \
  template struct SampledFunction<T>;                                                           \
  template T q_derivative<T>(const SampledFunction<T>&, const T&, const QContext<T>&);          \
  template Polynomial<T> q_derivative<T>(const Polynomial<T>&, const QContext<T>&);             \
  template QPolynomial<T> q_time_derivative<T>(const QPolynomial<T>&, const QContext<T>&);      \
  template Polynomial<T> jackson_antiderivative<T>(const Polynomial<T>&, const QContext<T>&);   \
  template T jackson_integral<T>(const SampledFunction<T>&, const T&, const QContext<T>&);      \
  template T jackson_integral<T>(const Polynomial<T>&, const T&, const QContext<T>&);           \
  template T jackson_stieltjes<T>(const SampledFunction<T>&, const SampledFunction<T>&,         \
                                  const T&, const QContext<T>&);                                \
  template T jackson_stieltjes<T>(const Polynomial<T>&, const Polynomial<T>&, const T&,         \
                                  const QContext<T>&);

QBM_INSTANTIATE(double)
QBM_INSTANTIATE(Rational)
#undef QBM_INSTANTIATE

}  // namespace qbm
