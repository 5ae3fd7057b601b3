#pragma once

#include <functional>
#include <optional>

#include "qbm/context.hpp"
#include "qbm/polynomial.hpp"
#include "qbm/qpolynomial.hpp"

namespace qbm {

/// [n]_q = 1 + q + ... + q^{n-1}.
template <Scalar T>
T q_int(int n, const QContext<T>& ctx);

/// [n]_q! = [1][2]...[n]; [0]! = 1.
template <Scalar T>
T q_factorial(int n, const QContext<T>& ctx);

/// Gaussian binomial [n choose k]_q.
template <Scalar T>
T q_binomial(int n, int k, const QContext<T>& ctx);

/// Regularity near s = 0 declared by the caller. Bounds are never estimated.
enum class Regularity {
  unbounded,  // nothing known; rejected by every Jackson sum
  bounded,    // |a(s)| <= sup_bound on the integration range
  holder,     // bounded, and |b(s) - b(0)| <= holder_constant * s^holder_exponent
};

/// A function of the time variable together with its declared behaviour near 0.
template <Scalar T>
struct SampledFunction {
  std::function<T(const T&)> rule;
  Regularity regularity = Regularity::bounded;
  double sup_bound = 1.0;
  double holder_constant = 0.0;
  double holder_exponent = 0.0;
  /// Set when the function is a polynomial; enables closed forms in exact mode.
  std::optional<Polynomial<T>> polynomial;

  T operator()(const T& s) const { return rule(s); }

  /// Polynomial with Holder data derived from its coefficients (valid for s <= 1).
  static SampledFunction from_polynomial(Polynomial<T> p);

  static SampledFunction bounded(std::function<T(const T&)> f, double sup);
  static SampledFunction holder(std::function<T(const T&)> f, double sup, double constant,
                                double exponent);
};

/// (f(s) - f(q s)) / ((1 - q) s). Requires s > 0.
template <Scalar T>
T q_derivative(const SampledFunction<T>& f, const T& s, const QContext<T>& ctx);

/// Exact q-derivative of a polynomial: s^n -> [n] s^{n-1}.
template <Scalar T>
Polynomial<T> q_derivative(const Polynomial<T>& p, const QContext<T>& ctx);

/// q-derivative in the time variable of f(x, t), coefficientwise.
template <Scalar T>
QPolynomial<T> q_time_derivative(const QPolynomial<T>& f, const QContext<T>& ctx);

/// Exact Jackson anti-derivative: s^n -> s^{n+1} / [n+1].
template <Scalar T>
Polynomial<T> jackson_antiderivative(const Polynomial<T>& p, const QContext<T>& ctx);

/// Smallest K with q^K * max(1, sup) * t < tail_eps.
int jackson_truncation_index(double q, double sup, double t, double tail_eps);

/// int_0^t a(s) d_q s = (1-q) t sum_k q^k a(q^k t), summed over k = 0..K.
/// Polynomial integrands use the closed form in exact mode.
template <Scalar T>
T jackson_integral(const SampledFunction<T>& a, const T& t, const QContext<T>& ctx);

/// Closed form sum_n c_n t^{n+1} / [n+1].
template <Scalar T>
T jackson_integral(const Polynomial<T>& a, const T& t, const QContext<T>& ctx);

/// int_0^t a(s) d_q b(s) = sum_k a(q^k t) (b(q^k t) - b(q^{k+1} t)).
/// b must carry a Holder declaration; the truncation index K is the smallest with
/// 2 A C (q^{K+1} t)^delta / (1 - q^delta) < tail_eps.
template <Scalar T>
T jackson_stieltjes(const SampledFunction<T>& a, const SampledFunction<T>& b, const T& t,
                    const QContext<T>& ctx);

/// Closed form for polynomial a, b: sum_{i,j>=1} a_i b_j t^{i+j} (1 - q^j) / (1 - q^{i+j}).
template <Scalar T>
T jackson_stieltjes(const Polynomial<T>& a, const Polynomial<T>& b, const T& t,
                    const QContext<T>& ctx);

}  // namespace qbm
