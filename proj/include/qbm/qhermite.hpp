#pragma once

#include <vector>

#include "qbm/context.hpp"
#include "qbm/qpolynomial.hpp"

namespace qbm {

/// Monic continuous q-Hermite polynomial h_n(x;t), from
///   x h_n = h_{n+1} + t [n] h_{n-1},  h_0 = 1, h_1 = x,
/// returned as a polynomial in x with polynomial-in-t coefficients.
template <Scalar T>
QPolynomial<T> qhermite(int n, const QContext<T>& ctx);

/// h_0 .. h_{n_max}.
template <Scalar T>
std::vector<QPolynomial<T>> qhermite_table(int n_max, const QContext<T>& ctx);

/// Values h_0(x;t) .. h_{n_max}(x;t) via the recurrence (no polynomial expansion).
template <Scalar T>
std::vector<T> hermite_values(int n_max, const T& x, const T& t, const QContext<T>& ctx);

/// Exact change of basis f = sum_m b_m(t) h_m(x;t) / [m]! by triangular back-substitution.
template <Scalar T>
HermiteCoefficients<T> to_hermite_basis(const QPolynomial<T>& f, const QContext<T>& ctx);

/// Inverse of to_hermite_basis.
template <Scalar T>
QPolynomial<T> from_hermite_basis(const HermiteCoefficients<T>& coeffs, const QContext<T>& ctx);

template <Scalar T>
T eval(const QPolynomial<T>& f, const T& x, const T& t) {
  return f(x, t);
}

/// Checks h_n(x;t) = t^{n/2} h_n(x/sqrt(t); 1) in floating point. Throws for t <= 0.
bool scaling_check(int n, double x, double t, const FloatContext& ctx, double tol = 1e-12);

/// Sharp constant C_n = (1-q)^{-n/2} sum_k [n choose k]_q.
double growth_constant(int n, double q);

/// C_n t^{n/2}: dominates |h_n(x;t)| on |x| <= 2 sqrt(t) / sqrt(1-q).
double growth_bound(int n, double t, const FloatContext& ctx);

/// Half-width 2 sqrt(t) / sqrt(1-q) of the support of the time-t marginal.
double support_half_width(double t, double q);

}  // namespace qbm
