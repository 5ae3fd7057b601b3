#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "qbm/context.hpp"
#include "qbm/measures.hpp"
#include "qbm/process.hpp"
#include "qbm/qpolynomial.hpp"

namespace qbm {

// Exact operators act on f(x, s): a polynomial in x whose coefficients are polynomials in
// the time variable s, which is also the time of the q-Hermite basis h_m(x; s).

/// Basis route: h_{m+1}(.;s) -> [m+1] h_m(.;s), h_0 -> 0.
template <Scalar T>
QPolynomial<T> nabla_exact(const QPolynomial<T>& f, const QContext<T>& ctx);

/// h_m(.;s) -> [m] h_{m-1}(.; q s).
template <Scalar T>
QPolynomial<T> A_operator(const QPolynomial<T>& f, const QContext<T>& ctx);

/// Delta(x^n) = sum_{k<n} x^k A(x^{n-k-1}), extended linearly.
template <Scalar T>
QPolynomial<T> delta_exact(const QPolynomial<T>& f, const QContext<T>& ctx);

/// Delta f = -sum_m b_m(s) (D_{q,s} h_m)(x; s) / [m]! for f = sum_m b_m h_m / [m]!.
template <Scalar T>
QPolynomial<T> delta_time_route(const QPolynomial<T>& f, const QContext<T>& ctx);

/// Conditional expectation of p(Y) for Y ~ P_{ratio*s, s}(x0, .), as a polynomial in x0
/// (coefficients in s). Exact by the martingale property of h_m.
template <Scalar T>
QPolynomial<T> transport(const QPolynomial<T>& p, const T& ratio, const QContext<T>& ctx);

/// Kernel definitions evaluated exactly on polynomials through transport():
/// nabla f(x) = int (f(y)-f(x))/(y-x) nu(dy), nu = P_{q^2 s, s}(q x, .);
/// delta f(x) = int f[x,y,z] mu(dy,dz), mu = P_{q s, s}(x, dy) P_{q^2 s, s}(q y, dz).
template <Scalar T>
QPolynomial<T> nabla_kernel(const QPolynomial<T>& f, const QContext<T>& ctx);
template <Scalar T>
QPolynomial<T> delta_kernel(const QPolynomial<T>& f, const QContext<T>& ctx);

/// The two kernels at a point (x, s).
struct KernelSpec {
  DensitySpec nu;
  DensitySpec mu_outer;
  double x;
  double s;

  /// Requires s > 0 and |x| <= 2 sqrt(q s) / sqrt(1-q), the support at time q s.
  static KernelSpec at(double x, double s, const FloatContext& ctx);
  /// Inner kernel of mu given the outer draw y: P_{q^2 s, s}(q y, .).
  DensitySpec mu_inner(double y, const FloatContext& ctx) const;
};

struct NumericOptions {
  /// |y - x| below this multiple of the support half-width counts as coincidence.
  double coincidence = 1e-8;
  /// Finite-difference step, as a multiple of the support half-width, for non-polynomial f.
  double fd_step = 1e-5;
  IntegrationOptions integration{1e-12, 4096, 1e-13};
};

/// Quadrature of the first divided difference against nu.
double nabla_numeric(const Polynomial<double>& f, double x, double s, const FloatContext& ctx,
                     const NumericOptions& opts = {});
double nabla_numeric(const std::function<double(double)>& f, double x, double s,
                     const FloatContext& ctx, const NumericOptions& opts = {});

/// Nested quadrature of the second divided difference against mu.
double delta_numeric(const Polynomial<double>& f, double x, double s, const FloatContext& ctx,
                     const NumericOptions& opts = {});
double delta_numeric(const std::function<double(double)>& f, double x, double s,
                     const FloatContext& ctx, const NumericOptions& opts = {});

/// Total masses of nu and mu (both should be 1).
std::pair<double, double> kernel_masses(double x, double s, const FloatContext& ctx);

template <Scalar T>
struct ItoResidual {
  T lhs{};         // f(B_t, t) - f(0, 0)
  T stochastic{};  // int nabla f (B_s, s) dB over the grid cells
  T drift{};       // Jackson integral of (D_{q,s} f)(B_{qs}, s)
  T second{};      // Jackson integral of (Delta f)(B_{qs}, s)
  T residual{};    // |lhs - stochastic - drift - second|
  double tail_bound = 0.0;
  int depth = 0;
  std::uint64_t seed = 0;
};

/// Residual of the q-Ito formula on one path, all three integrals truncated to the grid
/// cells k < K, with B_{qs} at s = t q^k read from index k+1. tail_bound is the sum of the
/// three analytic tails. Throws std::domain_error when tail_bound exceeds max_tail.
template <Scalar T>
ItoResidual<T> ito_residual(const QPolynomial<T>& f, const PathSamples<T>& path, const T& horizon,
                            const QContext<T>& ctx,
                            double max_tail = std::numeric_limits<double>::infinity());

/// Bound on sum_{k>=K} (1-q) t_k |g(B_{k+1}, t_k)| using |B_{k+1}| <= 2 sqrt(q t_k) / sqrt(1-q).
template <Scalar T>
double jackson_path_tail_bound(const QPolynomial<T>& g, double t_K, double q);

}  // namespace qbm
