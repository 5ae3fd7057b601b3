#pragma once

#include <cstdint>
#include <functional>

#include "qbm/context.hpp"
#include "qbm/process.hpp"
#include "qbm/qcore.hpp"
#include "qbm/qpolynomial.hpp"

namespace qbm {

/// Integrand f(x,s) = sum_m b_m(s) h_m(x;s) / [m]!.
template <Scalar T>
using PolynomialIntegrand = HermiteCoefficients<T>;

/// Value of a truncated stochastic integral on one path. The sums run over grid cells
/// k = 0..K-1; tail_bound dominates the omitted cells k >= K on every path.
template <Scalar T>
struct StochasticIntegralResult {
  T value{};
  int depth = 0;
  double tail_bound = 0.0;
  std::uint64_t seed = 0;
};

/// sum_m 1/[m+1]! sum_{k<K} b_m(t_k) (h_{m+1}(B_k; t_k) - h_{m+1}(B_{k+1}; t_{k+1})).
/// Throws when the path does not start at the horizon.
template <Scalar T>
StochasticIntegralResult<T> integrate_def(const PolynomialIntegrand<T>& f, const PathSamples<T>& path,
                                          const T& horizon, const QContext<T>& ctx);

/// Boundary form sum_m b_m(t) h_{m+1}(B_t;t)/[m+1]! - sum_m 1/[m+1]! int h_{m+1}(B_{qs};qs) d_q b_m(s).
/// Differs from integrate_def by exactly sum_m b_m(t_K) h_{m+1}(B_K; t_K) / [m+1]!.
template <Scalar T>
StochasticIntegralResult<T> integrate_byparts(const PolynomialIntegrand<T>& f,
                                              const PathSamples<T>& path, const T& horizon,
                                              const QContext<T>& ctx);

/// Bound on the omitted cells k >= K of integrate_def:
/// sum_m C_{m+1} t_K^{(m+1)/2} / [m+1]! (sup |b_m| + TV(b_m)) over [0, t_K].
template <Scalar T>
double integral_tail_bound(const PolynomialIntegrand<T>& f, double t_K, double q);

/// Bound on the omitted cells of integrate_byparts: as above with TV(b_m) only.
template <Scalar T>
double byparts_tail_bound(const PolynomialIntegrand<T>& f, double t_K, double q);

/// Jackson-Stieltjes sum sum_{k<K} b(t_k) (B_k - B_{k+1}) for a non-random integrand.
template <Scalar T>
StochasticIntegralResult<T> deterministic_integral(const Polynomial<T>& b, const PathSamples<T>& path,
                                                   const T& horizon, const QContext<T>& ctx);

/// Same for a sampled integrand; b must carry a Holder declaration, which bounds the tail.
StochasticIntegralResult<double> deterministic_integral(const SampledFunction<double>& b,
                                                        const PathSamples<double>& path,
                                                        double horizon, const FloatContext& ctx);

/// c prod_{k<N} (1 - (1-q) a q^k x + (1-q) a^2 t q^{2k})^{-1} with N from prod_eps.
/// Throws std::domain_error when a factor is not positive (x outside the support).
double stochastic_exponential(double a, double c, double x, double t, const FloatContext& ctx);

/// Partial series c sum_{n<=degree} a^n h_n(x;t) / [n]!.
double stochastic_exponential_series(double a, double c, double x, double t, int degree,
                                     const FloatContext& ctx);

/// Largest horizon 1 / (a^2 (1-q)) on which the exponential solves the equation in L2.
double exponential_radius(double a, double q);

struct SdeResidual {
  double residual = 0.0;
  /// Bound on |Z_t - partial series of degree+1| on the support.
  double series_tail_bound = 0.0;
  /// Bound on the omitted grid cells of the integral of the degree-d truncation.
  double grid_tail_bound = 0.0;
  int degree = 0;
  int depth = 0;
};

/// |Z_t - c - a int Z^{(d)} dB| on one path, with Z^{(d)} the degree-d truncation of Z.
/// Throws std::domain_error when the horizon is outside the radius.
SdeResidual sde_residual(double a, double c, const PathSamples<double>& path, int degree,
                         const FloatContext& ctx);

/// sum_{n=d+1}^{n_max} (1/[n]!) int_0^t b_n(s)^2 s^n d_q s, an upper estimate for the
/// mean-square distance between the degree-d prefix and the full series integrand.
double series_tail_estimate(const std::function<Polynomial<double>(int)>& coefficient, int degree,
                            int n_max, double t, const FloatContext& ctx);

}  // namespace qbm
