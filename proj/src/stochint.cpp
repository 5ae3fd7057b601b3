#include "qbm/stochint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qbm/qhermite.hpp"

namespace qbm {
namespace {

template <Scalar T>
void check_path(const PathSamples<T>& path, const T& horizon) {
  if (path.values.size() < 2 || path.times.size() != path.values.size())
    throw std::invalid_argument("stochastic integral: path needs at least two grid points");
  const T& t0 = path.times.front();
  bool same;
  if constexpr (is_exact_v<T>) {
    same = t0 == horizon;
  } else {
    same = std::abs(t0 - horizon) <= 1e-12 * std::abs(horizon);
  }
  if (!same) throw std::invalid_argument("stochastic integral: path horizon differs from integration horizon");
}

// hv[k][n] = h_n(B_k; t_k) for n <= n_max.
template <Scalar T>
std::vector<std::vector<T>> hermite_grid(int n_max, const PathSamples<T>& path, const QContext<T>& ctx) {
  std::vector<std::vector<T>> hv(path.values.size());
  for (std::size_t k = 0; k < hv.size(); ++k) hv[k] = hermite_values(n_max, path.values[k], path.times[k], ctx);
  return hv;
}

template <Scalar T>
double variation_on(const Polynomial<T>& b, double r) {
  return b.abs_bound(r) - to_double(abs_value(b[0]));
}

}  // namespace

template <Scalar T>
double integral_tail_bound(const PolynomialIntegrand<T>& f, double t_K, double q) {
  const FloatContext fctx(q);
  double bound = 0.0;
  for (int m = 0; m <= f.degree(); ++m) {
    const auto& b = f[static_cast<std::size_t>(m)];
    if (b.is_zero()) continue;
    const double weight = b.abs_bound(t_K) + variation_on(b, t_K);
    bound += growth_bound(m + 1, t_K, fctx) / q_factorial(m + 1, fctx) * weight;
  }
  return bound;
}

template <Scalar T>
double byparts_tail_bound(const PolynomialIntegrand<T>& f, double t_K, double q) {
  const FloatContext fctx(q);
  double bound = 0.0;
  for (int m = 0; m <= f.degree(); ++m) {
    const auto& b = f[static_cast<std::size_t>(m)];
    if (b.is_zero()) continue;
    bound += growth_bound(m + 1, t_K, fctx) / q_factorial(m + 1, fctx) * variation_on(b, t_K);
  }
  return bound;
}

template <Scalar T>
StochasticIntegralResult<T> integrate_def(const PolynomialIntegrand<T>& f, const PathSamples<T>& path,
                                          const T& horizon, const QContext<T>& ctx) {
  check_path(path, horizon);
  const int K = path.depth();
  const int d = f.degree();
  StochasticIntegralResult<T> out;
  out.depth = K;
  out.seed = path.seed;
  out.tail_bound = integral_tail_bound(f, to_double(path.times.back()), ctx.q_double());
  if (d < 0) return out;
  const auto hv = hermite_grid(d + 1, path, ctx);
  for (int m = 0; m <= d; ++m) {
    const auto& b = f[static_cast<std::size_t>(m)];
    if (b.is_zero()) continue;
    T sum(0);
    for (int k = 0; k < K; ++k) sum += b(path.times[k]) * (hv[k][m + 1] - hv[k + 1][m + 1]);
    out.value += sum / q_factorial(m + 1, ctx);
  }
  return out;
}

template <Scalar T>
StochasticIntegralResult<T> integrate_byparts(const PolynomialIntegrand<T>& f,
                                              const PathSamples<T>& path, const T& horizon,
                                              const QContext<T>& ctx) {
  check_path(path, horizon);
  const int K = path.depth();
  const int d = f.degree();
  StochasticIntegralResult<T> out;
  out.depth = K;
  out.seed = path.seed;
  out.tail_bound = byparts_tail_bound(f, to_double(path.times.back()), ctx.q_double());
  if (d < 0) return out;
  const auto hv = hermite_grid(d + 1, path, ctx);
  for (int m = 0; m <= d; ++m) {
    const auto& b = f[static_cast<std::size_t>(m)];
    if (b.is_zero()) continue;
    T sum = b(path.times[0]) * hv[0][m + 1];
    for (int k = 0; k < K; ++k) sum -= hv[k + 1][m + 1] * (b(path.times[k]) - b(path.times[k + 1]));
    out.value += sum / q_factorial(m + 1, ctx);
  }
  return out;
}

template <Scalar T>
StochasticIntegralResult<T> deterministic_integral(const Polynomial<T>& b, const PathSamples<T>& path,
                                                   const T& horizon, const QContext<T>& ctx) {
  PolynomialIntegrand<T> f;
  f.b = {b};
  return integrate_def(f, path, horizon, ctx);
}

StochasticIntegralResult<double> deterministic_integral(const SampledFunction<double>& b,
                                                        const PathSamples<double>& path,
                                                        double horizon, const FloatContext& ctx) {
  if (b.regularity != Regularity::holder)
    throw std::invalid_argument("deterministic_integral: integrand needs a Holder declaration");
  check_path(path, horizon);
  const int K = path.depth();
  const double q = ctx.q();
  StochasticIntegralResult<double> out;
  out.depth = K;
  out.seed = path.seed;
  for (int k = 0; k < K; ++k) out.value += b(path.times[k]) * (path.values[k] - path.values[k + 1]);
  // |b_K B_K| + sum_{k>K} |b_k - b_{k-1}| |B_k| with |b_k - b(0)| <= C t_k^delta.
  const double tK = path.times.back();
  const double p = b.holder_exponent + 0.5;
  const double c1 = 2.0 / std::sqrt(1.0 - q);
  out.tail_bound = c1 * (b.sup_bound * std::sqrt(tK) + 2.0 * b.holder_constant * std::pow(tK, p) / (1.0 - std::pow(q, p)));
  return out;
}

double stochastic_exponential(double a, double c, double x, double t, const FloatContext& ctx) {
  const double q = ctx.q();
  const int N = product_order(q, ctx.prod_eps());
  double value = c;
  double qk = 1.0;
  for (int k = 0; k < N; ++k) {
    const double factor = 1.0 - (1.0 - q) * a * qk * x + (1.0 - q) * a * a * t * qk * qk;
    if (!(factor > 0)) throw std::domain_error("stochastic_exponential: non-positive product factor; x outside the support");
    value /= factor;
    qk *= q;
  }
  return value;
}

double stochastic_exponential_series(double a, double c, double x, double t, int degree,
                                     const FloatContext& ctx) {
  if (degree < 0) throw std::invalid_argument("stochastic_exponential_series: negative degree");
  const auto h = hermite_values(degree, x, t, ctx);
  double sum = 0.0;
  double an = 1.0;
  double fact = 1.0;
  for (int n = 0; n <= degree; ++n) {
    if (n > 0) {
      an *= a;
      fact *= q_int(n, ctx);
    }
    sum += an * h[n] / fact;
  }
  return c * sum;
}

double exponential_radius(double a, double q) {
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (a * a * (1.0 - q));
}

namespace {

// sum_{n>=n0} |a|^n C_n t^{n/2} / [n]!, or +inf when the terms do not decay.
double hermite_series_tail(double a, double t, int n0, const FloatContext& ctx) {
  if (a == 0.0 || t == 0.0) return 0.0;
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int n = n0; n < n0 + 4000; ++n) {
    const double term = std::pow(std::abs(a), n) * growth_bound(n, t, ctx) / q_factorial(n, ctx);
    if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
    sum += term;
    if (term < 1e-18 * sum && term < prev) return sum;
    prev = term;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

SdeResidual sde_residual(double a, double c, const PathSamples<double>& path, int degree,
                         const FloatContext& ctx) {
  if (degree < 0) throw std::invalid_argument("sde_residual: negative degree");
  if (path.values.size() < 2) throw std::invalid_argument("sde_residual: path needs at least two grid points");
  const double t = path.times.front();
  if (!(t < exponential_radius(a, ctx.q())))
    throw std::domain_error("sde_residual: horizon outside the convergence radius 1/(a^2 (1-q))");
  SdeResidual out;
  out.degree = degree;
  out.depth = path.depth();
  if (a == 0.0) return out;

  PolynomialIntegrand<double> zd;
  double an = c;
  for (int n = 0; n <= degree; ++n, an *= a) zd.b.push_back(Polynomial<double>::constant(an));
  const auto integral = integrate_def(zd, path, t, ctx);
  const double z = stochastic_exponential(a, c, path.values.front(), t, ctx);
  out.residual = std::abs(z - c - a * integral.value);
  out.series_tail_bound = std::abs(c) * hermite_series_tail(a, t, degree + 2, ctx);
  out.grid_tail_bound = std::abs(a) * integral.tail_bound;
  return out;
}

double series_tail_estimate(const std::function<Polynomial<double>(int)>& coefficient, int degree,
                            int n_max, double t, const FloatContext& ctx) {
  double sum = 0.0;
  for (int n = degree + 1; n <= n_max; ++n) {
    const auto b = coefficient(n);
    sum += jackson_integral(b * b * Polynomial<double>::monomial(static_cast<std::size_t>(n)), t, ctx) /
           q_factorial(n, ctx);
  }
  return sum;
}

#define QBM_INSTANTIATE(T)                                                                          \
  template double integral_tail_bound<T>(const PolynomialIntegrand<T>&, double, double);           \
  template double byparts_tail_bound<T>(const PolynomialIntegrand<T>&, double, double);            \
  template StochasticIntegralResult<T> integrate_def<T>(const PolynomialIntegrand<T>&,             \
                                                        const PathSamples<T>&, const T&,           \
                                                        const QContext<T>&);                       \
  template StochasticIntegralResult<T> integrate_byparts<T>(const PolynomialIntegrand<T>&,         \
                                                            const PathSamples<T>&, const T&,       \
                                                            const QContext<T>&);                   \
  template StochasticIntegralResult<T> deterministic_integral<T>(const Polynomial<T>&,             \
                                                                 const PathSamples<T>&, const T&,  \
                                                                 const QContext<T>&);

QBM_INSTANTIATE(double)
QBM_INSTANTIATE(Rational)
#undef QBM_INSTANTIATE

}  // namespace qbm
