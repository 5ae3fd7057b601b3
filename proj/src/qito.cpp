#include "qbm/qito.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "qbm/qcore.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/stochint.hpp"

namespace qbm {
namespace {

// sum_m b_m(s) h_m(x; ratio * s) / [m]!
template <Scalar T>
QPolynomial<T> combine(const HermiteCoefficients<T>& b, const T& ratio, const QContext<T>& ctx) {
  const int d = b.degree();
  if (d < 0) return {};
  const auto h = qhermite_table(d, ctx);
  QPolynomial<T> out;
  for (int m = 0; m <= d; ++m) {
    const auto& bm = b[static_cast<std::size_t>(m)];
    if (bm.is_zero()) continue;
    out += h[m].time_scaled(ratio) * (bm * (T(1) / q_factorial(m, ctx)));
  }
  return out;
}

}  // namespace

template <Scalar T>
QPolynomial<T> nabla_exact(const QPolynomial<T>& f, const QContext<T>& ctx) {
  const auto b = to_hermite_basis(f, ctx);
  HermiteCoefficients<T> down;
  if (b.b.size() > 1) down.b.assign(b.b.begin() + 1, b.b.end());
  return from_hermite_basis(down, ctx);
}

template <Scalar T>
QPolynomial<T> A_operator(const QPolynomial<T>& f, const QContext<T>& ctx) {
  const auto b = to_hermite_basis(f, ctx);
  HermiteCoefficients<T> down;
  if (b.b.size() > 1) down.b.assign(b.b.begin() + 1, b.b.end());
  return combine(down, ctx.q(), ctx);
}

template <Scalar T>
QPolynomial<T> delta_exact(const QPolynomial<T>& f, const QContext<T>& ctx) {
  const int d = f.degree();
  if (d < 2) return {};
  std::vector<QPolynomial<T>> a_pow(static_cast<std::size_t>(d));  // A(x^j)
  for (int j = 0; j < d; ++j) a_pow[j] = A_operator(QPolynomial<T>::x_power(static_cast<std::size_t>(j)), ctx);
  QPolynomial<T> out;
  for (int n = 2; n <= d; ++n) {
    const auto& c = f.coefficient(static_cast<std::size_t>(n));
    if (c.is_zero()) continue;
    QPolynomial<T> dn;
    for (int k = 0; k < n; ++k) dn += a_pow[n - k - 1].shifted(static_cast<std::size_t>(k));
    out += dn * c;
  }
  return out;
}

template <Scalar T>
QPolynomial<T> delta_time_route(const QPolynomial<T>& f, const QContext<T>& ctx) {
  const auto b = to_hermite_basis(f, ctx);
  const int d = b.degree();
  if (d < 0) return {};
  const auto h = qhermite_table(d, ctx);
  QPolynomial<T> out;
  for (int m = 0; m <= d; ++m) {
    const auto& bm = b[static_cast<std::size_t>(m)];
    if (bm.is_zero()) continue;
    out -= q_time_derivative(h[m], ctx) * (bm * (T(1) / q_factorial(m, ctx)));
  }
  return out;
}

template <Scalar T>
QPolynomial<T> transport(const QPolynomial<T>& p, const T& ratio, const QContext<T>& ctx) {
  return combine(to_hermite_basis(p, ctx), ratio, ctx);
}

template <Scalar T>
QPolynomial<T> nabla_kernel(const QPolynomial<T>& f, const QContext<T>& ctx) {
  const int d = f.degree();
  if (d < 1) return {};
  const T q = ctx.q();
  const T q2 = q * q;
  // E[y^j] under nu, as a polynomial in x.
  std::vector<QPolynomial<T>> moment(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    moment[j] = transport(QPolynomial<T>::x_power(static_cast<std::size_t>(j)), q2, ctx).x_scaled(q);
  QPolynomial<T> out;
  for (int n = 1; n <= d; ++n) {
    const auto& c = f.coefficient(static_cast<std::size_t>(n));
    if (c.is_zero()) continue;
    QPolynomial<T> term;
    for (int i = 0; i < n; ++i) term += moment[n - 1 - i].shifted(static_cast<std::size_t>(i));
    out += term * c;
  }
  return out;
}

template <Scalar T>
QPolynomial<T> delta_kernel(const QPolynomial<T>& f, const QContext<T>& ctx) {
  const int d = f.degree();
  if (d < 2) return {};
  const T q = ctx.q();
  const T q2 = q * q;
  // inner[k](y) = E[z^k | y]; outer[(j,k)](x) = E[y^j inner[k](y) | x].
  std::vector<QPolynomial<T>> inner(static_cast<std::size_t>(d - 1));
  for (int k = 0; k <= d - 2; ++k)
    inner[k] = transport(QPolynomial<T>::x_power(static_cast<std::size_t>(k)), q2, ctx).x_scaled(q);
  std::map<std::pair<int, int>, QPolynomial<T>> outer;
  auto joint = [&](int j, int k) -> const QPolynomial<T>& {
    auto it = outer.find({j, k});
    if (it == outer.end()) it = outer.emplace(std::pair{j, k}, transport(inner[k].shifted(j), q, ctx)).first;
    return it->second;
  };
  QPolynomial<T> out;
  for (int n = 2; n <= d; ++n) {
    const auto& c = f.coefficient(static_cast<std::size_t>(n));
    if (c.is_zero()) continue;
    QPolynomial<T> term;
    for (int i = 0; i <= n - 2; ++i)
      for (int j = 0; i + j <= n - 2; ++j) term += joint(j, n - 2 - i - j).shifted(static_cast<std::size_t>(i));
    out += term * c;
  }
  return out;
}

KernelSpec KernelSpec::at(double x, double s, const FloatContext& ctx) {
  if (!(s > 0)) throw std::invalid_argument("kernel: s must be positive");
  const double q = ctx.q();
  return KernelSpec{DensitySpec::transition(q * x, q * q * s, s, ctx),
                    DensitySpec::transition(x, q * s, s, ctx), x, s};
}

DensitySpec KernelSpec::mu_inner(double y, const FloatContext& ctx) const {
  const double q = ctx.q();
  return DensitySpec::transition(q * y, q * q * s, s, ctx);
}

namespace {

using Fn = std::function<double(double)>;

struct Differentiable {
  Fn f;
  Fn d1;  // f'
  Fn d2;  // f''
  std::vector<double> coeffs;  // set for polynomials: divided differences by synthetic division
};

Differentiable from_polynomial(const Polynomial<double>& p) {
  Polynomial<double> dp, ddp;
  for (int n = 1; n <= p.degree(); ++n) dp += Polynomial<double>::monomial(n - 1, n * p[n]);
  for (int n = 1; n <= dp.degree(); ++n) ddp += Polynomial<double>::monomial(n - 1, n * dp[n]);
  std::vector<double> c;
  for (int n = 0; n <= p.degree(); ++n) c.push_back(p[n]);
  return {p, dp, ddp, c};
}

// Quotient of c(X) by (X - a); for a polynomial, f[a, y] is this quotient evaluated at y.
std::vector<double> deflate(const std::vector<double>& c, double a) {
  if (c.size() < 2) return {};
  std::vector<double> b(c.size() - 1);
  b.back() = c.back();
  for (std::size_t k = b.size() - 1; k > 0; --k) b[k - 1] = c[k] + a * b[k];
  return b;
}

double horner(const std::vector<double>& c, double y) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * y + *it;
  return v;
}

Differentiable from_function(const Fn& f, double h) {
  return {f, [f, h](double x) { return (f(x + h) - f(x - h)) / (2 * h); },
          [f, h](double x) { return (f(x + h) - 2 * f(x) + f(x - h)) / (h * h); },
          {}};
}

double first_difference(const Differentiable& g, double x, double y, double thr) {
  if (!g.coeffs.empty()) return horner(deflate(g.coeffs, x), y);
  if (std::abs(y - x) < thr) return g.d1(0.5 * (x + y));
  return (g.f(y) - g.f(x)) / (y - x);
}

double second_difference(const Differentiable& g, double x, double y, double z, double thr) {
  if (!g.coeffs.empty()) return horner(deflate(deflate(g.coeffs, x), y), z);
  const bool xy = std::abs(x - y) < thr, yz = std::abs(y - z) < thr, zx = std::abs(z - x) < thr;
  if ((xy && yz) || (yz && zx) || (zx && xy)) return 0.5 * g.d2((x + y + z) / 3);
  // f[a,a,c] = (f[a,c] - f'(a)) / (c - a)
  if (xy) return (first_difference(g, x, z, thr) - g.d1(x)) / (z - x);
  if (yz) return (first_difference(g, y, x, thr) - g.d1(y)) / (x - y);
  if (zx) return (first_difference(g, z, y, thr) - g.d1(z)) / (y - z);
  return ((y - x) * g.f(z) + (x - z) * g.f(y) + (z - y) * g.f(x)) / ((x - y) * (y - z) * (z - x));
}

double nabla_impl(const Differentiable& g, double x, double s, const FloatContext& ctx,
                  const NumericOptions& opts) {
  const auto spec = KernelSpec::at(x, s, ctx);
  const double thr = opts.coincidence * support_half_width(s, ctx.q());
  return integrate([&](double y) { return first_difference(g, x, y, thr); }, spec.nu,
                   gauss_legendre(32), opts.integration)
      .value;
}

double delta_impl(const Differentiable& g, double x, double s, const FloatContext& ctx,
                  const NumericOptions& opts) {
  const auto spec = KernelSpec::at(x, s, ctx);
  const double thr = opts.coincidence * support_half_width(s, ctx.q());
  auto inner = [&](double y) {
    return integrate([&](double z) { return second_difference(g, x, y, z, thr); }, spec.mu_inner(y, ctx),
                     gauss_legendre(32), opts.integration)
        .value;
  };
  return integrate(inner, spec.mu_outer, gauss_legendre(32), opts.integration).value;
}

}  // namespace

double nabla_numeric(const Polynomial<double>& f, double x, double s, const FloatContext& ctx,
                     const NumericOptions& opts) {
  return nabla_impl(from_polynomial(f), x, s, ctx, opts);
}

double nabla_numeric(const std::function<double(double)>& f, double x, double s,
                     const FloatContext& ctx, const NumericOptions& opts) {
  return nabla_impl(from_function(f, opts.fd_step * support_half_width(s, ctx.q())), x, s, ctx, opts);
}

double delta_numeric(const Polynomial<double>& f, double x, double s, const FloatContext& ctx,
                     const NumericOptions& opts) {
  return delta_impl(from_polynomial(f), x, s, ctx, opts);
}

double delta_numeric(const std::function<double(double)>& f, double x, double s,
                     const FloatContext& ctx, const NumericOptions& opts) {
  return delta_impl(from_function(f, opts.fd_step * support_half_width(s, ctx.q())), x, s, ctx, opts);
}

std::pair<double, double> kernel_masses(double x, double s, const FloatContext& ctx) {
  const auto spec = KernelSpec::at(x, s, ctx);
  const double nu = integrate([](double) { return 1.0; }, spec.nu).value;
  const double mu = integrate(
                        [&](double y) {
                          return integrate([](double) { return 1.0; }, spec.mu_inner(y, ctx)).value;
                        },
                        spec.mu_outer)
                        .value;
  return {nu, mu};
}

template <Scalar T>
double jackson_path_tail_bound(const QPolynomial<T>& g, double t_K, double q) {
  const double w = 2.0 * std::sqrt(q) / std::sqrt(1.0 - q);
  double bound = 0.0;
  for (int i = 0; i <= g.degree(); ++i) {
    const auto& c = g.coefficient(static_cast<std::size_t>(i));
    for (int j = 0; j <= c.degree(); ++j) {
      const double gij = to_double(abs_value(c[static_cast<std::size_t>(j)]));
      if (gij == 0.0) continue;
      const double p = 1.0 + j + 0.5 * i;
      bound += gij * std::pow(w, i) * std::pow(t_K, p) / (1.0 - std::pow(q, p));
    }
  }
  return (1.0 - q) * bound;
}

template <Scalar T>
ItoResidual<T> ito_residual(const QPolynomial<T>& f, const PathSamples<T>& path, const T& horizon,
                            const QContext<T>& ctx, double max_tail) {
  const int K = path.depth();
  const T one_minus_q = T(1) - ctx.q();
  const auto nabla = to_hermite_basis(nabla_exact(f, ctx), ctx);
  const auto dq = q_time_derivative(f, ctx);
  const auto delta = delta_exact(f, ctx);

  const auto stoch = integrate_def(nabla, path, horizon, ctx);
  ItoResidual<T> out;
  out.depth = K;
  out.seed = path.seed;
  out.stochastic = stoch.value;
  for (int k = 0; k < K; ++k) {
    const T weight = one_minus_q * path.times[k];
    out.drift += weight * dq(path.values[k + 1], path.times[k]);
    out.second += weight * delta(path.values[k + 1], path.times[k]);
  }
  out.lhs = f(path.values[0], path.times[0]) - f(T(0), T(0));
  out.residual = abs_value(T(out.lhs - out.stochastic - out.drift - out.second));

  const double tK = to_double(path.times.back());
  const double q = ctx.q_double();
  out.tail_bound = stoch.tail_bound + jackson_path_tail_bound(dq, tK, q) + jackson_path_tail_bound(delta, tK, q);
  if (out.tail_bound > max_tail)
    throw std::domain_error("ito_residual: grid too shallow; tail bound exceeds the requested tolerance");
  return out;
}

#define QBM_INSTANTIATE(T)                                                                        \
  template QPolynomial<T> nabla_exact<T>(const QPolynomial<T>&, const QContext<T>&);              \
  template QPolynomial<T> A_operator<T>(const QPolynomial<T>&, const QContext<T>&);               \
  template QPolynomial<T> delta_exact<T>(const QPolynomial<T>&, const QContext<T>&);              \
  template QPolynomial<T> delta_time_route<T>(const QPolynomial<T>&, const QContext<T>&);         \
  template QPolynomial<T> transport<T>(const QPolynomial<T>&, const T&, const QContext<T>&);      \
  template QPolynomial<T> nabla_kernel<T>(const QPolynomial<T>&, const QContext<T>&);             \
  template QPolynomial<T> delta_kernel<T>(const QPolynomial<T>&, const QContext<T>&);             \
  template double jackson_path_tail_bound<T>(const QPolynomial<T>&, double, double);              \
  template ItoResidual<T> ito_residual<T>(const QPolynomial<T>&, const PathSamples<T>&, const T&, \
                                          const QContext<T>&, double);

QBM_INSTANTIATE(double)
QBM_INSTANTIATE(Rational)
#undef QBM_INSTANTIATE

}  // namespace qbm
