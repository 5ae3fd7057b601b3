#include "qbm/identities.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "qbm/process.hpp"
#include "qbm/qcore.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/qito.hpp"
#include "qbm/stochint.hpp"
#include "qbm/verify.hpp"

namespace qbm {
namespace {

using R = Rational;
using Poly = Polynomial<R>;
using QPoly = QPolynomial<R>;

struct Tally {
  IdentityResult result;
  void check(bool ok, const std::string& what) {
    ++result.cases;
    if (!ok && result.failures++ == 0) result.first_failure = what;
  }
};

Poly random_poly(Rng& rng, int max_degree) {
  const int d = static_cast<int>(uniform01(rng) * (max_degree + 1));
  std::vector<R> c(static_cast<std::size_t>(d) + 1);
  for (auto& v : c) {
    const int num = static_cast<int>(uniform01(rng) * 13) - 6;
    const int den = 1 + static_cast<int>(uniform01(rng) * 7);
    v = ratio(num, den);
  }
  return Poly(std::move(c));
}

// h_n(x;t) = (t/(1-q))^{n/2} sum_k [n choose k]_q T_{|n-2k|}(x sqrt(1-q) / (2 sqrt t)).
QPoly hermite_by_chebyshev(int n, const ExactContext& ctx) {
  std::vector<std::vector<R>> cheb{{R(1)}, {R(0), R(1)}};
  for (int m = 1; m < n; ++m) {
    std::vector<R> next(static_cast<std::size_t>(m) + 2);
    for (std::size_t j = 0; j < cheb[m].size(); ++j) next[j + 1] += 2 * cheb[m][j];
    for (std::size_t j = 0; j < cheb[m - 1].size(); ++j) next[j] -= cheb[m - 1][j];
    cheb.push_back(std::move(next));
  }
  const R inv_one_minus_q = R(1) / R(1 - ctx.q());
  std::vector<Poly> coeffs(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const R binom = q_binomial(n, k, ctx);
    const auto& tm = cheb[static_cast<std::size_t>(std::abs(n - 2 * k))];
    for (std::size_t j = 0; j < tm.size(); ++j) {
      if (tm[j] == 0) continue;
      const unsigned half = (static_cast<unsigned>(n) - static_cast<unsigned>(j)) / 2;
      R c = binom * tm[j] / ipow(R(2), static_cast<unsigned>(j)) * ipow(inv_one_minus_q, half);
      coeffs[j] += Poly::monomial(half, c);
    }
  }
  return QPoly(std::move(coeffs));
}

// Symbolic int_0^t a d_q b as a polynomial in t.
Poly stieltjes_poly(const Poly& a, const Poly& b, const ExactContext& ctx) {
  Poly out;
  const R& q = ctx.q();
  for (int i = 0; i <= a.degree(); ++i)
    for (int j = 1; j <= b.degree(); ++j) {
      const R c = a[i] * b[j] * (1 - ipow(q, j)) / (1 - ipow(q, i + j));
      out += Poly::monomial(static_cast<std::size_t>(i + j), c);
    }
  return out;
}

PathSamples<R> sample_path(const ExactContext& ctx, const IdentityOptions& opts, std::uint64_t salt) {
  const GeometricGrid grid(1.0, ctx.q_double(), opts.path_depth);
  const auto path = simulate_path(grid, opts.seed + salt, FloatContext(ctx.q_double()));
  return exact_samples(path, R(1), ctx.q());
}

R hermite_at(int n, const R& x, const R& t, const ExactContext& ctx) {
  return hermite_values(n, x, t, ctx)[n];
}

void suite_recurrence(Tally& tally, const ExactContext& ctx, const IdentityOptions&) {
  const auto h = qhermite_table(13, ctx);
  const auto t = Poly::monomial(1);
  for (int n = 1; n <= 12; ++n) {
    tally.check(h[n].shifted(1) == h[n + 1] + h[n - 1] * (t * q_int(n, ctx)), "x h_n = h_{n+1} + t[n] h_{n-1}, n=" + std::to_string(n));
    tally.check(h[n] == hermite_by_chebyshev(n, ctx), "explicit Chebyshev sum, n=" + std::to_string(n));
  }
  tally.check(h[2] == QPoly({Poly{R(0), R(-1)}, Poly{}, Poly{R(1)}}), "h_2 = x^2 - t");
  tally.check(h[3] == QPoly({Poly{}, Poly{R(0), -(2 + ctx.q())}, Poly{}, Poly{R(1)}}), "h_3 = x^3 - (2+q) t x");
}

void suite_by_parts(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  Rng rng = make_rng(opts.seed ^ 0xB1);
  for (int trial = 0; trial < opts.random_trials; ++trial) {
    const Poly a = random_poly(rng, 8), b = random_poly(rng, 8);
    // symbolic in t
    const Poly lhs = stieltjes_poly(a, b, ctx);
    const Poly rhs = a * b - Poly::constant(a[0] * b[0]) - stieltjes_poly(b.scaled_argument(ctx.q()), a, ctx);
    tally.check(lhs == rhs, "closed form, trial " + std::to_string(trial));
    // finite telescoping sums at t = 3/7 with N+1 terms
    const R t(3, 7);
    const int N = 10;
    R left(0), right(0), tn = t;
    for (int n = 0; n <= N; ++n) {
      const R tn1 = tn * ctx.q();
      left += a(tn) * (b(tn) - b(tn1));
      right += b(tn1) * (a(tn) - a(tn1));
      tn = tn1;
    }
    tally.check(left + right == a(t) * b(t) - a(tn) * b(tn), "telescoping sum, trial " + std::to_string(trial));
    tally.check(jackson_stieltjes(a, b, t, ctx) == lhs(t), "closed form vs library, trial " + std::to_string(trial));
  }
}

void suite_anti_derivative(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  Rng rng = make_rng(opts.seed ^ 0xA2);
  for (int trial = 0; trial < opts.random_trials; ++trial) {
    const Poly b = random_poly(rng, 8);
    tally.check(jackson_antiderivative(q_derivative(b, ctx), ctx) == b - Poly::constant(b[0]),
                "b(t) - b(0) = int D_q b, trial " + std::to_string(trial));
    tally.check(q_derivative(jackson_antiderivative(b, ctx), ctx) == b, "D_q int b = b, trial " + std::to_string(trial));
  }
}

void suite_q_product(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  Rng rng = make_rng(opts.seed ^ 0xC3);
  const auto h = qhermite_table(8, ctx);
  for (int m = 0; m <= 8; ++m) {
    const Poly b = random_poly(rng, 6);
    const QPoly lhs = q_time_derivative(h[m] * b, ctx);
    const QPoly rhs = q_time_derivative(h[m], ctx) * b + h[m].time_scaled(ctx.q()) * q_derivative(b, ctx);
    tally.check(lhs == rhs, "D(b h_m) = b D h_m + h_m(q.) D b, m=" + std::to_string(m));
  }
}

void suite_nabla_basis(Tally& tally, const ExactContext& ctx, const IdentityOptions&) {
  const auto h = qhermite_table(9, ctx);
  tally.check(nabla_exact(h[0], ctx).is_zero(), "nabla 1 = 0");
  for (int m = 0; m <= 8; ++m) {
    const QPoly expected = h[m] * q_int(m + 1, ctx);
    tally.check(nabla_exact(h[m + 1], ctx) == expected, "basis route h_{m+1}, m=" + std::to_string(m));
    tally.check(nabla_kernel(h[m + 1], ctx) == expected, "kernel route h_{m+1}, m=" + std::to_string(m));
  }
  const R& q = ctx.q();
  tally.check(nabla_exact(QPoly::x_power(2), ctx) == QPoly::x_power(1, Poly{1 + q}), "nabla x^2 = (1+q) x");
  const QPoly x3({Poly{R(0), 1 - q * q}, Poly{}, Poly{1 + q + q * q}});
  tally.check(nabla_exact(QPoly::x_power(3), ctx) == x3, "nabla x^3 = [3] x^2 + (1-q^2) s");
}

void suite_delta_basis(Tally& tally, const ExactContext& ctx, const IdentityOptions&) {
  const auto h = qhermite_table(9, ctx);
  for (int m = 0; m <= 8; ++m) {
    tally.check(A_operator(h[m + 1], ctx) == h[m].time_scaled(ctx.q()) * q_int(m + 1, ctx),
                "A h_{m+1} = [m+1] h_m(.; qs), m=" + std::to_string(m));
  }
  for (int n = 0; n <= 9; ++n) {
    const QPoly p = QPoly::x_power(static_cast<std::size_t>(n));
    const QPoly route = delta_exact(p, ctx);
    tally.check(route == delta_time_route(p, ctx), "geometric sum vs time route, x^" + std::to_string(n));
    tally.check(route == delta_kernel(p, ctx), "geometric sum vs kernel route, x^" + std::to_string(n));
    // A(p) = D(x p) - x D(p) with D the time route
    const QPoly a = delta_time_route(p.shifted(1), ctx) - delta_time_route(p, ctx).shifted(1);
    tally.check(A_operator(p, ctx) == a, "A(p) = D(xp) - x D(p), p=x^" + std::to_string(n));
  }
  const R& q = ctx.q();
  tally.check(delta_exact(QPoly::x_power(2), ctx) == QPoly::constant(R(1)), "delta x^2 = 1");
  tally.check(delta_exact(QPoly::x_power(3), ctx) == QPoly::x_power(1, Poly{2 + q}), "delta x^3 = (2+q) x");
  tally.check(delta_exact(QPoly::x_power(1), ctx).is_zero(), "delta x = 0");
}

void suite_wdw(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  for (int salt = 0; salt < 3; ++salt) {
    const auto path = sample_path(ctx, opts, 0xD0 + salt);
    const int K = path.depth();
    for (int n = 0; n <= 8; ++n) {
      HermiteCoefficients<R> f;
      f.b.assign(static_cast<std::size_t>(n) + 1, Poly{});
      f.b[n] = Poly::constant(q_factorial(n, ctx));  // f = h_n
      const R value = integrate_def(f, path, R(1), ctx).value;
      const R expected = (hermite_at(n + 1, path.values[0], path.times[0], ctx) -
                          hermite_at(n + 1, path.values[K], path.times[K], ctx)) /
                         q_int(n + 1, ctx);
      tally.check(value == expected, "int h_n dB telescopes, n=" + std::to_string(n));
      const R byparts = integrate_byparts(f, path, R(1), ctx).value;
      tally.check(byparts - value == hermite_at(n + 1, path.values[K], path.times[K], ctx) / q_int(n + 1, ctx),
                  "by-parts form differs by the boundary term, n=" + std::to_string(n));
    }
  }
}

void suite_example_x(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  for (int salt = 0; salt < 3; ++salt) {
    const auto path = sample_path(ctx, opts, 0xE0 + salt);
    const int K = path.depth();
    const auto f = to_hermite_basis(QPoly::x_power(1), ctx);
    const R value = integrate_def(f, path, R(1), ctx).value;
    auto g = [&](int k) -> R { return (path.values[k] * path.values[k] - path.times[k]) / (1 + ctx.q()); };
    tally.check(value == g(0) - g(K), "int B dB = (B_t^2 - t)/(1+q) after telescoping");
  }
}

void suite_example_x2(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  const R& q = ctx.q();
  const R q3 = 1 + q + q * q;
  for (int salt = 0; salt < 3; ++salt) {
    const auto path = sample_path(ctx, opts, 0xF0 + salt);
    const int K = path.depth();
    const auto f = to_hermite_basis(QPoly::x_power(2), ctx);
    tally.check(f[2] == Poly::constant(1 + q) && f[0] == Poly::monomial(1), "x^2 = h_2(x;s) + s");
    const R value = integrate_def(f, path, R(1), ctx).value;
    auto cubic = [&](int k) -> R {
      const R& b = path.values[k];
      return (b * b * b - (2 + q) * path.times[k] * b) / q3;
    };
    const R s_integral = deterministic_integral(Poly::monomial(1), path, R(1), ctx).value;
    tally.check(value == cubic(0) - cubic(K) + s_integral,
                "int B^2 dB = (B^3 - (2+q) t B)/[3] + int s dB after telescoping");
  }
}

void suite_one_term(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  Rng rng = make_rng(opts.seed ^ 0x17);
  const auto path = sample_path(ctx, opts, 0x170);
  const int K = path.depth();
  for (int m = 0; m <= 6; ++m) {
    const Poly b = random_poly(rng, 4);
    HermiteCoefficients<R> f;
    f.b.assign(static_cast<std::size_t>(m) + 1, Poly{});
    f.b[m] = b * q_factorial(m, ctx);  // f = b h_m
    const Poly db = q_derivative(b, ctx);
    R drift(0);
    for (int k = 0; k < K; ++k)
      drift += (1 - ctx.q()) * path.times[k] * hermite_at(m + 1, path.values[k + 1], path.times[k + 1], ctx) * db(path.times[k]);
    const R lhs = b(path.times[0]) * hermite_at(m + 1, path.values[0], path.times[0], ctx) -
                  b(path.times[K]) * hermite_at(m + 1, path.values[K], path.times[K], ctx);
    tally.check(lhs == q_int(m + 1, ctx) * integrate_def(f, path, R(1), ctx).value + drift,
                "b h_{m+1} = [m+1] int b h_m dB + int h_{m+1}(B_qs; qs) D b d_q s, m=" + std::to_string(m));
  }
}

void suite_ito_telescoping(Tally& tally, const ExactContext& ctx, const IdentityOptions& opts) {
  Rng rng = make_rng(opts.seed ^ 0x1707);
  const auto path = sample_path(ctx, opts, 0x1700);
  const int K = path.depth();
  for (int trial = 0; trial < opts.random_trials; ++trial) {
    const auto f = random_qpolynomial(rng, 6, 2);
    const auto r = ito_residual(f, path, R(1), ctx);
    const R expected = f(path.values[K], path.times[K]) - f(R(0), R(0));
    tally.check(r.residual == abs_value(expected), "Ito formula exact on every grid cell, trial " + std::to_string(trial));
  }
}

void suite_ez4_ez2(Tally& tally, const ExactContext& ctx, const IdentityOptions&) {
  const R& q = ctx.q();
  const R ez2 = oracle_EZ2(0, q);
  tally.check(ez2 == 1, "E(Z^2) = 1 at r = 0");
  tally.check(oracle_EZ4(0, q) / (ez2 * ez2) == 2 + q, "E(Z^4)/E(Z^2)^2 = 2+q at r = 0");
  const R ez2_1 = oracle_EZ2(1, q);
  tally.check(ez2_1 == 1 / q_int(3, ctx), "E(Z^2) = 1/[3] at r = 1");
  tally.check(oracle_EZ4(1, q) / (ez2_1 * ez2_1) != 2 + q, "kurtosis ratio depends on r");
}

using SuiteFn = std::function<void(Tally&, const ExactContext&, const IdentityOptions&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> suites = {
      {"recurrence", suite_recurrence},       {"by-parts", suite_by_parts},
      {"anti-derivative", suite_anti_derivative}, {"q-product", suite_q_product},
      {"nabla-basis", suite_nabla_basis},     {"delta-basis", suite_delta_basis},
      {"wdw", suite_wdw},                     {"example-x", suite_example_x},
      {"example-x2", suite_example_x2},       {"one-term", suite_one_term},
      {"ito-telescoping", suite_ito_telescoping}, {"ez4-ez2", suite_ez4_ez2},
  };
  return suites;
}

}  // namespace

const std::vector<std::string>& identity_suites() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<IdentityResult> run_identities(const IdentityOptions& opts, const std::vector<std::string>& only) {
  const auto& names = identity_suites();
  for (const auto& name : only)
    if (std::find(names.begin(), names.end(), name) == names.end())
      throw std::invalid_argument("unknown identity suite: " + name);
  std::vector<IdentityResult> out;
  for (const auto& [name, fn] : registry()) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    for (const auto& q : opts.qs) {
      const ExactContext ctx(q);
      Tally tally;
      tally.result.suite = name;
      tally.result.q = to_string(q);
      try {
        fn(tally, ctx, opts);
      } catch (const std::exception& e) {
        ++tally.result.failures;
        if (tally.result.first_failure.empty()) tally.result.first_failure = std::string("exception: ") + e.what();
      }
      out.push_back(std::move(tally.result));
    }
  }
  return out;
}

}  // namespace qbm
