#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "qbm/qcore.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/qito.hpp"

using namespace qbm;

namespace {

using P = Polynomial<Rational>;
using QP = QPolynomial<Rational>;

}  // namespace

TEST_CASE("nabla and delta on monomials") {
  const ExactContext ctx(ratio(1, 2));
  const Rational q = ctx.q();
  // nabla x^3 = [3] x^2 + (1 - q^2) s
  const QP nabla_x3({P{0, 1 - q * q}, P{}, P{q_int(3, ctx)}});
  CHECK(nabla_exact(QP::x_power(3), ctx) == nabla_x3);
  // delta x^4 = (3 + 2q + q^2) x^2 + (2 - q^2 - q^3) s
  const QP delta_x4({P{0, 2 - q * q - q * q * q}, P{}, P{3 + 2 * q + q * q}});
  CHECK(delta_exact(QP::x_power(4), ctx) == delta_x4);
  CHECK(nabla_exact(QP::x_power(1), ctx) == QP::constant(1));
  CHECK(delta_exact(QP::x_power(2), ctx) == QP::constant(1));
  CHECK(delta_exact(QP::x_power(1), ctx).is_zero());
}

TEST_CASE("basis, kernel and time routes agree (property)") {
  Rng rng = make_rng(501);
  for (int trial = 0; trial < 12; ++trial) {
    const ExactContext ctx(test::rational_q(rng));
    const auto f = test::rational_qpoly(rng, 6, 2);
    CHECK_MESSAGE(nabla_exact(f, ctx) == nabla_kernel(f, ctx), "trial " << trial);
    const auto d = delta_exact(f, ctx);
    CHECK_MESSAGE(d == delta_time_route(f, ctx), "trial " << trial);
    CHECK_MESSAGE(d == delta_kernel(f, ctx), "trial " << trial);
  }
}

TEST_CASE("transport is the conditional expectation") {
  const ExactContext ctx(ratio(1, 3));
  // E[Y^2 | x] for Y ~ P_{r s, s}(x, .) is x^2 + (1 - r) s
  const Rational r = ratio(1, 4);
  const QP expected({P{0, 1 - r}, P{}, P{1}});
  CHECK(transport(QP::x_power(2), r, ctx) == expected);
  CHECK(transport(qhermite(5, ctx), r, ctx) == qhermite(5, ctx).time_scaled(r));
}

TEST_CASE("numeric operators match exact ones") {
  for (double q : {0.2, 0.5, 0.8}) {
    const FloatContext fl(q);
    const ExactContext ex(parse_rational(to_string(q)));
    for (double s : {0.5, 1.0}) {
      const double w = 2 * std::sqrt(q * s) / std::sqrt(1 - q);
      for (double x : {-0.6 * w, 0.0, 0.35 * w}) {
        const auto [m_nu, m_mu] = kernel_masses(x, s, fl);
        CHECK(m_nu == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(m_mu == doctest::Approx(1.0).epsilon(1e-10));
        for (int n : {2, 4}) {
          const auto p = QP::x_power(static_cast<std::size_t>(n));
          const double nab = to_double(nabla_exact(p, ex)(Rational(x), Rational(s)));
          const double del = to_double(delta_exact(p, ex)(Rational(x), Rational(s)));
          const auto pd = Polynomial<double>::monomial(static_cast<std::size_t>(n));
          CHECK(nabla_numeric(pd, x, s, fl) == doctest::Approx(nab).epsilon(1e-9).scale(1.0));
          CHECK(delta_numeric(pd, x, s, fl) == doctest::Approx(del).epsilon(1e-8).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("polynomial divided differences stay accurate near the support edge") {
  const FloatContext fl(0.8);
  const double s = 0.5;
  const double w = 2 * std::sqrt(0.8 * s) / std::sqrt(0.2);
  for (double x : {-0.9 * w, 0.45 * w}) {
    CHECK(delta_numeric(Polynomial<double>{0.0, 1.0}, x, s, fl) == 0.0);
    CHECK(delta_numeric(Polynomial<double>{0.0, 0.0, 1.0}, x, s, fl) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nabla_numeric(Polynomial<double>{0.0, 1.0}, x, s, fl) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("function overloads handle non-polynomial input") {
  const FloatContext fl(0.5);
  const auto p = Polynomial<double>{0.1, -0.3, 0.0, 1.0};
  const std::function<double(double)> f = [&](double y) { return p(y); };
  CHECK(nabla_numeric(f, 0.3, 1.0, fl) == doctest::Approx(nabla_numeric(p, 0.3, 1.0, fl)).epsilon(1e-6));
  CHECK(delta_numeric(f, 0.3, 1.0, fl) == doctest::Approx(delta_numeric(p, 0.3, 1.0, fl)).epsilon(1e-5));
  CHECK_THROWS(KernelSpec::at(10.0, 1.0, fl));
}

TEST_CASE("pathwise Ito residual telescopes to the boundary value (property)") {
  Rng rng = make_rng(502);
  for (int trial = 0; trial < 10; ++trial) {
    const Rational q = test::rational_q(rng);
    const ExactContext ctx(q);
    const GeometricGrid grid(1.0, to_double(q), 10);
    const auto path = exact_samples(simulate_path(grid, rng(), FloatContext(to_double(q))), Rational(1), q);
    const auto f = test::rational_qpoly(rng, 6, 2);
    const auto r = ito_residual(f, path, Rational(1), ctx);
    const Rational expected = abs(f(path.values.back(), path.times.back()) - f(Rational(0), Rational(0)));
    CHECK_MESSAGE(r.residual == expected, "trial " << trial);
    CHECK_MESSAGE(to_double(r.residual) <= r.tail_bound * (1 + 1e-12), "trial " << trial);
    CHECK(r.lhs == f(path.values.front(), Rational(1)) - f(Rational(0), Rational(0)));
  }
  const ExactContext ctx(ratio(1, 2));
  const auto path = exact_samples(simulate_path(GeometricGrid(1.0, 0.5, 3), 1, FloatContext(0.5)), Rational(1),
                                  ratio(1, 2));
  CHECK_THROWS_AS(ito_residual(QP::x_power(4), path, Rational(1), ctx, 1e-9), std::domain_error);
}
