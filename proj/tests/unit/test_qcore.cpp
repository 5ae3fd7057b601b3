#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "qbm/qcore.hpp"

using namespace qbm;

TEST_CASE("q-numbers at q = 1/2") {
  const ExactContext ctx(ratio(1, 2));
  CHECK(q_int(0, ctx) == 0);
  CHECK(q_int(1, ctx) == 1);
  CHECK(q_int(3, ctx) == ratio(7, 4));
  CHECK(q_factorial(0, ctx) == 1);
  CHECK(q_factorial(4, ctx) == ratio(315, 64));
  CHECK(q_binomial(4, 2, ctx) == ratio(35, 16));
  CHECK(q_binomial(5, 0, ctx) == 1);
  CHECK(q_binomial(5, 5, ctx) == 1);
}

TEST_CASE("q-binomial against a decimal oracle") {
  const FloatContext ctx(0.3);
  CHECK(q_binomial(6, 3, ctx) == doctest::Approx(1.595299693).epsilon(1e-12));
}

TEST_CASE("context rejects q outside (0,1)") {
  CHECK_THROWS_AS(ExactContext(Rational(1)), std::invalid_argument);
  CHECK_THROWS_AS(ExactContext(ratio(6, 5)), std::invalid_argument);
  CHECK_THROWS_AS(FloatContext(0.0), std::invalid_argument);
  CHECK_THROWS_AS(FloatContext(-0.5), std::invalid_argument);
}

TEST_CASE("parse_rational reads decimals exactly") {
  CHECK(parse_rational("0.2") == ratio(1, 5));
  CHECK(parse_rational("2.5e-1") == ratio(1, 4));
  CHECK(parse_rational("-3/6") == ratio(-1, 2));
  CHECK(parse_rational("7") == 7);
  CHECK_THROWS(parse_rational("abc"));
  CHECK(to_double(ratio(1, 5)) == 0.2);
  CHECK(to_double(ratio(-1, 3)) == -1.0 / 3.0);
}

TEST_CASE("Pascal rule for q-binomials (property)") {
  Rng rng = make_rng(101);
  for (int trial = 0; trial < test::kTrials; ++trial) {
    const ExactContext ctx(test::rational_q(rng));
    const int n = static_cast<int>(test::uniform_int(rng, 1, 12));
    const int k = static_cast<int>(test::uniform_int(rng, 1, n));
    const Rational lhs = q_binomial(n, k, ctx);
    const Rational rhs = q_binomial(n - 1, k - 1, ctx) + ipow(ctx.q(), static_cast<unsigned>(k)) *
                                                            q_binomial(n - 1, k, ctx);
    CHECK_MESSAGE(lhs == rhs, "trial " << trial);
  }
}

TEST_CASE("Jackson integral of a polynomial") {
  const ExactContext ctx(ratio(1, 2));
  const auto s2 = Polynomial<Rational>::monomial(2);
  CHECK(jackson_integral(s2, Rational(1), ctx) == 1 / q_int(3, ctx));
  CHECK(jackson_integral(s2, Rational(2), ctx) == Rational(8) / q_int(3, ctx));
}

TEST_CASE("Jackson integral of a sampled function") {
  const FloatContext ctx(0.5);
  const auto sin_fn = SampledFunction<double>::bounded([](double s) { return std::sin(s); }, 1.0);
  CHECK(jackson_integral(sin_fn, 1.0, ctx) == doctest::Approx(0.58191235338052381642).epsilon(1e-13));

  const auto p = Polynomial<double>{0.5, -1.0, 2.0};
  const auto sampled = SampledFunction<double>::from_polynomial(p);
  CHECK(jackson_integral(sampled, 0.8, ctx) == doctest::Approx(jackson_integral(p, 0.8, ctx)).epsilon(1e-13));

  SampledFunction<double> unbounded;
  unbounded.rule = [](double s) { return 1.0 / s; };
  unbounded.regularity = Regularity::unbounded;
  CHECK_THROWS(jackson_integral(unbounded, 1.0, ctx));
}

TEST_CASE("q-derivative inverts the Jackson anti-derivative (property)") {
  Rng rng = make_rng(102);
  for (int trial = 0; trial < test::kTrials; ++trial) {
    const ExactContext ctx(test::rational_q(rng));
    const auto p = test::rational_poly(rng, 8);
    CHECK_MESSAGE(q_derivative(jackson_antiderivative(p, ctx), ctx) == p, "trial " << trial);
    const Rational t = test::small_rational(rng);
    const auto F = jackson_antiderivative(p, ctx);
    CHECK_MESSAGE(jackson_integral(p, t, ctx) == F(t), "trial " << trial);
  }
}

TEST_CASE("sampled q-derivative matches the polynomial one") {
  const ExactContext ctx(ratio(1, 3));
  const Polynomial<Rational> p{1, 2, 0, -5};
  const auto f = SampledFunction<Rational>::from_polynomial(p);
  const Rational s = ratio(3, 7);
  CHECK(q_derivative(f, s, ctx) == q_derivative(p, ctx)(s));
}

TEST_CASE("Jackson-Stieltjes sum: closed form against the series") {
  const ExactContext ex(ratio(1, 2));
  const FloatContext fl(0.5);
  const Polynomial<Rational> a{1, -2, 3};
  const Polynomial<Rational> b{0, 1, 0, 1};
  const Rational t = ratio(4, 5);
  const Rational closed = jackson_stieltjes(a, b, t, ex);

  // sum_{i,j} a_i b_j t^{i+j} (1 - q^j) / (1 - q^{i+j}), written out by hand
  Rational manual = 0;
  for (int i = 0; i <= 2; ++i)
    for (int j = 1; j <= 3; ++j) {
      const Rational qi = ipow(ex.q(), static_cast<unsigned>(j));
      const Rational qij = ipow(ex.q(), static_cast<unsigned>(i + j));
      manual += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)] *
                ipow(t, static_cast<unsigned>(i + j)) * (1 - qi) / (1 - qij);
    }
  CHECK(closed == manual);

  const auto af = SampledFunction<double>::from_polynomial(Polynomial<double>{1, -2, 3});
  const auto bf = SampledFunction<double>::from_polynomial(Polynomial<double>{0, 1, 0, 1});
  CHECK(jackson_stieltjes(af, bf, 0.8, fl) == doctest::Approx(to_double(closed)).epsilon(1e-12));
}
