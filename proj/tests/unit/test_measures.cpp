#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "generators.hpp"
#include "qbm/measures.hpp"
#include "qbm/qhermite.hpp"

using namespace qbm;

TEST_CASE("marginal density against an independent evaluation") {
  CHECK(qgauss_density(0.3, 1.0, FloatContext(0.5)) == doctest::Approx(0.35765180874711631821).epsilon(1e-12));
  CHECK(qgauss_density(1.1, 0.7, FloatContext(0.2)) == doctest::Approx(0.25144620636055487016).epsilon(1e-12));
  CHECK(qgauss_density(0.0, 2.0, FloatContext(0.8)) == doctest::Approx(0.27461967393861402137).epsilon(1e-12));
  CHECK(qgauss_density(10.0, 1.0, FloatContext(0.5)) == 0.0);
}

TEST_CASE("transition density against an independent evaluation") {
  CHECK(transition_density(0.4, 0.5, 1.0, -0.2, FloatContext(0.5)) ==
        doctest::Approx(0.34289324009710724502).epsilon(1e-12));
  CHECK(transition_density(1.0, 0.3, 0.9, 0.8, FloatContext(0.2)) ==
        doctest::Approx(0.38046341016248974728).epsilon(1e-12));
}

TEST_CASE("marginal moments") {
  for (double q : {0.2, 0.5, 0.8}) {
    const FloatContext ctx(q);
    const auto spec = DensitySpec::marginal(1.5, ctx);
    CHECK(expectation([](double) { return 1.0; }, spec) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(expectation([](double y) { return y; }, spec) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(expectation([](double y) { return y * y; }, spec) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(expectation([](double y) { return y * y * y * y; }, spec) ==
          doctest::Approx((2 + q) * 1.5 * 1.5).epsilon(1e-12));
  }
}

TEST_CASE("transition kernel is a martingale kernel (property)") {
  Rng rng = make_rng(301);
  for (int trial = 0; trial < 12; ++trial) {
    const double q = test::uniform(rng, 0.1, 0.9);
    const double s = test::uniform(rng, 0.1, 1.0);
    const double t = s + test::uniform(rng, 0.1, 1.0);
    const FloatContext ctx(q);
    const double x = test::uniform(rng, -0.95, 0.95) * support_half_width(s, q);
    const auto spec = DensitySpec::transition(x, s, t, ctx);
    const int n = static_cast<int>(test::uniform_int(rng, 1, 6));
    const auto hn = qhermite(n, ctx);
    const double lhs = expectation([&](double y) { return hn(y, t); }, spec);
    CHECK_MESSAGE(lhs == doctest::Approx(hn(x, s)).epsilon(1e-9).scale(growth_bound(n, t, ctx)),
                  "trial " << trial << " n " << n);
  }
}

TEST_CASE("sharply peaked kernels near q = 1 still converge") {
  const FloatContext ctx(0.99);
  // spread 0.14 inside a support of half-width 20
  const auto spec = DensitySpec::transition(0.297, 0.98, 1.0, ctx);
  const auto mass = integrate([](double) { return 1.0; }, spec);
  CHECK(mass.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mass.order <= 256);
  CHECK(expectation([](double y) { return y; }, spec) == doctest::Approx(0.297).epsilon(1e-12));
  CHECK(expectation([](double y) { return (y - 0.297) * (y - 0.297); }, spec) ==
        doctest::Approx(0.02).epsilon(1e-10));
}

TEST_CASE("transition preconditions") {
  const FloatContext ctx(0.5);
  CHECK_THROWS(DensitySpec::transition(0.0, 1.0, 1.0, ctx));
  CHECK_THROWS(DensitySpec::transition(10.0, 0.5, 1.0, ctx));
  CHECK(product_order(0.5, 1e-16) == 54);
}

TEST_CASE("tabulated CDF inverts monotonically") {
  const FloatContext ctx(0.4);
  const CdfTable table(DensitySpec::marginal(1.0, ctx));
  CHECK(table.cdf().front() == 0.0);
  CHECK(table.cdf().back() == doctest::Approx(1.0).epsilon(1e-14));
  double prev = -table.half_width();
  for (int i = 1; i < 200; ++i) {
    const double y = table.quantile(i / 200.0);
    CHECK(y >= prev);
    prev = y;
  }
  CHECK(table.quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  // F(quantile(u)) = u through an independent quadrature of the density on [-w, y]
  const double y = table.quantile(0.8);
  const double w = table.half_width();
  double mass = 0.0;
  const auto& rule = gauss_legendre(256);
  const double lo = -std::asin(1.0), hi = std::asin(y / w);
  for (int i = 0; i < rule.order; ++i) {
    const double th = lo + (hi - lo) * (rule.nodes[static_cast<std::size_t>(i)] + M_PI / 2) / M_PI;
    mass += rule.weights[static_cast<std::size_t>(i)] * (hi - lo) / M_PI * qgauss_density(w * std::sin(th), 1.0, ctx) *
            w * std::cos(th);
  }
  CHECK(mass == doctest::Approx(0.8).epsilon(1e-8));
}

TEST_CASE("on-disk CDF cache reproduces the table bit for bit") {
  const auto dir = std::filesystem::temp_directory_path() / "qbm_cdf_cache_test";
  std::filesystem::remove_all(dir);
  const FloatContext ctx(0.3);
  const auto spec = DensitySpec::transition(0.2, 0.5, 1.0, ctx);
  CdfCache cache(dir);
  const auto first = cache.get(spec, 512);
  CdfCache reopened(dir);
  const auto second = reopened.get(spec, 512);
  CHECK(cache.misses() == 1);
  CHECK(reopened.hits() == 1);
  CHECK(*first == *second);
  CHECK(*first == CdfTable(spec, 512));
  std::filesystem::remove_all(dir);
}

TEST_CASE("sampling is reproducible from the seed") {
  const FloatContext ctx(0.5);
  const auto spec = DensitySpec::marginal(1.0, ctx);
  Rng a = make_rng(7), b = make_rng(7);
  const double x = sample(spec, a);
  CHECK(x == sample(spec, b));
  CHECK(std::abs(x) <= spec.half_width());
}
