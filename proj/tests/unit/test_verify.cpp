#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/verify.hpp"

using namespace qbm;

namespace {

// E(Z^4) for Z = sum_k q^{kr} (B_{q^k} - B_{q^{k+1}}), expanded over pairs of cells with the
// increment moments E D^4 = L((q+2)u - 3q l), E D_j^2 D_k^2 = L_j L_k and
// E D_j D_k^3 = -(1-q) L_j L_k for cell j earlier than cell k; all other mixed terms vanish.
double ez4_double_sum(double r, double q, int cells) {
  std::vector<double> c(static_cast<std::size_t>(cells)), len(c.size()), up(c.size()), lo(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    up[k] = std::pow(q, static_cast<double>(k));
    lo[k] = up[k] * q;
    len[k] = up[k] - lo[k];
    c[k] = std::pow(q, r * static_cast<double>(k));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    total += std::pow(c[k], 4) * len[k] * ((q + 2) * up[k] - 3 * q * lo[k]);
    for (std::size_t j = k + 1; j < c.size(); ++j) {
      total += 6 * c[j] * c[j] * c[k] * c[k] * len[j] * len[k];
      total += 4 * c[j] * std::pow(c[k], 3) * (-(1 - q)) * len[j] * len[k];
    }
  }
  return total;
}

}  // namespace

TEST_CASE("second-moment oracle") {
  CHECK(oracle_EZ2(0, ratio(1, 2)) == 1);
  CHECK(oracle_EZ2(1, ratio(1, 2)) == ratio(4, 7));
  // (1 - 0.8) / (1 - 0.8^2) = 1 / [2]_{0.8} = 5/9
  CHECK(oracle_EZ2(0.5, 0.8) == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK_THROWS(oracle_EZ2(-1.0, 0.5));
  CHECK(EZ2_truncation_bias(1.0, 0.5, 10) == doctest::Approx(std::pow(0.5, 30) * 4.0 / 7.0));
}

TEST_CASE("fourth-moment oracle against the double-sum expansion") {
  for (double r : {0.0, 0.5, 1.0, 2.0})
    for (double q : {0.2, 0.5, 0.8})
      CHECK_MESSAGE(oracle_EZ4(r, q) == doctest::Approx(ez4_double_sum(r, q, 400)).epsilon(1e-12),
                    "r " << r << " q " << q);
  CHECK(oracle_EZ4(0.5, 0.5) == doctest::Approx(1.1749769809717188497).epsilon(1e-14));
  CHECK(oracle_EZ4(1.0, 0.5) == doctest::Approx(0.93726379440665154951).epsilon(1e-14));
  CHECK(oracle_EZ4(1.0, 0.999) == doctest::Approx(0.33400077836130541007).epsilon(1e-12));
}

TEST_CASE("kurtosis at r = 0 is 2 + q exactly (property)") {
  Rng rng = make_rng(601);
  for (int trial = 0; trial < test::kTrials; ++trial) {
    const Rational q = test::rational_q(rng);
    const Rational e2 = oracle_EZ2(0, q);
    CHECK_MESSAGE(oracle_EZ4(0, q) / (e2 * e2) == 2 + q, "trial " << trial);
  }
}

TEST_CASE("the law of Z depends on r") {
  const Rational q = ratio(1, 2);
  const Rational k0 = oracle_EZ4(0, q) / (oracle_EZ2(0, q) * oracle_EZ2(0, q));
  const Rational k1 = oracle_EZ4(1, q) / (oracle_EZ2(1, q) * oracle_EZ2(1, q));
  CHECK(k0 != k1);
  CHECK(oracle_EZ4(1.0, 0.999) == doctest::Approx(1.0 / 3.0).epsilon(5e-3));
}

TEST_CASE("isometry right-hand side") {
  const double q = 0.5;
  const FloatContext ctx(q);
  auto rhs = [&](std::size_t n) { return isometry_rhs(to_hermite_basis(QPolynomial<double>::x_power(n), ctx), 1.0, q); };
  CHECK(rhs(0) == doctest::Approx(1.0));
  CHECK(rhs(1) == doctest::Approx(1.0 / 1.5));
  // x^2 = h_2 + s: (2 + q) / [3]
  CHECK(rhs(2) == doctest::Approx(10.0 / 7.0).epsilon(1e-14));
  // x^3 = h_3 + (2 + q) s h_1: ((2 + q)^2 + [3]!) / [4]
  CHECK(rhs(3) == doctest::Approx((6.25 + 1.5 * 1.75) / 1.875).epsilon(1e-14));
}

TEST_CASE("moment checks carry their oracles") {
  PathBank bank;
  auto run = [&](const std::string& name, const CheckParams& p = {}) { return mc_moment(name, p, 2000, 3, &bank); };
  CHECK(run("increment-4th").mc->oracle == doctest::Approx(0.875));
  CHECK(run("cross-22").mc->oracle == doctest::Approx(0.5 * 0.125));
  CHECK(run("cross-13").mc->oracle == doctest::Approx(-0.5 * 0.5 * 0.125));
  CHECK(run("variance").mc->oracle == doctest::Approx(1.0));
  CHECK(run("EZ2", {{"r", 1.0}}).mc->oracle == doctest::Approx(4.0 / 7.0));
  CHECK(run("stoch-exp-mean").mc->oracle == doctest::Approx(1.0));
  CHECK_THROWS_AS(run("no-such-check"), std::invalid_argument);
  CHECK_THROWS_AS(run("increment-4th", {{"s", 0.3}}), std::invalid_argument);
}

TEST_CASE("reports are reproducible from name, parameters and seed") {
  const auto a = mc_moment("increment-4th", {}, 3000, 17);
  const auto b = mc_moment("increment-4th", {}, 3000, 17);
  REQUIRE(a.mc);
  CHECK(a.mc->estimate == b.mc->estimate);
  CHECK(a.mc->std_error > 0);
  CHECK(a.mc->seed == 17);
  const auto c = mc_moment("increment-4th", {}, 3000, 18);
  CHECK(c.mc->estimate != a.mc->estimate);
}

TEST_CASE("random test polynomials respect their degree bounds") {
  Rng rng = make_rng(602);
  for (int trial = 0; trial < test::kTrials; ++trial) {
    const auto f = random_qpolynomial(rng, 6, 2);
    CHECK(f.degree() >= 1);
    CHECK(f.degree() <= 6);
    CHECK(f.time_degree() <= 2);
  }
}

TEST_CASE("small Ito convergence study") {
  const auto rows = ito_convergence_study(ratio(1, 2), 3, 4, {10, 20}, 9);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.below_bound);
    CHECK(r.decreasing);
    CHECK(r.max_residual.size() == 2);
  }
}
