// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 2 4        run the listed criteria
// Exit status is 0 iff every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qbm/identities.hpp"
#include "qbm/measures.hpp"
#include "qbm/qcore.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/qito.hpp"
#include "qbm/verify.hpp"

using namespace qbm;

namespace {

// Pinned tolerances and budgets.
constexpr double kC1Seconds = 10.0;
constexpr double kC2Tol = 1e-7;
constexpr double kC2NestedTol = 1e-6;
constexpr double kC2Seconds = 120.0;
constexpr std::size_t kC3Paths = 100000;
constexpr double kC3Z = 4.0;
constexpr double kC3Seconds = 300.0;
constexpr std::uint64_t kC3Seed = 20240601;
constexpr std::size_t kC4Paths = 20;
constexpr std::size_t kC4Polys = 20;
constexpr std::uint64_t kC4Seed = 20240601;
constexpr double kC4Seconds = 120.0;
constexpr double kC5OperatorTol = 5e-2;
constexpr double kC5JacksonTol = 1e-2;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;  // printed indented under the criterion line
};

Polynomial<double> to_double_poly(const Polynomial<Rational>& p) {
  std::vector<double> c;
  for (const auto& v : p.coefficients()) c.push_back(to_double(v));
  return Polynomial<double>(std::move(c));
}

// |I - ref| <= tol * max(1, scale): absolute near zero, relative for large integrands.
bool within(double value, double ref, double tol, double scale) {
  return std::abs(value - ref) <= tol * std::max(1.0, scale);
}

// ---------------------------------------------------------------------------------------
Outcome criterion1() {
  Outcome out;
  const auto start = Clock::now();
  const auto results = run_identities(IdentityOptions{});
  const double elapsed = seconds_since(start);
  int cases = 0, failed = 0;
  for (const auto& r : results) {
    cases += r.cases;
    if (!r.pass()) {
      ++failed;
      out.details.push_back("failed: " + r.suite + " q=" + r.q + " " + r.first_failure);
    }
  }
  out.pass = failed == 0 && elapsed < kC1Seconds;
  out.summary = "exact identities: " + std::to_string(results.size()) + " suite runs, " + std::to_string(cases) +
                " cases, " + std::to_string(failed) + " failed, " + fmt(elapsed) + " s (limit " + fmt(kC1Seconds) + " s)";
  return out;
}

// ---------------------------------------------------------------------------------------
Outcome criterion2() {
  Outcome out;
  const auto start = Clock::now();
  int checks = 0, failures = 0;
  double worst = 0.0;
  auto record = [&](bool ok, double err, const std::string& what) {
    ++checks;
    worst = std::max(worst, err);
    if (!ok) {
      ++failures;
      if (out.details.size() < 20) out.details.push_back("failed: " + what + " error " + fmt(err));
    }
  };
  auto check_integral = [&](const std::function<double(double)>& g, const DensitySpec& spec, double ref,
                            const std::string& what) {
    try {
      const auto r = integrate(g, spec);
      const double scale = std::max(1.0, r.abs_value);
      record(within(r.value, ref, kC2Tol, r.abs_value), std::abs(r.value - ref) / scale, what);
    } catch (const QuadratureError& e) {
      record(false, INFINITY, what + " (" + e.what() + ")");
    }
  };

  for (double q : {0.2, 0.5, 0.8}) {
    const FloatContext ctx(q);
    const auto h = qhermite_table(6, ctx);
    for (double t : {0.25, 1.0, 4.0}) {
      const auto m = DensitySpec::marginal(t, ctx);
      const std::string tag = " q=" + fmt(q) + " t=" + fmt(t);
      check_integral([](double) { return 1.0; }, m, 1.0, "marginal mass" + tag);
      check_integral([](double y) { return y * y; }, m, t, "marginal variance" + tag);
      check_integral([](double y) { return y * y * y * y; }, m, (2 + q) * t * t, "marginal 4th moment" + tag);

      for (double s : {0.0, t / 4, t / 2}) {
        const double ws = support_half_width(s, q);
        const std::vector<double> xs = s == 0.0 ? std::vector<double>{0.0}
                                                : std::vector<double>{-ws, -ws / 2, 0.0, ws / 2, ws};
        for (double x : xs) {
          const auto p = DensitySpec::transition(x, s, t, ctx);
          const std::string ptag = tag + " s=" + fmt(s) + " x=" + fmt(x);
          check_integral([](double) { return 1.0; }, p, 1.0, "transition mass" + ptag);
          for (int n = 1; n <= 6; ++n) {
            const auto& hn = h[static_cast<std::size_t>(n)];
            check_integral([&](double y) { return hn(y, t); }, p, hn(x, s),
                           "martingale n=" + std::to_string(n) + ptag);
          }
          check_integral([](double y) { return y * y * y; }, p, x * x * x + (t - s) * (2 + q) * x,
                         "conditional cubic" + ptag);
          check_integral([](double y) { return y * y * y * y; }, p,
                         x * x * x * x + (t - s) * (3 + 2 * q + q * q) * x * x +
                             (t - s) * ((2 + q) * t - (1 + q + q * q) * s),
                         "conditional quartic" + ptag);
        }
      }
    }
  }

  // Operators: f of degree <= 6 (monomials and q-Hermite polynomials), five points inside the
  // support at time q s, against the exact operators evaluated in rational arithmetic.
  for (const auto& qr : {ratio(1, 5), ratio(1, 2), ratio(4, 5)}) {
    const ExactContext ex(qr);
    const FloatContext fl(to_double(qr));
    const double q = fl.q();
    std::vector<QPolynomial<Rational>> fs;
    for (std::size_t n = 1; n <= 6; ++n) fs.push_back(QPolynomial<Rational>::x_power(n));
    for (int n = 2; n <= 6; ++n) fs.push_back(qhermite(n, ex));
    for (double s : {0.5, 1.0}) {
      const double w = 2 * std::sqrt(q * s) / std::sqrt(1 - q);
      const Rational sr(s);
      for (double x : {-0.9 * w, -0.45 * w, 0.0, 0.45 * w, 0.9 * w}) {
        const Rational xr(x);
        for (std::size_t i = 0; i < fs.size(); ++i) {
          const auto& f = fs[i];
          const Polynomial<double> fd = to_double_poly(f.at_time(sr));
          const double nab = to_double(nabla_exact(f, ex)(xr, sr));
          const double del = to_double(delta_exact(f, ex)(xr, sr));
          const std::string tag = " q=" + fmt(q) + " s=" + fmt(s) + " x=" + fmt(x) + " f#" + std::to_string(i);
          try {
            const double nn = nabla_numeric(fd, x, s, fl);
            record(within(nn, nab, kC2Tol, std::abs(nab)), std::abs(nn - nab) / std::max(1.0, std::abs(nab)),
                   "nabla" + tag);
          } catch (const QuadratureError& e) {
            record(false, INFINITY, "nabla" + tag + " (" + e.what() + ")");
          }
          try {
            const double dn = delta_numeric(fd, x, s, fl);
            record(within(dn, del, kC2NestedTol, std::abs(del)), std::abs(dn - del) / std::max(1.0, std::abs(del)),
                   "delta" + tag);
          } catch (const QuadratureError& e) {
            record(false, INFINITY, "delta" + tag + " (" + e.what() + ")");
          }
        }
      }
    }
  }

  const double elapsed = seconds_since(start);
  out.pass = failures == 0 && elapsed < kC2Seconds;
  out.summary = "quadrature: " + std::to_string(checks) + " checks, " + std::to_string(failures) +
                " failed, worst normalized error " + fmt(worst) + " (tol " + fmt(kC2Tol) + ", nested " +
                fmt(kC2NestedTol) + "), " + fmt(elapsed) + " s (limit " + fmt(kC2Seconds) + " s)";
  return out;
}

// ---------------------------------------------------------------------------------------
Outcome criterion3() {
  Outcome out;
  const auto start = Clock::now();
  McOptions opts;
  opts.z_threshold = kC3Z;
  PathBank bank(opts.simulator);
  std::vector<VerificationReport> reports;

  for (double q : {0.2, 0.5, 0.8}) {
    const FloatContext ctx(q);
    for (std::size_t n = 0; n <= 3; ++n)
      reports.push_back(mc_isometry(to_hermite_basis(QPolynomial<double>::x_power(n), ctx), 1.0, q, kC3Paths,
                                    kC3Seed, &bank, opts));
  }
  for (const char* name : {"EZ2", "EZ4"})
    for (double r : {0.0, 0.5, 1.0}) reports.push_back(mc_moment(name, {{"r", r}}, kC3Paths, kC3Seed, &bank, opts));
  for (const char* name : {"increment-4th", "cross-22", "cross-13", "stoch-exp-mean"})
    reports.push_back(mc_moment(name, {}, kC3Paths, kC3Seed, &bank, opts));

  int failed = 0;
  double max_z = 0.0;
  for (const auto& r : reports) {
    max_z = std::max(max_z, std::abs(r.mc->z));
    std::ostringstream line;
    line << (r.pass ? "ok   " : "FAIL ") << r.name;
    for (const auto& [k, v] : r.params) line << ' ' << k << '=' << v;
    line << "  z=" << fmt(r.mc->z) << (r.rerun ? " (rerun)" : "");
    out.details.push_back(line.str());
    if (!r.pass) ++failed;
  }
  const double elapsed = seconds_since(start);
  out.pass = failed == 0 && elapsed < kC3Seconds;
  out.summary = "Monte Carlo: " + std::to_string(reports.size()) + " checks at " + std::to_string(kC3Paths) +
                " paths, " + std::to_string(failed) + " failed, max |z| " + fmt(max_z) + " (limit " + fmt(kC3Z) + "), " +
                fmt(elapsed) + " s (limit " + fmt(kC3Seconds) + " s)";
  return out;
}

// ---------------------------------------------------------------------------------------
Outcome criterion4() {
  Outcome out;
  const auto start = Clock::now();
  const std::vector<int> depths{20, 40, 80};
  int rows = 0, failed = 0;
  for (const auto& q : {ratio(1, 5), ratio(1, 2), ratio(4, 5)}) {
    const auto study = ito_convergence_study(q, kC4Paths, kC4Polys, depths, kC4Seed);
    double worst[3] = {0, 0, 0};
    for (const auto& r : study) {
      ++rows;
      for (std::size_t i = 0; i < 3; ++i) worst[i] = std::max(worst[i], r.max_residual[i]);
      if (!(r.below_bound && r.decreasing)) {
        ++failed;
        out.details.push_back("failed: q=" + to_string(q) + " f=" + r.polynomial +
                              (r.below_bound ? "" : " above bound") + (r.decreasing ? "" : " not decreasing"));
      }
    }
    out.details.push_back("q=" + to_string(q) + " max residual K=20: " + fmt(worst[0]) + ", K=40: " + fmt(worst[1]) +
                          ", K=80: " + fmt(worst[2]));
  }
  const double elapsed = seconds_since(start);
  out.pass = failed == 0 && elapsed < kC4Seconds;
  out.summary = "Ito convergence: " + std::to_string(rows) + " polynomials x " + std::to_string(kC4Paths) +
                " paths, K in {20,40,80}, " + std::to_string(failed) + " failed, " + fmt(elapsed) + " s (limit " +
                fmt(kC4Seconds) + " s)";
  return out;
}

// ---------------------------------------------------------------------------------------
Outcome criterion5() {
  Outcome out;
  const double q = 0.99, x = 0.3, s = 1.0;
  const FloatContext fl(q);
  int failed = 0, checks = 0;
  for (int n : {2, 3, 4}) {
    const auto f = Polynomial<double>::monomial(static_cast<std::size_t>(n));
    const double d1 = n * std::pow(x, n - 1);
    const double d2 = 0.5 * n * (n - 1) * std::pow(x, n - 2);
    const double nab = nabla_numeric(f, x, s, fl);
    const double del = delta_numeric(f, x, s, fl);
    const double e1 = std::abs(nab - d1) / std::abs(d1);
    const double e2 = std::abs(del - d2) / std::abs(d2);
    checks += 2;
    failed += (e1 <= kC5OperatorTol ? 0 : 1) + (e2 <= kC5OperatorTol ? 0 : 1);
    out.details.push_back(std::string(e1 <= kC5OperatorTol ? "ok   " : "FAIL ") + "nabla x^" + std::to_string(n) +
                          " = " + fmt(nab) + " vs " + fmt(d1) + ", rel " + fmt(e1));
    out.details.push_back(std::string(e2 <= kC5OperatorTol ? "ok   " : "FAIL ") + "delta x^" + std::to_string(n) +
                          " = " + fmt(del) + " vs " + fmt(d2) + ", rel " + fmt(e2));
  }
  // Jackson against Riemann on [0,1] for s^n, n = 0..4, and a mixed polynomial.
  std::vector<Polynomial<double>> ps;
  for (std::size_t n = 0; n <= 4; ++n) ps.push_back(Polynomial<double>::monomial(n));
  ps.push_back(Polynomial<double>{1.0, -2.0, 0.5, 1.5});
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const auto& p = ps[i];
    double riemann = 0.0;
    for (int k = 0; k <= p.degree(); ++k) riemann += p[static_cast<std::size_t>(k)] / (k + 1);
    const double jackson = jackson_integral(p, 1.0, fl);
    const double e = std::abs(jackson - riemann) / std::abs(riemann);
    ++checks;
    if (e > kC5JacksonTol) ++failed;
    out.details.push_back(std::string(e <= kC5JacksonTol ? "ok   " : "FAIL ") + "Jackson vs Riemann p#" +
                          std::to_string(i) + " (degree " + std::to_string(p.degree()) + "): rel " + fmt(e));
  }
  // Informational: the operator discrepancies shrink linearly in 1 - q.
  for (const char* qs : {"99/100", "999/1000", "9999/10000"}) {
    const ExactContext ex(parse_rational(qs));
    const double nab = to_double(nabla_exact(QPolynomial<Rational>::x_power(3), ex)(Rational(x), Rational(s)));
    const double del = to_double(delta_exact(QPolynomial<Rational>::x_power(4), ex)(Rational(x), Rational(s)));
    out.details.push_back(std::string("info q=") + qs + ": exact nabla x^3 rel " + fmt(std::abs(nab - 0.27) / 0.27) +
                          ", exact delta x^4 rel " + fmt(std::abs(del - 0.54) / 0.54));
  }
  out.pass = failed == 0;
  out.summary = "q->1 sanity at q=0.99, x=0.3, s=1: " + std::to_string(checks) + " checks, " + std::to_string(failed) +
                " outside tolerance (operators " + fmt(kC5OperatorTol) + ", Jackson " + fmt(kC5JacksonTol) + ")";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::cerr << "unknown criterion '" << argv[i] << "'\n";
      return 2;
    }
    selected.push_back(c);
  }
  if (selected.empty())
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) selected.push_back(c);

  bool all = true;
  for (int c : selected) {
    Outcome o;
    try {
      o = criteria[static_cast<std::size_t>(c - 1)]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.summary << '\n';
    for (const auto& d : o.details) std::cout << "    " << d << '\n';
    std::cout.flush();
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
