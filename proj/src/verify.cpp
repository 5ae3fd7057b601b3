#include "qbm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qbm/qcore.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/qito.hpp"
#include "qbm/stats.hpp"
#include "qbm/stochint.hpp"

namespace qbm {

double oracle_EZ2(double r, double q) {
  if (r < 0) throw std::invalid_argument("oracle_EZ2: r must be nonnegative");
  return (1.0 - q) / (1.0 - std::pow(q, 2 * r + 1));
}

Rational oracle_EZ2(int r, const Rational& q) {
  if (r < 0) throw std::invalid_argument("oracle_EZ2: r must be nonnegative");
  return Rational(1 - q) / Rational(1 - ipow(q, 2u * r + 1));
}

namespace {

template <typename T, typename Pow>
T ez4_formula(const T& q, Pow pw) {
  const T one(1);
  const T num = (one - q) * (one - q) *
                (T(2) + T(3) * q - T(6) * pw(1) + pw(2) + T(4) * pw(3) - T(3) * pw(4) - pw(5));
  const T den = (one - pw(1)) * (one - pw(3)) * (one - pw(3)) * (one + pw(3));
  return num / den;
}

}  // namespace

// pw(i) stands for q^{r+1}, q^{r+2}, q^{2r+1}, q^{2r+2}, q^{3r+3} for i = 1..5.
double oracle_EZ4(double r, double q) {
  if (r < 0) throw std::invalid_argument("oracle_EZ4: r must be nonnegative");
  const double e[] = {0, r + 1, r + 2, 2 * r + 1, 2 * r + 2, 3 * r + 3};
  return ez4_formula<double>(q, [&](int i) { return std::pow(q, e[i]); });
}

Rational oracle_EZ4(int r, const Rational& q) {
  if (r < 0) throw std::invalid_argument("oracle_EZ4: r must be nonnegative");
  const unsigned e[] = {0, 1u * r + 1, 1u * r + 2, 2u * r + 1, 2u * r + 2, 3u * r + 3};
  return ez4_formula<Rational>(q, [&](int i) { return ipow(q, e[i]); });
}

double EZ2_truncation_bias(double r, double q, int depth) {
  return std::pow(q, depth * (2 * r + 1)) * oracle_EZ2(r, q);
}

const std::vector<GeometricPath>& PathBank::get(const GeometricGrid& grid, std::size_t n_paths,
                                                std::uint64_t seed) {
  const Key key{grid.horizon(), grid.q(), grid.depth(), n_paths, seed};
  auto it = batches_.find(key);
  if (it == batches_.end()) {
    const PathSimulator sim(grid, FloatContext(grid.q()), opts_);
    auto batch = std::make_shared<const std::vector<GeometricPath>>(sim.simulate_batch(n_paths, seed));
    it = batches_.emplace(key, std::move(batch)).first;
  }
  return *it->second;
}

namespace {

using PathFunctional = std::function<double(const GeometricPath&)>;

McEstimate estimate(const std::vector<GeometricPath>& paths, const PathFunctional& fn, double oracle,
                    std::uint64_t seed, unsigned threads) {
  const auto values = parallel_map(paths.size(), [&](std::size_t i) { return fn(paths[i]); }, threads);
  const auto st = sample_stats(values);
  McEstimate out{st.mean, st.std_error, st.n, seed, oracle, 0.0};
  const double diff = st.mean - oracle;
  if (st.std_error > 0) {
    out.z = diff / st.std_error;
  } else {
    out.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return out;
}

// Runs the estimate, and once more with the second fixed seed when |z| exceeds the threshold.
VerificationReport run_mc(VerificationReport report, const GeometricGrid& grid, std::size_t n_paths,
                          std::uint64_t seed, const PathFunctional& fn, double oracle, PathBank* bank,
                          const McOptions& opts) {
  PathBank local(opts.simulator);
  PathBank& pb = bank ? *bank : local;
  report.tolerance = opts.z_threshold;
  auto mc = estimate(pb.get(grid, n_paths, seed), fn, oracle, seed, opts.simulator.threads);
  if (!(std::abs(mc.z) <= opts.z_threshold) && opts.allow_rerun) {
    const std::uint64_t second = seed + opts.rerun_offset;
    mc = estimate(pb.get(grid, n_paths, second), fn, oracle, second, opts.simulator.threads);
    report.rerun = true;
  }
  report.pass = std::abs(mc.z) <= opts.z_threshold;
  report.mc = mc;
  return report;
}

int grid_index(const GeometricGrid& grid, double time) {
  for (int k = 0; k <= grid.depth(); ++k)
    if (std::abs(grid.time(k) - time) <= 1e-12 * grid.horizon()) return k;
  throw std::invalid_argument("moment check: time " + to_string(time) + " is not on the geometric grid");
}

}  // namespace

double isometry_rhs(const HermiteCoefficients<double>& f, double t, double q) {
  const FloatContext ctx(q);
  double sum = 0.0;
  for (int m = 0; m <= f.degree(); ++m) {
    const auto& b = f[static_cast<std::size_t>(m)];
    if (b.is_zero()) continue;
    sum += jackson_integral(b * b * Polynomial<double>::monomial(static_cast<std::size_t>(m)), t, ctx) /
           q_factorial(m, ctx);
  }
  return sum;
}

VerificationReport mc_isometry(const HermiteCoefficients<double>& f, double t, double q,
                               std::size_t n_paths, std::uint64_t seed, PathBank* bank,
                               const McOptions& opts) {
  const FloatContext ctx(q);
  const auto grid = GeometricGrid::with_tail_threshold(t, q, opts.depth_threshold);
  VerificationReport report;
  report.name = "isometry";
  report.params = {{"t", t}, {"q", q}, {"degree", f.degree()}};
  report.truncation_bias = isometry_rhs(f, grid.time(grid.depth()), q);
  auto fn = [&](const GeometricPath& p) {
    const double v = integrate_def(f, samples(p), t, ctx).value;
    return v * v;
  };
  return run_mc(std::move(report), grid, n_paths, seed, fn, isometry_rhs(f, t, q), bank, opts);
}

const std::vector<std::pair<std::string, CheckParams>>& moment_checks() {
  static const std::vector<std::pair<std::string, CheckParams>> checks = {
      {"mean", {{"t", 1.0}, {"q", 0.5}}},
      {"variance", {{"t", 1.0}, {"q", 0.5}}},
      {"increment-4th", {{"t", 1.0}, {"s", 0.5}, {"q", 0.5}}},
      {"cross-22", {{"t1", 0.125}, {"t2", 0.25}, {"u1", 0.5}, {"u2", 1.0}, {"q", 0.5}}},
      {"cross-13", {{"t1", 0.125}, {"t2", 0.25}, {"u1", 0.5}, {"u2", 1.0}, {"q", 0.5}}},
      {"EZ2", {{"r", 1.0}, {"q", 0.5}}},
      {"EZ4", {{"r", 1.0}, {"q", 0.5}}},
      {"stoch-exp-mean", {{"a", 0.5}, {"c", 1.0}, {"t", 0.5}, {"q", 0.5}}},
  };
  return checks;
}

VerificationReport mc_moment(const std::string& name, const CheckParams& params, std::size_t n_paths,
                             std::uint64_t seed, PathBank* bank, const McOptions& opts) {
  const auto& checks = moment_checks();
  const auto entry = std::find_if(checks.begin(), checks.end(), [&](const auto& c) { return c.first == name; });
  if (entry == checks.end()) throw std::invalid_argument("unknown moment check: " + name);
  CheckParams merged = entry->second;
  for (const auto& [key, value] : params) {
    auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& p) { return p.first == key; });
    if (it == merged.end()) throw std::invalid_argument("moment check " + name + ": unknown parameter " + key);
    it->second = value;
  }
  auto get = [&](const std::string& key) {
    return std::find_if(merged.begin(), merged.end(), [&](const auto& p) { return p.first == key; })->second;
  };
  const double q = get("q");
  const FloatContext ctx(q);

  VerificationReport report;
  report.name = name;
  report.params = merged;

  if (name == "mean" || name == "variance") {
    const double t = get("t");
    const auto grid = GeometricGrid::with_tail_threshold(t, q, opts.depth_threshold);
    if (name == "mean")
      return run_mc(report, grid, n_paths, seed, [](const GeometricPath& p) { return p.terminal(); }, 0.0, bank, opts);
    return run_mc(report, grid, n_paths, seed,
                  [](const GeometricPath& p) { return p.terminal() * p.terminal(); }, t, bank, opts);
  }
  if (name == "increment-4th") {
    const double t = get("t"), s = get("s");
    if (!(s < t)) throw std::invalid_argument("increment-4th: requires s < t");
    const auto grid = GeometricGrid::with_tail_threshold(t, q, opts.depth_threshold);
    const int j = grid_index(grid, s);
    const double oracle = (t - s) * ((q + 2) * t - 3 * q * s);
    return run_mc(report, grid, n_paths, seed,
                  [j](const GeometricPath& p) { return std::pow(p.values[0] - p.values[j], 4); }, oracle, bank, opts);
  }
  if (name == "cross-22" || name == "cross-13") {
    const double t1 = get("t1"), t2 = get("t2"), u1 = get("u1"), u2 = get("u2");
    if (!(t1 < t2 && t2 <= u1 && u1 < u2)) throw std::invalid_argument(name + ": requires t1 < t2 <= u1 < u2");
    const auto grid = GeometricGrid::with_tail_threshold(u2, q, opts.depth_threshold);
    const int it1 = grid_index(grid, t1), it2 = grid_index(grid, t2), iu1 = grid_index(grid, u1);
    if (name == "cross-22") {
      const double oracle = (u2 - u1) * (t2 - t1);
      return run_mc(report, grid, n_paths, seed,
                    [=](const GeometricPath& p) {
                      const double dt = p.values[it2] - p.values[it1], du = p.values[0] - p.values[iu1];
                      return dt * dt * du * du;
                    },
                    oracle, bank, opts);
    }
    const double oracle = -(1 - q) * (u2 - u1) * (t2 - t1);
    return run_mc(report, grid, n_paths, seed,
                  [=](const GeometricPath& p) {
                    const double dt = p.values[it2] - p.values[it1], du = p.values[0] - p.values[iu1];
                    return dt * du * du * du;
                  },
                  oracle, bank, opts);
  }
  if (name == "EZ2" || name == "EZ4") {
    const double r = get("r");
    const auto grid = GeometricGrid::with_tail_threshold(1.0, q, opts.depth_threshold);
    const int K = grid.depth();
    std::vector<double> weights(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) weights[k] = std::pow(q, k * r);
    const int power = name == "EZ2" ? 2 : 4;
    report.truncation_bias = name == "EZ2" ? EZ2_truncation_bias(r, q, K) : std::optional<double>{};
    const double oracle = name == "EZ2" ? oracle_EZ2(r, q) : oracle_EZ4(r, q);
    return run_mc(report, grid, n_paths, seed,
                  [weights, power](const GeometricPath& p) {
                    double z = 0.0;
                    for (std::size_t k = 0; k < weights.size(); ++k) z += weights[k] * (p.values[k] - p.values[k + 1]);
                    return std::pow(z, power);
                  },
                  oracle, bank, opts);
  }
  // stoch-exp-mean
  const double a = get("a"), c = get("c"), t = get("t");
  if (!(t < exponential_radius(a, q)))
    throw std::invalid_argument("stoch-exp-mean: horizon outside the radius 1/(a^2 (1-q))");
  const auto grid = GeometricGrid::with_tail_threshold(t, q, opts.depth_threshold);
  return run_mc(report, grid, n_paths, seed,
                [=](const GeometricPath& p) { return stochastic_exponential(a, c, p.terminal(), t, ctx); }, c,
                bank, opts);
}

QPolynomial<Rational> random_qpolynomial(Rng& rng, int max_degree, int time_degree) {
  auto uniform_int = [&](int lo, int hi) {
    return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
  };
  auto coefficient = [&]() {
    std::vector<Rational> c(static_cast<std::size_t>(time_degree) + 1);
    for (auto& v : c)
      v = uniform01(rng) < 0.4 ? Rational(0) : ratio(uniform_int(-3, 3), uniform_int(1, 4));
    return Polynomial<Rational>(std::move(c));
  };
  const int d = uniform_int(1, max_degree);
  std::vector<Polynomial<Rational>> coeffs(static_cast<std::size_t>(d) + 1);
  for (auto& c : coeffs) c = coefficient();
  while (coeffs.back().is_zero()) coeffs.back() = coefficient();
  return QPolynomial<Rational>(std::move(coeffs));
}

namespace {

std::string describe(const QPolynomial<Rational>& f) {
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= f.degree(); ++i) {
    const auto& c = f.coefficient(static_cast<std::size_t>(i));
    if (c.is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << '(';
    bool inner_first = true;
    for (int j = 0; j <= c.degree(); ++j) {
      if (c[j] == 0) continue;
      if (!inner_first) os << ' ';
      inner_first = false;
      os << (c[j] > 0 && j > 0 ? "+" : "") << to_string(c[j]);
      if (j > 0) os << "*t^" << j;
    }
    os << ")*x^" << i;
  }
  return first ? "0" : os.str();
}

}  // namespace

namespace {
// The residuals are exact, the tail bounds are evaluated in double. When the bound is
// attained (a time-only term dominates), rounding alone can put it below the residual.
constexpr double kBoundRoundoff = 1e-12;
// Floating-point slack for the pathwise SDE comparison, relative to |c|.
constexpr double kSdeRoundoff = 1e-12;
}  // namespace

std::vector<ItoConvergenceRow> ito_convergence_study(const Rational& q, std::size_t n_paths,
                                                     std::size_t n_polys, const std::vector<int>& depths,
                                                     std::uint64_t seed) {
  if (depths.empty()) throw std::invalid_argument("ito_convergence_study: no depths");
  const ExactContext ctx(q);
  const int max_depth = *std::max_element(depths.begin(), depths.end());
  const GeometricGrid grid(1.0, ctx.q_double(), max_depth);
  const auto paths = PathSimulator(grid, FloatContext(ctx.q_double())).simulate_batch(n_paths, seed);

  std::vector<std::vector<PathSamples<Rational>>> prefixes(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i)
    for (const auto& p : paths) prefixes[i].push_back(exact_samples(p, Rational(1), q, depths[i]));

  std::vector<ItoConvergenceRow> rows;
  for (std::size_t j = 0; j < n_polys; ++j) {
    ItoConvergenceRow row;
    row.poly_seed = seed + 1000003ULL * (j + 1);
    Rng rng = make_rng(row.poly_seed);
    const auto f = random_qpolynomial(rng);
    row.polynomial = describe(f);
    row.depths = depths;
    for (std::size_t i = 0; i < depths.size(); ++i) {
      double worst = 0.0, margin = std::numeric_limits<double>::infinity();
      for (const auto& ps : prefixes[i]) {
        const auto r = ito_residual(f, ps, Rational(1), ctx);
        const double res = to_double(r.residual);
        worst = std::max(worst, res);
        margin = std::min(margin, r.tail_bound - res);
        if (!(res <= r.tail_bound * (1.0 + kBoundRoundoff))) row.below_bound = false;
      }
      row.max_residual.push_back(worst);
      row.min_margin.push_back(margin);
    }
    for (std::size_t i = 1; i < depths.size(); ++i) {
      const bool both_zero = row.max_residual[i] == 0.0 && row.max_residual[i - 1] == 0.0;
      if (!(row.max_residual[i] < row.max_residual[i - 1] || both_zero)) row.decreasing = false;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SdeConvergenceRow> sde_convergence_study(double a, double c, double t, double q,
                                                     const std::vector<int>& degrees,
                                                     const std::vector<int>& depths,
                                                     std::size_t n_paths, std::uint64_t seed) {
  if (depths.empty() || degrees.empty()) throw std::invalid_argument("sde_convergence_study: empty sweep");
  const FloatContext ctx(q);
  const int max_depth = *std::max_element(depths.begin(), depths.end());
  const GeometricGrid grid(t, q, max_depth);
  const auto paths = PathSimulator(grid, ctx).simulate_batch(n_paths, seed);
  std::vector<SdeConvergenceRow> rows;
  for (int d : degrees) {
    for (int K : depths) {
      SdeConvergenceRow row{d, K, 0.0, 0.0, true};
      for (const auto& p : paths) {
        const auto r = sde_residual(a, c, samples(truncated(p, K)), d, ctx);
        const double bound = r.series_tail_bound + r.grid_tail_bound;
        row.max_residual = std::max(row.max_residual, r.residual);
        row.max_bound = std::max(row.max_bound, bound);
        if (r.residual > bound + kSdeRoundoff * std::abs(c)) row.below_bound = false;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace qbm
