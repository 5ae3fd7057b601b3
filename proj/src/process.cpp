#include "qbm/process.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "qbm/qhermite.hpp"

namespace qbm {

GeometricGrid::GeometricGrid(double horizon, double q, int depth)
    : horizon_(horizon), q_(q), depth_(depth) {
  if (!(horizon > 0)) throw std::invalid_argument("grid: horizon must be positive");
  if (!(q > 0 && q < 1)) throw std::invalid_argument("grid: q must lie in (0,1)");
  if (depth < 1) throw std::invalid_argument("grid: depth must be at least 1");
}

GeometricGrid GeometricGrid::with_tail_threshold(double horizon, double q, double threshold) {
  if (!(q > 0 && q < 1)) throw std::invalid_argument("grid: q must lie in (0,1)");
  if (!(threshold > 0 && threshold < 1)) throw std::invalid_argument("grid: threshold must lie in (0,1)");
  int k = 1;
  double qk = q;
  while (qk > threshold) {
    qk *= q;
    ++k;
  }
  return GeometricGrid(horizon, q, k);
}

double GeometricGrid::time(int k) const {
  if (k < 0 || k > depth_) throw std::out_of_range("grid: index outside 0..K");
  return horizon_ * std::pow(q_, k);
}

std::vector<double> GeometricGrid::times() const {
  std::vector<double> out(static_cast<std::size_t>(depth_) + 1);
  for (int k = 0; k <= depth_; ++k) out[k] = time(k);
  return out;
}

PathSamples<double> samples(const GeometricPath& path) {
  return {path.grid.times(), path.values, path.seed};
}

PathSamples<Rational> exact_samples(const GeometricPath& path, const Rational& horizon,
                                    const Rational& q, int depth) {
  const int K = path.grid.depth();
  if (depth < 0) depth = K;
  if (depth > K) throw std::invalid_argument("exact_samples: depth exceeds path depth");
  PathSamples<Rational> out;
  out.seed = path.seed;
  out.times.reserve(static_cast<std::size_t>(depth) + 1);
  out.values.reserve(static_cast<std::size_t>(depth) + 1);
  Rational tk = horizon;
  for (int k = 0; k <= depth; ++k) {
    out.times.push_back(tk);
    out.values.emplace_back(path.values[k]);
    tk *= q;
  }
  return out;
}

GeometricPath truncated(const GeometricPath& path, int depth) {
  if (depth < 1 || depth > path.grid.depth())
    throw std::invalid_argument("truncated: depth outside 1..K");
  GeometricPath out{GeometricGrid(path.grid.horizon(), path.grid.q(), depth),
                    std::vector<double>(path.values.begin(), path.values.begin() + depth + 1),
                    path.seed};
  return out;
}

TransitionFamily::TransitionFamily(const FloatContext& ctx, int nodes, int cdf_grid) {
  if (nodes < 2) throw std::invalid_argument("transition family: at least two nodes required");
  const double q = ctx.q();
  start_w_ = support_half_width(q, q);
  spacing_ = 2.0 * start_w_ / (nodes - 1);
  tables_.reserve(static_cast<std::size_t>(nodes));
  for (int j = 0; j < nodes; ++j) {
    const double xi = std::clamp(-start_w_ + j * spacing_, -start_w_, start_w_);
    tables_.emplace_back(DensitySpec::transition(xi, q, 1.0, ctx), cdf_grid);
  }
}

std::shared_ptr<const TransitionFamily> TransitionFamily::shared(const FloatContext& ctx, int nodes,
                                                                 int cdf_grid) {
  using Key = std::tuple<double, double, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const TransitionFamily>> cache;
  static std::deque<Key> order;
  constexpr std::size_t kCapacity = 4;

  const Key key{ctx.q(), ctx.prod_eps(), nodes, cdf_grid};
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto family = std::make_shared<const TransitionFamily>(ctx, nodes, cdf_grid);
  cache.emplace(key, family);
  order.push_back(key);
  if (order.size() > kCapacity) {
    cache.erase(order.front());
    order.pop_front();
  }
  return family;
}

double TransitionFamily::sample(double xi, Rng& rng) const {
  const double pos = std::clamp((xi + start_w_) / spacing_, 0.0, double(tables_.size() - 1));
  const auto j = std::min(static_cast<std::size_t>(pos), tables_.size() - 2);
  const double lambda = pos - static_cast<double>(j);
  const double pick = uniform01(rng);
  const double u = uniform01(rng);
  return tables_[pick < lambda ? j + 1 : j].quantile(u);
}

PathSimulator::PathSimulator(GeometricGrid grid, const FloatContext& ctx, SimulatorOptions opts)
    : grid_(grid),
      opts_(opts),
      family_(TransitionFamily::shared(ctx, opts.family_nodes, opts.cdf_grid)),
      terminal_marginal_(DensitySpec::marginal(grid.time(grid.depth()), ctx), opts.cdf_grid) {
  if (std::abs(ctx.q() - grid.q()) > 0) throw std::invalid_argument("simulator: grid and context disagree on q");
}

GeometricPath PathSimulator::simulate(std::uint64_t seed) const {
  const int K = grid_.depth();
  GeometricPath path{grid_, std::vector<double>(static_cast<std::size_t>(K) + 1), seed};
  Rng rng = make_rng(seed);
  path.values[K] = terminal_marginal_.sample(rng);
  for (int k = K - 1; k >= 0; --k) {
    const double root = std::sqrt(grid_.time(k));
    path.values[k] = root * family_->sample(path.values[k + 1] / root, rng);
  }
  return path;
}

std::vector<GeometricPath> PathSimulator::simulate_batch(std::size_t n_paths,
                                                         std::uint64_t base_seed) const {
  std::vector<GeometricPath> out(n_paths, GeometricPath{grid_, {}, 0});
  unsigned threads = opts_.threads ? opts_.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n_paths, 1)));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = simulate(base_seed + i);
  };
  if (threads <= 1) {
    work(0, n_paths);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n_paths + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n_paths, begin + chunk);
    if (begin < end) pool.emplace_back(work, begin, end);
  }
  pool.clear();  // joins
  return out;
}

GeometricPath simulate_path(const GeometricGrid& grid, std::uint64_t seed, const FloatContext& ctx) {
  return PathSimulator(grid, ctx).simulate(seed);
}

std::vector<GeometricPath> simulate_batch(const GeometricGrid& grid, std::size_t n_paths,
                                          std::uint64_t base_seed, const FloatContext& ctx) {
  return PathSimulator(grid, ctx).simulate_batch(n_paths, base_seed);
}

void write_path_csv(std::ostream& out, const GeometricPath& path) {
  out << "k,t_k,B_k\n";
  for (int k = 0; k <= path.grid.depth(); ++k)
    out << k << ',' << to_string(path.grid.time(k)) << ',' << to_string(path.values[k]) << '\n';
}

void write_batch_csv_wide(std::ostream& out, const std::vector<GeometricPath>& paths) {
  if (paths.empty()) return;
  const auto& grid = paths.front().grid;
  for (const auto& p : paths)
    if (!(p.grid == grid)) throw std::invalid_argument("wide csv: paths on different grids");
  out << "k,t_k";
  for (const auto& p : paths) out << ",path_" << p.seed;
  out << '\n';
  for (int k = 0; k <= grid.depth(); ++k) {
    out << k << ',' << to_string(grid.time(k));
    for (const auto& p : paths) out << ',' << to_string(p.values[k]);
    out << '\n';
  }
}

}  // namespace qbm
