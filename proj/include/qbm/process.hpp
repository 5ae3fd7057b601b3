#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "qbm/context.hpp"
#include "qbm/measures.hpp"

namespace qbm {

/// Times t_k = t q^k for k = 0..K; read from k = K down to 0 they increase.
class GeometricGrid {
 public:
  GeometricGrid(double horizon, double q, int depth);

  /// Smallest depth K with q^K <= threshold.
  static GeometricGrid with_tail_threshold(double horizon, double q, double threshold = 1e-6);

  double horizon() const { return horizon_; }
  double q() const { return q_; }
  int depth() const { return depth_; }
  double time(int k) const;
  std::vector<double> times() const;

  friend bool operator==(const GeometricGrid&, const GeometricGrid&) = default;

 private:
  double horizon_;
  double q_;
  int depth_;
};

/// Realization of the process on a geometric grid: values[k] is B at time t q^k.
struct GeometricPath {
  GeometricGrid grid;
  std::vector<double> values;
  std::uint64_t seed = 0;

  double value(int k) const { return values.at(static_cast<std::size_t>(k)); }
  /// B at the horizon.
  double terminal() const { return values.front(); }
};

/// Times and values of a path in either scalar field; index k is time t q^k.
template <Scalar T>
struct PathSamples {
  std::vector<T> times;
  std::vector<T> values;
  std::uint64_t seed = 0;

  int depth() const { return static_cast<int>(values.size()) - 1; }
};

PathSamples<double> samples(const GeometricPath& path);

/// Same path with exact rational times horizon * q^k (q, horizon exact) and the
/// double values converted exactly. Optionally truncated to the first depth+1 points.
PathSamples<Rational> exact_samples(const GeometricPath& path, const Rational& horizon,
                                    const Rational& q, int depth = -1);

/// Keeps grid points k = 0..depth.
GeometricPath truncated(const GeometricPath& path, int depth);

/// Transition kernels P_{q,1}(xi, .) tabulated at uniformly spaced starting points xi
/// covering the time-q support. By Brownian-type scaling every grid transition
/// P_{t q^{k+1}, t q^k}(x, .) is the image of P_{q,1}(x / sqrt(t q^k), .) under y -> sqrt(t q^k) y.
/// A draw at xi mixes the two neighbouring kernels with linear weights, which keeps the
/// conditional mean exactly linear in xi.
class TransitionFamily {
 public:
  TransitionFamily(const FloatContext& ctx, int nodes, int cdf_grid = CdfTable::kDefaultGridSize);

  /// Shared instance per (q, prod_eps, nodes, grid).
  static std::shared_ptr<const TransitionFamily> shared(const FloatContext& ctx, int nodes,
                                                        int cdf_grid = CdfTable::kDefaultGridSize);

  /// Draw from the unit-time kernel started at xi.
  double sample(double xi, Rng& rng) const;

  int nodes() const { return static_cast<int>(tables_.size()); }
  double start_half_width() const { return start_w_; }

 private:
  double start_w_;
  double spacing_;
  std::vector<CdfTable> tables_;
};

struct SimulatorOptions {
  int family_nodes = 1025;
  int cdf_grid = CdfTable::kDefaultGridSize;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Draws B at t q^K from the marginal, then moves forward in time through the grid
/// transitions. A (grid, seed) pair determines the path bit for bit.
class PathSimulator {
 public:
  PathSimulator(GeometricGrid grid, const FloatContext& ctx, SimulatorOptions opts = {});

  const GeometricGrid& grid() const { return grid_; }
  double q() const { return grid_.q(); }

  GeometricPath simulate(std::uint64_t seed) const;

  /// Paths with seeds base_seed + i, i = 0..n-1; independent of thread scheduling.
  std::vector<GeometricPath> simulate_batch(std::size_t n_paths, std::uint64_t base_seed) const;

 private:
  GeometricGrid grid_;
  SimulatorOptions opts_;
  std::shared_ptr<const TransitionFamily> family_;
  CdfTable terminal_marginal_;
};

GeometricPath simulate_path(const GeometricGrid& grid, std::uint64_t seed, const FloatContext& ctx);

std::vector<GeometricPath> simulate_batch(const GeometricGrid& grid, std::size_t n_paths,
                                          std::uint64_t base_seed, const FloatContext& ctx);

/// CSV with header "k,t_k,B_k" and K+1 rows.
void write_path_csv(std::ostream& out, const GeometricPath& path);

/// One row per grid index: "k,t_k,path_<seed>,..." for all paths (same grid required).
void write_batch_csv_wide(std::ostream& out, const std::vector<GeometricPath>& paths);

}  // namespace qbm
