#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qbm/context.hpp"
#include "qbm/rng.hpp"

namespace qbm {

enum class DensityKind { marginal, transition };

/// q-Gaussian marginal gamma_{t;q}(dy) or absolutely continuous transition kernel
/// P_{s,t}(x, dy), each an infinite product truncated after N factors with q^N < prod_eps.
class DensitySpec {
 public:
  static DensitySpec marginal(double t, const FloatContext& ctx);
  /// Requires 0 <= s < t and |x| <= 2 sqrt(s) / sqrt(1-q).
  static DensitySpec transition(double x, double s, double t, const FloatContext& ctx);

  DensityKind kind() const { return kind_; }
  double q() const { return q_; }
  double s() const { return s_; }
  double t() const { return t_; }
  double x() const { return x_; }
  int order() const { return static_cast<int>(qk_.size()); }
  double half_width() const { return w_; }
  /// Mean and standard deviation of the law: (0, sqrt t) or (x, sqrt(t - s)).
  double center() const { return kind_ == DensityKind::marginal ? 0.0 : x_; }
  double spread() const;

  /// Density in y; zero outside |y| < half_width().
  double density(double y) const;

  /// Density after the substitution y = w sin(theta), including the Jacobian w cos(theta).
  /// Bounded and smooth on [-pi/2, pi/2].
  double theta_density(double theta) const;

 private:
  DensitySpec() = default;
  double regular_part(double y) const;

  DensityKind kind_ = DensityKind::marginal;
  double q_ = 0.5;
  double s_ = 0.0;
  double t_ = 1.0;
  double x_ = 0.0;
  double w_ = 0.0;
  double lead_ = 0.0;
  std::vector<double> qk_;  // q^k, k = 0..N-1
  // transition factors k >= 1: a_k (n0_k - n2_k y^2) / (d0_k + d1_k y + d2_k y^2)
  std::vector<double> a_, n0_, n2_, d0_, d1_, d2_;
};

/// Smallest N with q^N < prod_eps.
int product_order(double q, double prod_eps);

/// Gauss-Legendre rule mapped to theta in [-pi/2, pi/2]; weights sum to pi.
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Shared immutable rule of the given order (computed once per order).
const QuadratureRule& gauss_legendre(int order);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegrationOptions {
  double rel_tol = 1e-10;
  int max_order = 4096;
  /// Absolute floor for the convergence test; needed when the integral is zero up to rounding.
  double abs_tol = 0.0;
};

struct IntegrationResult {
  double value = 0.0;
  double abs_value = 0.0;  // integral of |g| against the same measure
  int order = 0;
};

/// Integral of g against the density, in theta after y = w sin(theta), on composite panels
/// whose widths grow geometrically away from center() in steps of spread(). The per-panel order
/// is doubled from rule.order until successive estimates differ by less than
/// max(rel_tol * max(|I|, integral |g|), abs_tol); throws QuadratureError past max_order.
IntegrationResult integrate(const std::function<double(double)>& g, const DensitySpec& spec,
                            const QuadratureRule& rule = gauss_legendre(32),
                            const IntegrationOptions& opts = {});

inline double expectation(const std::function<double(double)>& g, const DensitySpec& spec) {
  return integrate(g, spec).value;
}

double qgauss_density(double y, double t, const FloatContext& ctx);
double transition_density(double x, double s, double t, double y, const FloatContext& ctx);

/// CDF of a DensitySpec tabulated on a uniform theta grid, inverted by bisection on the
/// table plus one Newton step on a monotone cubic Hermite interpolant.
class CdfTable {
 public:
  static constexpr int kDefaultGridSize = 2048;

  explicit CdfTable(const DensitySpec& spec, int grid_size = kDefaultGridSize);

  int grid_size() const { return static_cast<int>(cdf_.size()) - 1; }
  double half_width() const { return w_; }

  /// y with F(y) = u for u in (0,1).
  double quantile(double u) const;
  double sample(Rng& rng) const { return quantile(uniform01(rng)); }

  const std::vector<double>& cdf() const { return cdf_; }
  const std::vector<double>& theta_pdf() const { return pdf_; }

  friend bool operator==(const CdfTable&, const CdfTable&) = default;

 private:
  friend class CdfCache;
  CdfTable() = default;

  double w_ = 0.0;
  std::vector<double> cdf_;  // at theta_i = -pi/2 + i pi / n
  std::vector<double> pdf_;  // theta density at the same nodes, normalized
};

/// On-disk cache of tabulated CDFs keyed by (kind, q, s, t, x, N, grid size).
/// Versioned binary files; a loaded table is bit-identical to a freshly built one.
class CdfCache {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  explicit CdfCache(std::filesystem::path directory);

  std::shared_ptr<const CdfTable> get(const DensitySpec& spec,
                                      int grid_size = CdfTable::kDefaultGridSize);
  std::filesystem::path path_for(const DensitySpec& spec, int grid_size) const;

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }

 private:
  std::filesystem::path dir_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

/// One draw from the density. Tabulates the CDF (or reads it from the cache) on each call;
/// reuse a CdfTable directly for repeated draws from one spec.
double sample(const DensitySpec& spec, Rng& rng, CdfCache* cache = nullptr);

}  // namespace qbm
