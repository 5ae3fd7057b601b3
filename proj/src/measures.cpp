#include "qbm/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "qbm/qhermite.hpp"

namespace qbm {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

int product_order(double q, double prod_eps) {
  int n = 0;
  double power = 1.0;
  while (power >= prod_eps) {
    power *= q;
    ++n;
  }
  return std::max(n, 1);
}

DensitySpec DensitySpec::marginal(double t, const FloatContext& ctx) {
  if (!(t > 0)) throw std::invalid_argument("marginal density needs t > 0");
  DensitySpec d;
  d.kind_ = DensityKind::marginal;
  d.q_ = ctx.q();
  d.t_ = t;
  d.w_ = support_half_width(t, d.q_);
  const int n = product_order(d.q_, ctx.prod_eps());
  d.qk_.resize(static_cast<std::size_t>(n));
  double power = 1.0;
  double constant = 1.0;
  for (int k = 0; k < n; ++k) {
    d.qk_[k] = power;
    constant *= 1.0 - power * d.q_;
    power *= d.q_;
  }
  d.lead_ = std::sqrt(1.0 - d.q_) / (2.0 * kPi * t) * constant;
  return d;
}

DensitySpec DensitySpec::transition(double x, double s, double t, const FloatContext& ctx) {
  if (!(s >= 0) || !(s < t)) throw std::invalid_argument("transition density needs 0 <= s < t");
  const double q = ctx.q();
  const double ws = support_half_width(s, q);
  if (!(std::abs(x) <= ws * (1.0 + 1e-12))) {
    throw std::invalid_argument(
        "transition density: starting point lies outside the time-s support "
        "(the discrete component is not modelled)");
  }
  DensitySpec d;
  d.kind_ = DensityKind::transition;
  d.q_ = q;
  d.s_ = s;
  d.t_ = t;
  d.x_ = x;
  d.w_ = support_half_width(t, q);
  const int n = product_order(q, ctx.prod_eps());
  const auto size = static_cast<std::size_t>(n);
  d.qk_.resize(size);
  d.a_.resize(size);
  d.n0_.resize(size);
  d.n2_.resize(size);
  d.d0_.resize(size);
  d.d1_.resize(size);
  d.d2_.resize(size);
  double qk = 1.0;
  for (std::size_t k = 0; k < size; ++k) {
    const double q2k = qk * qk;
    d.qk_[k] = qk;
    // all factors rescaled by 1/t^2 so that each is O(1)
    const double a = (t - s * qk) * (1.0 - qk * q) / t;
    d.a_[k] = a;
    d.n0_[k] = a * (1.0 + qk) * (1.0 + qk);
    d.n2_[k] = a * (1.0 - q) * qk / t;
    const double base = t - s * q2k;
    d.d0_[k] = (base * base + (1.0 - q) * t * x * x * q2k) / (t * t);
    d.d1_[k] = -(1.0 - q) * qk * (t + s * q2k) * x / (t * t);
    d.d2_[k] = (1.0 - q) * s * q2k / (t * t);
    qk *= q;
  }
  // k = 0: (t - s)(1 - q)(4t - (1-q) y^2) / D_0(y); the sqrt(4t - (1-q)y^2) part is split off.
  d.lead_ = std::sqrt(1.0 - q) / (2.0 * kPi) * (t - s) * (1.0 - q) / (t * t);
  return d;
}

double DensitySpec::regular_part(double y) const {
  const double y2 = y * y;
  double num = 1.0;
  double den = 1.0;
  const std::size_t n = qk_.size();
  if (kind_ == DensityKind::marginal) {
    const double scaled = (1.0 - q_) * y2 / t_;
    for (std::size_t k = 1; k < n; ++k) {
      const double qk = qk_[k];
      num *= (1.0 + qk) * (1.0 + qk) - scaled * qk;
    }
    return lead_ * num;
  }
  den = d0_[0] + d1_[0] * y + d2_[0] * y2;
  for (std::size_t k = 1; k < n; ++k) {
    num *= n0_[k] - n2_[k] * y2;
    den *= d0_[k] + d1_[k] * y + d2_[k] * y2;
  }
  return lead_ * num / den;
}

double DensitySpec::density(double y) const {
  const double gap = 4.0 * t_ - (1.0 - q_) * y * y;
  if (!(gap > 0)) return 0.0;
  return regular_part(y) * std::sqrt(gap);
}

double DensitySpec::spread() const {
  return std::sqrt(kind_ == DensityKind::marginal ? t_ : t_ - s_);
}

double DensitySpec::theta_density(double theta) const {
  const double c = std::cos(theta);
  return regular_part(w_ * std::sin(theta)) * (4.0 * t_ / std::sqrt(1.0 - q_)) * c * c;
}

double qgauss_density(double y, double t, const FloatContext& ctx) {
  return DensitySpec::marginal(t, ctx).density(y);
}

double transition_density(double x, double s, double t, double y, const FloatContext& ctx) {
  return DensitySpec::transition(x, s, t, ctx).density(y);
}

namespace {

QuadratureRule build_gauss_legendre(int order) {
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    // [-1,1] -> [-pi/2, pi/2]
    rule.nodes[lo] = -0.5 * kPi * z;
    rule.nodes[hi] = 0.5 * kPi * z;
    rule.weights[lo] = 0.5 * kPi * w;
    rule.weights[hi] = 0.5 * kPi * w;
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<QuadratureRule>> rules;
  std::lock_guard lock(mutex);
  auto& slot = rules[order];
  if (!slot) slot = std::make_unique<QuadratureRule>(build_gauss_legendre(order));
  return *slot;
}

namespace {

// Panel edges in theta: center +- spread * 2^j, clipped to the support, plus both ends.
std::vector<double> panel_edges(const DensitySpec& spec) {
  const double w = spec.half_width();
  const double c = spec.center();
  const double sigma = spec.spread();
  std::vector<double> ys{-w, w};
  for (double step = sigma; step < 2.0 * w; step *= 2.0)
    for (double y : {c - step, c + step})
      if (y > -w && y < w) ys.push_back(y);
  std::vector<double> edges;
  for (double y : ys) edges.push_back(std::asin(std::clamp(y / w, -1.0, 1.0)));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace

IntegrationResult integrate(const std::function<double(double)>& g, const DensitySpec& spec,
                            const QuadratureRule& rule, const IntegrationOptions& opts) {
  const double w = spec.half_width();
  const std::vector<double> edges = panel_edges(spec);
  auto apply = [&](const QuadratureRule& r) {
    IntegrationResult out;
    out.order = r.order;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double mid = 0.5 * (edges[p + 1] + edges[p]);
      const double half = 0.5 * (edges[p + 1] - edges[p]);
      const double scale = half / (0.5 * kPi);
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double theta = mid + scale * r.nodes[i];
        const double v = g(w * std::sin(theta)) * spec.theta_density(theta) * scale * r.weights[i];
        out.value += v;
        out.abs_value += std::abs(v);
      }
    }
    return out;
  };
  IntegrationResult previous = apply(rule);
  for (int order = 2 * rule.order; order <= opts.max_order; order *= 2) {
    IntegrationResult current = apply(gauss_legendre(order));
    const double scale = std::max(std::abs(current.value), current.abs_value);
    if (std::abs(current.value - previous.value) <= std::max(opts.rel_tol * scale, opts.abs_tol)) return current;
    previous = current;
  }
  throw QuadratureError("quadrature did not converge by order " + std::to_string(opts.max_order));
}

CdfTable::CdfTable(const DensitySpec& spec, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("CDF grid needs at least two cells");
  const auto n = static_cast<std::size_t>(grid_size);
  const double h = kPi / grid_size;
  w_ = spec.half_width();
  pdf_.resize(n + 1);
  cdf_.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) pdf_[i] = spec.theta_density(-0.5 * kPi + i * h);
  cdf_[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double mid = spec.theta_density(-0.5 * kPi + (i + 0.5) * h);
    cdf_[i + 1] = cdf_[i] + h / 6.0 * (pdf_[i] + 4.0 * mid + pdf_[i + 1]);
  }
  const double total = cdf_[n];
  if (!(std::abs(total - 1.0) <= 1e-6)) {
    std::ostringstream msg;
    msg << "tabulated CDF has mass " << total << "; density spec rejected";
    throw std::invalid_argument(msg.str());
  }
  for (auto& v : cdf_) v /= total;
  for (auto& v : pdf_) v /= total;
  cdf_[n] = 1.0;
}

double CdfTable::quantile(double u) const {
  const std::size_t n = cdf_.size() - 1;
  const double h = kPi / static_cast<double>(n);
  // bisection on the table: cell i with cdf[i] <= u < cdf[i+1]
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t i = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
  i = std::min(i, n - 1);
  const double f0 = cdf_[i];
  const double f1 = cdf_[i + 1];
  const double delta = f1 - f0;
  double tau = 0.0;
  if (delta > 0) {
    double d0 = pdf_[i] * h;
    double d1 = pdf_[i + 1] * h;
    const double alpha = d0 / delta;
    const double beta = d1 / delta;
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double scale = 3.0 / std::sqrt(r2);
      d0 *= scale;
      d1 *= scale;
    }
    tau = std::clamp((u - f0) / delta, 0.0, 1.0);
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    const double value = f0 * (2 * t3 - 3 * t2 + 1) + d0 * (t3 - 2 * t2 + tau) +
                         f1 * (-2 * t3 + 3 * t2) + d1 * (t3 - t2);
    const double slope = f0 * (6 * t2 - 6 * tau) + d0 * (3 * t2 - 4 * tau + 1) +
                         f1 * (-6 * t2 + 6 * tau) + d1 * (3 * t2 - 2 * tau);
    if (slope > 0) tau = std::clamp(tau - (value - u) / slope, 0.0, 1.0);
  }
  const double theta = -0.5 * kPi + (static_cast<double>(i) + tau) * h;
  return w_ * std::sin(theta);
}

namespace {

constexpr std::array<char, 8> kMagic = {'Q', 'B', 'M', 'C', 'D', 'F', '\0', '\1'};

struct CacheKey {
  std::int32_t kind;
  std::int32_t order;
  std::int32_t grid;
  std::int32_t reserved;
  double q;
  double s;
  double t;
  double x;
};

CacheKey key_for(const DensitySpec& spec, int grid_size) {
  return CacheKey{static_cast<std::int32_t>(spec.kind()), spec.order(), grid_size, 0,
                  spec.q(), spec.s(), spec.t(), spec.x()};
}

std::uint64_t fnv1a(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <class V>
void write_raw(std::ostream& out, const V& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <class V>
bool read_raw(std::istream& in, V& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(V)));
}

}  // namespace

CdfCache::CdfCache(std::filesystem::path directory) : dir_(std::move(directory)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path CdfCache::path_for(const DensitySpec& spec, int grid_size) const {
  const CacheKey key = key_for(spec, grid_size);
  char name[64];
  std::snprintf(name, sizeof(name), "cdf_v%u_%016llx.bin", kFormatVersion,
                static_cast<unsigned long long>(fnv1a(&key, sizeof(key))));
  return dir_ / name;
}

std::shared_ptr<const CdfTable> CdfCache::get(const DensitySpec& spec, int grid_size) {
  const CacheKey key = key_for(spec, grid_size);
  const auto path = path_for(spec, grid_size);
  const auto n = static_cast<std::size_t>(grid_size) + 1;

  if (std::ifstream in(path, std::ios::binary); in) {
    std::array<char, 8> magic{};
    std::uint32_t version = 0;
    CacheKey stored{};
    auto table = std::shared_ptr<CdfTable>(new CdfTable());
    table->cdf_.resize(n);
    table->pdf_.resize(n);
    const bool ok = read_raw(in, magic) && magic == kMagic && read_raw(in, version) &&
                    version == kFormatVersion && read_raw(in, stored) &&
                    std::memcmp(&stored, &key, sizeof(key)) == 0 && read_raw(in, table->w_) &&
                    in.read(reinterpret_cast<char*>(table->cdf_.data()),
                            static_cast<std::streamsize>(n * sizeof(double))) &&
                    in.read(reinterpret_cast<char*>(table->pdf_.data()),
                            static_cast<std::streamsize>(n * sizeof(double)));
    if (ok) {
      ++hits_;
      return table;
    }
  }

  ++misses_;
  auto table = std::make_shared<const CdfTable>(spec, grid_size);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write CDF cache file " + tmp);
    write_raw(out, kMagic);
    write_raw(out, kFormatVersion);
    write_raw(out, key);
    write_raw(out, table->w_);
    out.write(reinterpret_cast<const char*>(table->cdf_.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
    out.write(reinterpret_cast<const char*>(table->pdf_.data()),
              static_cast<std::streamsize>(n * sizeof(double)));
    if (!out) throw std::runtime_error("cannot write CDF cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
  return table;
}

double sample(const DensitySpec& spec, Rng& rng, CdfCache* cache) {
  if (cache != nullptr) return cache->get(spec)->sample(rng);
  return CdfTable(spec).sample(rng);
}

}  // namespace qbm
