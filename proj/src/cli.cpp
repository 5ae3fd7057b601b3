#include "qbm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "qbm/context.hpp"
#include "qbm/identities.hpp"
#include "qbm/process.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/report.hpp"
#include "qbm/verify.hpp"

namespace qbm::cli {

namespace {

const std::vector<std::string> kSuites{"identities", "simulate", "verify", "all"};
const std::vector<std::string> kVerifyGroups{"isometry", "moments", "ito-residual", "sde"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used == v.size() && std::isfinite(out)) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

void require_one_of(const std::string& key, const std::string& v, const std::vector<std::string>& allowed) {
  if (std::find(allowed.begin(), allowed.end(), v) != allowed.end()) return;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
  throw ConfigError(key + ": expected one of " + list + ", got '" + v + "'");
}

std::set<std::string> known_only_names() {
  std::set<std::string> names(kVerifyGroups.begin(), kVerifyGroups.end());
  for (const auto& s : identity_suites()) names.insert(s);
  for (const auto& [name, params] : moment_checks()) names.insert(name);
  return names;
}

bool selected(const std::vector<std::string>& only, const std::string& name) {
  return only.empty() || std::find(only.begin(), only.end(), name) != only.end();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json config_json(const RunConfig& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : cfg.echo()) j[k] = v;
  return j;
}

}  // namespace

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys{"suite", "q",      "t",           "depth",
                                             "paths", "seed",   "out",         "format",
                                             "only",  "z-threshold", "depth-threshold",
                                             "batch-layout", "threads"};
  return keys;
}

Settings RunConfig::echo() const {
  Settings s;
  s["suite"] = suite;
  s["q"] = q ? to_string(*q) : "default";
  s["t"] = to_string(t);
  s["depth"] = depth ? std::to_string(*depth) : "auto";
  s["paths"] = paths ? std::to_string(*paths) : "default";
  s["seed"] = std::to_string(seed);
  s["out"] = out.string();
  s["format"] = format;
  std::string o;
  for (const auto& x : only) o += (o.empty() ? "" : ",") + x;
  s["only"] = o;
  s["z-threshold"] = to_string(z_threshold);
  s["depth-threshold"] = to_string(depth_threshold);
  s["batch-layout"] = batch_layout;
  s["threads"] = std::to_string(threads);
  return s;
}

Settings read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  const auto& keys = setting_keys();
  Settings out;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return out;
}

RunConfig resolve_config(const Settings& flags, const Settings& file,
                         const std::optional<std::string>& env_seed) {
  Settings merged = file;
  if (env_seed && !merged.contains("seed") && !flags.contains("seed")) merged["seed"] = *env_seed;
  for (const auto& [k, v] : flags) merged[k] = v;

  const auto& keys = setting_keys();
  RunConfig cfg;
  for (const auto& [key, v] : merged) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown setting '" + key + "'");
    if (key == "suite") {
      require_one_of(key, v, kSuites);
      cfg.suite = v;
    } else if (key == "q") {
      Rational q;
      try {
        q = parse_rational(v);
        ExactContext check(q);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("q: ") + e.what());
      }
      cfg.q = q;
    } else if (key == "t") {
      cfg.t = parse_double(key, v);
      if (!(cfg.t > 0)) throw ConfigError("t must be positive");
    } else if (key == "depth") {
      cfg.depth = parse_int<int>(key, v);
      if (*cfg.depth < 1) throw ConfigError("depth must be at least 1");
    } else if (key == "paths") {
      cfg.paths = parse_int<std::size_t>(key, v);
      if (*cfg.paths < 1) throw ConfigError("paths must be at least 1");
    } else if (key == "seed") {
      cfg.seed = parse_int<std::uint64_t>(key, v);
    } else if (key == "out") {
      if (v.empty()) throw ConfigError("out must not be empty");
      cfg.out = v;
    } else if (key == "format") {
      require_one_of(key, v, {"json", "csv"});
      cfg.format = v;
    } else if (key == "only") {
      cfg.only = split_list(v);
      const auto known = known_only_names();
      for (const auto& name : cfg.only)
        if (!known.contains(name)) throw ConfigError("only: unknown check or suite '" + name + "'");
    } else if (key == "z-threshold") {
      cfg.z_threshold = parse_double(key, v);
      if (!(cfg.z_threshold > 0)) throw ConfigError("z-threshold must be positive");
    } else if (key == "depth-threshold") {
      cfg.depth_threshold = parse_double(key, v);
      if (!(cfg.depth_threshold > 0 && cfg.depth_threshold < 1))
        throw ConfigError("depth-threshold must lie in (0,1)");
    } else if (key == "batch-layout") {
      require_one_of(key, v, {"per-path", "wide"});
      cfg.batch_layout = v;
    } else if (key == "threads") {
      cfg.threads = parse_int<unsigned>(key, v);
    }
  }
  return cfg;
}

CommandResult cmd_identities(const RunConfig& cfg, std::ostream& log) {
  IdentityOptions opts;
  if (cfg.q) opts.qs = {*cfg.q};
  opts.seed = cfg.seed;
  std::vector<std::string> only;
  for (const auto& s : identity_suites())
    if (std::find(cfg.only.begin(), cfg.only.end(), s) != cfg.only.end()) only.push_back(s);
  if (!cfg.only.empty() && only.empty()) {
    log << "identities: no suite selected by --only\n";
    return {};
  }

  const auto results = run_identities(opts, only);
  CommandResult out;
  for (const auto& r : results) {
    log << (r.pass() ? "PASS " : "FAIL ") << "identities/" << r.suite << " q=" << r.q << " cases=" << r.cases;
    if (!r.pass()) {
      log << " failures=" << r.failures << " first: " << r.first_failure;
      out.exit_code = kExitVerificationFailure;
    }
    log << '\n';
  }

  std::filesystem::path file = cfg.out / ("identities." + cfg.format);
  if (cfg.format == "json") {
    Json arr = Json::array();
    for (const auto& r : results) arr.push_back(to_json(r));
    write_text_file(file, dump(Json{{"config", config_json(cfg)}, {"results", arr}}));
  } else {
    std::ostringstream s;
    write_identities_csv(s, results);
    write_text_file(file, s.str());
  }
  out.outputs.push_back(file);
  return out;
}

CommandResult cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const double q = cfg.q ? to_double(*cfg.q) : 0.5;
  const FloatContext ctx(q);
  const GeometricGrid grid = cfg.depth ? GeometricGrid(cfg.t, q, *cfg.depth)
                                       : GeometricGrid::with_tail_threshold(cfg.t, q, cfg.depth_threshold);
  SimulatorOptions sim_opts;
  sim_opts.threads = cfg.threads;
  const std::size_t n = cfg.paths.value_or(1);
  const auto paths = PathSimulator(grid, ctx, sim_opts).simulate_batch(n, cfg.seed);

  CommandResult out;
  if (cfg.batch_layout == "wide") {
    std::ostringstream s;
    write_batch_csv_wide(s, paths);
    out.outputs.push_back(cfg.out / "paths.csv");
    write_text_file(out.outputs.back(), s.str());
  } else {
    for (const auto& p : paths) {
      std::ostringstream s;
      write_path_csv(s, p);
      out.outputs.push_back(cfg.out / ("path_" + std::to_string(p.seed) + ".csv"));
      write_text_file(out.outputs.back(), s.str());
    }
  }
  log << "simulate: " << n << " path(s), q=" << to_string(q) << " t=" << to_string(cfg.t)
      << " K=" << grid.depth() << " -> " << out.outputs.size() << " file(s)\n";
  return out;
}

CommandResult cmd_verify(const RunConfig& cfg, std::ostream& log) {
  McOptions mc;
  mc.z_threshold = cfg.z_threshold;
  mc.depth_threshold = cfg.depth_threshold;
  mc.simulator.threads = cfg.threads;
  PathBank bank(mc.simulator);
  const std::size_t n = cfg.paths.value_or(100000);

  std::vector<VerificationReport> reports;
  auto record = [&](VerificationReport r) {
    log << (r.pass ? "PASS " : "FAIL ") << r.name;
    for (const auto& [k, v] : r.params) log << ' ' << k << '=' << to_string(v);
    if (r.mc) log << " estimate=" << to_string(r.mc->estimate) << " oracle=" << to_string(r.mc->oracle)
                  << " z=" << to_string(r.mc->z);
    if (r.residual) log << " residual=" << to_string(*r.residual) << " bound=" << to_string(r.tolerance);
    log << '\n';
    reports.push_back(std::move(r));
  };

  const std::vector<Rational> exact_qs =
      cfg.q ? std::vector<Rational>{*cfg.q} : std::vector<Rational>{ratio(1, 5), ratio(1, 2), ratio(4, 5)};

  if (selected(cfg.only, "isometry")) {
    for (const auto& qe : exact_qs) {
      const double q = to_double(qe);
      const FloatContext ctx(q);
      for (std::size_t deg = 0; deg <= 3; ++deg) {
        const auto f = to_hermite_basis(QPolynomial<double>::x_power(deg), ctx);
        record(mc_isometry(f, cfg.t, q, n, cfg.seed, &bank, mc));
      }
    }
  }

  const bool all_moments = selected(cfg.only, "moments");
  for (const auto& [name, defaults] : moment_checks()) {
    if (!all_moments && !selected(cfg.only, name)) continue;
    if (name == "EZ2" || name == "EZ4") {
      for (double r : {0.0, 0.5, 1.0}) record(mc_moment(name, {{"r", r}}, n, cfg.seed, &bank, mc));
    } else {
      record(mc_moment(name, {}, n, cfg.seed, &bank, mc));
    }
  }

  if (selected(cfg.only, "ito-residual")) {
    const std::vector<int> depths{20, 40, 80};
    for (const auto& qe : exact_qs) {
      for (const auto& row : ito_convergence_study(qe, 20, 20, depths, cfg.seed)) {
        VerificationReport r;
        r.name = "ito-residual";
        r.params = {{"q", to_double(qe)}, {"K", depths.back()}};
        r.residual = row.max_residual.back();
        r.tolerance = row.max_residual.back() + row.min_margin.back();
        r.pass = row.below_bound && row.decreasing;
        r.note = "f = " + row.polynomial + "; polynomial seed " + std::to_string(row.poly_seed);
        if (!row.decreasing) r.note += "; residual not decreasing in K";
        if (!row.below_bound) r.note += "; residual above tail bound";
        record(std::move(r));
      }
    }
  }

  if (selected(cfg.only, "sde")) {
    const double q = cfg.q ? to_double(*cfg.q) : 0.5;
    const double a = 0.5, c = 1.0, t = 0.5;
    for (const auto& row : sde_convergence_study(a, c, t, q, {4, 8, 16}, {20, 40}, 200, cfg.seed)) {
      VerificationReport r;
      r.name = "sde";
      r.params = {{"a", a}, {"c", c}, {"t", t}, {"q", q}, {"degree", row.degree}, {"K", row.depth}};
      r.residual = row.max_residual;
      r.tolerance = row.max_bound;
      r.pass = row.below_bound;
      r.note = "residual and bound are maxima over 200 paths; pass requires residual <= bound on each path";
      record(std::move(r));
    }
  }

  CommandResult out;
  for (const auto& r : reports)
    if (!r.pass) out.exit_code = kExitVerificationFailure;

  std::filesystem::path file = cfg.out / ("verify." + cfg.format);
  if (cfg.format == "json") {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    write_text_file(file, dump(Json{{"config", config_json(cfg)}, {"reports", arr}}));
  } else {
    std::ostringstream s;
    write_reports_csv(s, reports);
    write_text_file(file, s.str());
  }
  out.outputs.push_back(file);

  {
    std::ostringstream s;
    write_density_curves_csv(s, {0.1, 0.3, 0.5, 0.7, 0.9}, cfg.t, 201);
    out.outputs.push_back(cfg.out / "density_curves.csv");
    write_text_file(out.outputs.back(), s.str());
  }
  {
    std::ostringstream s;
    std::vector<double> rs;
    for (int i = 0; i <= 12; ++i) rs.push_back(0.25 * i);
    write_kurtosis_csv(s, {0.1, 0.3, 0.5, 0.7, 0.9}, rs);
    out.outputs.push_back(cfg.out / "kurtosis_ratio.csv");
    write_text_file(out.outputs.back(), s.str());
  }

  std::size_t failed = 0;
  for (const auto& r : reports) failed += r.pass ? 0 : 1;
  log << "verify: " << reports.size() - failed << "/" << reports.size() << " checks passed\n";
  return out;
}

int run(const RunConfig& cfg, std::ostream& log) {
  CommandResult total;
  auto merge = [&](CommandResult r) {
    total.exit_code = std::max(total.exit_code, r.exit_code);
    total.outputs.insert(total.outputs.end(), r.outputs.begin(), r.outputs.end());
  };
  try {
    if (cfg.suite == "identities" || cfg.suite == "all") merge(cmd_identities(cfg, log));
    if (cfg.suite == "simulate" || cfg.suite == "all") merge(cmd_simulate(cfg, log));
    if (cfg.suite == "verify" || cfg.suite == "all") merge(cmd_verify(cfg, log));
    const auto manifest = cfg.out / "manifest.json";
    write_text_file(manifest, dump(make_manifest(cfg.suite, cfg.seed, cfg.echo(), total.outputs)));
  } catch (const ConfigError& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    log << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "output error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return total.exit_code;
}

}  // namespace qbm::cli
