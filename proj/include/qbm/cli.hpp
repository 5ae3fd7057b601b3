#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbm/scalar.hpp"

namespace qbm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr std::uint64_t kDefaultSeed = 20240601;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw key -> value settings, keyed by long flag name without dashes.
using Settings = std::map<std::string, std::string>;

/// Settings keys accepted on the command line and in config files.
const std::vector<std::string>& setting_keys();

struct RunConfig {
  std::string suite = "all";
  /// Unset: each command uses its own sweep (identities and verify) or 1/2 (simulate).
  std::optional<Rational> q;
  double t = 1.0;
  /// Unset: smallest K with q^K <= depth_threshold.
  std::optional<int> depth;
  /// Unset: 1 for simulate, 100000 for verify.
  std::optional<std::size_t> paths;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path out = "qbm-out";
  std::string format = "json";
  std::vector<std::string> only;
  double z_threshold = 4.0;
  double depth_threshold = 1e-6;
  std::string batch_layout = "per-path";
  unsigned threads = 0;

  /// Resolved values as strings, written into manifests and reports.
  Settings echo() const;
};

/// Reads "key = value" lines; '#' starts a comment. Throws ConfigError on unreadable files,
/// malformed lines or unknown keys.
Settings read_config_file(const std::filesystem::path& path);

/// Merges flags over config file over QBM_SEED (seed only) over defaults, then validates.
/// Throws ConfigError on any invalid value.
RunConfig resolve_config(const Settings& flags, const Settings& file,
                         const std::optional<std::string>& env_seed);

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::filesystem::path> outputs;
};

/// Exact identity suites; exit 1 with the failing suites listed on `log`.
CommandResult cmd_identities(const RunConfig& cfg, std::ostream& log);
/// Simulated paths as CSV, one file per path or one wide file.
CommandResult cmd_simulate(const RunConfig& cfg, std::ostream& log);
/// Isometry, moment, Ito-residual and SDE checks plus plot-ready tables.
CommandResult cmd_verify(const RunConfig& cfg, std::ostream& log);

/// Runs cfg.suite (or all three in order), then writes manifest.json. Returns the exit code.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace qbm::cli
