// qbm: exact identity suites, path simulation and Monte Carlo verification.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "qbm/cli.hpp"

int main(int argc, char** argv) {
  using namespace qbm::cli;

  CLI::App app{"q-Brownian motion calculus: identities, simulation, verification"};
  app.set_version_flag("--version", std::string("qbm ") + QBM_VERSION);

  Settings flags;
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; flags take precedence");
  for (const auto& key : setting_keys()) {
    app.add_option_function<std::string>("--" + key, [&flags, key](const std::string& v) { flags[key] = v; })
        ->type_name("VALUE");
  }
  app.get_option("--suite")->description("identities|simulate|verify|all (default all)");
  app.get_option("--q")->description("deformation parameter in (0,1), exact decimals or n/d");
  app.get_option("--t")->description("horizon (default 1)");
  app.get_option("--depth")->description("grid depth K for simulate (default: q^K <= depth-threshold)");
  app.get_option("--paths")->description("number of paths (simulate 1, verify 100000)");
  app.get_option("--seed")->description("base seed; falls back to QBM_SEED, then 20240601");
  app.get_option("--out")->description("output directory (default qbm-out)");
  app.get_option("--format")->description("report format json|csv");
  app.get_option("--only")->description("comma-separated suites or checks to run");
  app.get_option("--z-threshold")->description("Monte Carlo pass threshold on |z| (default 4)");
  app.get_option("--depth-threshold")->description("tail threshold for the automatic grid depth");
  app.get_option("--batch-layout")->description("per-path|wide path files");
  app.get_option("--threads")->description("worker threads, 0 for all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  RunConfig cfg;
  try {
    const Settings file = config_path.empty() ? Settings{} : read_config_file(config_path);
    std::optional<std::string> env_seed;
    if (const char* s = std::getenv("QBM_SEED"); s != nullptr && *s != '\0') env_seed = s;
    cfg = resolve_config(flags, file, env_seed);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    return run(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
}
