#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbm/scalar.hpp"

namespace qbm {

/// Outcome of one exact identity suite at one value of q.
struct IdentityResult {
  std::string suite;
  std::string q;
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  bool pass() const { return failures == 0 && cases > 0; }
};

struct IdentityOptions {
  std::vector<Rational> qs{Rational(1, 5), Rational(1, 2), Rational(4, 5)};
  std::uint64_t seed = 20240601;
  int random_trials = 12;
  /// Grid depth of the sample paths used by the pathwise identities.
  int path_depth = 12;
};

/// Suite names in execution order.
const std::vector<std::string>& identity_suites();

/// Runs the named suites (all when `only` is empty) in rational arithmetic.
/// Throws std::invalid_argument for an unknown suite name.
std::vector<IdentityResult> run_identities(const IdentityOptions& opts,
                                           const std::vector<std::string>& only = {});

}  // namespace qbm
