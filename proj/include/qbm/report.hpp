#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbm/identities.hpp"
#include "qbm/qpolynomial.hpp"
#include "qbm/stochint.hpp"
#include "qbm/verify.hpp"

namespace qbm {

using Json = nlohmann::ordered_json;

/// {"basis": "monomial", "degree": n, "coefficients": [["num/den", ...] per power of x]}.
/// Each inner array lists the time coefficients of one power of x. Doubles are written
/// as their exact dyadic value.
template <Scalar T>
Json to_json(const QPolynomial<T>& f);

/// Same layout with "basis": "q_hermite"; entry m holds b_m(t).
template <Scalar T>
Json to_json(const HermiteCoefficients<T>& f);

/// Inverse of to_json for either basis tag. Throws std::invalid_argument on malformed input
/// or when the basis tag does not match.
QPolynomial<Rational> qpolynomial_from_json(const Json& j);
HermiteCoefficients<Rational> hermite_from_json(const Json& j);

/// {value, K, tail_bound, seed}; exact values serialize as "num/den" strings.
template <Scalar T>
Json to_json(const StochasticIntegralResult<T>& r);

Json to_json(const VerificationReport& r);
Json to_json(const IdentityResult& r);

/// Header plus one row per check: name,params,oracle,estimate,stderr,z,pass.
/// params is "key=value" joined with ';'. Non-MC checks leave stderr and z empty and
/// report the residual as the estimate against oracle 0.
void write_reports_csv(std::ostream& out, const std::vector<VerificationReport>& reports);
void write_identities_csv(std::ostream& out, const std::vector<IdentityResult>& results);

/// Long-format density table: q,t,y,density over n_points uniformly spaced y strictly
/// inside the support of each gamma_{t;q}.
void write_density_curves_csv(std::ostream& out, const std::vector<double>& qs, double t,
                              int n_points);

/// Kurtosis ratio E(Z^4)/E(Z^2)^2 of Z = int_0^1 s^r dB: q,r,EZ2,EZ4,ratio.
void write_kurtosis_csv(std::ostream& out, const std::vector<double>& qs, const std::vector<double>& rs);

/// Build identifier baked in at configure time.
std::string build_id();

/// {"tool", "build_id", "command", "seed", "config": {...}, "outputs": [...]}.
Json make_manifest(const std::string& command, std::uint64_t seed,
                   const std::map<std::string, std::string>& config,
                   const std::vector<std::filesystem::path>& outputs);

/// Writes text to path, creating parent directories. Throws std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace qbm
