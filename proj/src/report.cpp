#include "qbm/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qbm/measures.hpp"
#include "qbm/qhermite.hpp"

#ifndef QBM_BUILD_ID
#define QBM_BUILD_ID "unknown"
#endif

namespace qbm {

namespace {

template <Scalar T>
std::string exact_string(const T& v) {
  if constexpr (is_exact_v<T>) {
    return to_string(v);
  } else {
    return to_string(Rational(v));
  }
}

template <Scalar T>
Json coefficient_array(const Polynomial<T>& p) {
  Json arr = Json::array();
  for (const auto& c : p.coefficients()) arr.push_back(exact_string(c));
  return arr;
}

std::vector<Polynomial<Rational>> parse_coefficients(const Json& j, const char* basis) {
  if (!j.is_object() || !j.contains("basis") || !j.contains("coefficients"))
    throw std::invalid_argument("polynomial json needs 'basis' and 'coefficients'");
  if (j.at("basis") != basis)
    throw std::invalid_argument(std::string("expected basis '") + basis + "'");
  std::vector<Polynomial<Rational>> out;
  for (const auto& row : j.at("coefficients")) {
    std::vector<Rational> c;
    for (const auto& v : row) c.push_back(parse_rational(v.get<std::string>()));
    out.emplace_back(std::move(c));
  }
  return out;
}

std::string csv_field(double v) { return std::isfinite(v) ? to_string(v) : std::string(); }

std::string params_field(const CheckParams& params) {
  std::string s;
  for (const auto& [k, v] : params) {
    if (!s.empty()) s += ';';
    s += k + '=' + to_string(v);
  }
  return s;
}

}  // namespace

template <Scalar T>
Json to_json(const QPolynomial<T>& f) {
  Json rows = Json::array();
  for (const auto& a : f.coefficients()) rows.push_back(coefficient_array(a));
  return Json{{"basis", "monomial"}, {"degree", f.degree()}, {"coefficients", rows}};
}

template <Scalar T>
Json to_json(const HermiteCoefficients<T>& f) {
  Json rows = Json::array();
  const int d = f.degree();
  for (int m = 0; m <= d; ++m) rows.push_back(coefficient_array(f[static_cast<std::size_t>(m)]));
  return Json{{"basis", "q_hermite"}, {"degree", d}, {"coefficients", rows}};
}

QPolynomial<Rational> qpolynomial_from_json(const Json& j) {
  return QPolynomial<Rational>(parse_coefficients(j, "monomial"));
}

HermiteCoefficients<Rational> hermite_from_json(const Json& j) {
  HermiteCoefficients<Rational> out;
  out.b = parse_coefficients(j, "q_hermite");
  return out;
}

template <Scalar T>
Json to_json(const StochasticIntegralResult<T>& r) {
  Json value;
  if constexpr (is_exact_v<T>) {
    value = to_string(r.value);
  } else {
    value = r.value;
  }
  return Json{{"value", value}, {"K", r.depth}, {"tail_bound", r.tail_bound}, {"seed", r.seed}};
}

Json to_json(const VerificationReport& r) {
  Json params = Json::object();
  for (const auto& [k, v] : r.params) params[k] = v;
  Json j{{"name", r.name}, {"params", params}, {"pass", r.pass}, {"tolerance", r.tolerance}};
  if (r.mc) {
    const auto& m = *r.mc;
    j["mc"] = Json{{"estimate", m.estimate}, {"std_error", m.std_error}, {"n_paths", m.n_paths},
                   {"seed", m.seed},         {"oracle", m.oracle},       {"z", m.z}};
  }
  if (r.residual) j["residual"] = *r.residual;
  if (r.truncation_bias) j["truncation_bias"] = *r.truncation_bias;
  j["rerun"] = r.rerun;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const IdentityResult& r) {
  Json j{{"suite", r.suite}, {"q", r.q}, {"cases", r.cases}, {"failures", r.failures}, {"pass", r.pass()}};
  if (!r.first_failure.empty()) j["first_failure"] = r.first_failure;
  return j;
}

void write_reports_csv(std::ostream& out, const std::vector<VerificationReport>& reports) {
  out << "name,params,oracle,estimate,stderr,z,pass\n";
  for (const auto& r : reports) {
    out << r.name << ',' << params_field(r.params) << ',';
    if (r.mc) {
      out << csv_field(r.mc->oracle) << ',' << csv_field(r.mc->estimate) << ','
          << csv_field(r.mc->std_error) << ',' << csv_field(r.mc->z);
    } else {
      out << "0," << (r.residual ? csv_field(*r.residual) : std::string()) << ",,";
    }
    out << ',' << (r.pass ? "true" : "false") << '\n';
  }
}

void write_identities_csv(std::ostream& out, const std::vector<IdentityResult>& results) {
  out << "suite,q,cases,failures,pass\n";
  for (const auto& r : results)
    out << r.suite << ',' << r.q << ',' << r.cases << ',' << r.failures << ','
        << (r.pass() ? "true" : "false") << '\n';
}

void write_density_curves_csv(std::ostream& out, const std::vector<double>& qs, double t, int n_points) {
  if (n_points < 1) throw std::invalid_argument("n_points must be positive");
  out << "q,t,y,density\n";
  for (double q : qs) {
    const FloatContext ctx(q);
    const double w = support_half_width(t, q);
    for (int i = 0; i < n_points; ++i) {
      const double y = -w + (i + 0.5) * 2.0 * w / n_points;
      out << to_string(q) << ',' << to_string(t) << ',' << to_string(y) << ','
          << to_string(qgauss_density(y, t, ctx)) << '\n';
    }
  }
}

void write_kurtosis_csv(std::ostream& out, const std::vector<double>& qs, const std::vector<double>& rs) {
  out << "q,r,EZ2,EZ4,ratio\n";
  for (double q : qs) {
    for (double r : rs) {
      const double e2 = oracle_EZ2(r, q), e4 = oracle_EZ4(r, q);
      out << to_string(q) << ',' << to_string(r) << ',' << to_string(e2) << ',' << to_string(e4) << ','
          << to_string(e4 / (e2 * e2)) << '\n';
    }
  }
}

std::string build_id() { return QBM_BUILD_ID; }

Json make_manifest(const std::string& command, std::uint64_t seed,
                   const std::map<std::string, std::string>& config,
                   const std::vector<std::filesystem::path>& outputs) {
  Json cfg = Json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  Json files = Json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  return Json{{"tool", "qbm"},   {"build_id", build_id()}, {"command", command},
              {"seed", seed},    {"config", cfg},          {"outputs", files}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

template Json to_json(const QPolynomial<double>&);
template Json to_json(const QPolynomial<Rational>&);
template Json to_json(const HermiteCoefficients<double>&);
template Json to_json(const HermiteCoefficients<Rational>&);
template Json to_json(const StochasticIntegralResult<double>&);
template Json to_json(const StochasticIntegralResult<Rational>&);

}  // namespace qbm
