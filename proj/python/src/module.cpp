#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qbm/cli.hpp"
#include "qbm/identities.hpp"
#include "qbm/measures.hpp"
#include "qbm/process.hpp"
#include "qbm/qcore.hpp"
#include "qbm/qhermite.hpp"
#include "qbm/qito.hpp"
#include "qbm/report.hpp"
#include "qbm/stochint.hpp"
#include "qbm/verify.hpp"

namespace py = pybind11;
using namespace qbm;

namespace {

// Exact arguments cross the boundary as strings ("3/7", "0.2"); the Python layer wraps them
// in fractions.Fraction.
ExactContext exact_ctx(const std::string& q) { return ExactContext(parse_rational(q)); }

QPolynomial<Rational> exact_poly(const std::vector<std::string>& coeffs) {
  Polynomial<Rational> p;
  for (std::size_t n = 0; n < coeffs.size(); ++n)
    p += Polynomial<Rational>::monomial(n, parse_rational(coeffs[n]));
  return QPolynomial<Rational>::from_x_polynomial(p);
}

Polynomial<double> float_poly(const std::vector<double>& coeffs) {
  Polynomial<double> p;
  for (std::size_t n = 0; n < coeffs.size(); ++n) p += Polynomial<double>::monomial(n, coeffs[n]);
  return p;
}

py::dict path_dict(const GeometricPath& p) {
  py::dict d;
  d["times"] = p.grid.times();
  d["values"] = p.values;
  d["seed"] = p.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "q-Brownian motion: q-calculus, q-Hermite polynomials, sampling and q-Ito calculus.";

  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);

  m.def("build_id", &build_id);

  m.def("q_int", [](int n, double q) { return q_int(n, FloatContext(q)); }, py::arg("n"), py::arg("q"));
  m.def("q_factorial", [](int n, double q) { return q_factorial(n, FloatContext(q)); }, py::arg("n"),
        py::arg("q"));
  m.def("q_binomial", [](int n, int k, double q) { return q_binomial(n, k, FloatContext(q)); }, py::arg("n"),
        py::arg("k"), py::arg("q"));
  m.def("q_int_exact", [](int n, const std::string& q) { return to_string(q_int(n, exact_ctx(q))); });
  m.def("q_factorial_exact", [](int n, const std::string& q) { return to_string(q_factorial(n, exact_ctx(q))); });
  m.def("q_binomial_exact",
        [](int n, int k, const std::string& q) { return to_string(q_binomial(n, k, exact_ctx(q))); });

  m.def("hermite_values",
        [](int n_max, double x, double t, double q) { return hermite_values(n_max, x, t, FloatContext(q)); },
        py::arg("n_max"), py::arg("x"), py::arg("t"), py::arg("q"), "h_0(x;t) .. h_n_max(x;t).");
  m.def("support_half_width", &support_half_width, py::arg("t"), py::arg("q"));

  m.def("qgauss_density", [](double y, double t, double q) { return qgauss_density(y, t, FloatContext(q)); },
        py::arg("y"), py::arg("t"), py::arg("q"));
  m.def("transition_density",
        [](double x, double s, double t, double y, double q) {
          return transition_density(x, s, t, y, FloatContext(q));
        },
        py::arg("x"), py::arg("s"), py::arg("t"), py::arg("y"), py::arg("q"));

  m.def("simulate_path",
        [](double q, int depth, std::uint64_t seed, double horizon) {
          return path_dict(simulate_path(GeometricGrid(horizon, q, depth), seed, FloatContext(q)));
        },
        py::arg("q"), py::arg("depth"), py::arg("seed"), py::arg("horizon") = 1.0,
        "Values of B at t q^k, k = 0..depth, on the geometric grid.");
  m.def("simulate_batch",
        [](double q, int depth, std::size_t n_paths, std::uint64_t seed, double horizon) {
          py::list out;
          for (const auto& p : simulate_batch(GeometricGrid(horizon, q, depth), n_paths, seed, FloatContext(q)))
            out.append(path_dict(p));
          return out;
        },
        py::arg("q"), py::arg("depth"), py::arg("n_paths"), py::arg("seed"), py::arg("horizon") = 1.0);

  m.def("stochastic_integral",
        [](const std::vector<double>& coeffs, double q, int depth, std::uint64_t seed, double horizon) {
          const FloatContext ctx(q);
          const auto path = simulate_path(GeometricGrid(horizon, q, depth), seed, ctx);
          const auto f = to_hermite_basis(QPolynomial<double>::from_x_polynomial(float_poly(coeffs)), ctx);
          return to_json(integrate_def(f, samples(path), horizon, ctx)).dump();
        },
        py::arg("coeffs"), py::arg("q"), py::arg("depth"), py::arg("seed"), py::arg("horizon") = 1.0);

  m.def("stochastic_exponential",
        [](double a, double c, double x, double t, double q) {
          return stochastic_exponential(a, c, x, t, FloatContext(q));
        },
        py::arg("a"), py::arg("c"), py::arg("x"), py::arg("t"), py::arg("q"));
  m.def("stochastic_exponential_series",
        [](double a, double c, double x, double t, int degree, double q) {
          return stochastic_exponential_series(a, c, x, t, degree, FloatContext(q));
        },
        py::arg("a"), py::arg("c"), py::arg("x"), py::arg("t"), py::arg("degree"), py::arg("q"));
  m.def("exponential_radius", &exponential_radius, py::arg("a"), py::arg("q"));

  m.def("nabla_exact",
        [](const std::vector<std::string>& coeffs, const std::string& q, const std::string& x, const std::string& s) {
          return to_string(nabla_exact(exact_poly(coeffs), exact_ctx(q))(parse_rational(x), parse_rational(s)));
        });
  m.def("delta_exact",
        [](const std::vector<std::string>& coeffs, const std::string& q, const std::string& x, const std::string& s) {
          return to_string(delta_exact(exact_poly(coeffs), exact_ctx(q))(parse_rational(x), parse_rational(s)));
        });
  m.def("nabla_numeric",
        [](const std::vector<double>& coeffs, double x, double s, double q) {
          return nabla_numeric(float_poly(coeffs), x, s, FloatContext(q));
        },
        py::arg("coeffs"), py::arg("x"), py::arg("s"), py::arg("q"));
  m.def("delta_numeric",
        [](const std::vector<double>& coeffs, double x, double s, double q) {
          return delta_numeric(float_poly(coeffs), x, s, FloatContext(q));
        },
        py::arg("coeffs"), py::arg("x"), py::arg("s"), py::arg("q"));

  m.def("oracle_EZ2", py::overload_cast<double, double>(&oracle_EZ2), py::arg("r"), py::arg("q"));
  m.def("oracle_EZ4", py::overload_cast<double, double>(&oracle_EZ4), py::arg("r"), py::arg("q"));

  m.def("identity_suites", &identity_suites);
  m.def("run_identities",
        [](const std::vector<std::string>& qs, const std::vector<std::string>& only, std::uint64_t seed) {
          IdentityOptions opts;
          if (!qs.empty()) {
            opts.qs.clear();
            for (const auto& q : qs) opts.qs.push_back(parse_rational(q));
          }
          opts.seed = seed;
          Json out = Json::array();
          for (const auto& r : run_identities(opts, only)) out.push_back(to_json(r));
          return out.dump();
        },
        py::arg("qs"), py::arg("only"), py::arg("seed"));

  m.def("moment_checks", [] {
    std::vector<std::string> names;
    for (const auto& [name, params] : moment_checks()) names.push_back(name);
    return names;
  });
  m.def("mc_moment",
        [](const std::string& name, const CheckParams& params, std::size_t n_paths, std::uint64_t seed) {
          py::gil_scoped_release release;
          return to_json(mc_moment(name, params, n_paths, seed)).dump();
        },
        py::arg("name"), py::arg("params"), py::arg("n_paths"), py::arg("seed"));

  m.def("run_cli",
        [](const cli::Settings& settings, std::optional<std::string> env_seed) {
          std::ostringstream log;
          int code = cli::kExitOk;
          try {
            code = cli::run(cli::resolve_config(settings, {}, env_seed), log);
          } catch (const cli::ConfigError& e) {
            log << "error: " << e.what() << '\n';
            code = cli::kExitConfigError;
          }
          return py::make_tuple(code, log.str());
        },
        py::arg("settings"), py::arg("env_seed") = std::nullopt);
}
