"""q-Brownian motion: q-calculus, q-Hermite polynomials, sampling and q-Ito calculus.

Floating-point functions take and return floats. Exact functions take ints, strings or
fractions.Fraction and return Fraction.
"""

import json
from fractions import Fraction

from . import _core
from ._core import (
    QuadratureError,
    build_id,
    delta_numeric,
    exponential_radius,
    hermite_values,
    identity_suites,
    moment_checks,
    nabla_numeric,
    oracle_EZ2,
    oracle_EZ4,
    q_binomial,
    q_factorial,
    q_int,
    qgauss_density,
    simulate_batch,
    simulate_path,
    stochastic_exponential,
    stochastic_exponential_series,
    support_half_width,
    transition_density,
)

__version__ = "0.3.0"


def _s(v):
    return str(Fraction(v))


def q_int_exact(n, q):
    return Fraction(_core.q_int_exact(n, _s(q)))


def q_factorial_exact(n, q):
    return Fraction(_core.q_factorial_exact(n, _s(q)))


def q_binomial_exact(n, k, q):
    return Fraction(_core.q_binomial_exact(n, k, _s(q)))


def nabla_exact(coeffs, q, x, s):
    """(nabla f)(x, s) for f(x) = sum_n coeffs[n] x^n, in exact arithmetic."""
    return Fraction(_core.nabla_exact([_s(c) for c in coeffs], _s(q), _s(x), _s(s)))


def delta_exact(coeffs, q, x, s):
    """(Delta f)(x, s) for f(x) = sum_n coeffs[n] x^n, in exact arithmetic."""
    return Fraction(_core.delta_exact([_s(c) for c in coeffs], _s(q), _s(x), _s(s)))


def stochastic_integral(coeffs, q, depth, seed, horizon=1.0):
    """Integral of f(B_s) dB_s over [0, horizon] on one simulated path: value, K, tail bound."""
    return json.loads(_core.stochastic_integral(list(coeffs), q, depth, seed, horizon))


def run_identities(qs=(), only=(), seed=20240601):
    """Exact identity suites; one record per (suite, q)."""
    return json.loads(_core.run_identities([_s(q) for q in qs], list(only), seed))


def mc_moment(name, params=None, n_paths=100000, seed=20240601):
    """Named Monte Carlo moment check against its closed-form oracle."""
    return json.loads(_core.mc_moment(name, list((params or {}).items()), n_paths, seed))


def run_cli(**settings):
    """Runs the command-line pipeline in-process; keys as the long options (dashes or underscores)."""
    flat = {k.replace("_", "-"): str(v) for k, v in settings.items()}
    return _core.run_cli(flat)
