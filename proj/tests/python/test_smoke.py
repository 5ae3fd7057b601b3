import math
from fractions import Fraction

import pytest

import qbm


def test_q_numbers():
    assert qbm.q_int_exact(3, "1/2") == Fraction(7, 4)
    assert qbm.q_factorial_exact(4, Fraction(1, 2)) == Fraction(315, 64)
    assert qbm.q_binomial_exact(4, 2, "0.5") == Fraction(35, 16)
    assert qbm.q_binomial(6, 3, 0.3) == pytest.approx(1.595299693, rel=1e-12)
    with pytest.raises(ValueError):
        qbm.q_int(3, 1.2)


def test_hermite_values_follow_the_recurrence():
    q, x, t = 0.3, 0.7, 0.9
    h = qbm.hermite_values(9, x, t, q)
    for n in range(1, 9):
        assert h[n + 1] == pytest.approx(x * h[n] - t * qbm.q_int(n, q) * h[n - 1], abs=1e-13)
    assert h[5] == pytest.approx(1.2275788000000001399, rel=1e-13)


def test_densities():
    assert qbm.qgauss_density(0.3, 1.0, 0.5) == pytest.approx(0.35765180874711631821, rel=1e-12)
    assert qbm.transition_density(0.4, 0.5, 1.0, -0.2, 0.5) == pytest.approx(0.34289324009710724502, rel=1e-12)
    assert qbm.qgauss_density(10.0, 1.0, 0.5) == 0.0


def test_paths_are_seeded():
    a = qbm.simulate_path(0.5, 12, 7)
    b = qbm.simulate_path(0.5, 12, 7)
    assert a == b
    assert len(a["values"]) == 13 and a["times"][0] == 1.0
    batch = qbm.simulate_batch(0.5, 12, 3, 7)
    assert batch[0]["values"] == a["values"]
    assert [p["seed"] for p in batch] == [7, 8, 9]


def test_stochastic_exponential():
    assert qbm.stochastic_exponential(0.5, 1.0, 0.3, 0.5, 0.5) == pytest.approx(1.0694541700787485476, rel=1e-14)
    series = qbm.stochastic_exponential_series(0.5, 1.0, 0.3, 0.5, 40, 0.5)
    assert series == pytest.approx(1.0694541700787485476, abs=1e-10)


def test_stochastic_integral_of_b():
    q = 0.5
    r = qbm.stochastic_integral([0.0, 1.0], q, 40, 11)
    b1 = qbm.simulate_path(q, 40, 11)["values"][0]
    # int_0^1 B dB = (B_1^2 - 1) / (1 + q), up to the omitted cells
    assert abs(r["value"] - (b1 * b1 - 1) / (1 + q)) <= r["tail_bound"] * 1.01 + 1e-12
    assert r["K"] == 40 and r["seed"] == 11


def test_operators_exact_and_numeric():
    # nabla x^2 = (1 + q) x, delta x^2 = 1
    assert qbm.nabla_exact([0, 0, 1], "1/2", "3/10", 1) == Fraction(9, 20)
    assert qbm.delta_exact([0, 0, 1], "1/2", "3/10", 1) == 1
    exact = float(qbm.nabla_exact([0, 0, 0, 1], "1/2", "3/10", 1))
    assert qbm.nabla_numeric([0, 0, 0, 1], 0.3, 1.0, 0.5) == pytest.approx(exact, rel=1e-9)
    exact = float(qbm.delta_exact([0, 0, 0, 0, 1], "1/2", "3/10", 1))
    assert qbm.delta_numeric([0, 0, 0, 0, 1], 0.3, 1.0, 0.5) == pytest.approx(exact, rel=1e-8)


def test_oracles_and_moment_check():
    assert qbm.oracle_EZ2(0.5, 0.8) == pytest.approx(5 / 9, rel=1e-14)
    assert qbm.oracle_EZ4(0.5, 0.5) == pytest.approx(1.1749769809717188497, rel=1e-14)
    assert "EZ4" in qbm.moment_checks()
    rep = qbm.mc_moment("EZ2", {"r": 1.0}, n_paths=4000, seed=3)
    assert rep["mc"]["oracle"] == pytest.approx(4 / 7)
    assert abs(rep["mc"]["z"]) < 4 and rep["pass"]


def test_identities():
    assert "wdw" in qbm.identity_suites()
    res = qbm.run_identities(qs=["1/5", Fraction(1, 2)], only=["wdw", "recurrence"])
    assert len(res) == 4
    assert all(r["pass"] for r in res)


def test_cli_exit_codes(tmp_path):
    code, log = qbm.run_cli(suite="identities", only="wdw", out=tmp_path)
    assert code == 0 and "PASS identities/wdw" in log
    assert (tmp_path / "manifest.json").exists()
    code, _ = qbm.run_cli(suite="identities", q="1.2", out=tmp_path)
    assert code == 2
    assert not math.isnan(qbm.support_half_width(1.0, 0.5))
    assert qbm.build_id()
