import math

import numpy as np
import pytest

from dmim import (
    GammaCurve, Plan, beta_from, d_from, epsilon_from, gamma_limit,
    gamma_ratio, ks_tail_series, ks_tail_upper_bound, make_plan,
    required_samples,
)

# deterministic reference-table columns: (epsilon, sigma) -> (n, beta at d=0.01)
TABLE2_CELLS = {
    (0.01, 1.0): (787, 1.8034),
    (0.003, 1.0): (8815, 0.3621),
    (0.002, 1.0): (19854, 0.0398),
    (0.001, 1.0): (79497, 2.63e-7),
    (0.01, 2.0): (196, 2.0296),
    (0.003, 2.0): (2203, 1.3586),
    (0.002, 2.0): (4963, 0.7823),
    (0.001, 2.0): (19874, 0.0396),
}


def _half_ulp(printed: float) -> float:
    # half a unit in the last printed digit, e.g. 1.8034 -> 5e-5
    s = f"{printed:.10g}"
    if "e" in s:
        mant, exp = s.split("e")
        digits = len(mant.replace(".", "").replace("-", ""))
        return 0.5 * 10.0 ** (int(exp) - digits + 1)
    decimals = len(s.split(".")[1]) if "." in s else 0
    return 0.5 * 10.0 ** -decimals


def test_required_samples_table_cells():
    for (eps, sigma), (n, _) in TABLE2_CELLS.items():
        assert required_samples(eps, sigma, "paper_floor") == n


def test_required_samples_rounding_modes():
    # ceil keeps the >= guarantee, floor reproduces the reference table
    assert required_samples(0.01, 1.0) == 788
    assert required_samples(0.01, 1.0, "paper_floor") == 787
    with pytest.raises(ValueError):
        required_samples(0.01, 1.0, "round")


def test_required_samples_with_importance_value():
    # supplying l < 1 weakens the log argument, so n grows
    base = required_samples(0.01, 1.0)
    tighter = required_samples(0.01, 1.0, l_of_x=0.76)
    assert tighter > base
    assert tighter == math.ceil(1 / (4 * math.pi * math.log(1 - 0.0076) ** 2))


def test_required_samples_monotone_in_eps_and_sigma():
    epss = np.logspace(-3, -1, 9)
    sigmas = np.linspace(0.5, 4.0, 8)
    for sigma in sigmas:
        ns = [required_samples(float(e), float(sigma)) for e in epss]
        assert all(a >= b for a, b in zip(ns, ns[1:]))
    for eps in epss:
        ns = [required_samples(float(eps), float(s)) for s in sigmas]
        assert all(a >= b for a, b in zip(ns, ns[1:]))


def test_required_samples_validation():
    for bad_eps in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            required_samples(bad_eps, 1.0)
    with pytest.raises(ValueError):
        required_samples(0.01, -1.0)


def test_beta_from_reproduces_table():
    for (eps, sigma), (_, beta) in TABLE2_CELLS.items():
        assert abs(beta_from(0.01, eps, sigma) - beta) <= _half_ulp(beta)


def test_ternary_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(100):
        eps = float(rng.uniform(1e-4, 0.3))
        beta = float(rng.uniform(1e-4, 1.5))
        sigma = float(rng.uniform(0.2, 5.0))
        d = d_from(eps, beta, sigma)
        assert epsilon_from(d, beta, sigma) == pytest.approx(eps, rel=1e-12)
        assert beta_from(d, eps, sigma) == pytest.approx(beta, rel=1e-12)


def test_d_from_examples():
    assert d_from(0.01, 1.8034, 1.0) == pytest.approx(0.01, abs=1e-6)
    assert d_from(0.003, 0.3621, 1.0) == pytest.approx(0.01, abs=1e-6)
    assert d_from(1e-12, 0.5, 1.0) < 1e-11  # epsilon -> 0 sends d -> 0
    with pytest.raises(ValueError):
        d_from(0.01, 19 / 9, 1.0)
    with pytest.raises(ValueError):
        d_from(0.01, 3.0, 1.0)


def test_epsilon_from_examples():
    assert epsilon_from(0.01, 1.8034, 1.0) == pytest.approx(0.01, abs=1e-4)
    assert epsilon_from(0.01, 0.0396, 2.0) == pytest.approx(0.001, abs=1e-5)
    with pytest.raises(ValueError):
        epsilon_from(0.01, 2.2, 1.0)


def test_ks_tail_series_values():
    assert ks_tail_series(1000, 0.05) == pytest.approx(0.013475889875863688, rel=1e-12)
    # single-term dominance when 2 n d^2 = 50
    assert ks_tail_series(25000, math.sqrt(0.001)) == pytest.approx(
        2 * math.exp(-50), rel=1e-6)
    # tiny argument: essentially total probability (theta-function sum < 1
    # analytically; the [0, 1] clip only guards float overshoot)
    assert ks_tail_series(100, 0.001) == pytest.approx(1.0, abs=1e-12)
    assert ks_tail_series(100, 0.001) <= 1.0


def test_ks_tail_series_range_and_monotonicity():
    ds = np.linspace(0.005, 0.2, 40)
    vals = [ks_tail_series(500, float(d)) for d in ds]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[0] > vals[-1]


def test_ks_tail_upper_bound_values():
    assert ks_tail_upper_bound(1000, 0.05) == pytest.approx(
        0.013475894025946810, rel=1e-12)
    # informative only: in the loose-beta regime the bound exceeds 1
    assert ks_tail_upper_bound(787, 0.01) == pytest.approx(3.6574108, rel=1e-6)


def test_ks_tail_upper_bound_dominates_series():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        n = int(rng.integers(1, 100000))
        d = float(rng.uniform(1e-4, 0.5))
        assert ks_tail_upper_bound(n, d) >= ks_tail_series(n, d) - 1e-15


def test_guarantee_chain_holds_for_beta_below_one():
    # at n from the planner and d from the ternary relation, the tail bound
    # stays below beta (the quartic inequality holds for beta <= ~1.0112)
    grid = [(eps, beta, sigma)
            for eps in (0.004, 0.01, 0.03, 0.08)
            for beta in (0.15, 0.45, 0.8, 1.0)
            for sigma in (0.9,)] + [(0.01, b, 2.0) for b in (0.3, 0.6, 0.9, 1.0)]
    assert len(grid) == 20
    for eps, beta, sigma in grid:
        n = required_samples(eps, sigma)
        d = d_from(eps, beta, sigma)
        assert ks_tail_upper_bound(n, d) <= beta * (1 + 1e-9)


def test_gamma_ratio_examples():
    c = GammaCurve(sigma=1.0, l_of_x=1.0)
    assert gamma_ratio(c, 10 ** 12) == pytest.approx(1.0, abs=1e-6)
    c = GammaCurve(sigma=1.0, l_of_x=0.759)
    assert gamma_ratio(c, 100) == pytest.approx(1.2808757483788153, rel=1e-12)
    ratios = [gamma_ratio(c, n) for n in range(1, 1001)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))


def test_gamma_limit():
    assert gamma_limit(GammaCurve(1.0, 0.5)) == 2.0
    assert gamma_limit(GammaCurve(1.0, 1.0)) == 1.0
    c = GammaCurve(sigma=1.0, l_of_x=0.759)
    assert abs(gamma_ratio(c, 10 ** 10) - gamma_limit(c)) < 1e-4


def test_gamma_curve_validation():
    with pytest.raises(ValueError):
        GammaCurve(0.0, 0.5)
    with pytest.raises(ValueError):
        GammaCurve(1.0, 0.0)
    with pytest.raises(ValueError):
        GammaCurve(1.0, 1.5)
    with pytest.raises(ValueError):
        gamma_ratio(GammaCurve(1.0, 0.5), 0)


def test_make_plan_and_serialization():
    p = make_plan(0.01, 1.0, 1.8034, "paper_floor")
    assert p.n == 787 and p.vacuous
    q = make_plan(0.002, 1.0, 0.0398)
    assert q.n == 19855 and not q.vacuous
    js = q.to_json()
    assert js["vacuous"] is False and js["n"] == 19855
    with pytest.raises(ValueError):
        Plan(epsilon=0.01, sigma=1.0, n=10, rounding="ceil", d=0.01, beta=0.5)
