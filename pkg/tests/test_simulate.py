import math

import numpy as np
import pytest

from dmim import (
    Exponential, Laplace, McConfig, Nakagami, Normal, Uniform, ecdf,
    ks_statistic, mc_error_probability, reproduce_table2, required_samples,
)
from dmim.simulate import fit_curve

# 99% point of the KS statistic at n = 10^4, from inverting the tail sum
KS_Q99_N1E4 = 0.016276236115


def test_ecdf_counting():
    e = ecdf([1.0, 2.0, 3.0])
    assert e(2.0) == pytest.approx(2 / 3)
    assert e(0.5) == 0.0
    assert e(3.0) == 1.0 and e(10.0) == 1.0
    assert ecdf([1.0, 1.0, 2.0])(1.0) == pytest.approx(2 / 3)
    e = ecdf([5.0])
    assert e(4.999) == 0.0 and e(5.0) == 1.0
    with pytest.raises(ValueError):
        ecdf([])


def test_ecdf_vectorized_right_continuous():
    e = ecdf([0.0, 1.0])
    got = e(np.array([-0.1, 0.0, 0.5, 1.0, 1.5]))
    assert got.tolist() == [0.0, 0.5, 0.5, 1.0, 1.0]


def test_ks_perfect_quantile_grid():
    d = Normal(0, 1)
    n = 10
    grid = d.quantile((np.arange(1, n + 1) - 0.5) / n)
    r = ks_statistic(grid, d)
    assert r.d_n == pytest.approx(1 / (2 * n), abs=1e-12)
    assert r.n == n


def test_ks_single_sample_at_median():
    r = ks_statistic([0.0], Normal(0, 1))
    assert r.d_n == pytest.approx(0.5, abs=1e-12)
    assert r.at_x == 0.0


def test_ks_large_normal_sample_below_99_percent_point():
    d = Normal(0, 1)
    r = ks_statistic(d.sample(seed=12345, n=10 ** 4), d)
    assert r.d_n < KS_Q99_N1E4
    assert r.d_n < 0.0328


def test_ks_matches_brute_force_grid():
    rng = np.random.default_rng(8)
    makers = [lambda: Uniform(-1, 2), lambda: Normal(0.5, 1.2),
              lambda: Exponential(1.3), lambda: Laplace(0, 0.8)]
    for trial in range(50):
        dist = makers[trial % len(makers)]()
        n = int(rng.integers(1, 51))
        xs = dist.sample(seed=1000 + trial, n=n)
        r = ks_statistic(xs, dist)
        lo = min(float(dist.quantile(1e-9)), xs.min()) - 1.0
        hi = max(float(dist.quantile(1 - 1e-9)), xs.max()) + 1.0
        grid = np.linspace(lo, hi, 1_000_001)
        e = ecdf(xs)
        brute = np.max(np.abs(e(grid) - dist.cdf(grid)))
        assert brute <= r.d_n + 1e-12  # grid never beats the exact sup
        assert r.d_n <= brute + 1 / n + 1e-6


def test_mc_error_probability_deterministic_across_workers():
    d = Normal(0, 1)
    a = mc_error_probability(d, 500, 0.02, McConfig(reps=80, seed=4, workers=1))
    b = mc_error_probability(d, 500, 0.02, McConfig(reps=80, seed=4, workers=4))
    assert a.p_hat == b.p_hat
    assert a.ci95_halfwidth == pytest.approx(
        1.96 * math.sqrt(a.p_hat * (1 - a.p_hat) / 80), rel=1e-12)


def test_mc_threshold_one_never_exceeded():
    rep = mc_error_probability(Exponential(1.0), 50, 1.0, McConfig(reps=50, seed=9))
    assert rep.p_hat == 0.0


def test_table2_deterministic_columns_small_reps():
    rows = reproduce_table2(families=["normal"], cfg=McConfig(reps=10, seed=0))
    assert len(rows) == 8
    by_cell = {(r["epsilon"], r["sigma"]): r for r in rows}
    assert by_cell[(0.01, 1.0)]["n"] == 787
    assert by_cell[(0.001, 2.0)]["n"] == 19874
    assert by_cell[(0.01, 1.0)]["beta"] == pytest.approx(1.8034, abs=5e-5)
    for r in rows:
        assert 0.0 <= r["p_hat"] <= 1.0
        assert r["ci95"] == pytest.approx(
            1.96 * math.sqrt(r["p_hat"] * (1 - r["p_hat"]) / 10), rel=1e-12)


def test_table2_rejects_unknown_family():
    with pytest.raises(ValueError):
        reproduce_table2(families=["cauchy"], cfg=McConfig(reps=2, seed=0))


def test_error_probability_three_phase_shape():
    # nondecreasing in the deviation, ~0 at 1e-3, ~1 at 1e-1
    reps = 300
    epsilons = np.logspace(-3, -1, 12)
    p = []
    sd = []
    for i, eps in enumerate(epsilons):
        n = required_samples(float(eps), 1.0, "paper_floor")
        rep = mc_error_probability(Normal(0, 1), n, 0.01,
                                   McConfig(reps=reps, seed=100 + i))
        p.append(rep.p_hat)
        sd.append(math.sqrt(max(rep.p_hat * (1 - rep.p_hat), 1e-9) / reps))
    assert p[0] == 0.0
    assert p[-1] == 1.0
    for i in range(len(p) - 1):
        slack = 3.0 * math.hypot(sd[i], sd[i + 1])
        assert p[i + 1] >= p[i] - slack


def test_fit_curve_gaps_shrink_with_epsilon():
    curves = fit_curve(Nakagami(2.0, 10.0), [0.1, 0.05, 0.01, 0.001], seed=21)
    gaps = [c["sup_gap"] for c in curves]
    assert gaps[0] > gaps[1] > gaps[2] > gaps[3]
    assert gaps[-1] < 0.02
    ns = [c["n"] for c in curves]
    assert ns == sorted(ns)
    assert len(curves[0]["x"]) == 512


def test_fit_curve_grid_gap_bounded_by_exact_ks():
    dist = Uniform(0, 1)
    curves = fit_curve(dist, [0.001], seed=13)
    c = curves[0]
    xs = dist.sample(13, c["n"], stream=0)  # same stream the curve used
    exact = ks_statistic(xs, dist).d_n
    assert c["sup_gap"] <= exact + 1 / 512 + 1e-12


def test_fit_curve_validation():
    with pytest.raises(ValueError):
        fit_curve(Uniform(0, 1), [], seed=0)
