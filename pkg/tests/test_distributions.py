import math

import numpy as np
import pytest
from scipy.integrate import quad as scipy_quad

from dmim import (
    Beta, Custom, Exponential, Gamma, Interval, Laplace, MissingVarianceError,
    Nakagami, Normal, Uniform, UnsupportedOperationError, from_json,
)

ALL_FAMILIES = [
    Uniform(-1.5, 2.0),
    Normal(0.7, 1.3),
    Exponential(0.8),
    Gamma(2.2, 1.7),
    Gamma(0.7, 2.0),
    Beta(2.0, 3.0),
    Beta(0.6, 0.9),
    Laplace(-0.4, 1.1),
    Nakagami(2.0, 10.0),
    Nakagami(0.5, 3.0),
]


def _pdf_scalar(dist):
    return lambda x: float(dist.pdf(x))


# ---------------------------------------------------------------- pdf / cdf

def test_pdf_spot_values():
    assert Uniform(0, 2).pdf(1.0) == 0.5
    assert Normal(0, 1).pdf(0.0) == pytest.approx(0.3989423, abs=5e-8)
    assert Exponential(1.0).pdf(-1.0) == 0.0


def test_cdf_spot_values():
    assert Exponential(1.0).cdf(math.log(2)) == pytest.approx(0.5, abs=1e-15)
    assert Uniform(0, 1).cdf(0.25) == 0.25
    assert Normal(0, 1).cdf(0.0) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("dist", ALL_FAMILIES, ids=repr)
def test_pdf_integrates_to_one(dist):
    lo, hi = dist.support.lo, dist.support.hi
    total, err = scipy_quad(_pdf_scalar(dist), lo, hi, limit=400)
    assert total == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("dist", ALL_FAMILIES, ids=repr)
def test_cdf_matches_integrated_pdf(dist):
    qs = np.linspace(0.004, 0.996, 100)
    xs = dist.quantile(qs)
    lo = dist.support.lo
    for x in xs:
        ref, _ = scipy_quad(_pdf_scalar(dist), lo, x, limit=400,
                            epsabs=1e-12, epsrel=1e-12)
        assert float(dist.cdf(x)) == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("dist", ALL_FAMILIES, ids=repr)
def test_cdf_monotone_with_correct_limits(dist):
    lo, hi = dist.support.lo, dist.support.hi
    a = lo if math.isfinite(lo) else -1e9
    b = hi if math.isfinite(hi) else 1e9
    xs = np.linspace(a, b, 501)
    cs = dist.cdf(xs)
    assert np.all(np.diff(cs) >= -1e-15)
    assert cs[0] == pytest.approx(0.0, abs=1e-9)
    assert cs[-1] == pytest.approx(1.0, abs=1e-9)


def test_pdf_zero_outside_support():
    assert Uniform(0, 1).pdf(-0.3) == 0.0
    assert Gamma(2.0, 1.0).pdf(-1.0) == 0.0
    assert Beta(2.0, 2.0).pdf(1.5) == 0.0
    assert Nakagami(1.0, 1.0).pdf(-0.1) == 0.0


# ---------------------------------------------------------------- variance

def test_variance_values():
    assert Uniform(0, 1).variance() == pytest.approx(1 / 12)
    assert Exponential(1.0).variance() == 1.0
    # cross-check the Nakagami moment formula by direct integration
    nak = Nakagami(2.0, 10.0)
    m2, _ = scipy_quad(lambda x: x * x * float(nak.pdf(x)), 0, np.inf, limit=300)
    m1, _ = scipy_quad(lambda x: x * float(nak.pdf(x)), 0, np.inf, limit=300)
    assert nak.variance() == pytest.approx(m2 - m1 * m1, abs=1e-9)
    assert nak.variance() == pytest.approx(1.16427, abs=5e-6)


@pytest.mark.parametrize("dist", ALL_FAMILIES, ids=repr)
def test_empirical_variance_within_three_se(dist):
    n = 1_000_000
    x = dist.sample(seed=2024, n=n)
    s2 = x.var()
    # standard error of the sample variance, estimated from the sample itself
    m = x.mean()
    m4 = np.mean((x - m) ** 4)
    se = math.sqrt(max(m4 - s2 * s2, 1e-30) / n)
    assert abs(s2 - dist.variance()) <= 3.0 * se


# ---------------------------------------------------------------- sampling

def test_sample_spot_checks():
    u = Uniform(0, 1).sample(seed=7, n=5)
    assert u.shape == (5,) and np.all((u > 0) & (u < 1))
    z = Normal(0, 1).sample(seed=1, n=10 ** 5)
    assert abs(z.mean()) < 0.02  # 5 sigma / sqrt(n) headroom
    e = Exponential(2.0).sample(seed=3, n=10 ** 5)
    assert abs(e.var() - 0.25) < 0.05 * 0.25


@pytest.mark.parametrize("dist", ALL_FAMILIES, ids=repr)
def test_sample_bit_reproducible(dist):
    a = dist.sample(seed=99, n=257)
    b = dist.sample(seed=99, n=257)
    assert np.array_equal(a, b)
    c = dist.sample(seed=99, n=257, stream=1)
    assert not np.array_equal(a, c)
    d = dist.sample(seed=100, n=257)
    assert not np.array_equal(a, d)


@pytest.mark.parametrize("dist", ALL_FAMILIES, ids=repr)
def test_sample_distribution_matches_cdf(dist):
    # KS check against the family's own cdf; 0.02 is ~1.7x the 99% point at this n
    n = 20_000
    x = np.sort(dist.sample(seed=31337, n=n))
    f = dist.cdf(x)
    i = np.arange(1, n + 1)
    d_n = max((i / n - f).max(), (f - (i - 1) / n).max())
    assert d_n < 0.02


# ---------------------------------------------------------------- validation

@pytest.mark.parametrize("bad", [
    lambda: Uniform(1.0, 1.0),
    lambda: Normal(0.0, 0.0),
    lambda: Normal(0.0, -1.0),
    lambda: Exponential(0.0),
    lambda: Gamma(0.0, 1.0),
    lambda: Gamma(1.0, -2.0),
    lambda: Beta(0.0, 1.0),
    lambda: Laplace(0.0, 0.0),
    lambda: Nakagami(0.49, 1.0),
    lambda: Nakagami(1.0, 0.0),
    lambda: Interval(2.0, 2.0),
])
def test_construction_errors(bad):
    with pytest.raises(ValueError):
        bad()


# ---------------------------------------------------------------- JSON

def test_json_round_trip():
    for dist in ALL_FAMILIES:
        again = from_json(dist.to_json())
        assert again == dist


@pytest.mark.parametrize("obj", [
    {"family": "cauchy", "params": {}},
    {"family": "normal", "params": {"mu": 0}},
    {"family": "normal", "params": {"mu": 0, "sigma": 1, "extra": 2}},
    {"params": {"mu": 0, "sigma": 1}},
    "normal",
])
def test_json_rejects_malformed(obj):
    with pytest.raises(ValueError):
        from_json(obj)


# ---------------------------------------------------------------- custom

def _triangle():
    # triangular density on [0, 2], peak at 1
    def f(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 1.0, x, 2.0 - x)
    return f


def test_custom_density_basics():
    dist = Custom(_triangle(), Interval(0.0, 2.0), variance=1.0 / 6.0)
    assert dist.pdf(0.5) == 0.5
    assert dist.pdf(-1.0) == 0.0
    assert dist.variance() == pytest.approx(1 / 6)
    # cdf against the closed form x^2/2 on the rising edge
    assert dist.cdf(0.8) == pytest.approx(0.32, abs=1e-8)
    assert dist.cdf(5.0) == 1.0


def test_custom_scalar_only_density_is_adapted():
    dist = Custom(lambda x: 1.0 if 0 <= x <= 1 else 0.0, Interval(0.0, 1.0))
    assert dist.pdf(np.array([0.5, 2.0])).tolist() == [1.0, 0.0]


def test_custom_unnormalized_rejected_on_first_use():
    dist = Custom(lambda x: np.full(np.shape(x), 2.0), Interval(0.0, 1.0))
    with pytest.raises(ValueError, match="integrates"):
        dist.cdf(0.5)


def test_custom_unbounded_below_cdf_unsupported():
    dist = Custom(lambda x: np.exp(-np.abs(x)) / 2.0,
                  Interval(-math.inf, math.inf))
    with pytest.raises(UnsupportedOperationError):
        dist.cdf(0.0)


def test_custom_sampling_requires_inverse_cdf():
    dist = Custom(_triangle(), Interval(0.0, 2.0))
    with pytest.raises(UnsupportedOperationError):
        dist.sample(seed=1, n=10)
    with pytest.raises(MissingVarianceError):
        dist.variance()

    def inv(p):
        p = np.asarray(p, dtype=float)
        return np.where(p < 0.5, np.sqrt(2.0 * p), 2.0 - np.sqrt(2.0 * (1.0 - p)))

    dist2 = Custom(_triangle(), Interval(0.0, 2.0), inverse_cdf=inv)
    x = dist2.sample(seed=5, n=50_000)
    assert np.all((x >= 0) & (x <= 2))
    assert x.mean() == pytest.approx(1.0, abs=0.02)
    assert np.array_equal(x, dist2.sample(seed=5, n=50_000))
