"""Monte Carlo and empirical machinery: ECDF, exact KS statistic, repeated
trials of P{D_n > d}, the error-probability table, and CDF-fit curves.

Determinism contract: replication r of a run with master seed s draws from
stream (s, r). Results are merged by replication index, so the worker count
never changes any output bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .distributions import Distribution, Exponential, Laplace, Normal, Uniform
from .planner import beta_from, required_samples
from .rng import derive_seed

__all__ = [
    "EmpiricalCdf", "ecdf", "KsResult", "ks_statistic", "McConfig",
    "McReport", "mc_error_probability", "reproduce_table2", "fit_curve",
    "TABLE2_FAMILIES",
]

FIT_GRID_POINTS = 512

TABLE2_FAMILIES = ("normal", "exponential", "uniform", "laplace")


class EmpiricalCdf:
    """Right-continuous step function k/n at and above the k-th order statistic."""

    def __init__(self, samples: Sequence[float]):
        data = np.asarray(samples, dtype=float)
        if data.size == 0:
            raise ValueError("need at least one sample")
        self._sorted = np.sort(data)
        self.n = data.size

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        val = np.searchsorted(self._sorted, arr, side="right") / self.n
        return float(val) if arr.ndim == 0 else val


def ecdf(samples: Sequence[float]) -> EmpiricalCdf:
    return EmpiricalCdf(samples)


@dataclass
class KsResult:
    d_n: float
    at_x: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.d_n <= 1.0:
            raise ValueError(f"d_n={self.d_n} outside [0, 1]")

    def to_json(self) -> dict:
        return {"d_n": self.d_n, "at_x": self.at_x, "n": self.n}


def _ks_from_sorted(xs: np.ndarray, ref_cdf) -> tuple[float, float]:
    """(D_n, achieving x) from pre-sorted samples; exact order-statistic sup."""
    n = xs.size
    f = np.asarray(ref_cdf(xs), dtype=float)
    i = np.arange(1, n + 1, dtype=float)
    up = i / n - f          # gap just right of each jump
    down = f - (i - 1.0) / n  # gap just left of each jump
    iu = int(np.argmax(up))
    idn = int(np.argmax(down))
    if up[iu] >= down[idn]:
        return float(up[iu]), float(xs[iu])
    return float(down[idn]), float(xs[idn])


def ks_statistic(samples: Sequence[float], dist: Distribution) -> KsResult:
    """Exact sup_x |ECDF(x) - F(x)| against the reference cdf."""
    data = np.asarray(samples, dtype=float)
    if data.size == 0:
        raise ValueError("need at least one sample")
    xs = np.sort(data)
    d_n, at_x = _ks_from_sorted(xs, dist.cdf)
    return KsResult(d_n=min(d_n, 1.0), at_x=at_x, n=int(xs.size))


@dataclass
class McConfig:
    reps: int = 10000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class McReport:
    p_hat: float
    reps: int
    ci95_halfwidth: float
    d: float
    n: int

    def to_json(self) -> dict:
        return {"p_hat": self.p_hat, "reps": self.reps,
                "ci95_halfwidth": self.ci95_halfwidth, "d": self.d, "n": self.n}


def _ci95(p_hat: float, reps: int) -> float:
    return 1.96 * math.sqrt(p_hat * (1.0 - p_hat) / reps)


def mc_error_probability(dist: Distribution, n: int, d: float,
                         cfg: Optional[McConfig] = None) -> McReport:
    """Estimate P{D_n > d} over cfg.reps independent replications."""
    cfg = cfg or McConfig()
    if n < 1:
        raise ValueError("n must be >= 1")

    def run(rep: int) -> bool:
        xs = np.sort(dist.sample(cfg.seed, n, stream=rep))
        d_n, _ = _ks_from_sorted(xs, dist.cdf)
        return d_n > d

    if cfg.workers == 1:
        flags = [run(r) for r in range(cfg.reps)]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            flags = list(pool.map(run, range(cfg.reps)))
    p_hat = float(np.mean(flags))
    return McReport(p_hat=p_hat, reps=cfg.reps,
                    ci95_halfwidth=_ci95(p_hat, cfg.reps), d=d, n=n)


def _family_for(family: str, sigma: float) -> Distribution:
    """The family member with standard deviation sigma (location at 0)."""
    if family == "normal":
        return Normal(0.0, sigma)
    if family == "exponential":
        return Exponential(1.0 / sigma)
    if family == "uniform":
        return Uniform(0.0, 2.0 * math.sqrt(3.0) * sigma)
    if family == "laplace":
        return Laplace(0.0, math.sqrt(2.0) / sigma)
    raise ValueError(f"unknown family {family!r}; expected one of {TABLE2_FAMILIES}")


def reproduce_table2(families: Sequence[str] = TABLE2_FAMILIES,
                     epsilons: Sequence[float] = (0.01, 0.003, 0.002, 0.001),
                     sigmas: Sequence[float] = (1.0, 2.0),
                     cfg: Optional[McConfig] = None,
                     d: float = 0.01) -> list[dict]:
    """Error-probability grid: families x deviations x scales at threshold d.

    n comes from the floor-rounded sample-size rule, beta from the ternary
    relation, p_hat from Monte Carlo. Each cell owns a child seed derived from
    (cfg.seed, cell index) so the grid is reproducible as a whole.
    """
    cfg = cfg or McConfig()
    rows = []
    cell = 0
    for family in families:
        for eps in epsilons:
            for sigma in sigmas:
                dist = _family_for(family, sigma)
                n = required_samples(eps, sigma, "paper_floor")
                beta = beta_from(d, eps, sigma)
                cell_cfg = McConfig(reps=cfg.reps,
                                    seed=derive_seed(cfg.seed, cell),
                                    workers=cfg.workers)
                rep = mc_error_probability(dist, n, d, cell_cfg)
                rows.append({
                    "family": family, "epsilon": eps, "sigma": sigma,
                    "n": n, "beta": beta, "p_hat": rep.p_hat,
                    "ci95": rep.ci95_halfwidth,
                })
                cell += 1
    return rows


def fit_curve(dist: Distribution, epsilons: Sequence[float],
              seed: int = 0) -> list[dict]:
    """ECDF-vs-CDF pairing per deviation level.

    For each epsilon, draws the planned number of samples (from the
    distribution's own standard deviation) and evaluates both curves on a
    512-point grid spanning all but 2e-4 of the mass.
    """
    if len(epsilons) == 0:
        raise ValueError("need at least one epsilon")
    sigma = math.sqrt(dist.variance())
    lo = dist.quantile(1e-4)
    hi = dist.quantile(1.0 - 1e-4)
    grid = np.linspace(lo, hi, FIT_GRID_POINTS)
    ref = np.asarray(dist.cdf(grid), dtype=float)
    out = []
    for i, eps in enumerate(epsilons):
        n = required_samples(eps, sigma)
        emp = ecdf(dist.sample(seed, n, stream=i))
        emp_vals = emp(grid)
        gap = np.abs(emp_vals - ref)
        out.append({
            "epsilon": float(eps), "n": n, "x": grid,
            "ecdf": emp_vals, "cdf": ref, "abs_gap": gap,
            "sup_gap": float(gap.max()),
        })
    return out
