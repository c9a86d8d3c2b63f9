"""Distribution-free sample-size planning with Kolmogorov-Smirnov guarantees.

The importance ratio of n samples against its limit gives a single planning
knob, the deviation epsilon. Requiring the ratio to sit within epsilon of the
limit forces

    n >= 1 / (4*pi*sigma^2 * ln^2(1 - epsilon)),

independent of the distribution's shape (only the variance enters). At that n,
the KS statistic threshold

    d = sqrt(2*pi*sigma^2 * ln(19/(9*beta))) * ln(1/(1-epsilon))

is exceeded with probability at most beta; d, beta and epsilon are coupled
pairwise by closed forms, so fixing any two determines the third. The beta
guarantee rests on the asymptotic KS tail sum and its geometric-series upper
bound 2*exp(-2*n*d^2) / (1 - exp(-8*n*d^2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Plan", "GammaCurve", "gamma_ratio", "gamma_limit", "required_samples",
    "d_from", "beta_from", "epsilon_from", "ks_tail_series",
    "ks_tail_upper_bound", "make_plan", "BETA_SUP",
]

# beta must stay below 19/9 for ln(19/(9*beta)) to be positive
BETA_SUP = 19.0 / 9.0

_ROUNDINGS = ("ceil", "paper_floor")


@dataclass
class GammaCurve:
    """Inputs of the importance-ratio curve: scale sigma and the limit 1/l."""
    sigma: float
    l_of_x: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if not 0.0 < self.l_of_x <= 1.0:
            raise ValueError("l_of_x must lie in (0, 1]")


@dataclass
class Plan:
    epsilon: float
    sigma: float
    n: int
    rounding: str
    d: float
    beta: float

    def __post_init__(self):
        if self.rounding not in _ROUNDINGS:
            raise ValueError(f"rounding must be one of {_ROUNDINGS}")
        floor_n = 1.0 / (4.0 * math.pi * self.sigma ** 2
                         * math.log(1.0 - self.epsilon) ** 2) - 1.0
        if not self.n >= floor_n:
            raise ValueError(f"n={self.n} below the sample-size floor {floor_n:.3f}")
        d_check = d_from(self.epsilon, self.beta, self.sigma)
        if abs(d_check - self.d) > 1e-9 * max(abs(self.d), 1.0):
            raise ValueError("(d, beta, epsilon, sigma) violate the ternary relation")

    @property
    def vacuous(self) -> bool:
        """True when beta > 1: a probability bound above 1 says nothing."""
        return self.beta > 1.0

    def to_json(self) -> dict:
        return {"epsilon": self.epsilon, "sigma": self.sigma, "n": self.n,
                "rounding": self.rounding, "d": self.d, "beta": self.beta,
                "vacuous": self.vacuous}


def gamma_ratio(curve: GammaCurve, n: int) -> float:
    """Importance ratio of n samples: exp(-1/(2*sqrt(pi*n)*sigma)) / l.

    Uses the normal limit of the summed samples; treat values for n < 30 as
    indicative only (soft floor, no error).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.exp(-1.0 / (2.0 * math.sqrt(math.pi * n) * curve.sigma)) / curve.l_of_x


def gamma_limit(curve: GammaCurve) -> float:
    """Limit of the importance ratio as n grows: 1 / l."""
    return 1.0 / curve.l_of_x


def required_samples(epsilon: float, sigma: float, rounding: str = "ceil",
                     l_of_x: float | None = None) -> int:
    """Samples needed to hold the importance-ratio deviation within epsilon.

    Default is the distribution-free bound; passing the density's importance
    value l tightens ln(1-epsilon) to ln(1-epsilon*l). "ceil" preserves the
    >= guarantee; "paper_floor" reproduces floor-rounded reference tables.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    if rounding not in _ROUNDINGS:
        raise ValueError(f"rounding must be one of {_ROUNDINGS}")
    if l_of_x is None:
        arg = 1.0 - epsilon
    else:
        if not 0.0 < l_of_x <= 1.0:
            raise ValueError("l_of_x must lie in (0, 1]")
        arg = 1.0 - epsilon * l_of_x
    raw = 1.0 / (4.0 * math.pi * sigma ** 2 * math.log(arg) ** 2)
    n = math.floor(raw) if rounding == "paper_floor" else math.ceil(raw)
    return max(int(n), 1)


def d_from(epsilon: float, beta: float, sigma: float) -> float:
    """KS threshold exceeded with probability <= beta under the plan."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if not 0.0 < beta < BETA_SUP:
        raise ValueError(f"beta must be in (0, 19/9), got {beta}")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return (math.sqrt(2.0 * math.pi * sigma ** 2 * math.log(BETA_SUP / beta))
            * math.log(1.0 / (1.0 - epsilon)))


def beta_from(d: float, epsilon: float, sigma: float) -> float:
    """Probability bound for exceeding threshold d at deviation epsilon."""
    if not d > 0:
        raise ValueError("d must be > 0")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return BETA_SUP * math.exp(
        -d ** 2 / (2.0 * math.pi * sigma ** 2 * math.log(1.0 - epsilon) ** 2))


def epsilon_from(d: float, beta: float, sigma: float) -> float:
    """Deviation at which threshold d carries probability bound beta."""
    if not d > 0:
        raise ValueError("d must be > 0")
    if not 0.0 < beta < BETA_SUP:
        raise ValueError(f"beta must be in (0, 19/9), got {beta}")
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return -math.expm1(
        -d / math.sqrt(2.0 * math.pi * sigma ** 2 * math.log(BETA_SUP / beta)))


def ks_tail_series(n: int, d: float, k_max: int = 1000) -> float:
    """Asymptotic P{D_n > d}: 2 * sum (-1)^(k-1) exp(-2 n k^2 d^2), clipped.

    Terms are added until they drop below 1e-16 or k_max is reached. The raw
    asymptotic sum exceeds 1 for tiny 2*n*d^2; values are clipped to [0, 1].
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not d > 0:
        raise ValueError("d must be > 0")
    acc = 0.0
    for k in range(1, k_max + 1):
        term = math.exp(-2.0 * n * k * k * d * d)
        acc += term if k % 2 else -term
        if term < 1e-16:
            break
    return min(1.0, max(0.0, 2.0 * acc))


def ks_tail_upper_bound(n: int, d: float) -> float:
    """Geometric-series upper bound 2 e^(-2nd^2) / (1 - e^(-8nd^2))."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not d > 0:
        raise ValueError("d must be > 0")
    t = 2.0 * n * d * d
    return 2.0 * math.exp(-t) / -math.expm1(-4.0 * t)


def make_plan(epsilon: float, sigma: float, beta: float,
              rounding: str = "ceil") -> Plan:
    """Bundle n and the KS threshold for a (epsilon, sigma, beta) request."""
    n = required_samples(epsilon, sigma, rounding)
    d = d_from(epsilon, beta, sigma)
    return Plan(epsilon=epsilon, sigma=sigma, n=n, rounding=rounding,
                d=d, beta=beta)
