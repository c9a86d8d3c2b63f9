"""Asymptotic approximations for the importance measure of a normal density.

Large sigma: the series truncated after its linear term gives
1 - 1/(2*sqrt(pi)*sigma), with exp of the same exponent as a smoother variant;
both carry the truncation envelope (e-2)/(2*sqrt(3)*pi*sigma^2), which is the
e*epsilon bound specialized to m = 2.

Small sigma: the alternating series is dominated by terms up to
n0 = floor(e / (sqrt(2*pi)*sigma)); keeping exactly those terms leaves an
error below 3*sigma/e. The partial sums suffer catastrophic cancellation in
double precision (sum of |terms| grows like exp(1/(sqrt(2*pi)*sigma))), so the
summation runs at a working precision sized to that growth and only the final
value is rounded back to float.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import mpmath as mp

__all__ = ["NormalApprox", "n_zero", "l_tilde1", "l_tilde2", "l_hat"]

_MAX_HAT_TERMS = 5000


@dataclass
class NormalApprox:
    value: float
    kind: str  # tilde1 | tilde2 | hat
    error_bound: float
    n0: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("tilde1", "tilde2", "hat"):
            raise ValueError("kind must be tilde1, tilde2 or hat")
        if not self.error_bound >= 0.0:
            raise ValueError("error_bound must be >= 0")

    def to_json(self) -> dict:
        return {"value": self.value, "kind": self.kind,
                "error_bound": self.error_bound, "n0": self.n0}


def _check_sigma(sigma: float) -> None:
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")


def _tilde_bound(sigma: float) -> float:
    return (math.e - 2.0) / (2.0 * math.sqrt(3.0) * math.pi * sigma ** 2)


def n_zero(sigma: float) -> int:
    """Number of series terms kept by the small-sigma approximation."""
    _check_sigma(sigma)
    return int(math.floor(math.e / (math.sqrt(2.0 * math.pi) * sigma)))


def l_tilde1(sigma: float) -> NormalApprox:
    """Linear large-sigma approximation 1 - 1/(2*sqrt(pi)*sigma)."""
    _check_sigma(sigma)
    return NormalApprox(
        value=1.0 - 1.0 / (2.0 * math.sqrt(math.pi) * sigma),
        kind="tilde1",
        error_bound=_tilde_bound(sigma),
    )


def l_tilde2(sigma: float) -> NormalApprox:
    """Exponential large-sigma approximation exp(-1/(2*sqrt(pi)*sigma))."""
    _check_sigma(sigma)
    x = 1.0 / (2.0 * math.sqrt(math.pi) * sigma)
    return NormalApprox(
        value=math.exp(-x),
        kind="tilde2",
        error_bound=_tilde_bound(sigma) + abs(math.exp(-x) - (1.0 - x)),
    )


def l_hat(sigma: float, n_terms: Optional[int] = None) -> NormalApprox:
    """Small-sigma approximation: the series truncated at n0 terms.

    n_terms overrides the truncation point (used to trace how the error
    settles once the kept terms pass n0); the reported 3*sigma/e bound applies
    to the default truncation.
    """
    _check_sigma(sigma)
    n0 = n_zero(sigma)
    terms = n0 if n_terms is None else int(n_terms)
    if terms < 0:
        raise ValueError("n_terms must be >= 0")
    if terms > _MAX_HAT_TERMS:
        raise ValueError(
            f"{terms} terms requested; beyond {_MAX_HAT_TERMS} the summation "
            "cost is no longer sensible (sigma too small)")
    if sigma > 0.2:
        warnings.warn(
            f"small-sigma approximation called with sigma={sigma} > 0.2; "
            "its error bound is vacuous there", RuntimeWarning, stacklevel=2)
    # working precision sized to the cancellation: sum|terms| ~ exp(c),
    # c = 1/(sqrt(2*pi)*sigma); log10 of that is c * log10(e) ~ 0.4343 c
    c = 1.0 / (math.sqrt(2.0 * math.pi) * sigma)
    dps = 30 + int(0.45 * c)
    with mp.workdps(dps):
        cc = 1 / mp.sqrt(2 * mp.pi * mp.mpf(str(sigma)) ** 2)
        total = mp.mpf(1)
        for n in range(1, terms + 1):
            total += (-1) ** n * cc ** n / (mp.factorial(n) * mp.sqrt(n + 1))
        value = float(total)
    return NormalApprox(
        value=value,
        kind="hat",
        error_bound=3.0 * sigma / math.e,
        n0=n0,
    )
