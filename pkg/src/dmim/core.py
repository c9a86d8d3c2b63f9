"""Engines for the differential message importance measure of a density f:

    l(f) = integral of f(x) * exp(-f(x)) over the support,

a quantity that always lies in [0, 1]. Expanding exp(-f) gives the equivalent
alternating series

    l(f) = 1 + sum_{n>=1} (-1)^n / n! * integral of f^(n+1),

whose building block, the power integral of f, has closed forms for the
uniform, normal, exponential, gamma, beta and Laplace families. The series is
also expressible through Renyi entropies h_a: each power integral equals
exp(-n * h_{n+1}).

Both routes are provided next to direct adaptive quadrature so they can check
one another. If every power integral with index >= m is bounded by some
epsilon, truncating the series after m - 1 terms costs at most e * epsilon;
the tail is monotone (so epsilon = the m-th power integral) exactly when
sup f <= 1, since then f^(n+2) <= f^(n+1) pointwise. A density with sup f > 1
has power integrals growing without bound and no such certificate.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import betaln, gammaln

from . import quadrature
from .distributions import (
    Beta, Custom, Distribution, Exponential, Gamma, Interval, Laplace,
    Nakagami, Normal, Uniform,
)
from .errors import (
    DivergentIntegralError, NoClosedFormError, NonConvergenceError,
    UnboundedTailError,
)

__all__ = [
    "DmimEstimate", "SeriesConfig", "QuadratureConfig",
    "power_integral", "density_sup", "dmim_series", "dmim_quadrature",
    "dmim_closed_form", "dmim_auto", "renyi_entropy", "dmim_via_renyi",
    "remainder_bound", "quantized_mim_sum",
]

# partial-sum cancellation beyond this multiple of the result marks the
# estimate unreliable in double precision
CANCELLATION_LIMIT = 1e6

_EPS = np.finfo(float).eps


@dataclass
class SeriesConfig:
    max_terms: int = 200
    rel_tol: float = 1e-14

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")


@dataclass
class QuadratureConfig:
    abs_tol: float = 1e-10
    tail_mass: float = 1e-12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.tail_mass > 0):
            raise ValueError("abs_tol and tail_mass must be > 0")


_METHODS = ("quadrature", "series", "closed_form", "renyi_series")


@dataclass
class DmimEstimate:
    value: float
    method: str
    abs_error_bound: float
    terms_used: Optional[int] = None
    unreliable: bool = False

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"value {self.value} outside [0, 1]")
        if not self.abs_error_bound >= 0.0:
            raise ValueError("abs_error_bound must be >= 0")

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "abs_error_bound": self.abs_error_bound,
            "terms_used": self.terms_used,
            "unreliable": self.unreliable,
        }


def _log_power_integral(dist: Distribution, p: float) -> float:
    """log of the integral of f^p over the support, closed forms only.

    Raises DivergentIntegralError when the integral does not exist and
    NoClosedFormError for families without one.
    """
    if isinstance(dist, Uniform):
        return (1.0 - p) * math.log(dist.b - dist.a)
    if isinstance(dist, Normal):
        return -0.5 * math.log(p) + 0.5 * (1.0 - p) * math.log(
            2.0 * math.pi * dist.sigma ** 2)
    if isinstance(dist, Exponential):
        return (p - 1.0) * math.log(dist.lam) - math.log(p)
    if isinstance(dist, Laplace):
        return (p - 1.0) * math.log(dist.lam / 2.0) - math.log(p)
    if isinstance(dist, Gamma):
        s = (dist.alpha - 1.0) * p + 1.0
        if s <= 0.0:
            raise DivergentIntegralError(
                f"gamma power integral diverges: (alpha-1)*p + 1 = {s:.6g} <= 0 "
                f"for alpha={dist.alpha}, p={p}")
        return ((p - 1.0) * math.log(dist.lam) + gammaln(s)
                - s * math.log(p) - p * gammaln(dist.alpha))
    if isinstance(dist, Beta):
        sa = (dist.a - 1.0) * p + 1.0
        sb = (dist.b - 1.0) * p + 1.0
        if sa <= 0.0 or sb <= 0.0:
            raise DivergentIntegralError(
                f"beta power integral diverges for a={dist.a}, b={dist.b}, p={p}")
        return betaln(sa, sb) - p * betaln(dist.a, dist.b)
    raise NoClosedFormError(
        f"no closed-form power integral for {type(dist).__name__}")


def power_integral(dist: Distribution, n: int) -> float:
    """Integral of f^(n+1) over the support, by the family's closed form."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.exp(_log_power_integral(dist, n + 1.0))


def _numeric_power_integral(dist: Distribution, p: float) -> float:
    """Integral of f^p by quadrature with expanding truncation."""
    def fp(xs):
        f = np.asarray(dist.pdf(xs), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.where(f > 0.0, f ** p, 0.0)
        return np.where(np.isfinite(out), out, 0.0)

    sup = dist.support
    a = sup.lo if math.isfinite(sup.lo) else -1.0
    b = sup.hi if math.isfinite(sup.hi) else 1.0
    if a >= b:
        a, b = b - 2.0, b
    total = quadrature.integrate(fp, np.linspace(a, b, 33), abs_tol=1e-11)
    for _ in range(64):
        grew = 0.0
        if not math.isfinite(sup.lo):
            a2 = a - max(2.0 * (b - a), 1.0)
            grew += quadrature.integrate(fp, np.linspace(a2, a, 17), abs_tol=1e-11)
            a = a2
        if not math.isfinite(sup.hi):
            b2 = b + max(2.0 * (b - a), 1.0)
            grew += quadrature.integrate(fp, np.linspace(b, b2, 17), abs_tol=1e-11)
            b = b2
        total += grew
        if grew <= 1e-13 * max(total, 1.0) or (math.isfinite(sup.lo) and math.isfinite(sup.hi)):
            return total
    raise DivergentIntegralError(
        f"integral of f^{p} did not settle under expanding truncation")


def density_sup(dist: Distribution) -> float:
    """Supremum of the density (exact, per family); inf when unbounded."""
    if isinstance(dist, Uniform):
        return 1.0 / (dist.b - dist.a)
    if isinstance(dist, Normal):
        return 1.0 / (math.sqrt(2.0 * math.pi) * dist.sigma)
    if isinstance(dist, Exponential):
        return dist.lam
    if isinstance(dist, Laplace):
        return dist.lam / 2.0
    if isinstance(dist, Gamma):
        if dist.alpha < 1.0:
            return math.inf
        if dist.alpha == 1.0:
            return dist.lam
        am1 = dist.alpha - 1.0
        return math.exp(math.log(dist.lam) + am1 * math.log(am1) - am1
                        - gammaln(dist.alpha))
    if isinstance(dist, Beta):
        a, b = dist.a, dist.b
        if a < 1.0 or b < 1.0:
            return math.inf
        if a == 1.0 and b == 1.0:
            return 1.0
        if a == 1.0:
            return b
        if b == 1.0:
            return a
        mode = (a - 1.0) / (a + b - 2.0)
        return math.exp((a - 1.0) * math.log(mode) + (b - 1.0) * math.log1p(-mode)
                        - betaln(a, b))
    if isinstance(dist, Nakagami):
        m, om = dist.m, dist.omega
        if m == 0.5:
            return math.sqrt(2.0 / (math.pi * om))
        xsq = om * (2.0 * m - 1.0) / (2.0 * m)  # mode squared
        return math.exp(math.log(2.0) + m * math.log(m)
                        + 0.5 * (2.0 * m - 1.0) * math.log(xsq)
                        - m * xsq / om - gammaln(m) - m * math.log(om))
    raise UnboundedTailError(
        f"density supremum not certifiable for {type(dist).__name__}")


def _tail_monotone(dist: Distribution) -> bool:
    try:
        return density_sup(dist) <= 1.0
    except UnboundedTailError:
        return False


def _alternating_sum(log_abs_term, cfg: SeriesConfig):
    """1 + sum of signed terms with Neumaier compensation.

    log_abs_term(n) gives log|term_n| for n >= 1 (sign is (-1)^n). Returns
    (value, terms_used, last_abs, sum_abs, converged).
    """
    total = 1.0
    comp = 0.0
    sum_abs = 1.0
    prev_abs = None
    growing = False
    abs_t = 0.0
    for n in range(1, cfg.max_terms + 1):
        la = log_abs_term(n)
        abs_t = math.exp(la) if la < 709.0 else math.inf
        if not math.isfinite(abs_t):
            raise NonConvergenceError(
                f"series term {n} overflows double precision; "
                "use the quadrature engine for this spec")
        t = -abs_t if n % 2 else abs_t
        new = total + t
        if abs(total) >= abs(t):
            comp += (total - new) + t
        else:
            comp += (t - new) + total
        total = new
        sum_abs += abs_t
        partial = total + comp
        if prev_abs is not None and abs_t <= prev_abs and abs_t <= cfg.rel_tol * abs(partial):
            return partial, n, abs_t, sum_abs, True
        growing = prev_abs is not None and abs_t > prev_abs
        prev_abs = abs_t
    if growing:
        raise NonConvergenceError(
            f"series terms still growing after {cfg.max_terms} terms")
    return total + comp, cfg.max_terms, abs_t, sum_abs, False


def _series_estimate(dist, log_abs_term, cfg: SeriesConfig, method: str) -> DmimEstimate:
    value, used, last_abs, sum_abs, _ = _alternating_sum(log_abs_term, cfg)
    if _tail_monotone(dist):
        # terms beyond `used` cost at most e * (next power integral)
        bound = math.e * power_integral(dist, used + 1)
    else:
        bound = last_abs
    bound = max(bound, 4.0 * _EPS * sum_abs)  # float cancellation floor
    unreliable = sum_abs > CANCELLATION_LIMIT * max(abs(value), 1e-300)
    if unreliable:
        warnings.warn(
            f"series cancellation {sum_abs / max(abs(value), 1e-300):.2e} "
            "exceeds 1e6; estimate unreliable in double precision",
            RuntimeWarning, stacklevel=3)
    return DmimEstimate(
        value=min(1.0, max(0.0, value)),
        method=method,
        abs_error_bound=bound,
        terms_used=used,
        unreliable=unreliable,
    )


def dmim_series(dist: Distribution, cfg: SeriesConfig | None = None) -> DmimEstimate:
    """Sum the alternating power-integral series for l(f)."""
    cfg = cfg or SeriesConfig()

    def log_abs_term(n):
        return _log_power_integral(dist, n + 1.0) - gammaln(n + 1.0)

    return _series_estimate(dist, log_abs_term, cfg, "series")


def renyi_entropy(dist: Distribution, order: float) -> float:
    """Renyi entropy: log of the integral of f^order, over (1 - order)."""
    if not (order > 0.0 and order != 1.0):
        raise ValueError("order must be positive and != 1")
    try:
        log_i = _log_power_integral(dist, order)
    except NoClosedFormError:
        val = _numeric_power_integral(dist, order)
        if not val > 0.0:
            raise DivergentIntegralError("numeric power integral is not positive")
        log_i = math.log(val)
    return log_i / (1.0 - order)


def dmim_via_renyi(dist: Distribution, cfg: SeriesConfig | None = None) -> DmimEstimate:
    """Same series as dmim_series, with each term routed through h_{n+1}."""
    cfg = cfg or SeriesConfig()

    def log_abs_term(n):
        h = renyi_entropy(dist, n + 1.0)
        return -n * h - gammaln(n + 1.0)

    return _series_estimate(dist, log_abs_term, cfg, "renyi_series")


def _truncated_span(dist: Distribution, tail_mass: float) -> tuple[float, float]:
    """Finite [lo, hi] discarding at most tail_mass of probability."""
    if isinstance(dist, Custom):
        return dist._finite_span(tail_mass)
    sup = dist.support
    lo_inf = not math.isfinite(sup.lo)
    hi_inf = not math.isfinite(sup.hi)
    if lo_inf and hi_inf:
        return dist.quantile(tail_mass / 2.0), dist.quantile(1.0 - tail_mass / 2.0)
    if hi_inf:
        return sup.lo, dist.quantile(1.0 - tail_mass)
    if lo_inf:
        return dist.quantile(tail_mass), sup.hi
    return sup.lo, sup.hi


def _importance_integrand(dist: Distribution):
    def g(xs):
        f = np.asarray(dist.pdf(xs), dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            out = f * np.exp(-f)
        return np.where(np.isfinite(out), out, 0.0)  # f -> inf means f e^-f -> 0
    return g


def _panel_points(dist: Distribution, lo: float, hi: float) -> np.ndarray:
    """Initial panel edges: a uniform grid plus known non-smooth points.

    A kink that falls strictly inside a panel, between the edge and the first
    quadrature node, is invisible to the embedded error estimate; pinning it
    to a panel edge removes the blind spot.
    """
    pts = np.linspace(lo, hi, 65)
    if isinstance(dist, Laplace) and lo < dist.theta < hi:
        pts = np.unique(np.concatenate([pts, [dist.theta]]))
    return pts


def dmim_quadrature(dist: Distribution, cfg: QuadratureConfig | None = None) -> DmimEstimate:
    """Adaptive quadrature of f * exp(-f); infinite tails truncated by mass.

    Discarding tail probability below tail_mass is sound because the
    integrand is dominated by f itself.
    """
    cfg = cfg or QuadratureConfig()
    if isinstance(dist, Custom):
        dist._ensure_normalized()
    lo, hi = _truncated_span(dist, cfg.tail_mass)
    pts = _panel_points(dist, lo, hi)
    value = quadrature.integrate(_importance_integrand(dist), pts,
                                 abs_tol=cfg.abs_tol)
    return DmimEstimate(
        value=min(1.0, max(0.0, value)),
        method="quadrature",
        abs_error_bound=cfg.abs_tol + cfg.tail_mass,
    )


def dmim_closed_form(dist: Distribution) -> DmimEstimate:
    """Exact l(f) for the three families that admit one."""
    if isinstance(dist, Uniform):
        value = math.exp(-1.0 / (dist.b - dist.a))
    elif isinstance(dist, Exponential):
        value = -math.expm1(-dist.lam) / dist.lam
    elif isinstance(dist, Laplace):
        value = -2.0 * math.expm1(-dist.lam / 2.0) / dist.lam
    else:
        raise NoClosedFormError(
            f"no closed-form importance value for {type(dist).__name__}")
    return DmimEstimate(value=value, method="closed_form", abs_error_bound=0.0)


def remainder_bound(dist: Distribution, m: int) -> float:
    """e times the supremum of power integrals with index >= m.

    Valid (and equal to e * power_integral(dist, m)) exactly when sup f <= 1,
    which makes the power integrals monotone nonincreasing in the index.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    try:
        sup = density_sup(dist)
    except UnboundedTailError:
        raise UnboundedTailError(
            f"monotone power-integral tail not certifiable for "
            f"{type(dist).__name__}")
    if not sup <= 1.0:
        raise UnboundedTailError(
            f"density supremum {sup:.6g} > 1: power integrals grow without "
            "bound, no finite tail envelope exists")
    try:
        return math.e * power_integral(dist, m)
    except NoClosedFormError:
        return math.e * _numeric_power_integral(dist, m + 1.0)


def quantized_mim_sum(dist: Distribution, delta: float, span: Interval | tuple) -> float:
    """Midpoint Riemann sum of f * exp(-f) over bins of width delta.

    This is the quantized form of the importance measure; it converges to the
    integral as delta -> 0. The span must carry all but <= 1e-9 of the mass
    (checked when the family has a cdf).
    """
    if not delta > 0:
        raise ValueError("delta must be > 0")
    lo, hi = (span.lo, span.hi) if isinstance(span, Interval) else (float(span[0]), float(span[1]))
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError("span must be a finite interval")
    try:
        covered = float(dist.cdf(hi)) - float(dist.cdf(lo))
    except Exception:
        covered = None
    if covered is not None and covered < 1.0 - 1e-9:
        raise ValueError(f"span covers only {covered:.12f} of the mass")
    k = int(math.ceil((hi - lo) / delta))
    mids = lo + (np.arange(k) + 0.5) * delta
    mids = mids[mids < hi]
    g = _importance_integrand(dist)(mids)
    return float(np.sum(g) * delta)


def dmim_auto(dist: Distribution,
              series_cfg: SeriesConfig | None = None,
              quad_cfg: QuadratureConfig | None = None):
    """Pick an engine: closed form, else certified series, else quadrature.

    For normals with sigma <= 0.2 the small-sigma truncated-series
    approximation is returned instead (as a NormalApprox); the raw series is
    numerically hostile there and quadrature reports no structure.
    """
    from .normal_asym import l_hat  # local import to avoid a cycle

    try:
        return dmim_closed_form(dist)
    except NoClosedFormError:
        pass
    if isinstance(dist, Normal) and dist.sigma <= 0.2:
        return l_hat(dist.sigma)
    if _tail_monotone(dist):
        try:
            return dmim_series(dist, series_cfg)
        except (NoClosedFormError, DivergentIntegralError, NonConvergenceError):
            pass
    return dmim_quadrature(dist, quad_cfg)
