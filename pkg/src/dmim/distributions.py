"""Distribution families: pdf, cdf, quantile, variance, and seeded sampling.

Families cover the common continuous densities plus Nakagami-m (fading-channel
fits) and user-supplied custom densities. Sampling is exact and dependency
free: inverse-CDF transforms where the inverse is closed-form, the polar
method for normals, the Marsaglia-Tsang squeeze for gammas (shape < 1 boosted
through shape + 1), beta as a two-gamma ratio, and Nakagami as the square root
of a gamma draw. Every draw sequence is a pure function of (seed, stream); see
rng.make_stream.

Specs serialize to {"family": <name>, "params": {...}}; field names are the
constructor arguments, with "lambda" used on the wire for rate parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from . import quadrature
from .errors import MissingVarianceError, UnsupportedOperationError
from .rng import make_stream

__all__ = [
    "Interval", "Distribution", "Uniform", "Normal", "Exponential",
    "Gamma", "Beta", "Laplace", "Nakagami", "Custom", "from_json",
]


@dataclass(frozen=True)
class Interval:
    """Support interval; either end may be infinite."""
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")


def _split(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _join(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def _polar_normal(gen: np.random.Generator, n: int) -> np.ndarray:
    """n standard normal draws by the polar (Marsaglia) rejection method."""
    out = np.empty(n)
    filled = 0
    while filled < n:
        pairs = (n - filled + 1) // 2
        batch = int(pairs * 1.35) + 16  # acceptance rate is pi/4
        u = 2.0 * gen.random(batch) - 1.0
        v = 2.0 * gen.random(batch) - 1.0
        s = u * u + v * v
        ok = (s > 0.0) & (s < 1.0)
        u, v, s = u[ok], v[ok], s[ok]
        f = np.sqrt(-2.0 * np.log(s) / s)
        z = np.concatenate([u * f, v * f])
        take = min(z.size, n - filled)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


def _gamma_mt(gen: np.random.Generator, alpha: float, n: int) -> np.ndarray:
    """n unit-scale Gamma(alpha) draws, Marsaglia-Tsang squeeze method."""
    if alpha < 1.0:
        # boost: Gamma(a) = Gamma(a+1) * U^(1/a)
        y = _gamma_mt(gen, alpha + 1.0, n)
        u = gen.random(n)
        return y * u ** (1.0 / alpha)
    d = alpha - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(n)
    filled = 0
    while filled < n:
        batch = int((n - filled) * 1.1) + 16
        x = _polar_normal(gen, batch)
        v = (1.0 + c * x) ** 3
        u = gen.random(batch)
        with np.errstate(invalid="ignore", divide="ignore"):
            pos = v > 0.0
            x2 = x * x
            squeeze = pos & (u < 1.0 - 0.0331 * x2 * x2)
            logv = np.where(pos, np.log(np.where(pos, v, 1.0)), -np.inf)
            full = pos & (np.log(u) < 0.5 * x2 + d * (1.0 - v + logv))
        z = d * v[squeeze | full]
        take = min(z.size, n - filled)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


class Distribution:
    """Base interface; subclasses are immutable parameter records."""

    family: str = "?"

    @property
    def support(self) -> Interval:
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        """n i.i.d. draws; bit-reproducible given (seed, n, stream)."""
        raise NotImplementedError

    def _params(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> dict:
        return {"family": self.family, "params": self._params()}

    def __repr__(self):
        ps = ", ".join(f"{k}={v}" for k, v in self._params().items())
        return f"{type(self).__name__}({ps})"


@dataclass(frozen=True, repr=False)
class Uniform(Distribution):
    a: float
    b: float
    family = "uniform"

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError(f"uniform needs b > a, got a={self.a}, b={self.b}")

    @property
    def support(self) -> Interval:
        return Interval(self.a, self.b)

    def pdf(self, x):
        x, sc = _split(x)
        inside = (x >= self.a) & (x <= self.b)
        return _join(np.where(inside, 1.0 / (self.b - self.a), 0.0), sc)

    def cdf(self, x):
        x, sc = _split(x)
        return _join(np.clip((x - self.a) / (self.b - self.a), 0.0, 1.0), sc)

    def quantile(self, p):
        p, sc = _split(p)
        return _join(self.a + p * (self.b - self.a), sc)

    def variance(self) -> float:
        return (self.b - self.a) ** 2 / 12.0

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        gen = make_stream(seed, stream)
        return self.a + (self.b - self.a) * gen.random(n)

    def _params(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True, repr=False)
class Normal(Distribution):
    mu: float
    sigma: float
    family = "normal"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"normal needs sigma > 0, got {self.sigma}")

    @property
    def support(self) -> Interval:
        return Interval(-math.inf, math.inf)

    def pdf(self, x):
        x, sc = _split(x)
        z = (x - self.mu) / self.sigma
        val = np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2.0 * math.pi))
        return _join(val, sc)

    def cdf(self, x):
        x, sc = _split(x)
        z = (x - self.mu) / (self.sigma * math.sqrt(2.0))
        return _join(0.5 * (1.0 + special.erf(z)), sc)

    def quantile(self, p):
        p, sc = _split(p)
        return _join(self.mu + self.sigma * special.ndtri(p), sc)

    def variance(self) -> float:
        return self.sigma ** 2

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        gen = make_stream(seed, stream)
        return self.mu + self.sigma * _polar_normal(gen, n)

    def _params(self) -> dict:
        return {"mu": self.mu, "sigma": self.sigma}


@dataclass(frozen=True, repr=False)
class Exponential(Distribution):
    lam: float
    family = "exponential"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"exponential needs lambda > 0, got {self.lam}")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    def pdf(self, x):
        x, sc = _split(x)
        with np.errstate(over="ignore"):
            val = np.where(x >= 0.0, self.lam * np.exp(-self.lam * np.maximum(x, 0.0)), 0.0)
        return _join(val, sc)

    def cdf(self, x):
        x, sc = _split(x)
        val = np.where(x >= 0.0, -np.expm1(-self.lam * np.maximum(x, 0.0)), 0.0)
        return _join(val, sc)

    def quantile(self, p):
        p, sc = _split(p)
        return _join(-np.log1p(-p) / self.lam, sc)

    def variance(self) -> float:
        return 1.0 / self.lam ** 2

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        gen = make_stream(seed, stream)
        return -np.log1p(-gen.random(n)) / self.lam

    def _params(self) -> dict:
        return {"lambda": self.lam}


@dataclass(frozen=True, repr=False)
class Gamma(Distribution):
    alpha: float
    lam: float
    family = "gamma"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"gamma needs alpha > 0, got {self.alpha}")
        if not self.lam > 0:
            raise ValueError(f"gamma needs lambda > 0, got {self.lam}")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    def pdf(self, x):
        x, sc = _split(x)
        pos = x > 0.0
        xs = np.where(pos, x, 1.0)
        with np.errstate(over="ignore"):
            logp = ((self.alpha - 1.0) * np.log(self.lam * xs)
                    - self.lam * xs + math.log(self.lam) - special.gammaln(self.alpha))
            val = np.where(pos, np.exp(logp), 0.0)
        if self.alpha < 1.0:
            val = np.where(x == 0.0, np.inf, val)
        elif self.alpha == 1.0:
            val = np.where(x == 0.0, self.lam, val)
        return _join(val, sc)

    def cdf(self, x):
        x, sc = _split(x)
        val = special.gammainc(self.alpha, self.lam * np.maximum(x, 0.0))
        return _join(np.where(x > 0.0, val, 0.0), sc)

    def quantile(self, p):
        p, sc = _split(p)
        return _join(special.gammaincinv(self.alpha, p) / self.lam, sc)

    def variance(self) -> float:
        return self.alpha / self.lam ** 2

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        gen = make_stream(seed, stream)
        return _gamma_mt(gen, self.alpha, n) / self.lam

    def _params(self) -> dict:
        return {"alpha": self.alpha, "lambda": self.lam}


@dataclass(frozen=True, repr=False)
class Beta(Distribution):
    a: float
    b: float
    family = "beta"

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"beta needs a, b > 0, got a={self.a}, b={self.b}")

    @property
    def support(self) -> Interval:
        return Interval(0.0, 1.0)

    def pdf(self, x):
        x, sc = _split(x)
        inside = (x > 0.0) & (x < 1.0)
        xs = np.where(inside, x, 0.5)
        with np.errstate(over="ignore"):
            logp = ((self.a - 1.0) * np.log(xs) + (self.b - 1.0) * np.log1p(-xs)
                    - special.betaln(self.a, self.b))
            val = np.where(inside, np.exp(logp), 0.0)
        # boundary values by the exponents' limits
        val = np.where((x == 0.0) & (self.a < 1.0), np.inf, val)
        val = np.where((x == 1.0) & (self.b < 1.0), np.inf, val)
        val = np.where((x == 0.0) & (self.a == 1.0), self.b, val)
        val = np.where((x == 1.0) & (self.b == 1.0), self.a, val)
        return _join(val, sc)

    def cdf(self, x):
        x, sc = _split(x)
        val = special.betainc(self.a, self.b, np.clip(x, 0.0, 1.0))
        return _join(val, sc)

    def quantile(self, p):
        p, sc = _split(p)
        return _join(special.betaincinv(self.a, self.b, p), sc)

    def variance(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        gen = make_stream(seed, stream)
        x = _gamma_mt(gen, self.a, n)
        y = _gamma_mt(gen, self.b, n)
        return x / (x + y)

    def _params(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True, repr=False)
class Laplace(Distribution):
    theta: float
    lam: float
    family = "laplace"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"laplace needs lambda > 0, got {self.lam}")

    @property
    def support(self) -> Interval:
        return Interval(-math.inf, math.inf)

    def pdf(self, x):
        x, sc = _split(x)
        val = 0.5 * self.lam * np.exp(-self.lam * np.abs(x - self.theta))
        return _join(val, sc)

    def cdf(self, x):
        x, sc = _split(x)
        z = x - self.theta
        val = np.where(z < 0.0, 0.5 * np.exp(self.lam * np.minimum(z, 0.0)),
                       1.0 - 0.5 * np.exp(-self.lam * np.maximum(z, 0.0)))
        return _join(val, sc)

    def quantile(self, p):
        p, sc = _split(p)
        val = np.where(p < 0.5,
                       self.theta + np.log(np.maximum(2.0 * p, 1e-320)) / self.lam,
                       self.theta - np.log1p(-np.minimum(2.0 * p - 1.0, 1.0)) / self.lam)
        return _join(val, sc)

    def variance(self) -> float:
        return 2.0 / self.lam ** 2

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        gen = make_stream(seed, stream)
        return self.quantile(gen.random(n))

    def _params(self) -> dict:
        return {"theta": self.theta, "lambda": self.lam}


@dataclass(frozen=True, repr=False)
class Nakagami(Distribution):
    m: float
    omega: float
    family = "nakagami"

    def __post_init__(self):
        if not self.m >= 0.5:
            raise ValueError(f"nakagami needs m >= 0.5, got {self.m}")
        if not self.omega > 0:
            raise ValueError(f"nakagami needs omega > 0, got {self.omega}")

    @property
    def support(self) -> Interval:
        return Interval(0.0, math.inf)

    def pdf(self, x):
        # f(x) = 2 m^m x^(2m-1) exp(-m x^2 / omega) / (Gamma(m) omega^m), x >= 0
        x, sc = _split(x)
        pos = x > 0.0
        xs = np.where(pos, x, 1.0)
        logp = (math.log(2.0) + self.m * math.log(self.m)
                + (2.0 * self.m - 1.0) * np.log(xs)
                - self.m * xs * xs / self.omega
                - special.gammaln(self.m) - self.m * math.log(self.omega))
        val = np.where(pos, np.exp(logp), 0.0)
        if self.m == 0.5:
            val = np.where(x == 0.0, math.sqrt(2.0 / (math.pi * self.omega)), val)
        return _join(val, sc)

    def cdf(self, x):
        x, sc = _split(x)
        xp = np.maximum(x, 0.0)
        val = special.gammainc(self.m, self.m * xp * xp / self.omega)
        return _join(np.where(x > 0.0, val, 0.0), sc)

    def quantile(self, p):
        p, sc = _split(p)
        return _join(np.sqrt(self.omega * special.gammaincinv(self.m, p) / self.m), sc)

    def variance(self) -> float:
        r = math.exp(special.gammaln(self.m + 0.5) - special.gammaln(self.m))
        return self.omega * (1.0 - r * r / self.m)

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        gen = make_stream(seed, stream)
        return np.sqrt(_gamma_mt(gen, self.m, n) * (self.omega / self.m))

    def _params(self) -> dict:
        return {"m": self.m, "omega": self.omega}


class Custom(Distribution):
    """User-supplied density on a support interval.

    The density handle must map x >= 0 pointwise; it is probed once to see
    whether it accepts numpy arrays and wrapped if not. Normalization
    (integral 1 over the support, tolerance 1e-6) is checked lazily the first
    time an operation needs it. cdf requires a finite lower support end;
    sampling requires an inverse-CDF handle.
    """

    family = "custom"

    def __init__(self,
                 density: Callable,
                 support: Interval,
                 variance: Optional[float] = None,
                 inverse_cdf: Optional[Callable] = None):
        if variance is not None and not variance > 0:
            raise ValueError(f"declared variance must be > 0, got {variance}")
        self._support = support
        self._variance = variance
        self._inverse_cdf = inverse_cdf
        self._density = self._adapt(density)
        self._normalized_checked = False

    @staticmethod
    def _adapt(fn: Callable) -> Callable:
        probe = np.array([0.25, 0.5])
        try:
            out = np.asarray(fn(probe), dtype=float)
            if out.shape == probe.shape:
                return fn
        except Exception:
            pass
        return lambda xs: np.array([float(fn(float(x))) for x in np.atleast_1d(xs)])

    @property
    def support(self) -> Interval:
        return self._support

    def pdf(self, x):
        x, sc = _split(x)
        xs = np.atleast_1d(x)
        inside = (xs >= self._support.lo) & (xs <= self._support.hi)
        val = np.zeros(xs.shape)
        if inside.any():
            val[inside] = np.asarray(self._density(xs[inside]), dtype=float)
        return _join(val.reshape(x.shape) if not sc else val[0], sc)

    def _ensure_normalized(self):
        if self._normalized_checked:
            return
        total = self._mass_between(*self._finite_span(1e-12))
        if abs(total - 1.0) > 1e-6:
            raise ValueError(f"custom density integrates to {total:.8f}, not 1 within 1e-6")
        self._normalized_checked = True

    def _finite_span(self, tail_mass: float) -> tuple[float, float]:
        """Finite [A, B] carrying all but < tail_mass of the density's mass."""
        lo, hi = self._support.lo, self._support.hi
        if math.isfinite(lo) and math.isfinite(hi):
            return lo, hi
        a = lo if math.isfinite(lo) else -1.0
        b = hi if math.isfinite(hi) else 1.0
        if a >= b:
            a, b = b - 2.0, b
        for _ in range(70):
            mass = self._mass_between(a, b)
            if mass >= 1.0 - tail_mass:
                return a, b
            if not math.isfinite(lo):
                a = a * 2.0 if a < 0 else a - (b - a)
            if not math.isfinite(hi):
                b = b * 2.0 if b > 0 else b + (b - a)
        raise UnsupportedOperationError(
            "could not locate a finite interval holding the custom density's mass")

    def _mass_between(self, a: float, b: float) -> float:
        pts = np.linspace(a, b, 33)
        return quadrature.integrate(self.pdf, pts, abs_tol=1e-10)

    def cdf(self, x):
        if not math.isfinite(self._support.lo):
            raise UnsupportedOperationError(
                "cdf of a custom density needs a finite lower support end")
        self._ensure_normalized()
        x, sc = _split(x)
        xs = np.atleast_1d(x)
        out = np.empty(xs.shape)
        for i, xi in enumerate(xs.ravel()):
            if xi <= self._support.lo:
                out.ravel()[i] = 0.0
            elif xi >= self._support.hi:
                out.ravel()[i] = 1.0
            else:
                pts = np.linspace(self._support.lo, xi, 17)
                out.ravel()[i] = min(1.0, quadrature.integrate(self.pdf, pts, abs_tol=1e-10))
        return _join(out[0] if sc else out, sc)

    def quantile(self, p):
        if self._inverse_cdf is None:
            raise UnsupportedOperationError("custom density has no inverse-CDF handle")
        p, sc = _split(p)
        fn = self._adapt(self._inverse_cdf)
        return _join(np.asarray(fn(np.atleast_1d(p)))[0] if sc else np.asarray(fn(p)), sc)

    def variance(self) -> float:
        if self._variance is None:
            raise MissingVarianceError("custom density has no declared variance")
        return self._variance

    def sample(self, seed: int, n: int, stream: int = 0) -> np.ndarray:
        if self._inverse_cdf is None:
            raise UnsupportedOperationError(
                "sampling a custom density needs an inverse-CDF handle")
        gen = make_stream(seed, stream)
        fn = self._adapt(self._inverse_cdf)
        return np.asarray(fn(gen.random(n)), dtype=float)

    def to_json(self) -> dict:
        raise UnsupportedOperationError("custom densities are not JSON-serializable")

    def _params(self) -> dict:
        return {"support": (self._support.lo, self._support.hi)}


_FAMILIES = {
    "uniform": (Uniform, ("a", "b")),
    "normal": (Normal, ("mu", "sigma")),
    "exponential": (Exponential, ("lambda",)),
    "gamma": (Gamma, ("alpha", "lambda")),
    "beta": (Beta, ("a", "b")),
    "laplace": (Laplace, ("theta", "lambda")),
    "nakagami": (Nakagami, ("m", "omega")),
}


def from_json(obj: dict) -> Distribution:
    """Build a distribution from {"family": ..., "params": {...}}."""
    try:
        family = obj["family"]
        params = obj["params"]
    except (TypeError, KeyError) as exc:
        raise ValueError(f"malformed distribution spec: {obj!r}") from exc
    if family not in _FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {sorted(_FAMILIES)}")
    cls, names = _FAMILIES[family]
    if set(params) != set(names):
        raise ValueError(f"{family} expects params {list(names)}, got {sorted(params)}")
    args = [float(params[k]) for k in names]
    return cls(*args)
