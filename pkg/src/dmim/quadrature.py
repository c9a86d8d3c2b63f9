"""Adaptive Gauss-Kronrod quadrature with interval bisection.

Each panel is evaluated with the 7-point Gauss / 15-point Kronrod pair; the
difference between the two estimates serves as the panel error. Panels live in
a max-heap keyed by error, and the worst panel is bisected until the summed
error estimate drops below a safety fraction of the requested absolute
tolerance or the panel budget runs out. |K15 - G7| is an optimistic error
estimate for rough integrands, hence the safety factor; for the smooth,
bounded integrands used here (densities and f*exp(-f) compositions) the
achieved accuracy is typically several orders below the requested tolerance,
which the test suite checks against an independent oracle.

The integrand must accept a numpy array of abscissae and return an array.
"""

from __future__ import annotations

import heapq
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureError

# 15-point Kronrod abscissae/weights and embedded 7-point Gauss weights
# (QUADPACK dqk15 constants).
_XGK = np.array([
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
])
_WGK = np.array([
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592, 0.16900472663926790, 0.19035057806478541,
    0.20443294007529889, 0.20948214108472783,
])
_WG = np.array([
    0.12948496616886969, 0.27970539148927664, 0.38183005050511894,
    0.41795918367346938,
])

# full symmetric node/weight tables on [-1, 1]
_NODES = np.concatenate([-_XGK[:7], _XGK[7:8], _XGK[6::-1]])
_WK = np.concatenate([_WGK[:7], _WGK[7:8], _WGK[6::-1]])
_WGAUSS = np.zeros(15)
_WGAUSS[1:14:2] = np.concatenate([_WG[:3], _WG[3:4], _WG[2::-1]])


def _panel(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    """(Kronrod estimate, |K15 - G7|) for one panel."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = np.asarray(fn(mid + half * _NODES), dtype=float)
    k = half * float(np.dot(_WK, y))
    g = half * float(np.dot(_WGAUSS, y))
    return k, abs(k - g)


def integrate(
    fn: Callable[[np.ndarray], np.ndarray],
    points: Sequence[float],
    abs_tol: float = 1e-10,
    max_panels: int = 4096,
    safety: float = 0.1,
) -> float:
    """Integrate fn over the panels delimited by ``points`` to ``abs_tol``.

    ``points`` is an increasing sequence of finite breakpoints; supplying a
    fine initial subdivision is how callers steer the integrator toward thin
    features (the adaptive refinement only bisects, never merges).

    Raises QuadratureError if the summed error estimate is still above
    abs_tol after max_panels panel evaluations.
    """
    pts = [float(p) for p in points]
    if len(pts) < 2 or any(q <= p for p, q in zip(pts, pts[1:])):
        raise ValueError("points must be strictly increasing with >= 2 entries")
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")

    heap: list[tuple[float, int, float, float, float]] = []
    tick = 0
    total = 0.0
    total_err = 0.0
    for a, b in zip(pts, pts[1:]):
        k, e = _panel(fn, a, b)
        heapq.heappush(heap, (-e, tick, a, b, k))
        tick += 1
        total += k
        total_err += e

    n_panels = len(heap)
    target = safety * abs_tol
    while total_err > target and n_panels < max_panels:
        neg_e, _, a, b, k = heapq.heappop(heap)
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            # worst panel is at float resolution: no further progress possible
            heapq.heappush(heap, (neg_e, tick, a, b, k))
            break
        total -= k
        total_err += neg_e  # neg_e = -e
        for lo, hi in ((a, mid), (mid, b)):
            k2, e2 = _panel(fn, lo, hi)
            heapq.heappush(heap, (-e2, tick, lo, hi, k2))
            tick += 1
            total += k2
            total_err += e2
        n_panels += 1

    if total_err > abs_tol:
        raise QuadratureError(
            f"error estimate {total_err:.3e} above abs_tol {abs_tol:.3e} "
            f"after {n_panels} panels"
        )
    return float(sum(item[4] for item in heap))
