"""Adaptive Gauss quadrature on open intervals with endpoint singularities.

The integrands this package meets are piecewise continuous on an open
interval (a, b), positive a.e., and may blow up (integrably or not) at the
endpoints -- e.g. s**(-1/2) near 0 -- but nowhere inside.  That shape drives
the algorithm:

* the two endpoint regions are peeled off in geometrically graded shells
  [d*2**-(j+1), d*2**-j]; on a dyadic shell any power s**mu varies by a
  bounded factor, so a fixed-order Gauss rule is uniformly accurate there;

* shell masses of a power-type singularity form a geometric sequence, so
  the ladder doubles as a divergence detector: persistently non-decaying
  shell masses (ratio >= RHO_DIVERGENT) mean the integral is +inf (or large
  beyond any honest float answer, e.g. 1/s), and the unresolved innermost
  tail of a convergent ladder is summed by geometric extrapolation;

* the interior is refined adaptively: panels are split where the two-halves
  refinement disagrees with the single-panel estimate, worst panel first.

Infinite endpoints are mapped to finite ones (t = a + s/(1-s) and mirror
images), turning a decaying tail into an endpoint singularity the ladder
already handles.  The running total is also monitored: a value beyond
HUGE_VALUE that still grows by more than 5% per refinement round is
reported as +inf rather than as a meaningless large float.
"""

from __future__ import annotations

import heapq
import math
from functools import lru_cache

import numpy as np

from .extreal import INF

GAUSS_ORDER = 8
LADDER_MAX_DEPTH = 64          # deepest shell is 2**-64 of the peeled region
PEEL_START = 5                 # peeled region spans the outer 2**-5 of the interval
RHO_DIVERGENT = 0.995          # shell-mass ratio at/above which the tail is declared +inf
DIVERGENT_STREAK = 6           # consecutive non-decaying shells required
HUGE_VALUE = 1e12
GROWTH_LIMIT = 0.05            # 5% growth per refinement round at HUGE_VALUE => +inf
MAX_PANELS = 4096


@lru_cache(maxsize=8)
def gauss_rule(order: int):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    from scipy.special import roots_legendre

    x, w = roots_legendre(order)
    return np.asarray(x), np.asarray(w)


def _panel_integral(g, lo: float, hi: float, order: int = GAUSS_ORDER) -> float:
    x, w = gauss_rule(order)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    vals = np.asarray(g(mid + half * x), dtype=float)
    vals = np.where(np.isnan(vals), 0.0, vals)
    if np.isinf(vals).any():
        return INF
    return float(half * np.dot(w, vals))


def map_to_finite(g, a: float, b: float):
    """Reparametrize g on (a, b) with infinite endpoint(s) onto a finite interval.

    Returns (h, lo, hi) with integral of h over (lo, hi) equal to the
    integral of g over (a, b); the Jacobian is folded into h.
    """
    if math.isfinite(a) and math.isfinite(b):
        return g, a, b
    if math.isfinite(a) and b == INF:
        def h(s, _g=g, _a=a):
            s = np.asarray(s, dtype=float)
            return _g(_a + s / (1.0 - s)) / (1.0 - s) ** 2
        return h, 0.0, 1.0
    if a == -INF and math.isfinite(b):
        def h(s, _g=g, _b=b):
            s = np.asarray(s, dtype=float)
            return _g(_b - (1.0 - s) / s) / s**2
        return h, 0.0, 1.0
    if a == -INF and b == INF:
        def h(s, _g=g):
            s = np.asarray(s, dtype=float)
            t = np.tan(np.pi * (s - 0.5))
            return _g(t) * np.pi / np.cos(np.pi * (s - 0.5)) ** 2
        return h, 0.0, 1.0
    raise ValueError(f"bad interval ({a}, {b})")


def _peel_endpoint(g, lo, hi, left: bool, tol: float, order: int):
    """Sum geometrically graded shells walking into one endpoint.

    The peeled region is the outer 2**-PEEL_START fraction of the interval;
    the return value is (mass of that region, its interior-facing edge).
    The mass includes the geometrically extrapolated tail below the deepest
    shell, or is +inf when the shell masses refuse to decay (non-integrable
    endpoint).
    """
    length = hi - lo
    outer_edge = lo + length * 2.0 ** (-PEEL_START) if left \
        else hi - length * 2.0 ** (-PEEL_START)
    masses = []
    total = 0.0
    streak = 0
    for j in range(PEEL_START, PEEL_START + LADDER_MAX_DEPTH):
        d_out = length * 2.0 ** (-j)
        d_in = length * 2.0 ** (-j - 1)
        if left:
            shell = (lo + d_in, lo + d_out)
        else:
            shell = (hi - d_out, hi - d_in)
        m = _panel_integral(g, shell[0], shell[1], order)
        if math.isinf(m):
            return INF, outer_edge
        masses.append(m)
        total += m
        if len(masses) >= 2 and masses[-2] > 0:
            rho = masses[-1] / masses[-2]
            streak = streak + 1 if rho >= RHO_DIVERGENT else 0
            if streak >= DIVERGENT_STREAK:
                return INF, outer_edge
        if total > 0 and masses[-1] < 0.25 * tol * total and len(masses) >= 8:
            break
        if masses[-1] == 0.0 and len(masses) >= 8:
            break
    # extrapolate the unresolved tail as a geometric series
    if len(masses) >= 2 and masses[-2] > 0 and masses[-1] > 0:
        rho = masses[-1] / masses[-2]
        if rho < RHO_DIVERGENT:
            total += masses[-1] * rho / (1.0 - rho)
    return total, outer_edge


def integrate_callable(g, a: float, b: float, tol: float = 1e-8,
                       order: int = GAUSS_ORDER, max_panels: int = MAX_PANELS) -> float:
    """Integral of a vectorized nonnegative callable over (a, b).

    Endpoint singularities are resolved by shell peeling, the interior by
    worst-first adaptive bisection.  Returns +inf for detected divergence.
    """
    if not a < b:
        if a == b:
            return 0.0
        raise ValueError(f"empty interval ({a}, {b})")
    g, lo, hi = map_to_finite(g, a, b)

    left_mass, left_edge = _peel_endpoint(g, lo, hi, True, tol, order)
    if math.isinf(left_mass):
        return INF
    right_mass, right_edge = _peel_endpoint(g, lo, hi, False, tol, order)
    if math.isinf(right_mass):
        return INF

    # adaptive refinement of the interior [left_edge, right_edge]
    def panel(plo, phi):
        whole = _panel_integral(g, plo, phi, order)
        mid = 0.5 * (plo + phi)
        halves = _panel_integral(g, plo, mid, order) + _panel_integral(g, mid, phi, order)
        err = abs(whole - halves)
        return (-err, plo, phi, halves, err)

    heap = []
    interior = 0.0
    err_sum = 0.0
    edges = np.linspace(left_edge, right_edge, 9)
    for i in range(8):
        item = panel(edges[i], edges[i + 1])
        if math.isinf(item[3]):
            return INF
        heapq.heappush(heap, item)
        interior += item[3]
        err_sum += item[4]

    n_panels = 8
    last_round_value = None
    while heap and n_panels < max_panels:
        total = left_mass + right_mass + interior
        if err_sum <= tol * max(abs(total), 1e-300):
            break
        neg_err, plo, phi, val, err = heapq.heappop(heap)
        if err <= 0.25 * tol * max(abs(total), 1e-300) / max(len(heap), 1):
            heapq.heappush(heap, (neg_err, plo, phi, val, err))
            break
        mid = 0.5 * (plo + phi)
        interior -= val
        err_sum -= err
        for child in (panel(plo, mid), panel(mid, phi)):
            if math.isinf(child[3]):
                return INF
            heapq.heappush(heap, child)
            interior += child[3]
            err_sum += child[4]
        n_panels += 1
        if n_panels % 64 == 0:
            total = left_mass + right_mass + interior
            if total > HUGE_VALUE and last_round_value is not None:
                if total > (1.0 + GROWTH_LIMIT) * last_round_value:
                    return INF
            last_round_value = total

    total = left_mass + right_mass + interior
    if total > HUGE_VALUE * (1.0 + GROWTH_LIMIT):
        return INF
    return total
