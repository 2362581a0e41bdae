"""Dyadic discretizing sequences and discrete comparison lemmas.

Write W*(t) for the tail mass of the outer weight w (integral of w over
(t, b)).  A *discretizing sequence* is a strictly increasing family {x_k}
with W*(x_k) ~= 2**-k: each step inward halves the remaining mass of w.
When W*(a) is finite the sequence starts at the finite index
N = ceil(-log2 W*(a)) with x_N = a; when W*(a) = +inf it extends to
k -> -inf and is truncated below at a configurable depth.  All deeper
points are found by bisection on the monotone map t -> W*(t), which the
weight descriptors evaluate in closed form.

`lemma_pair` evaluates both sides of the two-sided comparison lemmas that
convert weighted integrals/sups over (x_n, b) into sums/sups over the
sequence indices (and back).  Each kind returns (lhs, rhs) so property
tests can assert two-sided comparability with explicit constants; nothing
is simplified symbolically.  The sequence weights tau_k must be
geometrically decreasing (sup tau_{k+1}/tau_k < 1) -- that is what makes
partial sums comparable to their last term -- and the block-monotonicity
assumptions (sigma, h non-decreasing) are validated, not trusted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DiscretizationError, MonotonicityError, NotGeometricError
from .extreal import INF, mul0, pow0
from .grids import CellGrid
from .measure import Interval, Weight, ess_sup, integrate, wstar


@dataclass(frozen=True)
class NonNegSequence:
    """Finite window a_{first_index}, ..., of a nonnegative sequence."""

    values: tuple
    first_index: int = 1

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(math.isnan(v) or v < 0 for v in vals):
            raise ValueError("sequence terms must be nonnegative")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class DiscretizingSequence:
    """Points x_k, k = first_index .. k_max, with W*(x_k) ~= 2**-k."""

    points: np.ndarray
    first_index: int
    k_max: int
    interval: Interval
    weight: Weight
    wstar_values: np.ndarray
    truncated_start: bool = False   # True when W*(a) = +inf (sequence continues to k -> -inf)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.first_index, self.k_max + 1)

    def point(self, k: int) -> float:
        return float(self.points[k - self.first_index])

    def pairs(self):
        """Yield (k, x_{k-1}, x_k) for every consecutive pair."""
        for j in range(1, len(self.points)):
            yield self.first_index + j, float(self.points[j - 1]), float(self.points[j])


def build_discretizing_sequence(w: Weight, interval: Interval | None = None,
                                k_max: int = 16, *, k_min: int | None = None,
                                tol: float = 1e-10, max_iter: int = 200,
                                quad_tol: float = 1e-13) -> DiscretizingSequence:
    """Construct the dyadic discretizing sequence of the tail mass of w.

    Each point solves W*(x_k) = 2**-k by bisection to relative tolerance
    `tol` in the W* value.  With W*(a) finite the first index is
    N = ceil(-log2 W*(a)) and x_N = a; with W*(a) = +inf the sequence is
    truncated below at k_min (default -k_max).
    """
    interval = interval or w.interval
    a, b = interval.a, interval.b
    total = wstar(w, a, tol=quad_tol)
    if total == 0.0:
        raise DiscretizationError("weight has no mass: W*(a) = 0")

    if math.isinf(total):
        first = -k_max if k_min is None else k_min
        truncated = True
        # bracket the shallowest point: need W*(lo) >= 2**-first
        target0 = 2.0 ** (-first)
        lo = _probe_left(w, interval, target0, quad_tol)
        points = [_bisect_wstar(w, interval, lo, target0, tol, max_iter, quad_tol)]
        start_k = first + 1
    else:
        t = -math.log2(total)
        first = math.ceil(t - 1e-12)
        truncated = False
        points = [a]
        start_k = first + 1

    for k in range(start_k, k_max + 1):
        target = 2.0 ** (-k)
        lo = points[-1]
        points.append(_bisect_wstar(w, interval, lo, target, tol, max_iter, quad_tol))

    pts = np.asarray(points, dtype=float)
    if np.any(np.diff(pts) <= 0):
        raise DiscretizationError("sequence points failed to increase strictly")
    wvals = np.asarray([wstar(w, x, tol=quad_tol) for x in pts])
    return DiscretizingSequence(pts, first, k_max, interval, w, wvals, truncated)


# widest relative W* error tolerated when bisection exhausts the floats;
# every published sequence point satisfies |W*(x_k) * 2^k - 1| <= this
_EXHAUSTION_TOL = 1e-8


def _probe_left(w, interval, target, quad_tol):
    """Point with W* >= target, walking dyadically toward an infinite-mass left end."""
    a, b = interval.a, interval.b
    ref = b if math.isfinite(b) else (a + 1.0 if math.isfinite(a) else 0.0)
    for j in range(1, 600):
        x = a + (ref - a) * 2.0 ** (-j) if math.isfinite(a) else ref - 2.0**j
        if x <= a:
            break
        if wstar(w, x, tol=quad_tol) >= target:
            return x
    raise DiscretizationError(f"could not bracket W* = {target} near the left endpoint")


def _bisect_wstar(w, interval, lo, target, tol, max_iter, quad_tol):
    """Solve W*(x) = target on [lo, b) by bisection (W* is continuous, non-increasing)."""
    a, b = interval.a, interval.b
    if math.isfinite(b):
        hi = b
    else:
        hi = max(lo, a if math.isfinite(a) else 0.0) + 1.0
        for _ in range(200):
            if wstar(w, hi, tol=quad_tol) <= target:
                break
            hi = lo + 2.0 * (hi - lo)
        else:
            raise DiscretizationError(f"could not bracket W* = {target} from above")
    x_lo, x_hi = lo, hi
    best_x, best_err = x_lo, INF
    for _ in range(max_iter):
        mid = 0.5 * (x_lo + x_hi)
        if mid <= x_lo or mid >= x_hi:
            break
        val = wstar(w, mid, tol=quad_tol)
        err = abs(val - target) / target
        if err < best_err:
            best_x, best_err = mid, err
        if err <= tol:
            return mid
        if val > target:
            x_lo = mid
        else:
            x_hi = mid
    # the bracket can hit consecutive floats before reaching `tol` when the
    # target lies deep in a thin tail (dW*/W* ~ eps/(b - x) per float step);
    # the point is still good as long as it meets the sequence guarantee
    if best_err <= _EXHAUSTION_TOL:
        return best_x
    raise DiscretizationError(
        f"bisection for W* = {target} stalled at relative error {best_err:.2e} "
        f"(tolerance {tol})")


# ---------------------------------------------------------------------------
# comparison-lemma pairs

LEMMA_KINDS = (
    "sup-sum", "sum-sum", "sum-sup",
    "dec-sup-sum", "dec-sum-sum", "dec-sum-sup",
    "3-sup", "3-sum",
    "int-equiv", "sup-equiv",
)


def _check_tau(tau: np.ndarray) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    if tau.ndim != 1 or len(tau) < 2:
        raise NotGeometricError("tau needs at least two terms")
    if np.any(tau <= 0) or not np.isfinite(tau).all():
        raise NotGeometricError("tau terms must be positive and finite")
    if np.max(tau[1:] / tau[:-1]) >= 1.0:
        raise NotGeometricError("tau is not geometrically decreasing: sup tau_{k+1}/tau_k >= 1")
    return tau


def _check_nondecreasing(vals, what: str):
    vals = np.asarray(vals, dtype=float)
    scale = np.max(np.abs(vals[np.isfinite(vals)]), initial=1.0)
    if np.any(np.diff(vals) < -1e-9 * scale):
        raise MonotonicityError(f"{what} must be non-decreasing")
    return vals


def _as_values(seq) -> np.ndarray:
    if isinstance(seq, NonNegSequence):
        return seq.array
    arr = np.asarray(seq, dtype=float)
    if np.any(arr < 0):
        raise ValueError("sequence terms must be nonnegative")
    return arr


def _block_integrals(g, xs: np.ndarray) -> np.ndarray:
    return np.asarray([integrate(g, xs[i], xs[i + 1], tol=1e-10)
                       for i in range(len(xs) - 1)])


def lemma_pair(kind: str, *, tau=None, a=None, alpha: float | None = None,
               g=None, xs=None, sigma=None, ds: DiscretizingSequence | None = None,
               h=None, w=None, n: int | None = None,
               ess_samples: int = 512) -> tuple[float, float]:
    """Evaluate (lhs, rhs) of one discrete comparison lemma.

    Kinds and their inputs (tau is always geometrically decreasing):

    - 'sup-sum':  sup_k tau_k * (a_1+..+a_k)        vs  sup_k tau_k a_k
    - 'sum-sum':  sum_k tau_k * (a_1+..+a_k)**alpha vs  sum_k tau_k a_k**alpha
    - 'sum-sup':  sum_k tau_k * max_{i<=k} a_i      vs  sum_k tau_k a_k
    - 'dec-sup-sum', 'dec-sum-sum': as above with a_i = integral of g over
      (xs[i-1], xs[i]) and the lhs block being the integral over (xs[0], xs[k])
    - 'dec-sum-sup': sum_k tau_k * ess sup over (xs[0], xs[k]) of g
                     vs  sum_k tau_k * ess sup over (xs[k-1], xs[k]) of g
    - '3-sup':  sup_{k>n} tau_k sup_{n<=i<k} (int_{xs_i}^{xs_k} g)**alpha sigma_i
                vs  sup_{k>n} tau_k (int_{xs_{k-1}}^{xs_k} g)**alpha sigma_{k-1}
    - '3-sum':  the same with sums over k
    - 'int-equiv': integral over (x_n, b) of W*(x)**alpha w(x) h(x) dx
                   vs  sum_{k>n} 2**(-k(alpha+1)) h(x_k)   (needs ds, w, h)
    - 'sup-equiv': ess sup over (x_n, b) of W*(x)**alpha h(x)
                   vs  sup_{k>n} 2**(-k alpha) h(x_k)      (needs ds, h)
    """
    if kind not in LEMMA_KINDS:
        raise ValueError(f"unknown lemma kind {kind!r}")

    if kind in ("sup-sum", "sum-sum", "sum-sup"):
        tau = _check_tau(tau)
        a_vals = _as_values(a)
        if len(a_vals) != len(tau):
            raise ValueError("tau and a must have the same length")
        partials = np.cumsum(a_vals)
        if kind == "sup-sum":
            return float(np.max(tau * partials)), float(np.max(tau * a_vals))
        if kind == "sum-sup":
            return float(np.sum(tau * np.maximum.accumulate(a_vals))), \
                float(np.sum(tau * a_vals))
        if alpha is None or alpha <= 0:
            raise ValueError("sum-sum needs alpha > 0")
        return float(np.sum(tau * partials**alpha)), float(np.sum(tau * a_vals**alpha))

    if kind in ("dec-sup-sum", "dec-sum-sum", "dec-sum-sup"):
        tau = _check_tau(tau)
        xs = np.asarray(xs, dtype=float)
        if len(xs) != len(tau) + 1:
            raise ValueError("xs must hold one more point than tau")
        if np.any(np.diff(xs) <= 0):
            raise MonotonicityError("xs must be strictly increasing")
        if kind == "dec-sum-sup":
            grow = np.asarray([ess_sup(g, xs[0], xs[k + 1], samples=ess_samples)
                               for k in range(len(tau))])
            last = np.asarray([ess_sup(g, xs[k], xs[k + 1], samples=ess_samples)
                               for k in range(len(tau))])
            return float(np.sum(mul0(tau, grow))), float(np.sum(mul0(tau, last)))
        blocks = _block_integrals(g, xs)
        partials = np.cumsum(blocks)
        if kind == "dec-sup-sum":
            return float(np.max(mul0(tau, partials))), float(np.max(mul0(tau, blocks)))
        if alpha is None or alpha <= 0:
            raise ValueError("dec-sum-sum needs alpha > 0")
        return float(np.sum(mul0(tau, pow0(partials, alpha)))), \
            float(np.sum(mul0(tau, pow0(blocks, alpha))))

    if kind in ("3-sup", "3-sum"):
        tau = _check_tau(tau)
        if alpha is None or alpha <= 0:
            raise ValueError(f"{kind} needs alpha > 0")
        xs = np.asarray(xs, dtype=float)
        sig = _check_nondecreasing(sigma, "sigma")
        if np.any(sig <= 0):
            raise MonotonicityError("sigma must be positive")
        m = len(tau)          # tau_k for k = n+1 .. n+m
        if len(xs) != m + 1 or len(sig) != m:
            raise ValueError("need len(xs) = len(tau)+1 and len(sigma) = len(tau)")
        if np.any(np.diff(xs) <= 0):
            raise MonotonicityError("xs must be strictly increasing")
        # cumulative integrals from xs[0]
        blocks = _block_integrals(g, xs)
        cum = np.concatenate([[0.0], np.cumsum(blocks)])
        lhs_terms = np.empty(m)
        for j in range(m):            # k = n+1+j, i ranges over n .. k-1
            ints = cum[j + 1] - cum[:j + 1]
            lhs_terms[j] = np.max(mul0(pow0(ints, alpha), sig[:j + 1]))
        rhs_terms = mul0(pow0(blocks, alpha), sig)
        if kind == "3-sup":
            return float(np.max(mul0(tau, lhs_terms))), float(np.max(mul0(tau, rhs_terms)))
        return float(np.sum(mul0(tau, lhs_terms))), float(np.sum(mul0(tau, rhs_terms)))

    # integral/sup equivalences along a discretizing sequence
    if ds is None or h is None:
        raise ValueError(f"{kind} needs ds and h")
    if alpha is None or alpha < 0:
        raise ValueError(f"{kind} needs alpha >= 0")
    n = ds.first_index if n is None else n
    if n < ds.first_index or n >= ds.k_max:
        raise ValueError(f"start index {n} outside the sequence range")
    x_n = ds.point(n)
    ks = np.arange(n + 1, ds.k_max + 1)
    x_ks = np.asarray([ds.point(int(k)) for k in ks])
    h_vals = _check_nondecreasing(np.asarray(h(x_ks), dtype=float), "h")
    weight = w if w is not None else ds.weight

    if kind == "sup-equiv":
        lhs = ess_sup(lambda t: pow0(_wstar_vec(weight, t), alpha)
                      * np.asarray(h(t), dtype=float),
                      x_n, ds.interval.b, samples=max(ess_samples, 1024))
        rhs = float(np.max(mul0(2.0 ** (-alpha * ks), h_vals)))
        return lhs, rhs

    grid = CellGrid(Interval(x_n, ds.interval.b), n_cells=512, order=6)
    w_nodes = grid.node_values(weight)
    wt_edges, wt_nodes = grid.cumulative_right(w_nodes)
    h_nodes = grid.node_values(h)
    integrand = mul0(mul0(pow0(wt_nodes, alpha), w_nodes), h_nodes)
    lhs = grid.total(integrand)
    rhs = float(np.sum(mul0(2.0 ** (-(alpha + 1.0) * ks), h_vals)))
    return lhs, rhs


def _wstar_vec(weight, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.asarray([wstar(weight, float(x)) for x in t])
