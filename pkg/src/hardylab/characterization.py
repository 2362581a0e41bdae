"""Characterization constants for weighted iterated Hardy inequalities.

The inequality under study bounds a triple-nested weighted norm of the
primitive F(t) = integral of f over (a, t),

    ( int_a^b ( int_a^x F(t)**q u(t) dt )**(r/q) w(x) dx )**(1/r)
        <= C * ( int_a^b f**p v )**(1/p),

over nonnegative f, with 1 <= p < infinity and 0 < q, r < infinity.  The
best constant C is equivalent (up to exponent-dependent factors) to an
explicit functional of the weights whose shape depends only on how p
compares with q and with r.  This module computes those functionals:

* regime I   (p <= q, p <= r): a single sup-form constant C1;
* regime II  (r < p <= q):     two integral-form constants C2, C3;
* regime III (q < p <= r):     C1 plus a sup-form constant C4 whose inner
                               part is an integral in t;
* regime IV  (q < p, r < p):   C3 plus an integral-form constant C5.

All constants are built from three ingredients evaluated on a shared
`CellGrid`: the running integral of u (entering only through differences
CU(x) - CU(t), so a non-integrable endpoint of u stays representable),
the tail integral of w, and the companion weight

    V_p(x, y) = ( int_x^y v**(-1/(p-1)) )**((p-1)/p)      for p > 1,
    V_1(x, y) = ess sup over (x, y) of 1/v                for p = 1,

with the usual conventions 0 * inf = 0, 0/0 = inf/inf = 0 and
positive/0 = +inf throughout, so degenerate weights produce honest 0 or
+inf constants instead of NaNs.

The same engine characterizes the related inequality restricted to
nonnegative *nondecreasing* functions: substituting exponents
(1, 1/p, q/p) and the companion weight 1 / (tail integral of v) turns its
constants into the p-th powers of the monotone ones, so
`monotone_constants` is a thin wrapper.  `local_hardy_constant` computes
the two-weight Hardy constant of a single interval (the building block of
the discrete equivalents), and `discrete_constants` evaluates the
sequence-space constants attached to a dyadic discretizing sequence of
the tail integral of w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .discretization import DiscretizingSequence
from .errors import ExponentError, IntervalError, TruncationDominatedError
from .extreal import INF, div0, mul0, nn_sum, pow0
from .grids import CellGrid
from .measure import Exponents, Interval, integrate, vp

_CHUNK = 64
_TAIL_SHARE_LIMIT = 0.1


class Regime(Enum):
    """Exponent regime of the iterated inequality."""

    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


def _regime_of(p: float, q: float, r: float) -> Regime:
    if p <= q:
        return Regime.I if p <= r else Regime.II
    return Regime.III if p <= r else Regime.IV


def classify(e: Exponents) -> Regime:
    """Regime of (p, q, r); the regime decides which constants apply."""
    e.require_iterated()
    return _regime_of(e.p, e.q, e.r)


@dataclass(frozen=True)
class ConditionReport:
    """Computed characterization constants for one weight configuration.

    `constants` maps constant names (C1..C5, calC1..calC5, A1..A4, B1, B2)
    to values in [0, +inf]; `combined` is their sum, the quantity the best
    constant is equivalent to.
    """

    family: str
    regime: Regime
    exponents: Exponents
    constants: dict[str, float]
    combined: float
    finite: bool
    diagnostics: dict = field(default_factory=dict)

    def __str__(self) -> str:
        parts = ", ".join(f"{k}={v:.6g}" for k, v in self.constants.items())
        tag = "finite" if self.finite else "infinite"
        return (f"[{self.family}] regime {self.regime.value}: {parts}; "
                f"combined={self.combined:.6g} ({tag})")


# -- chunked kernels ---------------------------------------------------------
#
# All three kernels reduce an (eval point) x (grid node) interaction through
# the running integral of u.  `points` and `cu` are cumulative values, so
# differences are integrals of u over subintervals; `coef` carries the node
# quadrature weights of whatever density is being integrated.


def _tail_kernel(points: np.ndarray, cu: np.ndarray, coef: np.ndarray,
                 expo: float) -> np.ndarray:
    """out[i] = sum_j coef[j] * max(cu[j] - points[i], 0)**expo."""
    pos = coef > 0
    if np.isinf(cu[pos]).any():
        return np.full(len(points), INF)
    inf_idx = np.flatnonzero(np.isinf(coef))
    cu_s = np.where(pos, cu, 0.0)
    coef_s = np.where(np.isfinite(coef), coef, 0.0)
    out = np.empty(len(points))
    for i0 in range(0, len(points), _CHUNK):
        d = cu_s[None, :] - points[i0:i0 + _CHUNK, None]
        np.clip(d, 0.0, None, out=d)
        if expo != 1.0:
            d **= expo
        out[i0:i0 + _CHUNK] = d @ coef_s
    for j in inf_idx:
        out = np.where(points < cu[j], INF, out)
    return out


def _left_kernel(points: np.ndarray, cu: np.ndarray, coef: np.ndarray,
                 expo: float) -> np.ndarray:
    """out[i] = sum_j coef[j] * max(points[i] - cu[j], 0)**expo."""
    inf_idx = np.flatnonzero(np.isinf(coef))
    coef_s = np.where(np.isfinite(coef), coef, 0.0)
    cu_s = np.minimum(cu, INF)  # inf cu gives clipped-zero differences anyway
    out = np.empty(len(points))
    for i0 in range(0, len(points), _CHUNK):
        d = points[i0:i0 + _CHUNK, None] - cu_s[None, :]
        np.clip(d, 0.0, None, out=d)
        d = np.where(np.isnan(d), 0.0, d)  # inf - inf
        if expo != 1.0:
            d **= expo
        out[i0:i0 + _CHUNK] = d @ coef_s
    for j in inf_idx:
        out = np.where(points > cu[j], INF, out)
    return out


def _left_sup_kernel(points: np.ndarray, cu: np.ndarray, vals: np.ndarray,
                     expo: float) -> np.ndarray:
    """out[i] = max_j mul0(max(points[i] - cu[j], 0)**expo, vals[j])."""
    out = np.zeros(len(points))
    for i0 in range(0, len(points), _CHUNK):
        d = points[i0:i0 + _CHUNK, None] - cu[None, :]
        np.clip(d, 0.0, None, out=d)
        d = np.where(np.isnan(d), 0.0, d)
        if expo != 1.0:
            d **= expo
        prod = mul0(d, vals[None, :])
        out[i0:i0 + _CHUNK] = prod.max(axis=1)
    return out


def _interp_inf(x: np.ndarray, xp: np.ndarray, fp: np.ndarray) -> np.ndarray:
    """np.interp that preserves +inf plateaus of fp."""
    base = np.interp(x, xp, np.clip(fp, 0.0, 1e300))
    near_inf = np.interp(x, xp, np.isinf(fp).astype(float))
    return np.where(near_inf > 0.0, INF, base)


_EDGE_GUARD = 10         # edges next to an unresolved infinite end
_TAIL_GROWTH = 1.04


def _guarded_sup(grid: CellGrid, vals: np.ndarray):
    """(sup, masked values) of per-edge candidates, honest at infinite ends.

    The deepest few edges of a ladder running into an infinite endpoint sit
    next to the single cell holding the whole unresolved tail, where in-cell
    partial integrals cannot be trusted; those edges are excluded.  A
    candidate sequence still growing geometrically through the adjacent
    trusted edges means the sup is a tail limit, reported as +inf.
    """
    n = len(vals)
    lo = _EDGE_GUARD if not math.isfinite(grid.interval.a) else 0
    hi = n - _EDGE_GUARD if not math.isfinite(grid.interval.b) else n
    masked = vals.copy()
    masked[:lo] = 0.0
    masked[hi:] = 0.0
    best = float(np.max(masked))
    for approach in (masked[max(hi - 10, lo):hi], masked[lo:min(lo + 10, hi)][::-1]):
        s = approach[np.isfinite(approach) & (approach > 0)]
        if len(s) >= 4 and np.all(s[1:] >= _TAIL_GROWTH * s[:-1]):
            return INF, masked
    return best, masked


def _refine_sup(s_edges: np.ndarray, edge_vals: np.ndarray, dense,
                rounds: int = 2, n_dense: int = 65) -> float:
    """Sharpen a sup over edges by dense re-evaluation around the argmax."""
    i = int(np.argmax(edge_vals))
    best = float(edge_vals[i])
    lo = s_edges[max(i - 1, 0)]
    hi = s_edges[min(i + 1, len(s_edges) - 1)]
    for _ in range(rounds):
        sd = np.linspace(lo, hi, n_dense)
        vals = dense(sd)
        j = int(np.argmax(vals))
        best = max(best, float(vals[j]))
        step = (hi - lo) / (n_dense - 1)
        lo, hi = max(lo, sd[j] - 2 * step), min(hi, sd[j] + 2 * step)
    return best


# -- companion weight --------------------------------------------------------


def _vp_arrays(grid: CellGrid, v_n: np.ndarray, p: float):
    """(edge, node) arrays of V_p(a, .) on the grid."""
    if p > 1.0:
        dual = pow0(v_n, -1.0 / (p - 1.0))
        vi_e, vi_n = grid.cumulative_left(dual)
        expo = (p - 1.0) / p
        return pow0(vi_e, expo), pow0(vi_n, expo)
    recip = pow0(v_n, -1.0)
    # a left-endpoint blowup of 1/v makes V_1(a, x) identically +inf; detect
    # it from the ladder cells growing inward, as finite samples cannot
    cm = recip[:grid.ladder_depth].max(axis=1)
    head = cm[:8]
    blow = bool(np.isinf(cm).any())
    if not blow and head[0] > 0 and np.isfinite(head).all():
        ratios = head[:-1] / np.maximum(head[1:], 1e-300)
        blow = bool(np.all(ratios >= 1.05))
    if blow:
        return (np.full(grid.n_cells + 1, INF), np.full_like(recip, INF))
    flat = np.maximum.accumulate(recip.ravel())
    edge = np.concatenate([[0.0], flat[grid.order - 1::grid.order]])
    return edge, flat.reshape(recip.shape)


# -- the constant engine -----------------------------------------------------


def _engine(p: float, q: float, r: float, grid: CellGrid, u_n: np.ndarray,
            w_n: np.ndarray, vp_e: np.ndarray, vp_n: np.ndarray,
            refine: bool = True) -> dict[str, float]:
    regime = _regime_of(p, q, r)
    cu_e, cu_n = grid.cumulative_left(u_n, divergence_to_inf=False)
    cu_flat = cu_n.ravel()
    vp_flat = vp_n.ravel()
    wcoef = np.where(np.isnan(w_n * grid.wts), 0.0, w_n * grid.wts).ravel()
    consts: dict[str, float] = {}

    def cu_at(sd):
        return np.interp(sd, grid.s_flat, np.minimum(cu_flat, 1e300))

    if regime in (Regime.I, Regime.III):
        g_e = _tail_kernel(cu_e, cu_flat, wcoef, r / q)
        c1_vals = mul0(pow0(g_e, 1.0 / r), vp_e)
        c1, c1_masked = _guarded_sup(grid, c1_vals)
        if refine and 0.0 < c1 < INF:
            def dense_c1(sd):
                gd = _tail_kernel(cu_at(sd), cu_flat, wcoef, r / q)
                vpd = _interp_inf(sd, grid.s_flat, vp_flat)
                return mul0(pow0(gd, 1.0 / r), vpd)
            c1 = _refine_sup(grid.s_edges, c1_masked, dense_c1)
        consts["C1"] = c1

    if regime is Regime.III:
        wt_e, _ = grid.cumulative_right(w_n)
        beta = q / (p - q)
        kern = mul0(np.where(np.isnan(u_n * grid.wts), 0.0, u_n * grid.wts).ravel(),
                    pow0(vp_flat, p * q / (p - q)))
        h_e = _left_kernel(cu_e, cu_flat, kern, beta)
        c4_vals = mul0(pow0(wt_e, 1.0 / r), pow0(h_e, (p - q) / (p * q)))
        c4, c4_masked = _guarded_sup(grid, c4_vals)
        if refine and 0.0 < c4 < INF:
            def dense_c4(sd):
                hd = _left_kernel(cu_at(sd), cu_flat, kern, beta)
                wtd = _interp_inf(sd, grid.s_edges, wt_e)
                return mul0(pow0(wtd, 1.0 / r), pow0(hd, (p - q) / (p * q)))
            c4 = _refine_sup(grid.s_edges, c4_masked, dense_c4)
        consts["C4"] = c4

    if regime in (Regime.II, Regime.IV):
        wt_e, wt_n = grid.cumulative_right(w_n)
        sum_ex = (p - r) / (p * r)
        vp_pow = pow0(vp_flat, p * r / (p - r))

        if regime is Regime.II:
            s2_e = _left_sup_kernel(cu_e, cu_flat, vp_pow, r * p / (q * (p - r)))
            s2_n = _interp_inf(grid.s_flat, grid.s_edges, s2_e).reshape(u_n.shape)
            i2 = mul0(mul0(pow0(wt_n, r / (p - r)), w_n), s2_n)
            consts["C2"] = pow0(grid.total(i2), sum_ex)

        g_e = _tail_kernel(cu_e, cu_flat, wcoef, r / q)
        s3_e = _left_sup_kernel(cu_e, cu_flat, vp_pow, r / q)
        g_n = _interp_inf(grid.s_flat, grid.s_edges, g_e).reshape(u_n.shape)
        s3_n = _interp_inf(grid.s_flat, grid.s_edges, s3_e).reshape(u_n.shape)
        i3 = mul0(mul0(pow0(g_n, r / (p - r)), w_n), s3_n)
        consts["C3"] = pow0(grid.total(i3), sum_ex)

        if regime is Regime.IV:
            kern = mul0(np.where(np.isnan(u_n * grid.wts), 0.0,
                                 u_n * grid.wts).ravel(),
                        pow0(vp_flat, p * q / (p - q)))
            h_e = _left_kernel(cu_e, cu_flat, kern, q / (p - q))
            h_n = _interp_inf(grid.s_flat, grid.s_edges, h_e).reshape(u_n.shape)
            i5 = mul0(mul0(pow0(wt_n, r / (p - r)), w_n),
                      pow0(h_n, r * (p - q) / (q * (p - r))))
            consts["C5"] = pow0(grid.total(i5), sum_ex)

    return consts


def _resolve_interval(interval: Interval | None, *weights) -> Interval:
    if interval is not None:
        return interval
    for w in weights:
        iv = getattr(w, "interval", None)
        if iv is not None:
            return iv
    raise IntervalError("no interval given and none of the weights carries one")


# -- public entry points -----------------------------------------------------


def continuous_constants(e: Exponents, u, v, w, interval: Interval | None = None,
                         *, grid_size: int = 1024, order: int = 8,
                         refine: bool = True) -> ConditionReport:
    """Characterization constants of the iterated inequality.

    Returns the regime-appropriate subset of C1..C5; their sum `combined`
    is equivalent to the best constant of the inequality.
    """
    e.require_iterated()
    iv = _resolve_interval(interval, u, v, w)
    grid = CellGrid(iv, grid_size, order)
    u_n, v_n, w_n = (grid.node_values(x) for x in (u, v, w))
    vp_e, vp_n = _vp_arrays(grid, v_n, e.p)
    consts = _engine(e.p, e.q, e.r, grid, u_n, w_n, vp_e, vp_n, refine)
    combined = nn_sum(np.array(list(consts.values())))
    return ConditionReport(
        family="iterated", regime=classify(e), exponents=e, constants=consts,
        combined=float(combined), finite=bool(np.isfinite(combined)),
        diagnostics={"grid_size": grid_size, "order": order})


def monotone_constants(e: Exponents, u, v, w, interval: Interval | None = None,
                       *, grid_size: int = 1024, order: int = 8,
                       refine: bool = True) -> ConditionReport:
    """Characterization constants of the inequality on nondecreasing functions.

    For nondecreasing h the two-weight problem reduces to the iterated one
    at exponents (1, 1/p, q/p) with companion weight 1 / (tail integral of
    v); each monotone constant is the 1/p-th power of the corresponding
    engine constant.
    """
    e.require_monotone()
    p, q = e.p, e.q
    iv = _resolve_interval(interval, u, v, w)
    grid = CellGrid(iv, grid_size, order)
    u_n, v_n, w_n = (grid.node_values(x) for x in (u, v, w))
    vt_e, vt_n = grid.cumulative_right(v_n)
    vp_e, vp_n = div0(1.0, vt_e), div0(1.0, vt_n)
    raw = _engine(1.0, 1.0 / p, q / p, grid, u_n, w_n, vp_e, vp_n, refine)
    consts = {"calC" + name[1:]: float(pow0(val, 1.0 / p))
              for name, val in raw.items()}
    combined = nn_sum(np.array(list(consts.values())))
    return ConditionReport(
        family="monotone", regime=_regime_of(1.0, 1.0 / p, q / p), exponents=e,
        constants=consts, combined=float(combined),
        finite=bool(np.isfinite(combined)),
        diagnostics={"grid_size": grid_size, "order": order,
                     "engine_exponents": (1.0, 1.0 / p, q / p)})


def local_hardy_constant(e: Exponents, u, v, x0: float, x1: float, *,
                         grid_size: int = 256, order: int = 6,
                         refine: bool = True) -> float:
    """Two-weight Hardy constant of the single interval (x0, x1).

    This is the quantity B(x0, x1) with

        B = sup over t of (int_t^x1 u)**(1/q) * V_p(x0, t)      if p <= q,
        B = ( int_x0^x1 (int_t^x1 u)**(q/(p-q)) u(t)
              * V_p(x0, t)**(pq/(p-q)) dt )**((p-q)/(pq))       if q < p.
    """
    if e.p < 1.0:
        raise ExponentError(
            f"p = {e.p} < 1: the iterated inequality only holds for trivial "
            "functions")
    p, q = e.p, e.q
    grid = CellGrid(Interval(x0, x1), grid_size, order)
    u_n, v_n = grid.node_values(u), grid.node_values(v)
    ut_e, ut_n = grid.cumulative_right(u_n)
    vp_e, vp_n = _vp_arrays(grid, v_n, p)
    if p <= q:
        vals = mul0(pow0(ut_e, 1.0 / q), vp_e)
        best, masked = _guarded_sup(grid, vals)
        if refine and 0.0 < best < INF:
            ut_flat, vp_flat = ut_n.ravel(), vp_n.ravel()

            def dense(sd):
                utd = _interp_inf(sd, grid.s_flat, ut_flat)
                vpd = _interp_inf(sd, grid.s_flat, vp_flat)
                return mul0(pow0(utd, 1.0 / q), vpd)
            best = _refine_sup(grid.s_edges, masked, dense)
        return best
    integrand = mul0(mul0(pow0(ut_n, q / (p - q)), u_n),
                     pow0(vp_n, p * q / (p - q)))
    return float(pow0(grid.total(integrand), (p - q) / (p * q)))


# -- discrete constants ------------------------------------------------------


def _drop_share(full: float, reduced: float) -> float:
    """Relative change of a constant when the extreme index is dropped."""
    if full == 0.0:
        return 0.0
    if np.isinf(full):
        return 0.0 if np.isinf(reduced) else 1.0
    return max(0.0, 1.0 - reduced / full)


def _a_value(z: np.ndarray, p: float, r: float) -> float:
    if len(z) == 0:
        return 0.0
    if p <= r:
        return float(np.max(z))
    ex = p * r / (p - r)
    terms = pow0(z, ex)
    total = INF if np.isinf(terms).any() else float(np.sum(terms))
    return float(pow0(total, 1.0 / ex))


def _b_value(d: np.ndarray, vpa: np.ndarray, p: float, r: float) -> float:
    if len(d) == 0:
        return 0.0
    tails = np.cumsum(d[::-1])[::-1]
    if p <= r:
        return float(np.max(mul0(pow0(tails, 1.0 / r), vpa)))
    terms = mul0(mul0(d, pow0(tails, r / (p - r))),
                 pow0(vpa, p * r / (p - r)))
    total = INF if np.isinf(terms).any() else float(np.sum(terms))
    return float(pow0(total, (p - r) / (p * r)))


def discrete_constants(e: Exponents, u, v, ds: DiscretizingSequence, *,
                       local_grid_size: int = 256, order: int = 6,
                       strict_truncation: bool = True) -> ConditionReport:
    """Sequence-space characterization constants on a discretizing sequence.

    With x_k the points of `ds` (so the tail integral of w halves at each
    step), B_k the local Hardy constant of (x_{k-1}, x_k), U_k the u-mass
    of (x_k, x_{k+1}) and D_k = 2**(-k) U_k**(r/q):

        A-side: sup_k 2**(-k/r) B_k                   if p <= r,
                (sum_k (2**(-k/r) B_k)**(pr/(p-r)))**((p-r)/(pr)) otherwise;
        B-side: sup_k T_k**(1/r) V_p(a, x_k)          if p <= r,
                (sum_k D_k T_k**(r/(p-r))
                       * V_p(a, x_k)**(pr/(p-r)))**((p-r)/(pr)) otherwise,

    with T_k the tail sums of D.  The A-side key is A1..A4 by regime; the
    B-side key is B1 or B2.  Truncation sensitivity (the relative change
    when the deepest index is dropped, and the shallowest one for
    sequences truncated on the left) is reported in `diagnostics`; with
    `strict_truncation` a share above 10% raises TruncationDominatedError.
    """
    e.require_iterated()
    regime = classify(e)
    p, q, r = e.p, e.q, e.r
    xs = np.asarray(ds.points, dtype=float)
    ks = np.asarray(ds.indices, dtype=float)
    a = ds.interval.a

    b_loc = np.array([
        local_hardy_constant(e, u, v, float(xs[j - 1]), float(xs[j]),
                             grid_size=local_grid_size, order=order)
        for j in range(1, len(xs))])
    u_mass = np.array([integrate(u, float(xs[j]), float(xs[j + 1]))
                       for j in range(1, len(xs) - 1)])
    vpa = np.array([vp(v, p, a, float(x)) for x in xs[1:-1]])

    z = pow0(2.0, -ks[1:] / r) * b_loc
    d_seq = pow0(2.0, -ks[1:-1]) * pow0(u_mass, r / q)

    a_val = _a_value(z, p, r)
    b_val = _b_value(d_seq, vpa, p, r)
    a_key = {"I": "A1", "II": "A2", "III": "A3", "IV": "A4"}[regime.value]
    b_key = "B1" if p <= r else "B2"
    consts = {a_key: a_val, b_key: b_val}

    diag = {
        "k_range": (int(ds.first_index), int(ds.k_max)),
        "truncated_start": ds.truncated_start,
        "tail_share_A": _drop_share(a_val, _a_value(z[:-1], p, r)),
        "tail_share_B": _drop_share(b_val, _b_value(d_seq[:-1], vpa[:-1], p, r)),
    }
    if ds.truncated_start:
        diag["head_share_A"] = _drop_share(a_val, _a_value(z[1:], p, r))
        diag["head_share_B"] = _drop_share(b_val,
                                           _b_value(d_seq[1:], vpa[1:], p, r))
    if strict_truncation:
        for name, share in diag.items():
            if name.startswith(("tail_share", "head_share")) \
                    and share > _TAIL_SHARE_LIMIT:
                raise TruncationDominatedError(
                    f"{name} = {share:.3f} exceeds {_TAIL_SHARE_LIMIT}: the "
                    f"k-range [{ds.first_index}, {ds.k_max}] is too shallow "
                    "for a stable discrete constant; extend the sequence")

    combined = nn_sum(np.array(list(consts.values())))
    return ConditionReport(
        family="discrete", regime=regime, exponents=e, constants=consts,
        combined=float(combined), finite=bool(np.isfinite(combined)),
        diagnostics=diag)
