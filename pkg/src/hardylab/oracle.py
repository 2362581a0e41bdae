"""Brute-force lower bounds on the best constants of the inequalities.

Everything in `characterization` computes *formulas*; this module attacks the
underlying variational problems directly, so the two sides can be compared:

    C = sup over f >= 0 of  lhs_iterated(f) / rhs_norm(f)

for the iterated inequality (and the analogous ratios for the monotone and
sequence-space variants).  Every value reported here was realized by an
actually-evaluated test function, so it is a certified lower bound for the
best constant up to quadrature error; the equivalence theorems then assert
that the formula constants bracket these ratios within exponent-dependent
factors.

The search is deliberately multi-strategy, because the ratio landscape is
non-concave when q < 1 or r < 1:

* duality-informed candidates f = v**(-1/(p-1)) with cutoffs (the pointwise
  extremizers of V_p for p > 1), plus left-truncated variants marching down
  the endpoint ladder; for p = 1 shrinking spikes at the maximizer of 1/v;
* per-cell spikes on a coarse partition (near-extremizers of sup-form
  constants live on small intervals);
* power profiles in the grid coordinate;
* multi-start coordinate ascent on a 64-cell piecewise-constant function,
  renormalized each sweep (the ratio is 0-homogeneous in f).

A left-endpoint degeneracy like a non-integrable dual weight makes the best
constant infinite while every truncated candidate is finite, and slowly
divergent cases (logarithmic blowup) can never push a finite ratio past a
fixed threshold.  `best_constant_search` therefore runs an escalation probe:
if the full dual candidate has an infinite denominator and the truncated-dual
ratios keep climbing all the way down the ladder without stabilizing, the
estimate is reported as +inf with `escalated=True`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characterization import _resolve_interval, local_hardy_constant
from .discretization import DiscretizingSequence
from .extreal import INF, div0, mul0, pow0
from .grids import CellGrid
from .measure import Exponents, Interval, Weight, vp as vp_of

RATIO_CAP = 1e12


@dataclass(frozen=True)
class TestFunction:
    """A candidate maximizer of an inequality ratio.

    kind is one of:
      * "piecewise": values on consecutive cells bounded by `edges`
        (len(edges) = len(values) + 1), zero outside;
      * "spike": `height` on (center - width/2, center + width/2);
      * "power": the grid-coordinate power s**exponent (s is the grid's
        internal coordinate in (0,1), so this adapts to infinite intervals);
      * "dual": v**(-1/(p-1)) restricted to (lower, cutoff) for p > 1 --
        the pointwise extremizer behind V_p.
    """

    __test__ = False        # "Test" here means test function, not a test case

    kind: str
    edges: tuple = ()
    values: tuple = ()
    center: float = 0.0
    width: float = 0.0
    height: float = 1.0
    exponent: float = 0.0
    cutoff: float = math.inf
    lower: float = -math.inf

    def __str__(self) -> str:
        if self.kind == "piecewise":
            nz = sum(1 for v in self.values if v > 0)
            return f"piecewise[{len(self.values)} cells, {nz} active]"
        if self.kind == "spike":
            return f"spike(center={self.center:.6g}, width={self.width:.3g})"
        if self.kind == "power":
            return f"power(s^{self.exponent:g})"
        return f"dual(lower={self.lower:.6g}, cutoff={self.cutoff:.6g})"


@dataclass(frozen=True)
class OracleEstimate:
    """Best ratio found by a search, with its witness.

    `value` is a lower bound for the true best constant (every ratio was
    actually evaluated); `escalated` marks a +inf reported through the
    divergence probe rather than a directly evaluated ratio.
    """

    value: float
    argmax: TestFunction | None
    evaluations: int
    grid_size: int
    seed: int
    strategy_values: dict[str, float] = field(default_factory=dict)
    escalated: bool = False

    @property
    def structured_value(self) -> float:
        """Best ratio over the non-ascent strategies."""
        return max((v for k, v in self.strategy_values.items()
                    if k != "ascent"), default=0.0)


def _as_flat_values(f, grid: CellGrid, v_flat: np.ndarray | None,
                    p: float | None) -> np.ndarray:
    """Evaluate a test function / weight / callable at the grid nodes."""
    if isinstance(f, TestFunction):
        t = grid.flat_nodes
        if f.kind == "piecewise":
            edges = np.asarray(f.edges, dtype=float)
            vals = np.concatenate([[0.0], np.asarray(f.values, float), [0.0]])
            return vals[np.searchsorted(edges, t, side="right")]
        if f.kind == "spike":
            lo, hi = f.center - f.width / 2.0, f.center + f.width / 2.0
            return np.where((t > lo) & (t < hi), f.height, 0.0)
        if f.kind == "power":
            return pow0(grid.s_flat, f.exponent)
        if f.kind == "dual":
            if v_flat is None or p is None or p <= 1.0:
                raise ValueError("dual test functions need v and p > 1")
            dual = pow0(v_flat, -1.0 / (p - 1.0))
            dual = np.where(np.isfinite(dual), dual, 0.0)
            return dual * ((t > f.lower) & (t < f.cutoff))
        raise ValueError(f"unknown test function kind {f.kind!r}")
    if isinstance(f, Weight) or callable(f):
        return grid.node_values(f).ravel()
    arr = np.asarray(f, dtype=float).ravel()
    if arr.shape != grid.flat_nodes.shape:
        raise ValueError("test function array does not match the grid")
    return arr


class _Evaluator:
    """Shared-grid ratio evaluator for one weight configuration."""

    def __init__(self, e: Exponents, u, v, w, interval: Interval,
                 grid_size: int, order: int):
        self.e = e
        self.grid = CellGrid(interval, grid_size, order)
        self.u_n = self.grid.node_values(u)
        self.v_n = self.grid.node_values(v)
        self.w_n = self.grid.node_values(w) if w is not None else None
        self.v_flat = self.v_n.ravel()
        self.evaluations = 0

    def flat(self, f) -> np.ndarray:
        return _as_flat_values(f, self.grid, self.v_flat, self.e.p)

    def lhs(self, f_flat: np.ndarray) -> float:
        e, grid = self.e, self.grid
        f_n = f_flat.reshape(self.u_n.shape)
        _, big_f = grid.cumulative_left(f_n)
        inner = mul0(pow0(big_f, e.q), self.u_n)
        _, acc = grid.cumulative_left(inner)
        outer = grid.total(mul0(pow0(acc, e.r / e.q), self.w_n))
        return float(pow0(outer, 1.0 / e.r))

    def rhs(self, f_flat: np.ndarray) -> float:
        f_n = f_flat.reshape(self.u_n.shape)
        total = self.grid.total(mul0(pow0(f_n, self.e.p), self.v_n))
        return float(pow0(total, 1.0 / self.e.p))

    def ratio(self, f_flat: np.ndarray) -> float:
        self.evaluations += 1
        val = float(div0(self.lhs(f_flat), self.rhs(f_flat)))
        return INF if val > RATIO_CAP else val

    def lhs_monotone(self, big_f_flat: np.ndarray) -> float:
        e, grid = self.e, self.grid
        fu = mul0(big_f_flat.reshape(self.u_n.shape), self.u_n)
        _, acc = grid.cumulative_left(fu)
        outer = grid.total(mul0(pow0(acc, e.q), self.w_n))
        return float(pow0(outer, 1.0 / e.q))

    def ratio_monotone(self, big_f_flat: np.ndarray) -> float:
        self.evaluations += 1
        val = float(div0(self.lhs_monotone(big_f_flat), self.rhs(big_f_flat)))
        return INF if val > RATIO_CAP else val


# -- public single evaluations ------------------------------------------------


def lhs_iterated(f, e: Exponents, u, w, interval: Interval | None = None, *,
                 grid_size: int = 1024, order: int = 6) -> float:
    """(int_a^b (int_a^x (int_a^t f)^q u dt)^{r/q} w dx)^{1/r} for one f."""
    e.require_iterated()
    iv = _resolve_interval(interval, u, w)
    ev = _Evaluator(e, u, u, w, iv, grid_size, order)
    return ev.lhs(_as_flat_values(f, ev.grid, None, None))


def rhs_norm(f, p: float, v, interval: Interval | None = None, *,
             grid_size: int = 1024, order: int = 6) -> float:
    """Weighted norm (int_a^b f^p v)^{1/p} for one f."""
    iv = _resolve_interval(interval, v)
    grid = CellGrid(iv, grid_size, order)
    v_n = grid.node_values(v)
    f_flat = _as_flat_values(f, grid, v_n.ravel(), p)
    total = grid.total(mul0(pow0(f_flat.reshape(v_n.shape), p), v_n))
    return float(pow0(total, 1.0 / p))


def lhs_kernel_q1(f, u, w, r: float, interval: Interval | None = None, *,
                  grid_size: int = 1024, order: int = 6) -> float:
    """(int_a^b (int_a^x (int_s^x u) f(s) ds)^r w dx)^{1/r}.

    For q = 1 the two inner integrals of the iterated form collapse by
    Fubini into a single kernel integral; computing it through the identity
    int_a^x (int_s^x u) f ds = U(x) F(x) - int_a^x U f  (U, F running
    integrals of u, f) keeps it a pure cumulative pipeline.
    """
    iv = _resolve_interval(interval, u, w)
    grid = CellGrid(iv, grid_size, order)
    u_n, w_n = grid.node_values(u), grid.node_values(w)
    f_n = _as_flat_values(f, grid, None, None).reshape(u_n.shape)
    _, cu = grid.cumulative_left(u_n, divergence_to_inf=False)
    _, cf = grid.cumulative_left(f_n)
    _, cuf = grid.cumulative_left(mul0(cu, f_n))
    kern = np.clip(mul0(cu, cf) - cuf, 0.0, None)
    kern = np.where(np.isnan(kern), INF, kern)   # inf - inf: genuine blowup
    outer = grid.total(mul0(pow0(kern, r), w_n))
    return float(pow0(outer, 1.0 / r))


def monotone_pair_check(h, e: Exponents, u, v, w,
                        interval: Interval | None = None, *,
                        grid_size: int = 1024, order: int = 6
                        ) -> tuple[float, float]:
    """Ratios of the nondecreasing-function inequality through both routes.

    Given a density h >= 0, the nondecreasing test function is
    f = (int_a^x h)^{1/p}.  Route one evaluates the plain ratio
    lhs / (int f^p v)^{1/p}; route two replaces the denominator via Fubini
    with (int h(t) (int_t^b v) dt)^{1/p}.  The two results must agree --
    they are the same number written before and after the substitution that
    reduces the monotone problem to the iterated one.
    """
    e.require_monotone()
    p, q = e.p, e.q
    iv = _resolve_interval(interval, u, v, w)
    grid = CellGrid(iv, grid_size, order)
    u_n, v_n, w_n = (grid.node_values(x) for x in (u, v, w))
    h_n = _as_flat_values(h, grid, None, None).reshape(u_n.shape)
    _, ch = grid.cumulative_left(h_n)
    big_f = pow0(ch, 1.0 / p)
    _, acc = grid.cumulative_left(mul0(big_f, u_n))
    num = float(pow0(grid.total(mul0(pow0(acc, q), w_n)), 1.0 / q))
    den_direct = float(pow0(grid.total(mul0(pow0(big_f, p), v_n)), 1.0 / p))
    _, vt = grid.cumulative_right(v_n)
    den_fubini = float(pow0(grid.total(mul0(h_n, vt)), 1.0 / p))
    return float(div0(num, den_direct)), float(div0(num, den_fubini))


# -- coordinate ascent ---------------------------------------------------------


_MULTIPLIERS = (4.0, 2.0, 0.5, 0.25, 0.0)


def _coordinate_ascent(ratio_fn, m0: np.ndarray, rng, budget: int):
    """Greedy per-coordinate search; returns (best value, best params, used)."""
    m = m0.astype(float).copy()
    best = ratio_fn(m)
    used = 1
    improved = True
    while improved and used < budget:
        improved = False
        for j in rng.permutation(len(m)):
            if used >= budget:
                break
            base = m[j]
            if base > 0.0:
                cands = [base * mult for mult in _MULTIPLIERS]
            else:
                scale = float(m.max()) or 1.0
                cands = [scale, scale / 4.0, scale * 4.0]
            for cand in cands:
                if used >= budget:
                    break
                m[j] = cand
                val = ratio_fn(m)
                used += 1
                if val > best * (1.0 + 1e-12):
                    best, base, improved = val, cand, True
            m[j] = base
        # renormalize by a power of two: exact in floats, so the
        # 0-homogeneous ratio is bit-identical while magnitudes stay tame
        top = float(m.max())
        if 0.0 < top < INF and (top > 2.0**40 or top < 2.0**-40):
            m /= 2.0 ** round(math.log2(top))
    return best, m, used


def _escalation_probe(ev: _Evaluator, full_dual: np.ndarray):
    """Ladder probe for slowly divergent best constants (p > 1).

    Fires only when the untruncated dual candidate has an infinite
    denominator.  Truncated duals f = v**(-1/(p-1)) 1(t > lo) then have
    finite ratios; if those keep growing all the way down the dyadic ladder
    with increments that do not die out (the signature of a genuine
    divergence, however slow), the best constant is infinite.
    """
    if ev.rhs(full_dual) < INF:
        return False, 0.0, None
    grid = ev.grid
    cut_idx = range(grid.ladder_depth - 1, 0, -2)
    ratios, cuts = [], []
    for i in cut_idx:
        lo = grid.edges[i]
        r = ev.ratio(full_dual * (grid.flat_nodes > lo))
        if np.isfinite(r) and r > 0:
            ratios.append(r)
            cuts.append(lo)
    if len(ratios) < 8:
        return False, max(ratios, default=0.0), None
    arr = np.array(ratios)
    best = float(arr.max())
    witness = TestFunction(kind="dual", lower=float(cuts[int(arr.argmax())]))
    growth = arr[1:] / arr[:-1] - 1.0
    head = float(np.sum(growth[:5]))
    tail = float(np.sum(growth[-5:]))
    overall = arr[-1] / arr[0]
    if overall > 1.15 and head > 0 and tail > 0.15 * head:
        return True, best, witness
    return False, best, witness


# -- the searches --------------------------------------------------------------


def best_constant_search(e: Exponents, u, v, w,
                         interval: Interval | None = None, *,
                         budget: int = 20000, seed: int = 0,
                         grid_size: int = 1024, order: int = 6,
                         n_coarse: int = 64, n_starts: int = 20,
                         family: str = "iterated") -> OracleEstimate:
    """Maximize the inequality ratio over test functions.

    `family="iterated"` searches nonnegative f for the triple-nested
    inequality; `family="monotone"` searches nondecreasing f (parameterized
    by nonnegative increments plus a base level) for the two-weight variant.
    Returns a certified-lower-bound estimate; +inf means either an actually
    evaluated ratio above 1e12 or an escalated divergence probe.
    """
    if family == "monotone":
        e.require_monotone()
    else:
        e.require_iterated()
    iv = _resolve_interval(interval, u, v, w)
    ev = _Evaluator(e, u, v, w, iv, grid_size, order)
    rng = np.random.default_rng(seed)
    if family == "monotone":
        return _search_monotone(ev, rng, budget, n_coarse, n_starts, seed)
    return _search_iterated(ev, rng, budget, n_coarse, n_starts, seed)


def _search_iterated(ev: _Evaluator, rng, budget: int, n_coarse: int,
                     n_starts: int, seed: int) -> OracleEstimate:
    e, grid = ev.e, ev.grid
    group_idx, group_edges = grid.coarse_partition(n_coarse)
    gidx_flat = np.repeat(group_idx, grid.order)
    strategies: dict[str, float] = {}
    best, best_tf, escalated = 0.0, None, False

    def consider(name: str, val: float, tf: TestFunction):
        nonlocal best, best_tf
        strategies[name] = max(strategies.get(name, 0.0), val)
        if val > best:
            best, best_tf = val, tf

    # duality-informed candidates
    if e.p > 1.0:
        dual = pow0(ev.v_flat, -1.0 / (e.p - 1.0))
        dual = np.where(np.isfinite(dual), dual, 0.0)
        for x_cut in group_edges[1:]:
            tf = TestFunction(kind="dual", cutoff=float(x_cut))
            consider("dual", ev.ratio(dual * (grid.flat_nodes < x_cut)), tf)
        for i in range(grid.ladder_depth - 1, 0, -4):
            lo = grid.edges[i]
            tf = TestFunction(kind="dual", lower=float(lo))
            consider("dual", ev.ratio(dual * (grid.flat_nodes > lo)), tf)
        fired, probe_best, probe_tf = _escalation_probe(ev, dual)
        if probe_tf is not None:
            consider("dual", probe_best, probe_tf)
        if fired:
            escalated, best = True, INF
            best_tf = probe_tf
    else:
        # V_1 is an ess sup: shrinking spikes at the maximizer of 1/v
        recip = pow0(ev.v_flat, -1.0)
        j = int(np.argmax(np.where(np.isfinite(recip), recip, -1.0)))
        center = float(grid.flat_nodes[j])
        cell_w = float(np.diff(grid.edges)[j // grid.order])
        if not math.isfinite(cell_w):
            cell_w = abs(center) + 1.0
        for shrink in (1.0, 0.25, 1 / 16.0, 1 / 64.0):
            width = cell_w * shrink
            tf = TestFunction(kind="spike", center=center, width=width)
            consider("dual", ev.ratio(ev.flat(tf)), tf)

    # per-cell spikes
    for j in range(n_coarse):
        f = (gidx_flat == j).astype(float)
        lo, hi = group_edges[j], group_edges[j + 1]
        tf = TestFunction(kind="piecewise", edges=(float(lo), float(hi)),
                          values=(1.0,))
        consider("spike", ev.ratio(f), tf)

    # power profiles in the grid coordinate (growing and decaying)
    for expo in (-0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 4.0):
        tf = TestFunction(kind="power", exponent=expo)
        consider("power", ev.ratio(pow0(grid.s_flat, expo)), tf)
    for expo in (0.5, 1.0, 2.0):
        f = pow0(grid.c_flat, expo)
        proj = np.array([f[gidx_flat == j].mean() for j in range(n_coarse)])
        tf = TestFunction(kind="piecewise",
                          edges=tuple(map(float, group_edges)),
                          values=tuple(map(float, proj)))
        consider("power", ev.ratio(f), tf)

    # multi-start coordinate ascent on coarse piecewise-constant functions
    def ratio_of(m: np.ndarray) -> float:
        return ev.ratio(m[gidx_flat])

    starts: list[np.ndarray] = [np.ones(n_coarse)]
    if e.p > 1.0:
        dual = pow0(ev.v_flat, -1.0 / (e.p - 1.0))
        dual = np.where(np.isfinite(dual), dual, 0.0)
        proj = np.array([dual[gidx_flat == j].mean() for j in range(n_coarse)])
        top = proj[np.isfinite(proj)].max(initial=0.0)
        if top > 0:
            starts.append(np.where(np.isfinite(proj), proj, top) / top)
    if isinstance(best_tf, TestFunction) and best_tf.kind == "piecewise" \
            and len(best_tf.values) == 1:
        m = np.zeros(n_coarse)
        j = int(np.searchsorted(group_edges, best_tf.edges[0], side="left"))
        m[min(j, n_coarse - 1)] = 1.0
        starts.append(m)
    while len(starts) < n_starts:
        starts.append(10.0 ** rng.uniform(-2.0, 2.0, size=n_coarse))

    remaining = max(budget - ev.evaluations, n_starts)
    per_start = max(remaining // max(len(starts), 1), 16)
    best_m = None
    for m0 in starts:
        if ev.evaluations >= budget:
            break
        val, m, _ = _coordinate_ascent(ratio_of, m0, rng,
                                       min(per_start, budget - ev.evaluations))
        strategies["ascent"] = max(strategies.get("ascent", 0.0), val)
        if val > best and not escalated:
            best, best_m = val, m
    if best_m is not None:
        best_tf = TestFunction(kind="piecewise",
                               edges=tuple(map(float, group_edges)),
                               values=tuple(map(float, best_m)))

    return OracleEstimate(value=best, argmax=best_tf,
                          evaluations=ev.evaluations, grid_size=grid.n_cells,
                          seed=seed, strategy_values=strategies,
                          escalated=escalated)


def _search_monotone(ev: _Evaluator, rng, budget: int, n_coarse: int,
                     n_starts: int, seed: int) -> OracleEstimate:
    grid = ev.grid
    group_idx, group_edges = grid.coarse_partition(n_coarse)
    gidx_flat = np.repeat(group_idx, grid.order)
    strategies: dict[str, float] = {}
    best, best_tf = 0.0, None

    def consider(name, val, tf):
        nonlocal best, best_tf
        strategies[name] = max(strategies.get(name, 0.0), val)
        if val > best:
            best, best_tf = val, tf

    ones = np.ones_like(grid.s_flat)
    consider("flat", ev.ratio_monotone(ones),
             TestFunction(kind="piecewise",
                          edges=(float(grid.interval.a), float(grid.interval.b)),
                          values=(1.0,)))
    for j in range(1, n_coarse):
        x_cut = group_edges[j]
        consider("step", ev.ratio_monotone((grid.flat_nodes >= x_cut).astype(float)),
                 TestFunction(kind="piecewise",
                              edges=(float(x_cut), float(grid.interval.b)),
                              values=(1.0,)))
    for expo in (0.25, 0.5, 1.0, 2.0, 4.0):
        consider("power", ev.ratio_monotone(pow0(grid.s_flat, expo)),
                 TestFunction(kind="power", exponent=expo))

    # ascent over [base level, jump per coarse cell]: F is the nondecreasing
    # staircase c + sum of jumps up to the cell (steps are dense among
    # nondecreasing functions, and keep monotonicity for free)
    def ratio_of(params: np.ndarray) -> float:
        levels = params[0] + np.cumsum(params[1:])
        return ev.ratio_monotone(levels[gidx_flat])

    starts = [np.concatenate([[1.0], np.zeros(n_coarse)]),
              np.concatenate([[0.0], np.ones(n_coarse)])]
    while len(starts) < n_starts:
        starts.append(10.0 ** rng.uniform(-2.0, 2.0, size=n_coarse + 1))

    per_start = max((budget - ev.evaluations) // max(len(starts), 1), 16)
    best_params = None
    for m0 in starts:
        if ev.evaluations >= budget:
            break
        val, m, _ = _coordinate_ascent(ratio_of, m0, rng,
                                       min(per_start, budget - ev.evaluations))
        strategies["ascent"] = max(strategies.get("ascent", 0.0), val)
        if val > best:
            best, best_params = val, m
    if best_params is not None:
        levels = best_params[0] + np.cumsum(best_params[1:])
        best_tf = TestFunction(kind="piecewise",
                               edges=tuple(map(float, group_edges)),
                               values=tuple(map(float, levels)))

    return OracleEstimate(value=best, argmax=best_tf,
                          evaluations=ev.evaluations, grid_size=grid.n_cells,
                          seed=seed, strategy_values=strategies,
                          escalated=False)


# -- sequence-space search -----------------------------------------------------


def discrete_best_constant(kind: str, e: Exponents, u, v,
                           ds: DiscretizingSequence, *, budget: int = 4000,
                           seed: int = 0, local_grid_size: int = 256,
                           order: int = 6) -> OracleEstimate:
    """Maximize one of the two sequence-space inequality ratios.

    kind "Bk": (sum_k 2^{-k} a_k^r B(x_{k-1}, x_k)^r)^{1/r} over the
    unweighted (sum a_k^p)^{1/p}; kind "Vp": the discrete Hardy form
    (sum_k 2^{-k} (int_{x_k}^{x_{k+1}} u)^{r/q}
    (sum_{j<=k} a_j V_p(x_{j-1}, x_j))^r)^{1/r} over the same norm.
    Both sums run over the sequence indices k = N+1, ..., and the best
    constants are the discrete condition constants of the matching regime.
    """
    e.require_iterated()
    kind = kind.lower()
    if kind not in ("bk", "vp"):
        raise ValueError(f"unknown discrete inequality kind {kind!r}")
    p, q, r = e.p, e.q, e.r
    xs = np.asarray(ds.points, dtype=float)
    ks = np.asarray(ds.indices, dtype=float)
    rng = np.random.default_rng(seed)

    if kind == "bk":
        b_loc = np.array([
            local_hardy_constant(e, u, v, float(xs[j - 1]), float(xs[j]),
                                 grid_size=local_grid_size, order=order)
            for j in range(1, len(xs))])
        coef = pow0(2.0, -ks[1:]) * pow0(b_loc, r)      # k = N+1 .. K

        def ratio_of(a: np.ndarray) -> float:
            num = _lp_sum(mul0(coef, pow0(a, r)), 1.0 / r)
            den = _lp_sum(pow0(a, p), 1.0 / p)
            val = float(div0(num, den))
            return INF if val > RATIO_CAP else val
        n_par = len(coef)
    else:
        from .measure import integrate
        u_mass = np.array([integrate(u, float(xs[j]), float(xs[j + 1]))
                           for j in range(1, len(xs) - 1)])
        d_seq = pow0(2.0, -ks[1:-1]) * pow0(u_mass, r / q)   # k = N+1 .. K-1
        sig = np.array([vp_of(v, p, float(xs[j - 1]), float(xs[j]))
                        for j in range(1, len(xs) - 1)])

        def ratio_of(a: np.ndarray) -> float:
            partial = np.cumsum(mul0(a, sig))
            num = _lp_sum(mul0(d_seq, pow0(partial, r)), 1.0 / r)
            den = _lp_sum(pow0(a, p), 1.0 / p)
            val = float(div0(num, den))
            return INF if val > RATIO_CAP else val
        n_par = len(d_seq)

    evaluations = 0

    def counted(a: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return ratio_of(np.asarray(a, dtype=float))

    strategies: dict[str, float] = {}
    best, best_a = 0.0, np.zeros(n_par)

    def consider(name, val, a):
        nonlocal best, best_a
        strategies[name] = max(strategies.get(name, 0.0), val)
        if val > best:
            best, best_a = val, np.asarray(a, dtype=float).copy()

    if n_par == 0:
        return OracleEstimate(value=0.0, argmax=None, evaluations=0,
                              grid_size=n_par, seed=seed,
                              strategy_values={}, escalated=False)

    for j in range(n_par):
        a = np.zeros(n_par)
        a[j] = 1.0
        consider("unit", counted(a), a)
    idx = np.arange(n_par, dtype=float)
    for g in (2.0 ** (-idx / p), 2.0 ** (-idx / r), np.ones(n_par),
              2.0 ** (idx / p)):
        consider("geometric", counted(g), g)
    if p > r and kind == "bk":
        # exact Lagrange profile for the weighted l^r vs l^p trade-off
        a = pow0(coef, 1.0 / (p - r))
        a = np.where(np.isfinite(a), a, 0.0)
        if a.max() > 0:
            consider("holder", counted(a / a.max()), a / a.max())

    per_start = max((budget - evaluations) // 6, 16)
    starts = [best_a.copy() if best_a.max() > 0 else np.ones(n_par),
              np.ones(n_par)]
    while len(starts) < 6:
        starts.append(10.0 ** rng.uniform(-2.0, 2.0, size=n_par))
    for m0 in starts:
        if evaluations >= budget:
            break
        val, m, _ = _coordinate_ascent(counted, m0, rng,
                                       min(per_start, budget - evaluations))
        consider("ascent", val, m)

    seq_edges = xs if kind == "bk" else xs[:-1]
    tf = TestFunction(kind="piecewise", edges=tuple(map(float, seq_edges)),
                      values=tuple(map(float, best_a)))
    return OracleEstimate(value=best, argmax=tf, evaluations=evaluations,
                          grid_size=n_par, seed=seed,
                          strategy_values=strategies, escalated=False)


def _lp_sum(terms: np.ndarray, outer: float) -> float:
    total = INF if np.isinf(terms).any() else float(np.sum(terms))
    return float(pow0(total, outer))
