"""Shared integration grid for nested weighted operators.

Every characterization constant and every oracle ratio is built from
cumulatives of products like f, F**q * u, or tails of w.  Evaluating each of
those with independent adaptive quadrature would be hopelessly slow inside a
coordinate-ascent search, so one `CellGrid` per problem carries everything:

* cells: a uniform partition of the (reparametrized) interval plus dyadic
  ladders at both endpoints -- `ladder_depth` cells whose widths halve down
  to 2**(1-ladder_depth) of a uniform cell, so integrable endpoint
  singularities are resolved and test functions can concentrate arbitrarily
  close to an endpoint;

* per-cell Gauss-Legendre nodes with a spectral in-cell integration matrix,
  giving node-level partial integrals (exact on polynomials of degree below
  the node count) on top of exact prefix sums over cell masses;

* geometric extrapolation of the two innermost cell masses: on a dyadic
  ladder the shell masses of any endpoint power behavior form a geometric
  sequence, so the unresolved mass below the innermost resolved shell is
  m1 * rho / (1 - rho) with rho = m1/m2 -- exact for pure powers, and a
  persistent rho >= RHO_DIVERGENT flags the cumulative as +inf (this is how
  a non-integrable dual weight v**(-1/(p-1)) is detected without knowing
  its exponent).

Infinite endpoints are handled by the same reparametrizations as in
`quadrature`, with the Jacobian folded into the node weights.
"""

from __future__ import annotations

import math

import numpy as np

from .extreal import INF
from .measure import Interval, Weight
from .quadrature import gauss_rule

RHO_DIVERGENT = 0.97
_CONSISTENT = (0.75, 4.0 / 3.0)


def _legendre_partial_matrix(order: int) -> np.ndarray:
    """M with (M @ g_nodes)[m] ~= integral of g from -1 to node m (weight 1 scale)."""
    from numpy.polynomial import legendre as L

    xi, _ = gauss_rule(order)
    V = L.legvander(xi, order - 1)
    A = np.empty((order, order))
    for i in range(order):
        e = np.zeros(order)
        e[i] = 1.0
        A[:, i] = L.legval(xi, L.legint(e, lbnd=-1))
    return A @ np.linalg.inv(V)


class CellGrid:
    """Graded Gauss grid on an open interval with prefix-sum cumulatives."""

    def __init__(self, interval: Interval, n_cells: int = 1024, order: int = 8,
                 ladder_depth: int = 40):
        if n_cells < 2 * ladder_depth + 8:
            ladder_depth = max(2, (n_cells - 8) // 2)
        self.interval = interval
        self.n_cells = n_cells
        self.order = order
        self.ladder_depth = ladder_depth

        m_uniform = n_cells - 2 * ladder_depth + 2
        h = 1.0 / m_uniform
        lad = h * 2.0 ** (-np.arange(ladder_depth - 1, -1, -1, dtype=float))
        left = np.concatenate([[0.0], lad])                    # 0 .. h
        mid = h * np.arange(2.0, m_uniform - 1.0)              # 2h .. 1-2h
        right = 1.0 - left[::-1]                               # 1-h .. 1
        s_edges = np.concatenate([left, mid, right])
        assert len(s_edges) == n_cells + 1
        # exact mirror of s_edges: the distance to the right endpoint.  Deep
        # right-ladder cells are below float spacing at 1.0, so 1 - s is
        # useless there; every map below reads whichever of (s, c) is exact.
        c_edges = s_edges[::-1].copy()

        xi, gw = gauss_rule(order)
        s_half = 0.5 * (c_edges[:-1] - c_edges[1:])
        s_half[: n_cells // 2] = 0.5 * np.diff(s_edges)[: n_cells // 2]
        s_mid = s_edges[:-1] + s_half
        c_mid = c_edges[1:] + s_half
        s_nodes = s_mid[:, None] + s_half[:, None] * xi[None, :]
        c_nodes = c_mid[:, None] - s_half[:, None] * xi[None, :]
        self._s_half = s_half

        a, b = interval.a, interval.b
        left_n = s_nodes <= 0.5
        left_e = s_edges <= 0.5
        if interval.finite:
            self.nodes = np.where(left_n, a + (b - a) * s_nodes, b - (b - a) * c_nodes)
            self.edges = np.where(left_e, a + (b - a) * s_edges, b - (b - a) * c_edges)
            jac = np.full_like(s_nodes, b - a)
        elif math.isfinite(a):
            self.nodes = a + s_nodes / c_nodes
            with np.errstate(divide="ignore"):
                self.edges = np.where(c_edges > 0.0, a + s_edges / c_edges, INF)
            jac = c_nodes**-2.0
        elif math.isfinite(b):
            self.nodes = b - c_nodes / s_nodes
            with np.errstate(divide="ignore"):
                self.edges = np.where(s_edges > 0.0, b - c_edges / s_edges, -INF)
            jac = s_nodes**-2.0
        else:
            with np.errstate(divide="ignore"):
                self.nodes = np.where(left_n, -1.0 / np.tan(np.pi * s_nodes),
                                      1.0 / np.tan(np.pi * c_nodes))
                tan_e = np.where(left_e, -1.0 / np.tan(np.pi * s_edges),
                                 1.0 / np.tan(np.pi * c_edges))
            tan_e[0], tan_e[-1] = -INF, INF
            self.edges = tan_e
            jac = np.pi / np.where(left_n, np.sin(np.pi * s_nodes),
                                   np.sin(np.pi * c_nodes)) ** 2
        self._jac = jac
        self.wts = gw[None, :] * s_half[:, None] * jac        # node quadrature weights
        self.flat_nodes = self.nodes.ravel()
        self.s_edges = s_edges
        self.c_edges = c_edges
        self.s_flat = s_nodes.ravel()
        self.c_flat = c_nodes.ravel()
        self._partial_op = _legendre_partial_matrix(order)

    # -- evaluation helpers -------------------------------------------------

    def node_values(self, fn) -> np.ndarray:
        """Evaluate a weight/callable at all nodes, (n_cells, order), nan -> 0."""
        f = fn.values if isinstance(fn, Weight) else fn
        vals = np.asarray(f(self.flat_nodes), dtype=float).reshape(self.nodes.shape)
        return np.where(np.isnan(vals), 0.0, vals)

    def edges_to_nodes(self, edge_vals: np.ndarray) -> np.ndarray:
        """Interpolate per-edge values to node resolution (monotone data)."""
        finite_edges = np.clip(self.edges, -1e300, 1e300)
        out = np.interp(self.flat_nodes, finite_edges, np.clip(edge_vals, 0.0, 1e300))
        big = np.interp(self.flat_nodes, finite_edges,
                        np.where(np.isinf(edge_vals), 1.0, 0.0))
        out = np.where(big > 0.0, INF, out)
        return out.reshape(self.nodes.shape)

    # -- cumulatives --------------------------------------------------------

    def _raw_masses(self, g_nodes: np.ndarray) -> np.ndarray:
        raw = np.einsum("ik,ik->i", g_nodes, self.wts)
        return np.where(np.isnan(raw), INF, raw)  # nan only from inf * finite weights

    def cell_masses(self, g_nodes: np.ndarray, raw: np.ndarray | None = None,
                    divergence_to_inf: bool = True):
        """Per-cell integrals with innermost-cell extrapolation.

        Returns (masses, left_divergent, right_divergent); a divergent flag
        means the integral over any neighborhood of that endpoint is +inf.
        With `divergence_to_inf` the corresponding innermost mass is set to
        +inf; without it the raw Gauss mass is kept, which callers use when
        the cumulative only ever enters through differences (so a
        non-integrable endpoint of the *other* factor stays representable).
        """
        if raw is None:
            raw = self._raw_masses(g_nodes)
        masses = raw.copy()
        left_div = self._fix_innermost(masses, 0, 1, 2, 3, divergence_to_inf)
        right_div = self._fix_innermost(masses, -1, -2, -3, -4, divergence_to_inf)
        return masses, left_div, right_div

    def _fix_innermost(self, masses, i0, i1, i2, i3, to_inf: bool) -> bool:
        m1, m2, m3 = masses[i1], masses[i2], masses[i3]
        if not (np.isfinite(m1) and m2 > 0 and m3 > 0 and np.isfinite(m2) and np.isfinite(m3)):
            if np.isinf(m1) or np.isinf(m2):
                if to_inf:
                    masses[i0] = INF
                return True
            return False
        rho1, rho2 = m1 / m2, m2 / m3
        if not (_CONSISTENT[0] <= rho1 / rho2 <= _CONSISTENT[1]):
            return False
        if rho1 >= RHO_DIVERGENT:
            if to_inf:
                masses[i0] = INF
            return True
        if m1 > 0:
            masses[i0] = m1 * rho1 / (1.0 - rho1)
        return False

    def _node_partials(self, g_nodes, masses, raw_masses):
        """In-cell partial integrals from the left edge to each node."""
        gjac = g_nodes * self._jac
        gjac = np.where(np.isnan(gjac), 0.0, gjac)
        finite = np.isfinite(gjac)
        part = self._s_half[:, None] * (np.where(finite, gjac, 0.0) @ self._partial_op.T)
        part = np.maximum.accumulate(np.clip(part, 0.0, None), axis=1)
        # rescale the extrapolated innermost cells so partials match the mass
        for idx in (0, self.n_cells - 1):
            raw, m = raw_masses[idx], masses[idx]
            if np.isfinite(m) and m != raw and raw > 0:
                part[idx] *= m / raw
        finite_mass = np.where(np.isfinite(masses), masses, np.inf)
        part = np.minimum(part, finite_mass[:, None])
        # nodes at/after an infinite value inside the cell
        inf_seen = np.cumsum(~finite, axis=1) > 0
        part = np.where(inf_seen, INF, part)
        return part

    def cumulative_left(self, g_nodes: np.ndarray, divergence_to_inf: bool = True):
        """(edge_cums, node_cums) of the running integral from the left endpoint."""
        raw = self._raw_masses(g_nodes)
        masses, left_div, _ = self.cell_masses(g_nodes, raw, divergence_to_inf)
        edge = np.concatenate([[0.0], np.cumsum(masses)])
        part = self._node_partials(g_nodes, masses, raw)
        node = edge[:-1, None] + part
        if left_div and divergence_to_inf:
            node[0] = INF
        return edge, node

    def cumulative_right(self, g_nodes: np.ndarray, divergence_to_inf: bool = True):
        """(edge_cums, node_cums) of the tail integral up to the right endpoint."""
        raw = self._raw_masses(g_nodes)
        masses, _, right_div = self.cell_masses(g_nodes, raw, divergence_to_inf)
        edge = np.concatenate([np.cumsum(masses[::-1])[::-1], [0.0]])
        part = self._node_partials(g_nodes, masses, raw)
        with np.errstate(invalid="ignore"):
            node = edge[1:, None] + (masses[:, None] - part)
        node = np.where(np.isnan(node), INF, node)   # inf - inf inside a divergent cell
        if right_div and divergence_to_inf:
            node[-1] = INF
        return edge, node

    def total(self, g_nodes: np.ndarray) -> float:
        masses, _, _ = self.cell_masses(g_nodes)
        return float(np.sum(masses)) if np.isfinite(masses).all() else INF

    # -- coarse partition for search parameterizations ----------------------

    def coarse_partition(self, n_groups: int):
        """(group index per cell, physical group edges); groups hold equal cell counts."""
        if self.n_cells % n_groups != 0:
            raise ValueError(f"{n_groups} groups do not divide {self.n_cells} cells")
        per = self.n_cells // n_groups
        idx = np.repeat(np.arange(n_groups), per)
        group_edges = self.edges[::per]
        return idx, group_edges

    def ladder_points_left(self):
        """Physical edges of the left dyadic ladder, deepest first."""
        return self.edges[1:self.ladder_depth + 1]
