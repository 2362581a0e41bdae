"""Extended nonnegative reals with measure-theoretic conventions.

Every quantity in this package (weights, integrals, norms, characterization
constants) lives in [0, +inf].  Products, quotients and powers of such
quantities follow the conventions that make weighted-norm formulas
well-defined without case analysis at degeneracies:

    0 * inf = 0          0 / 0 = 0           inf / inf = 0
    x / 0   = +inf (x > 0)                   x / inf   = 0  (x finite)
    0 ** e  = +inf (e < 0),  0 (e > 0)       inf ** e  = 0 (e < 0), inf (e > 0)

so e.g. a dual norm (integral of v**(-1/(p-1))) over a region where v
vanishes is +inf, and a ratio whose numerator and denominator both diverge
counts as 0 (such a test function is not an admissible witness).

All helpers accept floats or numpy arrays and never emit nan for
nonnegative inputs.
"""

from __future__ import annotations

import numpy as np

INF = float("inf")


def mul0(a, b):
    """Product with the convention 0 * inf = 0."""
    with np.errstate(invalid="ignore", over="ignore"):
        out = np.multiply(a, b)
    zero = (np.asarray(a) == 0.0) | (np.asarray(b) == 0.0)
    out = np.where(zero, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def div0(a, b):
    """Quotient of nonnegative extended reals: 0/0 = inf/inf = x/inf = 0, x/0 = +inf for x > 0."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.divide(a, b)
    out = np.where((a == 0.0) | np.isinf(b), 0.0, out)
    out = np.where((a > 0.0) & (b == 0.0), INF, out)
    out = np.where(np.isinf(a) & np.isfinite(b), INF, out)
    out = np.where(np.isinf(a) & np.isinf(b), 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def pow0(x, e):
    """x ** e for x in [0, inf] with 0**neg = +inf, inf**neg = 0 and 0**0 = inf**0 = 1."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = np.power(x, e)
    if np.ndim(e) == 0:
        if e == 0:
            out = np.where(x >= 0.0, 1.0, out)
        elif e < 0:
            out = np.where(x == 0.0, INF, out)
            out = np.where(np.isinf(x), 0.0, out)
        else:
            out = np.where(x == 0.0, 0.0, out)
            out = np.where(np.isinf(x), INF, out)
    else:  # pragma: no cover - array exponents are not used in hot paths
        e = np.asarray(e, dtype=float)
        out = np.where(e == 0, 1.0, out)
        out = np.where((x == 0.0) & (e < 0), INF, out)
        out = np.where(np.isinf(x) & (e < 0), 0.0, out)
        out = np.where((x == 0.0) & (e > 0), 0.0, out)
        out = np.where(np.isinf(x) & (e > 0), INF, out)
    return float(out) if np.ndim(out) == 0 else out


def nn_sum(values) -> float:
    """Sum of nonnegative extended reals (any +inf term makes the sum +inf)."""
    values = np.asarray(values, dtype=float)
    if np.isinf(values).any():
        return INF
    return float(values.sum())
