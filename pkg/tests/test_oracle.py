import math

import numpy as np
import pytest

from hardylab import (
    Exponents,
    Interval,
    OracleEstimate,
    PowerLaw,
    TestFunction,
    best_constant_search,
    build_discretizing_sequence,
    continuous_constants,
    discrete_best_constant,
    discrete_constants,
    lhs_iterated,
    lhs_kernel_q1,
    monotone_constants,
    monotone_pair_check,
    rhs_norm,
    unit_weight,
)

IV = Interval(0.0, 1.0)
ONE = unit_weight(IV)
E222 = Exponents(2, 2, 2)


def unit_f(t):
    return np.ones_like(t)


def test_lhs_unit_anchor():
    # f = u = w = 1, q = r = 1 on (0,1): int_0^1 int_0^x t dt dx = 1/6
    got = lhs_iterated(unit_f, Exponents(1, 1, 1), ONE, ONE, IV)
    assert got == pytest.approx(1.0 / 6.0, rel=1e-9)


def test_rhs_norm_anchor():
    got = rhs_norm(PowerLaw(1.0, 1.0, 0.0, IV), 2.0, ONE, IV)
    assert got == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-9)


def test_kernel_q1_unit_anchor():
    got = lhs_kernel_q1(unit_f, ONE, ONE, 1.0, IV)
    assert got == pytest.approx(1.0 / 6.0, rel=1e-9)


@pytest.mark.parametrize("r", [0.7, 1.0, 2.0])
def test_kernel_q1_matches_iterated(r):
    rng = np.random.default_rng(7)
    for _ in range(3):
        edges = np.linspace(0.0, 1.0, 9)
        f = TestFunction(kind="piecewise", edges=tuple(edges),
                         values=tuple(rng.uniform(0.0, 2.0, 8)))
        u = PowerLaw(1.0, rng.uniform(0.0, 1.0), 0.0, IV)
        w = PowerLaw(1.0, rng.uniform(-0.4, 1.0), 0.0, IV)
        a = lhs_iterated(f, Exponents(2.0, 1.0, r), u, w, IV)
        b = lhs_kernel_q1(f, u, w, r, IV)
        assert a == pytest.approx(b, rel=1e-6)


def test_monotone_pair_anchor():
    d, fub = monotone_pair_check(unit_f, Exponents(p=1, q=1), ONE, ONE, ONE, IV)
    assert d == pytest.approx(1.0 / 3.0, rel=1e-9)
    assert fub == pytest.approx(1.0 / 3.0, rel=1e-9)


def test_monotone_pair_routes_agree():
    rng = np.random.default_rng(11)
    for _ in range(4):
        h = PowerLaw(rng.uniform(0.5, 2.0), rng.uniform(0.0, 1.5), 0.0, IV)
        e = Exponents(p=rng.uniform(1.0, 3.0), q=rng.uniform(0.5, 3.0))
        v = PowerLaw(1.0, rng.uniform(0.0, 1.0), 0.0, IV)
        d, fub = monotone_pair_check(h, e, ONE, v, ONE, IV)
        assert d == pytest.approx(fub, rel=1e-6)


def test_ratio_is_zero_homogeneous():
    # scaling the test function by a power of two must not move the ratio
    f = TestFunction(kind="piecewise", edges=(0.0, 0.25, 0.5, 1.0),
                     values=(1.0, 0.5, 2.0))
    scaled = TestFunction(kind="piecewise", edges=f.edges,
                          values=tuple(4.0 * x for x in f.values))
    for tf in (f, scaled):
        ratio = lhs_iterated(tf, E222, ONE, ONE, IV) / rhs_norm(tf, 2.0, ONE, IV)
        if tf is f:
            base = ratio
    assert ratio == pytest.approx(base, rel=1e-12)


def test_lhs_monotone_in_f():
    small = TestFunction(kind="spike", center=0.5, width=0.2, height=1.0)
    large = TestFunction(kind="piecewise", edges=(0.0, 1.0), values=(1.0,))
    assert lhs_iterated(small, E222, ONE, ONE, IV) <= \
        lhs_iterated(large, E222, ONE, ONE, IV) * (1.0 + 1e-12)


def test_search_brackets_characterization():
    rep = continuous_constants(E222, ONE, ONE, ONE, IV)
    est = best_constant_search(E222, ONE, ONE, ONE, IV, budget=4000, seed=0)
    assert isinstance(est, OracleEstimate)
    ratio = est.value / rep.combined
    assert 1.0 / 16.0 <= ratio <= 16.0
    assert est.value >= est.structured_value
    assert est.argmax is not None and str(est.argmax)


def test_search_is_deterministic():
    a = best_constant_search(E222, ONE, ONE, ONE, IV, budget=1500, seed=3)
    b = best_constant_search(E222, ONE, ONE, ONE, IV, budget=1500, seed=3)
    assert a.value == b.value
    assert a.evaluations == b.evaluations
    assert str(a.argmax) == str(b.argmax)


def test_escalation_fires_on_nonintegrable_dual():
    # v = x with p = 2: dual 1/x, V_p(0, x) = inf, the true constant is inf
    # but every truncated dual has a finite ratio -- the probe must catch
    # the divergence from the ladder trend
    v = PowerLaw(1.0, 1.0, 0.0, IV)
    est = best_constant_search(E222, ONE, v, ONE, IV, budget=800, seed=0)
    assert est.escalated
    assert est.value == math.inf


def test_no_escalation_on_integrable_dual():
    v = PowerLaw(1.0, 0.5, 0.0, IV)
    est = best_constant_search(E222, ONE, v, ONE, IV, budget=800, seed=0)
    assert not est.escalated
    assert est.value < math.inf
    rep = continuous_constants(E222, ONE, v, ONE, IV)
    assert 1.0 / 16.0 <= est.value / rep.combined <= 16.0


def test_monotone_search_finds_flat_extremal():
    # for unit weights and p = q the constant function is extremal:
    # ratio(1) = (int_0^1 x^q dx)^{1/q} = (q+1)^{-1/q} = 1/sqrt(3)
    est = best_constant_search(Exponents(p=2, q=2), ONE, ONE, ONE, IV,
                               budget=1200, seed=0, family="monotone")
    assert est.value >= 1.0 / math.sqrt(3.0) - 1e-12
    rep = monotone_constants(Exponents(p=2, q=2), ONE, ONE, ONE, IV)
    assert est.value / rep.combined <= 16.0


def test_discrete_search_dominates_unit_vectors():
    ds = build_discretizing_sequence(ONE, IV, k_max=12)
    rep = discrete_constants(E222, ONE, ONE, ds)
    bk = discrete_best_constant("bk", E222, ONE, ONE, ds, budget=600, seed=0)
    vp = discrete_best_constant("vp", E222, ONE, ONE, ds, budget=600, seed=0)
    # the sup-form constants are exactly the best unit-vector ratios, so the
    # searches can never fall below them
    assert bk.value >= rep.constants["A1"] * (1.0 - 1e-12)
    assert vp.value >= rep.constants["B1"] * (1.0 - 1e-12)
    assert bk.value < math.inf and vp.value < math.inf


def test_discrete_search_rejects_unknown_kind():
    ds = build_discretizing_sequence(ONE, IV, k_max=8)
    with pytest.raises(ValueError, match="kind"):
        discrete_best_constant("nope", E222, ONE, ONE, ds, budget=50)


def test_dual_test_function_needs_p_above_one():
    tf = TestFunction(kind="dual", cutoff=0.5)
    with pytest.raises(ValueError, match="p > 1"):
        rhs_norm(tf, 1.0, ONE, IV)


def test_test_function_reprs():
    assert "piecewise" in str(TestFunction(kind="piecewise",
                                           edges=(0.0, 1.0), values=(1.0,)))
    assert "spike" in str(TestFunction(kind="spike", center=0.3, width=0.1))
    assert "power" in str(TestFunction(kind="power", exponent=2.0))
    assert "dual" in str(TestFunction(kind="dual", cutoff=0.5))
