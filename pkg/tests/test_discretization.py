import math

import numpy as np
import pytest

from hardylab import (
    DiscretizationError,
    Interval,
    MonotonicityError,
    NonNegSequence,
    NotGeometricError,
    PiecewiseConstant,
    PowerLaw,
    build_discretizing_sequence,
    lemma_pair,
    unit_weight,
    wstar,
)

IV = Interval(0.0, 1.0)
ONE = unit_weight(IV)


# -- discretizing sequences ----------------------------------------------------


def test_unit_weight_sequence_is_dyadic():
    ds = build_discretizing_sequence(ONE, IV, k_max=20)
    ks = ds.indices
    assert ks[0] == 0 and ks[-1] == 20
    want = 1.0 - 2.0 ** (-ks.astype(float))
    assert np.max(np.abs(ds.points - want)) < 1e-10


def test_wstar_halves_at_each_point():
    w = PowerLaw(1.0, 0.6, 0.3, IV)
    ds = build_discretizing_sequence(w, IV, k_max=14)
    for k, x in zip(ds.indices, ds.points):
        target = wstar(w, 0.0) if k == ds.first_index else 2.0 ** (-float(k))
        assert abs(wstar(w, float(x)) * 2.0**float(k) - 1.0) <= 1e-8 or \
            abs(wstar(w, float(x)) - target) <= 1e-8 * target


def test_first_index_from_total_mass():
    # W*(a) = 2: first index is ceil(-log2 2) = -1 and x_{-1} = a; solving
    # 2(1-x) = 2^{-k} by hand gives x_k = 1 - 2^{-k-1} for every k >= 0
    w = PowerLaw(2.0, 0.0, 0.0, IV)
    ds = build_discretizing_sequence(w, IV, k_max=8)
    assert ds.first_index == -1
    assert ds.point(-1) == 0.0
    for k in range(0, 9):
        assert ds.point(k) == pytest.approx(1.0 - 2.0 ** (-k - 1), abs=1e-10)


def test_truncated_sequence_for_infinite_mass():
    iv = Interval(0.0, math.inf)
    w = PowerLaw(1.0, -2.0, 0.0, iv)          # W*(x) = 1/x, infinite at 0
    ds = build_discretizing_sequence(w, iv, k_max=6, k_min=-6)
    assert ds.truncated_start
    assert ds.first_index == -6
    assert ds.points == pytest.approx(2.0 ** ds.indices.astype(float), rel=1e-8)


def test_everywhere_infinite_tail_rejected():
    iv = Interval(0.0, math.inf)
    w = PowerLaw(1.0, 0.0, 0.0, iv)           # W* is infinite at every point
    with pytest.raises(DiscretizationError):
        build_discretizing_sequence(w, iv, k_max=6, k_min=-6)


def test_zero_mass_weight_rejected():
    with pytest.raises(DiscretizationError):
        build_discretizing_sequence(PowerLaw(0.0, 0.0, 0.0, IV), IV, k_max=4)


def test_points_strictly_increase():
    w = PiecewiseConstant((0.0, 0.3, 1.0), (5.0, 0.5))
    ds = build_discretizing_sequence(w, IV, k_max=12)
    assert np.all(np.diff(ds.points) > 0)


# -- comparison lemmas ---------------------------------------------------------


def test_sup_sum_anchor():
    # tau = 2^-k and a = e_1: both sides equal tau_1 a_1
    tau = 2.0 ** -np.arange(1, 6)
    a = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    lhs, rhs = lemma_pair("sup-sum", tau=tau, a=a)
    assert lhs == rhs == 0.5


def test_sum_sum_anchor():
    # alpha = 1, a = e_1: lhs = a_1 * sum(tau) = 2 rhs_term vs rhs = tau_1
    tau = 2.0 ** -np.arange(1, 30)
    a = np.zeros(29)
    a[0] = 1.0
    lhs, rhs = lemma_pair("sum-sum", tau=tau, a=a, alpha=1.0)
    assert rhs == pytest.approx(0.5)
    assert lhs == pytest.approx(sum(tau), rel=1e-12)   # == 2 * rhs (lemma factor)


def test_sum_sup_dominates():
    tau = 2.0 ** -np.arange(1, 8)
    a = np.array([3.0, 1.0, 2.0, 0.5, 0.1, 0.0, 1.0])
    lhs, rhs = lemma_pair("sum-sup", tau=tau, a=a)
    assert lhs >= rhs > 0


def test_tau_must_be_geometric():
    with pytest.raises(NotGeometricError):
        lemma_pair("sup-sum", tau=np.array([1.0, 1.0, 0.5]), a=np.ones(3))
    with pytest.raises(NotGeometricError):
        lemma_pair("sup-sum", tau=np.array([1.0]), a=np.ones(1))


def test_dec_kinds_match_manual_blocks():
    tau = 2.0 ** -np.arange(1, 5)
    xs = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    g = PowerLaw(1.0, 1.0, 0.0, IV)           # integral over (x,y) = (y^2-x^2)/2
    blocks = (xs[1:] ** 2 - xs[:-1] ** 2) / 2.0
    lhs, rhs = lemma_pair("dec-sup-sum", tau=tau, g=g, xs=xs)
    assert rhs == pytest.approx(np.max(tau * blocks), rel=1e-10)
    assert lhs == pytest.approx(np.max(tau * np.cumsum(blocks)), rel=1e-10)


def test_dec_sum_sup_uses_ess_sup():
    tau = 2.0 ** -np.arange(1, 4)
    xs = np.array([0.0, 0.5, 0.75, 1.0])
    g = PowerLaw(1.0, 1.0, 0.0, IV)            # nondecreasing, sup = right edge
    lhs, rhs = lemma_pair("dec-sum-sup", tau=tau, g=g, xs=xs)
    assert rhs == pytest.approx(float(np.sum(tau * xs[1:])), rel=1e-4)
    assert lhs == pytest.approx(float(np.sum(tau * xs[1:])), rel=1e-4)


def test_three_term_kinds():
    tau = 2.0 ** -np.arange(1, 6)
    xs = np.linspace(0.0, 1.0, 6)
    sigma = np.linspace(0.5, 2.0, 5)
    g = ONE
    lhs_sup, rhs_sup = lemma_pair("3-sup", tau=tau, g=g, xs=xs, sigma=sigma, alpha=1.5)
    lhs_sum, rhs_sum = lemma_pair("3-sum", tau=tau, g=g, xs=xs, sigma=sigma, alpha=1.5)
    assert lhs_sup >= rhs_sup > 0
    assert lhs_sum >= rhs_sum > 0
    with pytest.raises(MonotonicityError):
        lemma_pair("3-sup", tau=tau, g=g, xs=xs, sigma=sigma[::-1], alpha=1.5)


def test_int_equiv_unit_anchor():
    # w = 1 on (0,1), alpha = 0, h = 1: lhs = integral of w = 1 and
    # rhs = sum 2^-k over k >= 1 -> 1
    ds = build_discretizing_sequence(ONE, IV, k_max=30)
    lhs, rhs = lemma_pair("int-equiv", ds=ds, h=lambda t: np.ones_like(np.asarray(t)),
                          w=ONE, alpha=0.0)
    assert lhs == pytest.approx(1.0, rel=1e-8)
    assert rhs == pytest.approx(1.0, rel=1e-8)


def test_sup_equiv_unit_anchor():
    ds = build_discretizing_sequence(ONE, IV, k_max=16)
    lhs, rhs = lemma_pair("sup-equiv", ds=ds, h=lambda t: np.ones_like(np.asarray(t)),
                          alpha=1.0)
    # sup of W*(x)^1 over (0,1) = 1 at x=0+; discrete side sup 2^-k = 1/2
    assert lhs == pytest.approx(1.0, rel=1e-3)
    assert rhs == pytest.approx(0.5, rel=1e-12)


def test_h_must_be_nondecreasing():
    ds = build_discretizing_sequence(ONE, IV, k_max=8)
    with pytest.raises(MonotonicityError):
        lemma_pair("sup-equiv", ds=ds, h=lambda t: 1.0 - np.asarray(t), alpha=1.0)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        lemma_pair("bogus", tau=np.array([1.0, 0.5]), a=np.ones(2))


def test_nonneg_sequence_validation():
    seq = NonNegSequence((1.0, 0.0, 2.0))
    assert seq.array.tolist() == [1.0, 0.0, 2.0]
    with pytest.raises(ValueError):
        NonNegSequence((1.0, -0.5))
