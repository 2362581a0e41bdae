import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardylab import (
    Exponents,
    ExponentError,
    Interval,
    IntervalError,
    PiecewiseConstant,
    PowerLaw,
    Tabulated,
    WeightDomainError,
    ess_sup,
    integrate,
    parse_weight,
    unit_weight,
    vp,
    wstar,
)

IV = Interval(0.0, 1.0)


def test_interval_validation():
    with pytest.raises(IntervalError):
        Interval(1.0, 1.0)
    with pytest.raises(IntervalError):
        Interval(2.0, 1.0)
    assert not Interval(0.0, math.inf).finite


def test_exponents_validation():
    with pytest.raises(ExponentError):
        Exponents(p=0.0, q=1.0, r=1.0)
    with pytest.raises(ExponentError):
        Exponents(p=1.0, q=-1.0, r=1.0)
    with pytest.raises(ExponentError):
        Exponents(p=2.0, q=1.0).require_iterated()
    with pytest.raises(ExponentError, match="trivial functions"):
        Exponents(p=0.5, q=1.0, r=1.0).require_iterated()


def test_powerlaw_closed_form_integral():
    w = PowerLaw(2.0, 0.5, 0.0, IV)
    assert integrate(w, 0.0, 1.0) == pytest.approx(2.0 / 1.5, rel=1e-12)
    assert integrate(w, 0.25, 0.5) == pytest.approx(
        (2.0 / 1.5) * (0.5**1.5 - 0.25**1.5), rel=1e-12)


def test_powerlaw_two_sided():
    w = PowerLaw(1.0, 1.0, 1.0, IV)       # x(1-x), Beta(2,2) = 1/6
    assert integrate(w, 0.0, 1.0) == pytest.approx(1.0 / 6.0, rel=1e-12)


def test_powerlaw_divergence_verdicts():
    assert integrate(PowerLaw(1.0, -1.0, 0.0, IV), 0.0, 1.0) == math.inf
    assert integrate(PowerLaw(1.0, -1.5, 0.0, IV), 0.0, 0.5) == math.inf
    assert integrate(PowerLaw(1.0, 0.0, -1.0, IV), 0.5, 1.0) == math.inf
    # integrable singularities stay finite
    assert integrate(PowerLaw(1.0, -0.5, 0.0, IV), 0.0, 1.0) == pytest.approx(2.0)


def test_powerlaw_against_adaptive_quadrature():
    w = PowerLaw(1.3, -0.4, 0.7, IV)
    exact = integrate(w, 0.0, 1.0)
    adaptive = integrate(w.values, 0.0, 1.0, tol=1e-10)
    assert adaptive == pytest.approx(exact, rel=1e-8)


def test_piecewise_constant_integral():
    w = PiecewiseConstant((0.0, 0.5, 1.0), (2.0, 4.0))
    assert integrate(w, 0.0, 1.0) == pytest.approx(3.0, rel=1e-14)
    assert integrate(w, 0.25, 0.75) == pytest.approx(0.5 + 1.0, rel=1e-14)
    assert w.values(np.array([0.25, 0.75])).tolist() == [2.0, 4.0]


def test_tabulated_linear_interp():
    w = Tabulated((0.0, 0.5, 1.0), (1.0, 2.0, 1.0), "linear", IV)
    assert integrate(w, 0.0, 1.0) == pytest.approx(1.5, rel=1e-12)


def test_wstar_unit_weight():
    one = unit_weight(IV)
    assert wstar(one, 0.25) == pytest.approx(0.75, rel=1e-12)
    assert wstar(one, 1.0) == 0.0


def test_vp_p2_powerlaw():
    # v = 1: V_2(0, x) = sqrt(x)
    one = unit_weight(IV)
    assert vp(one, 2.0, 0.0, 0.49) == pytest.approx(0.7, rel=1e-10)
    # v = x on (0,1), p = 2: dual x^-1 is non-integrable at 0
    assert vp(PowerLaw(1.0, 1.0, 0.0, IV), 2.0, 0.0, 0.5) == math.inf
    # away from the singularity it is finite: integral of 1/x = log
    got = vp(PowerLaw(1.0, 1.0, 0.0, IV), 2.0, 0.25, 0.75)
    assert got == pytest.approx(math.sqrt(math.log(3.0)), rel=1e-9)


def test_vp_general_p():
    # v = 1, p = 3: (integral of 1)^{2/3}
    one = unit_weight(IV)
    assert vp(one, 3.0, 0.0, 0.5) == pytest.approx(0.5 ** (2.0 / 3.0), rel=1e-10)


def test_vp_p1_is_sup_of_reciprocal():
    v = PiecewiseConstant((0.0, 0.5, 1.0), (2.0, 0.25))
    assert vp(v, 1.0, 0.0, 1.0) == pytest.approx(4.0, rel=1e-9)
    assert vp(v, 1.0, 0.0, 0.4) == pytest.approx(0.5, rel=1e-9)
    with pytest.raises(ExponentError):
        vp(v, 0.5, 0.0, 1.0)


def test_vp_empty_interval_is_zero():
    assert vp(unit_weight(IV), 2.0, 0.3, 0.3) == 0.0


def test_ess_sup_ignores_isolated_spike_location():
    v = PowerLaw(1.0, 2.0, 0.0, IV)       # x^2, sup on (0, 1/2) is 1/4
    assert ess_sup(v, 0.0, 0.5) == pytest.approx(0.25, rel=1e-6)


def test_ess_sup_endpoint_blowup():
    assert ess_sup(PowerLaw(1.0, -0.5, 0.0, IV), 0.0, 1.0) == math.inf


def test_parse_weight_roundtrip():
    w = parse_weight("powerlaw 2 0.5 0", IV)
    assert isinstance(w, PowerLaw) and w.c == 2.0 and w.alpha == 0.5
    pw = parse_weight("piecewise 0 1 0.5 3 1", IV)
    assert isinstance(pw, PiecewiseConstant)
    with pytest.raises(WeightDomainError):
        parse_weight("powerlaw 1", IV)
    with pytest.raises(WeightDomainError):
        parse_weight("mystery 1 2 3", IV)


def test_integrate_rejects_out_of_domain():
    with pytest.raises(IntervalError):
        integrate(unit_weight(IV), -1.0, 0.5)


@given(st.floats(min_value=-0.9, max_value=2.0),
       st.floats(min_value=0.05, max_value=0.95))
@settings(max_examples=25, deadline=None)
def test_wstar_monotone_in_t(alpha, t):
    w = PowerLaw(1.0, alpha, 0.0, IV)
    assert wstar(w, t) <= wstar(w, t / 2.0) + 1e-12


@given(st.floats(min_value=1.0, max_value=4.0),
       st.floats(min_value=0.1, max_value=0.5),
       st.floats(min_value=0.55, max_value=0.95))
@settings(max_examples=25, deadline=None)
def test_vp_superadditive_pieces(p, x, y):
    # V_p(0,x) and V_p(x,y) are both below V_p(0,y) (monotone in the interval)
    v = PowerLaw(1.0, 0.25, 0.0, IV)
    whole = vp(v, p, 0.0, y)
    assert vp(v, p, 0.0, x) <= whole + 1e-12
    assert vp(v, p, x, y) <= whole + 1e-12
