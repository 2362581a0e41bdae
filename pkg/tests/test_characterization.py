import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardylab import (
    Exponents,
    ExponentError,
    Interval,
    PowerLaw,
    Regime,
    TruncationDominatedError,
    build_discretizing_sequence,
    classify,
    continuous_constants,
    discrete_constants,
    local_hardy_constant,
    monotone_constants,
    unit_weight,
)

IV = Interval(0.0, 1.0)
ONE = unit_weight(IV)

# closed forms for unit weights on (0, 1), computed by hand from the
# defining integrals (suprema maximized analytically)
C1_222 = math.sqrt(2.0 / 27.0)
C2_221 = math.sqrt(1.0 / 48.0)
C3_221 = math.sqrt(math.pi / (96.0 * math.sqrt(3.0)))
C1_212 = 3.0 / 16.0
C4_212 = math.sqrt(27.0 / 1536.0)
C3_211 = math.sqrt(1.0 / 240.0)
C5_211 = math.sqrt(1.0 / 120.0)


def test_classify_partitions_exponent_space():
    assert classify(Exponents(2, 2, 2)) is Regime.I     # p <= q, p <= r
    assert classify(Exponents(2, 2, 1)) is Regime.II    # r < p <= q
    assert classify(Exponents(2, 1, 2)) is Regime.III   # q < p <= r
    assert classify(Exponents(2, 1, 1)) is Regime.IV    # q < p, r < p
    assert classify(Exponents(1, 1, 1)) is Regime.I


@given(st.floats(min_value=1.0, max_value=5.0),
       st.floats(min_value=0.2, max_value=5.0),
       st.floats(min_value=0.2, max_value=5.0))
def test_classify_total(p, q, r):
    regime = classify(Exponents(p, q, r))
    assert regime in (Regime.I, Regime.II, Regime.III, Regime.IV)
    assert (regime in (Regime.I, Regime.II)) == (p <= q)
    assert (regime in (Regime.I, Regime.III)) == (p <= r)


def test_regime_i_anchor():
    rep = continuous_constants(Exponents(2, 2, 2), ONE, ONE, ONE, IV)
    assert rep.regime is Regime.I
    assert set(rep.constants) == {"C1"}
    assert rep.constants["C1"] == pytest.approx(C1_222, rel=1e-6)
    assert rep.finite


def test_regime_ii_anchor():
    rep = continuous_constants(Exponents(2, 2, 1), ONE, ONE, ONE, IV)
    assert rep.regime is Regime.II
    assert set(rep.constants) == {"C2", "C3"}
    assert rep.constants["C2"] == pytest.approx(C2_221, rel=1e-4)
    assert rep.constants["C3"] == pytest.approx(C3_221, rel=1e-4)


def test_regime_iii_anchor():
    rep = continuous_constants(Exponents(2, 1, 2), ONE, ONE, ONE, IV)
    assert rep.regime is Regime.III
    assert set(rep.constants) == {"C1", "C4"}
    assert rep.constants["C1"] == pytest.approx(C1_212, rel=1e-6)
    assert rep.constants["C4"] == pytest.approx(C4_212, rel=1e-6)


def test_regime_iv_anchor():
    rep = continuous_constants(Exponents(2, 1, 1), ONE, ONE, ONE, IV)
    assert rep.regime is Regime.IV
    assert set(rep.constants) == {"C3", "C5"}
    assert rep.constants["C3"] == pytest.approx(C3_211, rel=1e-4)
    assert rep.constants["C5"] == pytest.approx(C5_211, rel=1e-4)


def test_p1_anchor():
    # V_1 = sup 1/v = 1, so C1 = sup_x (integral of (t-x) over (x,1))^1 = 1/2
    rep = continuous_constants(Exponents(1, 1, 1), ONE, ONE, ONE, IV)
    assert rep.constants["C1"] == pytest.approx(0.5, rel=1e-6)


def test_p_below_one_rejected():
    with pytest.raises(ExponentError, match="trivial functions"):
        continuous_constants(Exponents(0.5, 1, 1), ONE, ONE, ONE, IV)


def test_monotone_anchor_sup_form():
    rep = monotone_constants(Exponents(p=2, q=2), ONE, ONE, ONE, IV)
    # f == 1 saturates the nondecreasing inequality: calC1 = 1/sqrt(3)
    assert rep.constants["calC1"] == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-9)
    assert rep.family == "monotone"


def test_monotone_anchor_integral_form():
    rep = monotone_constants(Exponents(p=2, q=2), ONE, ONE, ONE, IV)
    # engine runs at (1, 1/2, 1), regime III; calC4^2 = sup_x (1-x) *
    # integral over (0,x) of (x-t)/(1-t) dt = sup (1-x)(x + (1-x)log(1-x))
    x = np.linspace(1e-9, 1.0 - 1e-9, 400001)
    want = math.sqrt(np.max((1.0 - x) * (x + (1.0 - x) * np.log1p(-x))))
    assert rep.constants["calC4"] == pytest.approx(want, rel=1e-5)


def test_infinite_constant_detected():
    # v = x with p = 2: the dual v^{-1/(p-1)} = 1/x is non-integrable at 0
    rep = continuous_constants(Exponents(2, 2, 2), ONE,
                               PowerLaw(1.0, 1.0, 0.0, IV), ONE, IV)
    assert not rep.finite
    assert rep.combined == math.inf


def test_degenerate_zero_weight():
    rep = continuous_constants(Exponents(2, 2, 2), ONE, ONE,
                               PowerLaw(0.0, 0.0, 0.0, IV), IV)
    assert rep.combined == 0.0
    assert rep.finite


def test_half_line_anchor():
    # u = v = 1, w = x^-3 on (0, inf): C1 = sup_x sqrt(x) * (int_x^inf
    # (t-x)^2 t^-3 dt)^(1/2); the inner integral is 1/x at every x, so
    # C1 = 1/sqrt(2) after the r/q-power bookkeeping
    iv = Interval(0.0, math.inf)
    rep = continuous_constants(Exponents(2, 2, 2), unit_weight(iv),
                               unit_weight(iv), PowerLaw(1.0, -3.0, 0.0, iv),
                               iv, grid_size=2048)
    assert rep.constants["C1"] == pytest.approx(1.0 / math.sqrt(2.0), rel=2e-2)


def test_half_line_divergence():
    # w = x^-2: the tail functional grows without bound
    iv = Interval(0.0, math.inf)
    rep = continuous_constants(Exponents(2, 2, 2), unit_weight(iv),
                               unit_weight(iv), PowerLaw(1.0, -2.0, 0.0, iv), iv)
    assert rep.combined == math.inf


def test_left_half_line_infinite_dual():
    # on (-inf, 0) with v = 1 the dual mass V_p(-inf, x) is infinite
    iv = Interval(-math.inf, 0.0)
    rep = continuous_constants(Exponents(2, 2, 2), unit_weight(iv),
                               unit_weight(iv), unit_weight(iv), iv)
    assert rep.combined == math.inf


@pytest.mark.parametrize("pqr,lam,which", [
    ((2.0, 2.0, 2.0), 16.0, "u"),
    ((2.0, 2.0, 2.0), 16.0, "v"),
    ((2.0, 2.0, 2.0), 16.0, "w"),
    ((2.5, 1.5, 0.8), 9.0, "u"),
    ((2.5, 1.5, 0.8), 9.0, "v"),
    ((2.5, 1.5, 0.8), 9.0, "w"),
    ((1.5, 3.0, 0.7), 100.0, "w"),
])
def test_exact_homogeneity(pqr, lam, which):
    p, q, r = pqr
    e = Exponents(p, q, r)
    u = PowerLaw(1.0, 0.5, 0.0, IV)
    v = PowerLaw(1.0, 0.25, 0.0, IV)
    w = PowerLaw(1.0, -0.25, 0.0, IV)
    base = continuous_constants(e, u, v, w, IV, grid_size=256)
    scaled = {"u": (u.scaled(lam), v, w), "v": (u, v.scaled(lam), w),
              "w": (u, v, w.scaled(lam))}[which]
    rep = continuous_constants(e, *scaled, IV, grid_size=256)
    factor = {"u": lam ** (1.0 / q), "v": lam ** (-1.0 / p),
              "w": lam ** (1.0 / r)}[which]
    for name, val in base.constants.items():
        assert rep.constants[name] == pytest.approx(val * factor, rel=1e-10)


def test_local_hardy_closed_forms():
    e22 = Exponents(2, 2, 2)
    got = local_hardy_constant(e22, ONE, ONE, 0.0, 1.0)
    assert got == pytest.approx(0.5, rel=1e-9)          # sup sqrt(t(1-t))
    e21 = Exponents(2, 1, 2)
    got = local_hardy_constant(e21, ONE, ONE, 0.0, 1.0)
    assert got == pytest.approx(math.sqrt(1.0 / 6.0), rel=1e-9)


def test_local_hardy_scales_with_interval():
    e = Exponents(2, 2, 2)
    whole = local_hardy_constant(e, ONE, ONE, 0.0, 1.0)
    half = local_hardy_constant(e, ONE, ONE, 0.0, 0.5)
    assert half == pytest.approx(whole / 2.0, rel=1e-6)


def test_discrete_constants_match_regime():
    ds = build_discretizing_sequence(ONE, IV, k_max=14)
    for pqr, names in [((2, 2, 2), {"A1", "B1"}), ((2, 2, 1), {"A2", "B2"}),
                       ((2, 1, 2), {"A3", "B1"}), ((2, 1, 1), {"A4", "B2"})]:
        rep = discrete_constants(Exponents(*pqr), ONE, ONE, ds)
        assert set(rep.constants) == names, pqr
        assert 0 < rep.combined < math.inf


def test_discrete_vs_continuous_bracket():
    ds = build_discretizing_sequence(ONE, IV, k_max=14)
    drep = discrete_constants(Exponents(2, 2, 2), ONE, ONE, ds)
    crep = continuous_constants(Exponents(2, 2, 2), ONE, ONE, ONE, IV)
    ratio = drep.combined / crep.combined
    assert 1.0 / 256.0 <= ratio <= 256.0


def test_truncation_domination_raises():
    # shallow truncated window of a heavy-tailed weight: the dropped terms
    # carry most of the constant
    iv = Interval(0.0, math.inf)
    w = PowerLaw(1.0, -2.0, 0.0, iv)
    ds = build_discretizing_sequence(w, iv, k_max=3, k_min=-3)
    with pytest.raises(TruncationDominatedError, match="extend the sequence"):
        discrete_constants(Exponents(2, 2, 2), unit_weight(iv),
                           unit_weight(iv), ds)
    rep = discrete_constants(Exponents(2, 2, 2), unit_weight(iv),
                             unit_weight(iv), ds, strict_truncation=False)
    assert rep.diagnostics["head_share_A"] > 0.0 or \
        rep.diagnostics["tail_share_A"] > 0.1


def test_report_string_roundtrip():
    rep = continuous_constants(Exponents(2, 2, 2), ONE, ONE, ONE, IV)
    text = str(rep)
    assert "regime I" in text and "C1=" in text and "finite" in text
