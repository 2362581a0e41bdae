import math

import numpy as np
import pytest

from hardylab.quadrature import gauss_rule, integrate_callable


def test_gauss_rule_exact_for_polynomials():
    xi, w = gauss_rule(6)
    # degree up to 2*6 - 1 on [-1, 1]
    for deg in range(0, 12):
        est = float(np.sum(w * xi**deg))
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert est == pytest.approx(exact, abs=1e-14)


def test_smooth_integral():
    assert integrate_callable(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-10)


def test_integrable_endpoint_singularity():
    got = integrate_callable(lambda t: t**-0.5, 0.0, 1.0)
    assert got == pytest.approx(2.0, rel=1e-7)


def test_singularity_at_right_endpoint():
    got = integrate_callable(lambda t: (1.0 - t) ** -0.25, 0.0, 1.0)
    assert got == pytest.approx(4.0 / 3.0, rel=1e-7)


def test_divergent_endpoint():
    assert integrate_callable(lambda t: 1.0 / t, 0.0, 1.0) == math.inf


def test_near_divergent_power_is_extrapolated():
    # shell masses decay by 2^-0.01 per level; the geometric tail sum is exact
    assert integrate_callable(lambda t: t**-0.99, 0.0, 1e6) == pytest.approx(
        (1e6) ** 0.01 / 0.01, rel=1e-8)


def test_half_line_gaussian():
    got = integrate_callable(lambda t: np.exp(-t * t), 0.0, math.inf)
    assert got == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-8)


def test_whole_line_cauchy():
    got = integrate_callable(lambda t: 1.0 / (1.0 + t * t), -math.inf, math.inf)
    assert got == pytest.approx(math.pi, rel=1e-8)


def test_divergent_tail():
    assert integrate_callable(lambda t: 1.0 / (1.0 + t), 0.0, math.inf) == math.inf


def test_empty_interval():
    assert integrate_callable(np.exp, 2.0, 2.0) == 0.0
    with pytest.raises(ValueError):
        integrate_callable(np.exp, 3.0, 2.0)
