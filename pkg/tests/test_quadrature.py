from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import beta, betainc, betaincc

from starnls.params import DomainError
from starnls.quadrature import (IntegralParams, integral_I, integral_I_log, power_integral,
                                sech_power_tail)


def incomplete_beta_I(p, x):
    """I(x) through the regularised incomplete beta function (s^2 = u substitution)."""
    e = (4.0 - p) / (p - 2.0)
    return 0.5 * beta(0.5, e + 1.0) * betaincc(0.5, e + 1.0, x * x)


@pytest.mark.parametrize("p, lower, expected", [
    (4, 0.25, 0.75),
    (6, 0.5, math.pi / 3),
    (3, 0.0, 2.0 / 3.0),
    (3.7, 1.0, 0.0),
])
def test_integral_I_examples(p, lower, expected):
    assert integral_I(p, lower) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("p, closed", [
    (3, lambda x: (1 - x) - (1 - x ** 3) / 3),
    (4, lambda x: 1 - x),
    (6, lambda x: math.pi / 2 - math.asin(x)),
])
def test_closed_forms_on_grid(p, closed):
    for x in np.linspace(0, 1, 100):
        assert abs(integral_I(p, x) - closed(x)) <= 1e-12


@given(p=st.floats(2.01, 6.0), x=st.floats(0.0, 1.0))
def test_matches_incomplete_beta(p, x):
    assert integral_I(p, x) == pytest.approx(incomplete_beta_I(p, x), abs=2e-12, rel=1e-10)


@given(p=st.floats(2.05, 6.0), a=st.floats(0.0, 0.999), b=st.floats(0.0, 0.999))
def test_strictly_decreasing_in_lower(p, a, b):
    lo, hi = sorted((a, b))
    if hi - lo > 1e-6:
        assert integral_I(p, lo) > integral_I(p, hi)


def test_tolerance_refinement_is_stable():
    for p in (2.5, 4.5, 5.9):
        for x in (0.0, 0.4, 0.95):
            coarse = integral_I(p, x, abs_tol=1e-8)
            fine = integral_I(p, x, abs_tol=5e-9)
            assert abs(coarse - fine) <= 1e-8


def test_log_integral_examples():
    assert integral_I_log(6, 0, 1) == pytest.approx(-math.pi * math.log(2), abs=1e-12)
    assert integral_I_log(4, 0, 1) == pytest.approx(2 * math.log(2) - 2, abs=1e-12)
    assert integral_I_log(3.3, 0.4, 0.4) == 0.0


@pytest.mark.parametrize("p", [2.2, 3.0, 4.5, 5.5])
@pytest.mark.parametrize("lower, upper", [(0.0, 1.0), (0.2, 0.9), (0.6, 1.0)])
def test_log_integral_against_mpmath(p, lower, upper):
    e = mpmath.mpf(4 - p) / (p - 2)
    mpmath.mp.dps = 30
    ref = mpmath.quad(lambda s: (1 - s * s) ** e * mpmath.log(1 - s * s), [lower, upper])
    assert integral_I_log(p, lower, upper) == pytest.approx(float(ref), abs=1e-11)


@given(p=st.floats(2.05, 6.0), a=st.floats(0.0, 1.0), b=st.floats(0.0, 1.0))
def test_log_integral_non_positive(p, a, b):
    lo, hi = sorted((a, b))
    assert integral_I_log(p, lo, hi) <= 0.0


def test_power_integral_symmetric_limits():
    # even integrand: [-x, 1] = I(0) + (I(0) - I(x))
    for p in (3.0, 5.0):
        k = (4 - p) / (p - 2)
        assert power_integral(k, -0.3) == pytest.approx(
            2 * integral_I(p, 0) - integral_I(p, 0.3), abs=1e-12)


@given(k=st.floats(0.3, 12.0), w=st.floats(-8.0, 25.0))
def test_sech_power_tail_against_incomplete_beta(k, w):
    # int_w^inf sech^k = 1/2 B(k/2, 1/2) I_{sech^2 w}(k/2, 1/2) for w >= 0
    def ref(v):
        return 0.5 * beta(k / 2, 0.5) * betainc(k / 2, 0.5, 1.0 / math.cosh(v) ** 2)
    expected = ref(w) if w >= 0 else 2 * ref(0.0) - ref(-w)
    assert sech_power_tail(k, w) == pytest.approx(expected, rel=1e-11, abs=1e-300)


@pytest.mark.parametrize("kwargs", [dict(p=2.0), dict(p=6.1), dict(p=4, lower=-0.1),
                                    dict(p=4, lower=1.5), dict(p=4, abs_tol=0)])
def test_domain_errors(kwargs):
    with pytest.raises(DomainError):
        IntegralParams(**kwargs)


def test_log_integral_domain_errors():
    with pytest.raises(DomainError):
        integral_I_log(4, 0.5, 0.2)
    with pytest.raises(DomainError):
        integral_I_log(6.5, 0, 1)
