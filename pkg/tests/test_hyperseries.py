import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singhelm.errors import ConvergenceError, DomainError
from singhelm.hyperseries import (
    CompensatedSum,
    Path,
    SeriesOptions,
    gauss_2f1,
    gauss_closed_form,
    hyp0f1_array,
    hyp2f1_array,
    hyp_0f1,
    pochhammer,
)

import oracles

reals = st.floats(-6.0, 6.0, allow_nan=False).filter(lambda v: abs(v - round(v)) > 1e-3)


# ---------------------------------------------------------------- pochhammer


@pytest.mark.parametrize("a, m, expected", [(2.7, 0, 1.0), (1.0, 5, 120.0), (3.0, -2, 0.5),
                                            (0.5, 3, 1.875), (-1.5, 2, 0.75)])
def test_pochhammer_examples(a, m, expected):
    assert pochhammer(a, m) == pytest.approx(expected, rel=1e-15)


def test_pochhammer_negative_index_pole():
    with pytest.raises(DomainError):
        pochhammer(2.0, -3)


def test_pochhammer_rejects_fractional_index():
    with pytest.raises(DomainError):
        pochhammer(1.0, 1.5)


@given(reals, st.integers(-50, 50))
def test_pochhammer_recurrence(a, m):
    # (a)_{m+1} = (a)_m (a+m)
    lhs = pochhammer(a, m + 1)
    rhs = pochhammer(a, m) * (a + m)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@given(reals, st.integers(0, 30))
def test_pochhammer_reflection(a, n):
    # (a)_{-n} = (-1)^n / (1-a)_n
    assert pochhammer(a, -n) == pytest.approx((-1) ** n / pochhammer(1 - a, n), rel=1e-12)


@given(reals, st.integers(-20, 20))
def test_pochhammer_matches_mpmath(a, m):
    assert pochhammer(a, m) == pytest.approx(float(oracles.poch(a, m)), rel=1e-12)


# ---------------------------------------------------------------- 2F1


def test_gauss_2f1_at_zero():
    assert gauss_2f1(0.3, -2.1, 1.7, 0.0).value == 1.0


def test_gauss_2f1_log_example():
    # 2F1(1, 1; 2; x) = -log(1-x)/x
    assert gauss_2f1(1, 1, 2, 0.5).value == pytest.approx(2 * math.log(2), rel=1e-14)


def test_gauss_2f1_at_one_uses_closed_form():
    r = gauss_2f1(0.3, 0.2, 1.0, 1.0)
    expected = math.gamma(1.0) * math.gamma(0.5) / (math.gamma(0.7) * math.gamma(0.8))
    assert r.value == pytest.approx(expected, rel=1e-14)
    assert r.path == Path.CLOSED_FORM


@pytest.mark.parametrize("a, b, c, x", [
    (0.3, 0.7, 1.9, 0.25), (1.5, -0.4, 2.2, 0.49), (0.5, 0.6, 2.5, 0.9), (0.5, 0.6, 1.05, 0.999),
    (-2.5, 1.3, 0.7, 0.8), (0.2, 0.3, 0.4, -0.5), (1.1, 2.3, 1.7, -12.0), (0.7, 3.5, 1.2, -200.0),
    (2.0, 3.0, 5.0, 0.95), (0.25, 0.75, 1.0, 0.999999),
])
def test_gauss_2f1_matches_mpmath(a, b, c, x):
    ref = float(oracles.hyp2f1(a, b, c, x))
    assert gauss_2f1(a, b, c, x).value == pytest.approx(ref, rel=1e-11)


@settings(max_examples=300, deadline=None)
@given(st.floats(-2, 3), st.floats(-2, 3), st.floats(0.2, 4), st.floats(-20, 0.95))
def test_gauss_2f1_random_against_mpmath(a, b, c, x):
    ref = float(oracles.hyp2f1(a, b, c, x))
    assert gauss_2f1(a, b, c, x).value == pytest.approx(ref, rel=1e-9, abs=1e-12 * max(1, abs(ref)))


@pytest.mark.parametrize("a, b, c, x", [(0.3, 0.8, 1.4, -0.7), (1.2, 0.4, 2.9, 0.35)])
def test_gauss_2f1_euler_transformation(a, b, c, x):
    # F(a,b;c;x) = (1-x)^(c-a-b) F(c-a, c-b; c; x)
    lhs = gauss_2f1(a, b, c, x).value
    rhs = (1 - x) ** (c - a - b) * gauss_2f1(c - a, c - b, c, x).value
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_gauss_2f1_domain_errors():
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, -2.0, 0.2)
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, 2, 1.5)
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, 1.5, 1.0)


def test_gauss_2f1_reports_nonconvergence():
    with pytest.raises(ConvergenceError):
        gauss_2f1(0.5, 0.5, 3.0, 0.45, SeriesOptions(max_terms=3))


def test_gauss_closed_form_vectorized():
    a = np.array([0.1, 0.5])
    out = gauss_closed_form(a, 0.2, 2.0)
    ref = [float(mp.gamma(2) * mp.gamma(1.8 - v) / (mp.gamma(2 - v) * mp.gamma(1.8))) for v in a]
    np.testing.assert_allclose(out, ref, rtol=1e-14)


def test_hyp2f1_array_marks_invalid_entries():
    out = hyp2f1_array([0.5, 0.5, 0.5], 0.5, [2.0, -1.0, 2.0], [0.3, 0.3, 2.0])
    assert np.isfinite(out[0]) and np.isnan(out[1]) and np.isnan(out[2])


# ---------------------------------------------------------------- 0F1


def test_hyp_0f1_at_zero():
    assert hyp_0f1(1.7, 0.0).value == 1.0


def test_hyp_0f1_cosh():
    # 0F1(; 1/2; x^2/4) = cosh(x)
    assert hyp_0f1(0.5, 1.0).value == pytest.approx(math.cosh(2.0), rel=1e-15)


def test_hyp_0f1_bessel_j0():
    assert hyp_0f1(1.0, -1.0).value == pytest.approx(float(mp.besselj(0, 2)), rel=1e-14)


@pytest.mark.parametrize("a, x", [(0.3, 5.0), (-2.5, -8.0), (4.2, 40.0), (1.5, -60.0)])
def test_hyp_0f1_matches_mpmath(a, x):
    assert hyp_0f1(a, x).value == pytest.approx(float(oracles.hyp0f1(a, x)), rel=1e-11)


def test_hyp_0f1_derivative_contiguity():
    # d/dx 0F1(;a;x) = 0F1(;a+1;x)/a
    a, x, h = 1.3, 0.8, 1e-4
    fd = (hyp_0f1(a, x + h).value - hyp_0f1(a, x - h).value) / (2 * h)
    assert fd == pytest.approx(hyp_0f1(a + 1, x).value / a, rel=1e-7)


def test_hyp_0f1_domain_error():
    with pytest.raises(DomainError):
        hyp_0f1(-3.0, 0.5)


def test_hyp_0f1_nonconvergence():
    with pytest.raises(ConvergenceError):
        hyp_0f1(0.5, 10.0, SeriesOptions(max_terms=3))


def test_hyp0f1_array_nan_at_poles():
    out = hyp0f1_array(np.array([0.0, 1.0]), 0.5)
    assert np.isnan(out[0]) and out[1] == pytest.approx(float(mp.hyp0f1(1, 0.5)), rel=1e-15)


# ---------------------------------------------------------------- misc


@pytest.mark.parametrize("kw", [{"rel_tol": 0.0}, {"rel_tol": 1.0}, {"max_level": 0},
                                {"max_level": 2.5}, {"max_terms": 0}])
def test_series_options_invariants(kw):
    with pytest.raises(DomainError):
        SeriesOptions(**kw)


def test_compensated_sum_cancellation():
    s = CompensatedSum()
    for v in (1e16, 1.0, -1e16, 1.0):
        s.add(v)
    assert s.value == 2.0
    assert s.abs_total == pytest.approx(2e16 + 2)


CORNER_VALUES = (0.0, 1e-14, -1.0, 0.5, -2.0 + 1e-13, -3.0 - 1e-9, 1.25)


@pytest.mark.parametrize("x", [0.3, 0.99, -5.0, -100.0])
@pytest.mark.parametrize("c", [0.75, 1.0, 2.5, -1.5])
def test_gauss_2f1_near_terminating_corners(c, x):
    # parameters at or within rounding of 0, -1, -2, ... and c - a - b at integers
    mp.mp.dps = 40
    try:
        for a in CORNER_VALUES:
            for b in CORNER_VALUES:
                ref = float(mp.hyp2f1(a, b, c, x, maxprec=20000, zeroprec=200))
                got = gauss_2f1(a, b, c, x).value
                assert got == pytest.approx(ref, rel=1e-8, abs=1e-8), (a, b)
    finally:
        mp.mp.dps = 30
