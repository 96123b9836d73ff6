import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from singhelm.errors import DomainError
from singhelm.fundsol import (
    NormalizationConstants,
    Parameters,
    PointPair,
    base_params,
    default_k1,
    pde_lhs_coefficients,
    prefactor_exponents,
    q_solution,
    sigma_map,
    solution_params,
)
from singhelm.verify import pde_residual, pde_residual_fn

coord = st.floats(0.05, 3.0)
alpha = st.floats(0.05, 0.45)
PAIR = ((0.2, 0.15, 0.2), (0.1, 0.1, 3.0))


# ---------------------------------------------------------------- data types


@pytest.mark.parametrize("kw", [
    {"p": 2, "alpha": (0.1, 0.1, 0.1)},
    {"p": 3.5, "alpha": (0.1, 0.1, 0.1)},
    {"p": True, "alpha": (0.1, 0.1, 0.1)},
    {"p": 3, "alpha": (0.1, 0.1)},
    {"p": 3, "alpha": (0.0, 0.1, 0.1)},
    {"p": 3, "alpha": (0.1, 0.5, 0.1)},
    {"p": 3, "alpha": (0.1, 0.1, 0.1), "mu": float("nan")},
])
def test_parameters_validation(kw):
    with pytest.raises(DomainError):
        Parameters(**kw)


def test_alpha_tot():
    assert Parameters(4, (0.1, 0.2, 0.3)).alpha_tot == pytest.approx(1.6)


@pytest.mark.parametrize("x, x0", [((1, 1), (1, 2)), ((1, 1, 1), (1, 1, 1, 1)), ((1, 0, 1), (1, 1, 1)),
                                   ((1, 1, 1), (1, -1, 1)), ((1, 1, float("inf")), (1, 1, 1))])
def test_point_pair_validation(x, x0):
    with pytest.raises(DomainError):
        PointPair(x, x0)


def test_normalization_constants():
    prm = Parameters(3, (0.25,) * 3)
    ks = NormalizationConstants.default(prm)
    assert ks[1] == default_k1(prm) and ks[2] == ks[8] == 1.0
    with pytest.raises(DomainError):
        NormalizationConstants((1.0,) * 7)


# ---------------------------------------------------------------- sigma map


def test_sigma_map_example():
    sc = sigma_map(PointPair((1, 1, 1), (2, 1, 1)), Parameters(3, (0.25,) * 3, 0.0))
    assert sc.r2 == 1.0
    assert sc.rk2 == (9.0, 5.0, 5.0)
    assert sc.sigma == (-8.0, -4.0, -4.0, 0.0)


def test_sigma_map_far_source_goes_to_zero():
    prm = Parameters(4, (0.25,) * 3, 0.0)
    s1 = sigma_map(PointPair((1, 1, 1, 0), (1, 1, 1, 10)), prm).sigma
    s2 = sigma_map(PointPair((1, 1, 1, 0), (1, 1, 1, 1000)), prm).sigma
    assert all(-1e-5 < v < 0 for v in s2[:3])
    assert all(abs(b) < abs(a) for a, b in zip(s1[:3], s2[:3]))


def test_sigma_map_mu():
    pt = PointPair((1, 2, 1), (2, 1, 3))
    assert sigma_map(pt, Parameters(3, (0.25,) * 3, 0.0)).sigma[3] == 0.0
    assert sigma_map(pt, Parameters(3, (0.25,) * 3, 2.0)).sigma[3] == pytest.approx(-2.0 * 6 / 4)


def test_sigma_map_errors():
    with pytest.raises(DomainError):
        sigma_map(PointPair((1, 1, 1), (1, 1, 1)), Parameters(3, (0.25,) * 3))
    with pytest.raises(DomainError):
        sigma_map(PointPair((1, 1, 1, 1), (1, 2, 1, 1)), Parameters(3, (0.25,) * 3))


@given(st.tuples(coord, coord, coord), st.tuples(coord, coord, coord))
def test_sigma_identity(x, x0):
    if x == x0:
        return
    sc = sigma_map(PointPair(x, x0), Parameters(3, (0.25,) * 3))
    for k in range(3):
        assert sc.sigma[k] * sc.r2 == pytest.approx(-4 * x[k] * x0[k], rel=1e-14)


# ---------------------------------------------------------------- constants and parameters


@pytest.mark.parametrize("p, al", [(3, (0.25,) * 3), (4, (0.1, 0.25, 0.4)), (5, (0.3, 0.05, 0.2))])
def test_default_k1(p, al):
    assert default_k1(Parameters(p, al)) == pytest.approx(float(oracles.k1_closed(p, al)), rel=1e-13)


def test_default_k1_example_value():
    # Gamma of alpha = a1 + a2 + a3 - 1 + p/2 = 1.25, not of a1 + a2 + a3 = 0.75
    g = math.gamma
    ref = 4 ** (-0.25) * g(1.25) * g(0.25) ** 3 / (math.pi ** 1.5 * g(0.5) ** 3)
    assert default_k1(Parameters(3, (0.25,) * 3)) == pytest.approx(ref, rel=1e-14)


@settings(max_examples=30)
@given(st.integers(3, 8), alpha, alpha, alpha)
def test_default_k1_positive(p, a1, a2, a3):
    assert default_k1(Parameters(p, (a1, a2, a3))) > 0


def test_base_params():
    cp = base_params(Parameters(3, (0.1, 0.2, 0.3)))
    assert cp.a == pytest.approx(1.1)
    assert cp.b == (0.1, 0.2, 0.3)
    assert cp.d == pytest.approx((0.2, 0.4, 0.6))


def test_solution_params_leading_parameter():
    prm = Parameters(3, (0.1, 0.25, 0.4))
    a = prm.alpha_tot
    assert solution_params(2, prm).a == pytest.approx(1 + a - 0.2)
    assert solution_params(3, prm).a == pytest.approx(1 + a - 0.5)
    assert solution_params(4, prm).a == pytest.approx(1 + a - 0.8)
    assert solution_params(3, prm, printed=True).a == pytest.approx(1 + a - 0.2)
    assert solution_params(8, prm).a == pytest.approx(3 + a - 1.5)
    assert solution_params(5, prm).b == pytest.approx((0.9, 0.75, 0.4))
    assert solution_params(5, prm).d == pytest.approx((1.8, 1.5, 0.8))


def test_q2_exponent():
    prm = Parameters(3, (0.1, 0.25, 0.4))
    e_r2, ek = prefactor_exponents(2, prm)
    assert e_r2 == pytest.approx(2 * 0.1 - prm.alpha_tot - 1)
    assert ek == pytest.approx((0.8, 0.0, 0.0))


def test_prefactor_exponent_table():
    prm = Parameters(4, (0.1, 0.25, 0.4))
    c = (0.8, 0.5, 0.2)
    flagged = {1: (), 2: (0,), 3: (1,), 4: (2,), 5: (0, 1), 6: (0, 2), 7: (1, 2), 8: (0, 1, 2)}
    for i, f in flagged.items():
        e_r2, ek = prefactor_exponents(i, prm)
        assert e_r2 == pytest.approx(-prm.alpha_tot - sum(c[k] for k in f))
        assert ek == pytest.approx(tuple(c[k] if k in f else 0.0 for k in range(3)))


# ---------------------------------------------------------------- q_i values


def test_q1_far_apart():
    prm = Parameters(4, (0.25, 0.1, 0.4), 0.0)
    pt = PointPair((0.01, 0.02, 0.01, 0.0), (0.02, 0.01, 0.01, 100.0))
    r2 = sigma_map(pt, prm).r2
    ref = default_k1(prm) * r2 ** (-prm.alpha_tot)
    assert q_solution(1, pt, prm).value == pytest.approx(ref, rel=1e-7)


def test_q1_two_truncation_levels():
    prm = Parameters(3, (0.25,) * 3, 0.0)
    pt = PointPair((1, 1, 1), (2, 1, 1))
    lo = q_solution(1, pt, prm, fixed_level=200).value
    hi = q_solution(1, pt, prm, fixed_level=210).value
    assert abs(hi - lo) / abs(hi) < 1e-6
    assert q_solution(1, pt, prm).value == pytest.approx(hi, rel=1e-7)


@pytest.mark.parametrize("i", [1, 3, 6, 8])
@pytest.mark.parametrize("mu", [0.0, 1.0, -1.0])
def test_q_against_reference(i, mu):
    x, x0 = PAIR
    al = (0.1, 0.25, 0.4)
    ref = float(oracles.q_reference(i, x, x0, 3, al, mu))
    assert q_solution(i, PointPair(x, x0), Parameters(3, al, mu)).value == pytest.approx(ref, rel=1e-12)


def test_q_custom_constants():
    prm = Parameters(3, (0.2, 0.25, 0.3), 0.5)
    pt = PointPair(*PAIR)
    ks = NormalizationConstants((2.0,) * 8)
    assert q_solution(4, pt, prm, ks).value == pytest.approx(2 * q_solution(4, pt, prm).value, rel=1e-15)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 8), st.tuples(coord, coord, coord), st.tuples(coord, coord, coord),
       st.floats(-1, 1))
def test_q_symmetric_in_x_and_x0(i, x, x0, mu):
    pt = PointPair(x, x0)
    prm = Parameters(3, (0.1, 0.25, 0.4), mu)
    sc = sigma_map(pt, prm) if x != x0 else None
    if sc is None or sum(abs(v) for v in sc.sigma[:3]) > 0.7:
        return
    assert q_solution(i, pt.swapped(), prm).value == pytest.approx(q_solution(i, pt, prm).value, rel=1e-13)


def test_axis_relabel_covariance():
    al = (0.1, 0.25, 0.4)
    x, x0 = (0.2, 0.15, 0.2, 0.3), (0.1, 0.1, 3.0, 0.5)
    perm = (2, 0, 1)  # new axis j carries old axis perm[j]
    pal = tuple(al[k] for k in perm)
    px, px0 = tuple(x[k] for k in perm) + x[3:], tuple(x0[k] for k in perm) + x0[3:]
    prm, pprm = Parameters(4, al, 0.7), Parameters(4, pal, 0.7)
    single = {(0,): 2, (1,): 3, (2,): 4, (0, 1): 5, (0, 2): 6, (1, 2): 7, (): 1, (0, 1, 2): 8}
    for flags, i in single.items():
        # flags in the permuted labelling correspond to axes perm[flags] originally
        j = single[tuple(sorted(perm[f] for f in flags))]
        v = q_solution(i, PointPair(px, px0), pprm).value
        w = q_solution(j, PointPair(x, x0), prm).value
        if i == 1:
            assert v == pytest.approx(w, rel=1e-13)
        else:
            # k_2..k_8 are all 1, so the permuted branch matches exactly
            assert v == pytest.approx(w, rel=1e-13), (i, j)


# ---------------------------------------------------------------- PDE coefficients


def test_pde_lhs_coefficients_examples():
    c = pde_lhs_coefficients(Parameters(4, (0.25,) * 3, 1.5), (1, 1, 1, 1))
    assert c.second == (1.0,) * 4
    assert c.first == (0.5, 0.5, 0.5, 0.0)
    assert c.zeroth == -1.5
    assert pde_lhs_coefficients(Parameters(3, (0.25,) * 3, -4.0), (1, 2, 3)).zeroth == 4.0
    c = pde_lhs_coefficients(Parameters(3, (0.1, 0.2, 0.3)), (0.5, 2, 3))
    assert c.first == pytest.approx((0.4, 0.2, 0.2))


def test_pde_lhs_coefficients_errors():
    with pytest.raises(DomainError):
        pde_lhs_coefficients(Parameters(3, (0.25,) * 3), (1, 0, 1))
    with pytest.raises(DomainError):
        pde_lhs_coefficients(Parameters(3, (0.25,) * 3), (1, 1, 1, 1))


# ---------------------------------------------------------------- corrected branch parameters


@pytest.mark.parametrize("i", [3, 4])
def test_printed_q3_q4_parameters_fail_the_pde(i):
    prm = Parameters(3, (0.1, 0.25, 0.4), 1.0)
    x, x0 = PAIR
    pt = PointPair(x, x0)
    good = pde_residual(i, pt, prm)
    bad = pde_residual_fn(lambda y: q_solution(i, PointPair(y, x0), prm, printed=True).value,
                          x, prm, h=good.h)
    assert abs(good.order_estimate - 2) < 0.3
    # the printed leading parameter leaves a residual that does not shrink
    assert abs(bad.normalized[-1]) > 0.5 * abs(bad.normalized[0])
    assert abs(bad.normalized[-1]) > 1e3 * abs(good.normalized[-1])
