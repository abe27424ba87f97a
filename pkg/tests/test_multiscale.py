"""Reduction-pipeline tests: scaling maps, leading ODE, P-I rescaling, matching."""

import math
from fractions import Fraction

import numpy as np
import pytest

from heleshaw.errors import DegenerateReduction, OutOfRange, UnsupportedOrder
from heleshaw.hodograph import CriticalPoint, closed_u0, find_critical_25, quintic_times
from heleshaw.multiscale import (
    LeadingODE,
    ScalingMapKdV,
    build_composite,
    build_leading_ode,
    overlap_error,
    overlap_report,
    pi_reduction_exact_coefficients,
    recover_leading_multiplier,
    reduce_to_pi,
)

EXACT_CP = CriticalPoint(
    m=2,
    times_c=quintic_times(Fraction(-4, 5), x=Fraction(16, 25)),
    v_c=Fraction(4, 5),
    c=Fraction(-2, 3),
)


@pytest.fixture(scope="module")
def comp():
    return build_composite(t_1=-0.8, eps=1e-5, tol=1e-11)


# -- scaling map ----------------------------------------------------------

def test_scaling_exponent_arithmetic():
    s = ScalingMapKdV(eps=1e-5, m=2)
    assert s.eps_tilde == pytest.approx(1e-2, rel=1e-15)
    assert s.zoom == pytest.approx(1e-4, rel=1e-15)
    assert s.x_to_inner(0.64 + 1e-4 * 3.5, 0.64) == pytest.approx(3.5, rel=1e-12)


def test_scaling_roundtrip():
    s = ScalingMapKdV(eps=3.7e-4, m=2)
    x = 0.613
    back = s.x_from_inner(s.x_to_inner(x, 0.64), 0.64)
    assert back == pytest.approx(x, abs=1e-16)


def test_scaling_consistency_identity():
    s = ScalingMapKdV(eps=2e-4, m=2)
    assert s.zoom * s.eps_tilde == pytest.approx(s.eps ** (2 * 3 / 5.0), rel=1e-14)


# -- leading ODE ------------------------------------------------------------

def test_leading_ode_exact_quintic_data():
    ode = build_leading_ode(EXACT_CP)
    assert ode.A == Fraction(4)           # (35/2)(2/7) v_c = 5 v_c
    assert ode.m == 2
    # b covers every deformation slot, zero times included:
    # c_10 = 3 v_c/2 and c_20 = 15 v_c^2/8 both evaluate to 6/5 at v_c = 4/5
    assert ode.b == (Fraction(6, 5), Fraction(6, 5), Fraction(28, 25))


def test_leading_ode_quintic_canonical_form():
    ode = build_leading_ode(EXACT_CP)
    one, three, rhs = ode.canonical_m2()
    assert (one, three) == (1, 3)
    assert rhs == Fraction(-2)            # -8/(5 v_c) with v_c = 4/5


def test_leading_ode_t1_contribution_vanishes():
    # c_{12} = 0 because j < m: only t_3 feeds the multiplier
    from heleshaw.hodograph import c_coeff
    assert c_coeff(1, 2, Fraction(4, 5)) == 0


def test_leading_ode_degenerate():
    cp = CriticalPoint(m=2, times_c=quintic_times(Fraction(-4, 5), x=0, t_3=0), v_c=Fraction(4, 5), c=1)
    with pytest.raises(DegenerateReduction):
        build_leading_ode(cp)


# -- P-I reduction -----------------------------------------------------------

def test_reduce_to_pi_quintic_values():
    red = reduce_to_pi(build_leading_ode(EXACT_CP))
    assert red.alpha == -2.0
    assert red.beta == -1.0


def test_reduce_to_pi_exact_coefficients():
    coeffs = pi_reduction_exact_coefficients(Fraction(4))
    assert coeffs == (Fraction(1), Fraction(-6), Fraction(1))
    # a generic positive rational multiplier verifies too
    assert pi_reduction_exact_coefficients(Fraction(7, 3)) == (1, -6, 1)


def test_reduce_to_pi_rejects_higher_order():
    ode = LeadingODE(A=Fraction(4), b=(1,), m=3, v_c=1.0)
    with pytest.raises(UnsupportedOrder):
        reduce_to_pi(ode)


def test_reduction_inverse_recovers_multiplier():
    for a in (4.0, 2.5, 9.0):
        ode = LeadingODE(A=a, b=(), m=2, v_c=0.8)
        red = reduce_to_pi(ode)
        assert recover_leading_multiplier(red) == pytest.approx(a, rel=1e-14)


def test_matching_direction_constant():
    # c beta = alpha^2 / 6 is what maps sqrt(c x~) onto -sqrt(xi/6)
    cp = find_critical_25(-0.8)
    red = reduce_to_pi(build_leading_ode(cp))
    assert cp.c * red.beta == pytest.approx(red.alpha**2 / 6.0, rel=1e-13)


# -- composite solution ------------------------------------------------------

def test_inner_at_critical_point(comp):
    w0, _ = comp.tritronquee.eval(0.0)
    expected = comp.v_c + comp.scaling.eps_tilde * comp.reduction.alpha * w0
    assert comp.inner_u(comp.x_c) == pytest.approx(expected, rel=1e-14)


def test_inner_matches_fold_asymptotics(comp):
    # at xi = 30 the inner solution equals v_c + eps~ sqrt(c x~) up to O(eps~ xi^-2)
    x = comp.x_c + comp.scaling.zoom * comp.reduction.beta * 30.0
    x_tilde = comp.scaling.x_to_inner(x, comp.x_c)
    naive = comp.v_c + comp.scaling.eps_tilde * math.sqrt(comp.cp.c * x_tilde)
    tol = comp.scaling.eps_tilde * 30.0**-2
    assert abs(comp.inner_u(x) - naive) < tol


def test_composite_outer_region(comp):
    assert comp.eval(0.6) == closed_u0(0.6, -0.8)


def test_composite_inner_region_finite(comp):
    u = comp.eval(0.6402)
    assert math.isfinite(u)
    assert u < comp.v_c  # past the u = v_c crossing already


def test_composite_out_of_range(comp):
    with pytest.raises(OutOfRange):
        comp.eval(comp.x_star + 1e-6)
    with pytest.raises(OutOfRange):
        comp.eval(comp.x_star)


def test_x_star_location(comp):
    pole = comp.tritronquee.pole
    assert comp.x_star == pytest.approx(0.64 + 1e-4 * (-pole), rel=1e-12)
    assert comp.x_star > 0.6402302


def test_jump_at_switch_below_matching_bound(comp):
    jump = abs(comp.outer_u(comp.x_switch) - comp.inner_u(comp.x_switch))
    assert jump < 5e-4


def test_eval_many_agrees_with_scalar(comp):
    xs = np.array([0.6, 0.62, 0.638, 0.6401])
    vec = comp.eval_many(xs)
    assert vec == pytest.approx([comp.eval(float(x)) for x in xs], rel=1e-15)


# -- the matching experiment ---------------------------------------------

def test_overlap_error_reference_window(comp):
    rep = overlap_report(comp, (0.6365, 0.6395), 601)
    assert rep["max_abs_err"] < 5e-4
    assert rep["max_rel_err"] < 0.000625


def test_overlap_error_scalar_api(comp):
    assert overlap_error(comp, (0.6365, 0.6395), 301) < 5e-4


def test_overlap_error_shrinks_with_eps():
    errs = []
    trit = None
    for eps in (1e-4, 1e-5, 1e-6):
        comp = build_composite(t_1=-0.8, eps=eps, tol=1e-11, tritronquee=trit)
        trit = comp.tritronquee
        zoom = comp.scaling.zoom
        window = (comp.x_c - 35.0 * zoom, comp.x_c - 5.0 * zoom)
        errs.append(overlap_error(comp, window, 201))
    # second-order matching: error ~ eps~^2 on a fixed inner window
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < errs[0] / 20
