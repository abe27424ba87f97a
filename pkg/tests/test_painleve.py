"""Tritronquee construction tests: series, integration, pole, residuals."""

import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from heleshaw.errors import (
    DomainError,
    NoPoleInRange,
    OutOfRange,
    SeedUnreliable,
    TooCloseToPole,
)
from heleshaw.painleve import (
    _series_coefficients,
    asymptotic_series,
    find_first_negative_pole,
    integrate_tritronquee,
    laurent_leading_coefficient,
)


@pytest.fixture(scope="module")
def sol():
    return integrate_tritronquee(xi0=30.0, xi_min=-6.0, tol=1e-11)


# -- asymptotic series -----------------------------------------------------

def test_series_leading_term_exact():
    w, _ = asymptotic_series(24.0, order=0)
    assert w == -2.0


def test_series_coefficients_against_formal_solve():
    # independent oracle: plug W = -sqrt(xi/6)(1 + sum a_k xi^(-5k/2)) with
    # unknown a_k into the equation and solve order by order with sympy
    xi = sympy.Symbol("xi", positive=True)
    a = sympy.symbols("a1:5")
    W = -sympy.sqrt(xi / 6) * (1 + sum(ak * xi ** sympy.Rational(-5 * (k + 1), 2) for k, ak in enumerate(a)))
    resid = sympy.expand(sympy.diff(W, xi, 2) - 6 * W**2 + xi)
    s = sympy.Symbol("s", positive=True)  # s = xi^(-1/2)
    resid_s = sympy.expand(resid.subs(xi, s**-2))
    poly = sympy.Poly(sympy.expand(resid_s * s ** 3), s)
    sols = sympy.solve([poly.coeff_monomial(s**p) for p in range(0, 24)], a, dict=True)[0]
    bs = _series_coefficients(4)
    for k in range(1, 5):
        expected = sols[a[k - 1]]
        got = bs[k] * Fraction(6) ** 0 / sympy.sqrt(6) ** k  # a_k = b_k 6^(-k/2)
        assert sympy.simplify(sympy.nsimplify(bs[k]) * 6 ** sympy.Rational(-k, 2) - expected) == 0


def test_series_residual_small_at_30():
    # 4th-order central stencil for W''
    h = 1e-2
    xi = 30.0
    ws = [asymptotic_series(xi + i * h, 4)[0] for i in (-2, -1, 0, 1, 2)]
    wpp = (-ws[0] + 16 * ws[1] - 30 * ws[2] + 16 * ws[3] - ws[4]) / (12 * h * h)
    assert abs(wpp - 6 * ws[2] ** 2 + xi) < 1e-10


def test_series_residual_improves_with_order():
    xi = 15.0
    h = 1e-2

    def resid(order):
        ws = [asymptotic_series(xi + i * h, order)[0] for i in (-2, -1, 0, 1, 2)]
        wpp = (-ws[0] + 16 * ws[1] - 30 * ws[2] + 16 * ws[3] - ws[4]) / (12 * h * h)
        return abs(wpp - 6 * ws[2] ** 2 + xi)

    assert resid(0) / resid(1) > 50
    assert resid(1) / resid(2) > 50


def test_series_wprime_consistent():
    h = 1e-5
    w_minus, _ = asymptotic_series(25.0 - h, 4)
    w_plus, _ = asymptotic_series(25.0 + h, 4)
    _, wp = asymptotic_series(25.0, 4)
    assert wp == pytest.approx((w_plus - w_minus) / (2 * h), rel=1e-7)


def test_series_domain_guard():
    with pytest.raises(DomainError):
        asymptotic_series(9.0, 4)
    with pytest.raises(DomainError):
        asymptotic_series(30.0, 9)


# -- integration ------------------------------------------------------------

def test_overlap_with_series(sol):
    w, wp = sol.eval(25.0)
    ws, wps = asymptotic_series(25.0, 4)
    assert abs(w - ws) < 1e-9
    assert abs(wp - wps) < 1e-9


def test_no_pole_on_positive_axis(sol):
    assert sol.pole < 0
    xs = np.linspace(0.0, 30.0, 4001)
    w, _ = sol.eval_many(xs)
    assert np.all(np.isfinite(w))
    assert np.max(np.abs(w)) < 10.0


def test_w0_stable_under_tol_refinement():
    w_coarse = integrate_tritronquee(tol=1e-9).eval(0.0)[0]
    w_fine = integrate_tritronquee(tol=1e-12).eval(0.0)[0]
    assert abs(w_coarse - w_fine) < 1e-8


def test_self_convergence_order():
    ref = integrate_tritronquee(tol=1e-13).eval(0.0)[0]
    errs = [abs(integrate_tritronquee(tol=t).eval(0.0)[0] - ref) for t in (1e-8, 1e-10, 1e-12)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[1] > 5


def test_seed_guard():
    with pytest.raises(SeedUnreliable):
        integrate_tritronquee(xi0=8.0)
    with pytest.raises(DomainError):
        integrate_tritronquee(tol=1e-5)


def test_eval_at_seed_is_exact(sol):
    w0, wp0 = asymptotic_series(30.0, 4)
    w, wp = sol.eval(30.0)
    assert w == w0 and wp == wp0


# -- pole ---------------------------------------------------------------

def test_pole_location(sol):
    pole = find_first_negative_pole(sol)
    assert -2.40 < pole < -2.37
    assert pole == pytest.approx(-2.3841687, abs=1e-3)


def test_pole_stable_under_tol_refinement(sol):
    finer = integrate_tritronquee(tol=1e-12)
    assert abs(find_first_negative_pole(sol) - find_first_negative_pole(finer)) < 1e-6


def test_laurent_leading_coefficient(sol):
    assert laurent_leading_coefficient(sol) == pytest.approx(1.0, abs=1e-3)


def test_no_pole_error():
    short = integrate_tritronquee(xi0=30.0, xi_min=-0.5, tol=1e-9)
    assert not short.blew_up
    with pytest.raises(NoPoleInRange):
        find_first_negative_pole(short)


def test_monotone_blowup_tail(sol):
    # approaching the pole (xi decreasing), W increases monotonically
    tail = sol.ws[-30:]
    assert np.all(np.diff(tail) > 0)


# -- evaluation guards -------------------------------------------------------

def test_eval_out_of_range(sol):
    with pytest.raises(OutOfRange):
        sol.eval(31.0)
    with pytest.raises(OutOfRange):
        sol.eval(-5.0)


def test_eval_too_close_to_pole(sol):
    with pytest.raises(TooCloseToPole):
        sol.eval(sol.pole + 5e-4)


def test_eval_above_pole_is_finite(sol):
    w, wp = sol.eval(sol.pole + 0.5)
    assert math.isfinite(w) and math.isfinite(wp)
    defect = sol.residual_defects(np.array([sol.pole + 0.45, sol.pole + 0.55]))
    assert defect.max() < 1e-7


def test_eval_extended_crosses_seed(sol):
    xs = np.array([28.0, 30.0, 32.0, 40.0])
    w, wp = sol.eval_extended(xs)
    assert np.all(np.isfinite(w))
    # no jump at the seam: both representations agree there by construction
    h = 1e-9
    w_in, _ = sol.eval_extended(30.0 - h)
    w_out, _ = sol.eval_extended(30.0 + h)
    assert abs(w_out - w_in) < 1e-8


# -- residual certificate ----------------------------------------------------

def test_certificate_bound(sol):
    assert sol.residual_max < 100 * sol.tol


def test_absolute_residual_grid():
    tight = integrate_tritronquee(tol=1e-12)
    grid = np.linspace(tight.pole + 0.1, 30.0, 10_000)
    assert tight.residual_defects(grid).max() < 1e-8
