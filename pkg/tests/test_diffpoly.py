"""Exact algebra tests: ring axioms, calculus, and the Gel'fand-Dikii chain."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heleshaw.diffpoly import (
    DiffPoly,
    Monomial,
    dispersionless_coefficient,
    gd_next,
    gd_polynomials,
)
from heleshaw.errors import JetTooShort, NotExactDerivative

U = DiffPoly.field()
UX = U.derive()
UXX = UX.derive()


def poly(*terms):
    return DiffPoly([(Monomial(tuple(orders)), Fraction(*coeff)) for orders, coeff in terms])


# -- ring operations ---------------------------------------------------------

def test_additive_inverse():
    assert (U + (-U)).is_zero


def test_mul_square():
    assert U * U == DiffPoly.monomial((0, 0))


def test_scale():
    assert UXX.scale(Fraction(1, 8)) == DiffPoly.monomial((2,), Fraction(1, 8))


def test_no_zero_coefficients_stored():
    p = U + U.scale(-1) + DiffPoly.const(0)
    assert p.terms() == {}


# -- derive ------------------------------------------------------------------

def test_derive_leibniz_square():
    assert (U * U).derive() == (U * UX).scale(2)


def test_derive_linear():
    assert U.scale(Fraction(1, 2)).derive() == UX.scale(Fraction(1, 2))


def test_derive_constant():
    assert DiffPoly.const(7).derive().is_zero


# -- integrate ---------------------------------------------------------------

def test_integrate_leibniz_inverse():
    assert ((U * UX).scale(2)).integrate() == U * U


def test_integrate_linear():
    assert UX.scale(Fraction(1, 2)).integrate() == U.scale(Fraction(1, 2))


def test_integrate_not_exact():
    with pytest.raises(NotExactDerivative):
        (U * U).integrate()


def test_integrate_constant_not_exact():
    with pytest.raises(NotExactDerivative):
        DiffPoly.const(1).integrate()


def test_derive_integrate_identity_on_image():
    p = poly(((0, 0, 1), (3, 7)), ((2, 2), (1, 4)), ((5,), (2, 1)))
    dp = p.derive()
    assert dp.integrate().derive() == dp


# -- eval ----------------------------------------------------------------

def test_eval_linear():
    assert U.scale(Fraction(1, 2)).eval([3.0]) == 1.5


def test_eval_r2_jet():
    r2 = gd_polynomials(2)[2]
    assert r2.eval([1.0, 0.0, 2.0]) == pytest.approx(0.625, abs=1e-15)


def test_eval_jet_too_short():
    with pytest.raises(JetTooShort):
        UXX.eval([1.0, 2.0])


def test_eval_r3_against_bruteforce():
    # independent oracle: hand-derived closed form of R_3
    r3 = gd_polynomials(3)[3]
    jet = [0.37, -1.21, 0.55, 2.04, -0.83]
    u0, u1, u2, _, u4 = jet
    expected = u4 / 32 + 5 * u0 * u2 / 16 + 5 * u1**2 / 32 + 5 * u0**3 / 16
    assert r3.eval(jet) == pytest.approx(expected, rel=1e-15)


# -- Gel'fand-Dikii chain ------------------------------------------------

def test_gd_first_step():
    assert gd_next(DiffPoly.const(1)) == U.scale(Fraction(1, 2))


def test_gd_second_step():
    expected = (UXX + (U * U).scale(3)).scale(Fraction(1, 8))
    assert gd_next(U.scale(Fraction(1, 2))) == expected


def test_gd_r3_structure():
    # hand-derived: R_3 = u_xxxx/32 + 5/16 u u_xx + 5/32 u_x^2 + 5/16 u^3
    expected = poly(
        ((4,), (1, 32)),
        ((0, 2), (5, 16)),
        ((1, 1), (5, 32)),
        ((0, 0, 0), (5, 16)),
    )
    assert gd_polynomials(3)[3] == expected


def test_gd_dispersionless_part_r3():
    r3 = gd_next(gd_next(U.scale(Fraction(1, 2))))
    assert r3.dispersionless_part() == DiffPoly.monomial((0, 0, 0), Fraction(5, 16))


@pytest.mark.parametrize("n", range(7))
def test_gd_weight_homogeneous(n):
    rn = gd_polynomials(6)[n]
    assert rn.homogeneous_weight() == 2 * n


@pytest.mark.parametrize("n", range(1, 7))
def test_gd_dispersionless_coefficient(n):
    rn = gd_polynomials(6)[n]
    expected = DiffPoly.monomial((0,) * n, dispersionless_coefficient(n))
    assert rn.dispersionless_part() == expected
    assert dispersionless_coefficient(n) == Fraction(math.comb(2 * n, n), 4**n)


@pytest.mark.parametrize("n", range(7))
def test_gd_recursion_identity_exact(n):
    # d/dx R_{n+1} == (1/4 d3 + u d + 1/2 u_x) R_n with zero tolerance
    rs = gd_polynomials(7)
    rn, rn1 = rs[n], rs[n + 1]
    lhs = rn1.derive()
    rhs = (
        Fraction(1, 4) * rn.derive().derive().derive()
        + U * rn.derive()
        + Fraction(1, 2) * UX * rn
    )
    assert lhs == rhs


def test_gd_zero_constant_terms():
    for rn in gd_polynomials(6)[1:]:
        assert rn.constant_part() == 0


def test_quadratic_generating_identity_truncated():
    """R R_xx - R_x^2/2 - 2(z^2 - u)R^2 + 2 z^2 = O(z^-8) for R_0..R_4.

    Laurent series in w = z^-2 with DiffPoly coefficients; with the series
    truncated after R_4 every coefficient of w^-1 .. w^3 must vanish
    identically, which pins both the recursion and the integration-constant
    convention at once.
    """
    N = 3
    rs = gd_polynomials(N + 1)

    def series_mul(a, b):
        out = {}
        for i, pa in a.items():
            for j, pb in b.items():
                out[i + j] = out.get(i + j, DiffPoly.zero()) + pa * pb
        return out

    R = {n: rn for n, rn in enumerate(rs)}
    Rxx = {n: rn.derive().derive() for n, rn in R.items()}
    Rx = {n: rn.derive() for n, rn in R.items()}

    lhs = series_mul(R, Rxx)
    for k, p in series_mul(Rx, Rx).items():
        lhs[k] = lhs.get(k, DiffPoly.zero()) - p.scale(Fraction(1, 2))
    r_sq = series_mul(R, R)
    for k, p in r_sq.items():
        # -2 z^2 R^2 contributes at w^(k-1), +2u R^2 at w^k
        lhs[k - 1] = lhs.get(k - 1, DiffPoly.zero()) - p.scale(2)
        lhs[k] = lhs.get(k, DiffPoly.zero()) + DiffPoly.field() * p.scale(2)
    lhs[-1] = lhs.get(-1, DiffPoly.zero()) + DiffPoly.const(2)

    for order in range(-1, N + 1):
        assert lhs.get(order, DiffPoly.zero()).is_zero, f"w^{order} coefficient nonzero"


# -- property tests ------------------------------------------------------

small_monomials = st.lists(st.integers(min_value=0, max_value=4), min_size=0, max_size=3).map(
    lambda ks: Monomial(tuple(ks))
)
rationals = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 7))
small_polys = st.lists(st.tuples(small_monomials, rationals), min_size=0, max_size=5).map(DiffPoly)


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys, small_polys)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert (p + q) + r == p + (q + r)
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@settings(max_examples=60, deadline=None)
@given(small_polys, small_polys)
def test_derive_is_a_derivation(p, q):
    assert (p * q).derive() == p.derive() * q + p * q.derive()


@settings(max_examples=60, deadline=None)
@given(small_polys)
def test_integrate_recovers_up_to_constant(p):
    assert p.derive().integrate() == p - DiffPoly.const(p.constant_part())


@settings(max_examples=60, deadline=None)
@given(small_monomials, small_monomials)
def test_weight_additive_under_mul(m1, m2):
    assert m1.times(m2).weight == m1.weight + m2.weight
