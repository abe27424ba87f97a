"""Numerical tritronquee solution of Painleve-I:  W'' = 6 W^2 - xi.

The tritronquee branch is the unique solution with no poles in a wide sector
around the positive real axis; on the real axis it decays like
W ~ -sqrt(xi/6) as xi -> +infinity and blows up at a first negative pole
xi* ~ -2.384.  It is constructed by seeding a formal asymptotic series at a
large abscissa xi_0 and integrating downward with an adaptive embedded
Runge-Kutta method (DOP853, dense output kept).

No shooting is needed: linearizing around the branch gives delta'' = 12 W
delta, and 12 W < 0 on the positive axis, so perturbations oscillate instead
of growing.  That stability assumption is not taken on faith; the tests
check the overlap between the integrated solution and the series on
[xi_0 - 5, xi_0].

Residual certification works on the ODE in integral form.  For a span
[a, b] covered by the dense output,

    defect(a, b) = | W'(b) - W'(a) - int_a^b (6 W^2 - xi) dxi |

vanishes for an exact solution.  Quadrature is applied piecewise between
solver nodes, where the interpolant is a single polynomial, so Gauss-8 is
exact and the defect measures genuine inconsistency of (W, W') with the
equation rather than quadrature error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    DomainError,
    NoPoleInRange,
    OutOfRange,
    SeedUnreliable,
    StepSizeUnderflow,
    TooCloseToPole,
)

#: |W| beyond this is treated as blown up (double poles grow fast)
BLOWUP_THRESHOLD = 1.0e6
#: evaluation guard around the pole
POLE_GUARD = 1.0e-3
#: series seeding is refused below this abscissa
SERIES_MIN_XI = 10.0


@lru_cache(maxsize=None)
def _series_coefficients(order: int) -> tuple[Fraction, ...]:
    """Rational coefficients b_k of W = -sqrt(xi/6) (1 + sum b_k (6 xi^5)^(-k/2)).

    Substituting the ansatz into W'' = 6 W^2 - xi and matching powers of
    xi^(-5/2) gives the quadratic recursion

        b_m = -1/2 [ b_{m-1} (25 (m-1)^2 - 1) / 4 + sum_{i=1}^{m-1} b_i b_{m-i} ].
    """
    bs = [Fraction(1)]
    for m in range(1, order + 1):
        acc = bs[m - 1] * Fraction(25 * (m - 1) ** 2 - 1, 4)
        acc += sum((bs[i] * bs[m - i] for i in range(1, m)), Fraction(0))
        bs.append(-acc / 2)
    return tuple(bs)


def asymptotic_series(xi, order: int = 4):
    """(W, W') of the truncated large-xi series; exact rational coefficients.

    Accepts a float or an ndarray.  Order 0 is the bare leading term
    -sqrt(xi/6).  Refuses xi < 10, where the divergent tail is no longer
    far below double precision.
    """
    if not 0 <= order <= 8:
        raise DomainError("series order must lie in 0..8")
    if np.any(np.asarray(xi) < SERIES_MIN_XI):
        raise DomainError(f"series unreliable below xi = {SERIES_MIN_XI}")
    s = np.sqrt(xi / 6.0)
    t = 1.0 / np.sqrt(6.0 * xi**5)
    poly = 0.0 * xi
    dpoly = 0.0 * xi
    tk = 1.0 + 0.0 * xi
    for k, b in enumerate(_series_coefficients(order)):
        bk = float(b)
        poly = poly + bk * tk
        dpoly = dpoly + (5 * k - 1) * bk * tk
        tk = tk * t
    return -s * poly, s * dpoly / (2.0 * xi)


@dataclass
class TritronqueeSolution:
    """Dense numerical tritronquee with certified residual.

    nodes: the accepted solver steps (xi decreasing from xi0); the dense
    output interpolant covers everything in between.  `pole` is the first
    negative-axis pole when the integration reached blow-up, else None.
    `residual_max` is the largest scaled integral-form defect over the
    certification range [pole + 0.1, xi0] (see module docstring); it is
    guaranteed < 100 * tol at construction.
    """

    xi0: float
    tol: float
    ts: np.ndarray
    ws: np.ndarray
    wps: np.ndarray
    pole: Optional[float]
    blew_up: bool
    series_order: int
    residual_max: float = math.nan
    _dense: object = field(default=None, repr=False)

    @property
    def xi_reached(self) -> float:
        return float(self.ts[-1])

    def _check_range(self, xi: np.ndarray):
        if self.pole is not None and np.any(np.abs(xi - self.pole) < POLE_GUARD):
            raise TooCloseToPole(f"xi within {POLE_GUARD} of the pole {self.pole:.6g}")
        lo, hi = self.xi_reached, self.xi0
        if np.any(xi > hi * (1 + 1e-15) + 1e-15) or np.any(xi < lo - 1e-15):
            raise OutOfRange(f"xi outside covered range [{lo:.6g}, {hi:.6g}]")

    def eval(self, xi: float) -> tuple[float, float]:
        """Dense-output (W, W') at a single abscissa."""
        self._check_range(np.asarray(xi, dtype=float))
        w, wp = self._dense(xi)
        return float(w), float(wp)

    def eval_many(self, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        xi = np.asarray(xi, dtype=float)
        self._check_range(xi)
        w, wp = self._dense(xi)
        return w, wp

    def eval_extended(self, xi):
        """Like eval, but continue with the seeding series above xi0.

        The series is exactly what the integration was seeded from, so the
        two representations agree to far below the integration tolerance at
        the junction.
        """
        xi_arr = np.asarray(xi, dtype=float)
        scalar = xi_arr.ndim == 0
        xi_arr = np.atleast_1d(xi_arr)
        w = np.empty_like(xi_arr)
        wp = np.empty_like(xi_arr)
        above = xi_arr > self.xi0
        if above.any():
            w[above], wp[above] = asymptotic_series(xi_arr[above], self.series_order)
        if (~above).any():
            w[~above], wp[~above] = self.eval_many(xi_arr[~above])
        if scalar:
            return float(w[0]), float(wp[0])
        return w, wp

    def residual_defects(self, grid: np.ndarray) -> np.ndarray:
        """Integral-form defect of each span of a decreasing or increasing grid."""
        return _span_defects(self._dense, self.ts, np.asarray(grid, dtype=float))


def _rhs(xi, y):
    return (y[1], 6.0 * y[0] * y[0] - xi)


def integrate_tritronquee(xi0: float = 30.0, xi_min: float = -6.0, tol: float = 1e-11,
                          series_order: int = 4) -> TritronqueeSolution:
    """Integrate downward from a series seed at xi0 until xi_min or blow-up.

    tol is both rtol and atol of the embedded error control.  The terminal
    event W = BLOWUP_THRESHOLD stops the run just before the pole; the pole
    location is then fitted from the last nodes.
    """
    if not (1e-13 <= tol <= 1e-6):
        raise DomainError("tol must lie in [1e-13, 1e-6]")
    if xi0 < SERIES_MIN_XI:
        raise SeedUnreliable(f"seeding abscissa {xi0} below {SERIES_MIN_XI}")
    if not xi_min < 0.0 < xi0:
        raise DomainError("need xi_min < 0 < xi0")

    w0, wp0 = asymptotic_series(xi0, series_order)

    def blowup(xi, y):
        return y[0] - BLOWUP_THRESHOLD

    blowup.terminal = True
    blowup.direction = 1

    res = solve_ivp(
        _rhs, (xi0, xi_min), (w0, wp0), method="DOP853",
        rtol=tol, atol=tol, dense_output=True, events=[blowup],
    )
    if res.status == -1:
        raise StepSizeUnderflow(f"integrator failed away from a pole: {res.message}")

    blew_up = bool(res.t_events[0].size)
    ts = res.t
    ws, wps = res.y
    pole = _fit_pole(ts, ws) if blew_up else None
    if pole is not None and pole >= 0.0:
        raise RuntimeError(f"internal failure: pole fitted on the positive axis ({pole})")

    sol = TritronqueeSolution(
        xi0=float(xi0), tol=float(tol), ts=ts, ws=ws, wps=wps,
        pole=pole, blew_up=blew_up, series_order=series_order, _dense=res.sol,
    )
    sol.residual_max = _certify(sol)
    return sol


def _certify(sol: TritronqueeSolution) -> float:
    """Max scaled defect over solver steps in [pole + 0.1, xi0].

    The defect of one step is compared against the local scale of the
    right-hand side, mirroring the integrator's mixed absolute/relative
    error control; an exact solution gives zero.
    """
    lo = sol.pole + 0.1 if sol.pole is not None else sol.xi_reached
    ts = sol.ts[sol.ts >= lo]
    if len(ts) < 2:
        return 0.0
    defects = _span_defects(sol._dense, sol.ts, ts, return_scale=True)
    worst = float(np.max(defects))
    if not worst < 100.0 * sol.tol:
        raise RuntimeError(f"residual certification failed: {worst:.3e} >= 100*tol")
    return worst


_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(8)


def _span_defects(dense, knots: np.ndarray, grid: np.ndarray, return_scale: bool = False) -> np.ndarray:
    """|W'(b) - W'(a) - int (6W^2 - xi)| per grid span, split at solver knots.

    Splitting keeps every quadrature panel inside a single interpolant
    polynomial, where Gauss-8 integrates the degree-14 integrand exactly.
    """
    grid = np.sort(np.asarray(grid, dtype=float))
    knots_sorted = np.sort(knots)
    pieces = []
    spans = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        inner = knots_sorted[(knots_sorted > a) & (knots_sorted < b)]
        cuts = np.concatenate(([a], inner, [b]))
        pieces.append(cuts)
        spans.append((a, b))

    # all quadrature points in one dense-output call
    panel_a = np.concatenate([c[:-1] for c in pieces])
    panel_b = np.concatenate([c[1:] for c in pieces])
    centers = 0.5 * (panel_a + panel_b)
    half = 0.5 * (panel_b - panel_a)
    pts = (centers[:, None] + half[:, None] * _GAUSS_X[None, :]).ravel()
    w_pts = dense(pts)[0].reshape(len(panel_a), -1)
    rhs = 6.0 * w_pts**2 - pts.reshape(len(panel_a), -1)
    panel_ints = (rhs @ _GAUSS_W) * half

    ends = np.unique(np.concatenate([np.asarray(s) for s in spans]))
    wp_ends = {e: dense(e)[1] for e in ends}

    out = np.empty(len(spans))
    pos = 0
    for i, ((a, b), cuts) in enumerate(zip(spans, pieces)):
        n_panels = len(cuts) - 1
        integral = float(np.sum(panel_ints[pos:pos + n_panels]))
        defect = abs(float(wp_ends[b] - wp_ends[a]) - integral)
        if return_scale:
            seg = rhs[pos:pos + n_panels]
            scale = 1.0 + float(np.max(np.abs(seg)))
            defect /= scale
        out[i] = defect
        pos += n_panels
    return out


def _fit_pole(ts: np.ndarray, ws: np.ndarray, stop_diff: float = 1e-6) -> float:
    """Estimate xi* from the forced Laurent behaviour W ~ (xi - xi*)^-2.

    Each blown-up node gives the estimate xi - W^(-1/2), whose systematic
    error decays like (xi - xi*)^5; walking toward the pole, the first pair
    of successive estimates closer than stop_diff is accepted.
    """
    mask = ws > 1e3
    if not mask.any():
        raise NoPoleInRange("no nodes deep enough into blow-up to fit a pole")
    xs = ts[mask][-20:]
    vs = ws[mask][-20:]
    estimates = xs - vs**-0.5
    prev = None
    for e in estimates:
        if prev is not None and abs(e - prev) < stop_diff:
            return float(e)
        prev = e
    return float(estimates[-1])


def find_first_negative_pole(sol: TritronqueeSolution) -> float:
    """First pole on the negative axis; requires the integration to have blown up."""
    if not sol.blew_up:
        raise NoPoleInRange("integration reached xi_min without blow-up")
    return _fit_pole(sol.ts, sol.ws)


def laurent_leading_coefficient(sol: TritronqueeSolution) -> float:
    """Fit of sigma in W ~ sigma (xi - xi*)^-2 from the last nodes (should be 1)."""
    pole = find_first_negative_pole(sol)
    mask = sol.ws > 1e3
    xs, vs = sol.ts[mask][-10:], sol.ws[mask][-10:]
    return float(np.mean(vs * (xs - pole) ** 2))
