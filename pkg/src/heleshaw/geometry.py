"""Interface curves, the positive-part projection, and topological events.

Finger curves live on X >= u and read Y(X) = P(X) sqrt(X - u), where the
prefactor P is the polynomial part (non-negative z-powers, X = z^2) of

    sum_k (k + 1/2) t_k z^(2k-1) / sqrt(z^2 - v),

extracted exactly by series division.  For the quintic finger configuration
(t_3 = 2/7) this specializes to P(X) = X^2 + (u/2) X + (3/8) u^2 - 6/5.
Bubble curves read Y(X) = 3 t_3 (X + u) sqrt((X - u)^2 - 4 v), real outside
the tip gap (a, b) = (u - 2 sqrt(v), u + 2 sqrt(v)).

Topological events along the regularized flow are driven by the roots of P
relative to the branch point u(x):

  * cusp: P(u) = 0 (a root collides with the branch point),
  * zero-count-change: the number of real roots >= u jumps by one
    (operational definition of bubble birth/annihilation),
  * root-coalescence: the discriminant of P vanishes (both roots merge:
    the remaining bubble is absorbed by the finger).

u(x) is strictly decreasing along the composite flow, so each event has a
unique abscissa; they are localized by bisection on sign functions over a
grid geometrically refined toward x* (everything interesting clusters
within ~2.4e-4 of the critical point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .hodograph import KdVTimes, r_coeff
from .multiscale import CompositeSolution
from .textio import fmt, json_text
from .toda import TodaInner, toda_composite


# -- the positive-part projection ---------------------------------------

def oplus_project(times: KdVTimes, v) -> list:
    """Prefactor coefficients (ascending in X) of the finger curve.

    Dividing each z^(2k-1) by sqrt(z^2 - v) and keeping non-negative powers
    gives P(X) = sum_k (k + 1/2) t_k sum_{m=0}^{k-1} r_m(v) X^(k-1-m);
    exact in rational arithmetic for Fraction inputs.
    """
    degree = len(times.t) - 1
    zero = Fraction(0) if isinstance(v, Fraction) else 0.0
    coeffs = [zero] * (degree + 1)
    for k, tk in times.items():
        half_k = Fraction(2 * k + 1, 2)
        for m in range(k):
            coeffs[k - 1 - m] = coeffs[k - 1 - m] + half_k * tk * r_coeff(m, v)
    return coeffs


def reexpand_curve_series(coeffs: Sequence, v, n_terms: int) -> list:
    """Coefficients of P(z^2) sqrt(z^2 - v) in decreasing odd powers of z.

    Used as the oracle inverting oplus_project: the positive part must
    reproduce (k + 1/2) t_k at z^(2k-1) exactly, and the z^(-1) coefficient
    equals -H(t, v) + x ... i.e. x/2 exactly when the hodograph equation
    holds.  Exact for Fraction inputs.  Entry [j] multiplies
    z^(2(d - j) + 1) with d = deg P.
    """
    # sqrt(z^2 - v) = z * sum_n s_n (v/z^2)^n, s_n the (1-w)^(1/2) series
    s = [Fraction(1)]
    for n in range(1, n_terms + 1):
        s.append(s[-1] * Fraction(2 * n - 3, 2 * n) if n > 1 else Fraction(-1, 2))
    d = len(coeffs) - 1
    out = [0 * coeffs[0]] * (d + n_terms + 1)
    for j, c in enumerate(coeffs):          # c X^j -> c z^(2j+1) * series
        for n, sn in enumerate(s):
            # power z^(2j+1-2n): index by (d - j + n) in decreasing order
            out[d - j + n] = out[d - j + n] + c * sn * v**n
    return out


# -- curve specifications ------------------------------------------------

@dataclass(frozen=True)
class CurveSpec:
    """Sampled-curve recipe: prefactor polynomial plus branch data.

    kind "finger": Y = P(X) sqrt(X - u), X >= u (v unused).
    kind "bubbles": Y = P(X) sqrt((X - u)^2 - 4 v), real outside the tips.
    """

    kind: str
    poly: tuple
    u: float
    v: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("finger", "bubbles"):
            raise DomainError(f"unknown curve kind {self.kind!r}")
        if self.kind == "bubbles":
            if self.v is None or self.v < 0:
                raise DomainError("bubble curve needs v >= 0")

    @property
    def tips(self) -> tuple[float, float]:
        if self.kind != "bubbles":
            raise DomainError("tips are a bubble-curve notion")
        root = 2.0 * math.sqrt(self.v)
        return (self.u - root, self.u + root)

    def prefactor(self, x):
        return np.polynomial.polynomial.polyval(x, np.asarray(self.poly, dtype=float))

    def y(self, x):
        """Upper-branch Y(X); DomainError off the real locus."""
        xs = np.asarray(x, dtype=float)
        if self.kind == "finger":
            if np.any(xs < self.u - 1e-12 * (1 + abs(self.u))):
                raise DomainError("finger curve undefined below the branch point u")
            radicand = np.maximum(xs - self.u, 0.0)
        else:
            a, b = self.tips
            inside = (xs > a + 1e-12) & (xs < b - 1e-12)
            if np.any(inside):
                raise DomainError("bubble curve undefined strictly between the tips")
            radicand = np.maximum((xs - self.u) ** 2 - 4.0 * self.v, 0.0)
        return self.prefactor(xs) * np.sqrt(radicand)

    def real_zeros(self) -> list[float]:
        """Zeros of Y on the real locus: branch/tip points plus prefactor roots."""
        if self.kind == "finger":
            zeros = [self.u]
            zeros += [r for r in _poly_real_roots(self.poly) if r >= self.u]
        else:
            a, b = self.tips
            zeros = [a, b]
            zeros += [r for r in _poly_real_roots(self.poly) if r <= a or r >= b]
        return sorted(set(zeros))


def _poly_real_roots(poly: Sequence[float]) -> list[float]:
    cs = [float(c) for c in poly]
    while cs and cs[-1] == 0.0:
        cs.pop()
    if len(cs) <= 1:
        return []
    if len(cs) == 2:
        return [-cs[0] / cs[1]]
    if len(cs) == 3:
        c0, c1, c2 = cs
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0:
            return []
        q = -0.5 * (c1 + math.copysign(math.sqrt(disc), c1 if c1 != 0 else 1.0))
        roots = {q / c2} | ({c0 / q} if q != 0 else {-c1 / (2 * c2)})
        return sorted(roots)
    roots = np.roots(cs[::-1])
    scale = 1.0 + max(abs(c) for c in cs)
    return sorted(r.real for r in roots if abs(r.imag) < 1e-9 * scale)


# -- frames ------------------------------------------------------------------

@dataclass(frozen=True)
class Event:
    """Topological change of the interface at flow abscissa x_value."""

    kind: str           # cusp | zero-count-change | root-coalescence
    u_value: float
    x_value: float

    def to_json(self) -> dict:
        return {"kind": self.kind, "u": self.u_value, "x": self.x_value}


@dataclass
class InterfaceFrame:
    """One sampled interface frame (upper branch; lower branch is Y -> -Y)."""

    x: float
    samples: list[tuple[float, float]]
    events_so_far: list[Event] = field(default_factory=list)


def _chebyshev_points(a: float, b: float, n: int) -> np.ndarray:
    # cosine clustering toward both ends: faithful square-root behaviour
    theta = np.linspace(0.0, math.pi, max(n, 4))
    return a + (b - a) * 0.5 * (1.0 - np.cos(theta))


def _sample_segments(spec: CurveSpec, segments: list[tuple[float, float]], n: int):
    total = sum(b - a for a, b in segments)
    samples: list[tuple[float, float]] = []
    zero_map = {round(z, 15): z for z in spec.real_zeros()}
    for a, b in segments:
        m = max(8, int(round(n * (b - a) / total))) if total > 0 else n
        xs = _chebyshev_points(a, b, m)
        ys = spec.y(xs)
        for xv, yv in zip(xs, ys):
            # snap to the analytic zeros: exact coordinates, exact Y = 0
            key = round(float(xv), 15)
            if key in zero_map:
                samples.append((zero_map[key], 0.0))
            else:
                samples.append((float(xv), float(yv)))
    # dedupe shared endpoints, keep x increasing
    samples.sort(key=lambda p: p[0])
    out = [samples[0]]
    for p in samples[1:]:
        if p[0] > out[-1][0]:
            out.append(p)
    return out


def finger_curve(u: float, times: KdVTimes, X_range: Optional[tuple[float, float]] = None,
                 n: int = 400) -> InterfaceFrame:
    """Sampled finger frame at branch point u; abscissa taken from times.x.

    Sampling is densest near the curve zeros (cosine clustering per segment)
    and the zeros themselves are hit exactly with Y = 0.
    """
    spec = CurveSpec(kind="finger", poly=tuple(float(c) for c in oplus_project(times, u)), u=float(u))
    zeros = spec.real_zeros()
    if X_range is None:
        X_range = (spec.u, max(zeros[-1] + 1.0, spec.u + 1.5))
    lo, hi = float(X_range[0]), float(X_range[1])
    if lo < spec.u - 1e-12 * (1 + abs(spec.u)):
        raise DomainError(f"requested X below the branch point u = {spec.u}")
    cuts = [lo] + [z for z in zeros if lo < z < hi] + [hi]
    segments = [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]
    return InterfaceFrame(x=float(times.x), samples=_sample_segments(spec, segments, n))


def bubble_curve(u: float, v: float, t_3: float, X_range: Optional[tuple[float, float]] = None,
                 n: int = 400, x_label: float = math.nan) -> InterfaceFrame:
    """Sampled two-bubble frame: Y = 3 t_3 (X + u) sqrt((X - u)^2 - 4 v).

    The real locus excludes the open tip gap (a, b); requesting samples
    inside it is a domain error.  v = 0 is the merging moment (tips touch).
    """
    if v < 0:
        raise DomainError("bubble curve needs v >= 0")
    spec = CurveSpec(kind="bubbles", poly=(3.0 * t_3 * u, 3.0 * t_3), u=float(u), v=float(v))
    a, b = spec.tips
    if X_range is None:
        pad = max(b - a, 1.0)
        X_range = (a - pad, b + pad)
    lo, hi = float(X_range[0]), float(X_range[1])
    if lo > a - 1e-15 and hi < b + 1e-15:
        raise DomainError("requested window lies strictly inside the tip gap")
    zeros = spec.real_zeros()
    segments = []
    for seg_lo, seg_hi in ((lo, min(a, hi)), (max(b, lo), hi)):
        if seg_hi > seg_lo:
            cuts = [seg_lo] + [z for z in zeros if seg_lo < z < seg_hi] + [seg_hi]
            segments += [(p, q) for p, q in zip(cuts[:-1], cuts[1:]) if q > p]
    if not segments:
        raise DomainError("empty sampling window")
    return InterfaceFrame(x=float(x_label), samples=_sample_segments(spec, segments, n))


# -- event detection -----------------------------------------------------

def _quad_data(poly):
    c0, c1, c2 = (float(poly[0]), float(poly[1]), float(poly[2]))
    return c0, c1, c2


def _root_count_geq(poly, u: float) -> int:
    """Number of real prefactor roots >= u (quadratic fast path)."""
    cs = [float(c) for c in poly]
    if len(cs) == 3 and cs[2] != 0.0:
        c0, c1, c2 = _quad_data(cs)
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return 0
        root = math.sqrt(disc)
        r1, r2 = (-c1 - root) / (2 * c2), (-c1 + root) / (2 * c2)
        return int(r1 >= u) + int(r2 >= u)
    return sum(1 for r in _poly_real_roots(cs) if r >= u)


def _bisect_to_machine(fn, lo, hi, flo):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = fn(mid)
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _bisect_transition(fn, lo, hi, base):
    """Bisect an integer-valued transition: largest x with fn(x) == base."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if fn(mid) == base:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


_EVENT_PRIORITY = {"cusp": 0, "zero-count-change": 1, "root-coalescence": 2}


def detect_events(comp: CompositeSolution, x_range: tuple[float, float],
                  resolution: int = 10_000) -> list[Event]:
    """Ordered topological events of the composite flow on x_range.

    The scan grid is uniform over the outer region and geometrically refined
    toward x* (where u(x) dives to -infinity); each sign change of P(u),
    of the discriminant of P, and each jump of the root count is bisected
    to machine precision.  An even root-count jump is the coalescence
    itself and is reported once, as root-coalescence.
    """
    lo, hi = float(x_range[0]), float(x_range[1])
    hi = min(hi, comp.x_star - 2e-7)
    if not lo < hi:
        return []
    times = comp.cp.times_c

    def u_of(x):
        return comp.eval(float(x))

    def g_of_u(u):
        return float(np.polynomial.polynomial.polyval(u, np.asarray(oplus_project(times, u), dtype=float)))

    def h_of_u(u):
        c0, c1, c2 = _quad_data(oplus_project(times, u))
        return c1 * c1 - 4.0 * c2 * c0

    def count_of_u(u):
        return _root_count_geq(oplus_project(times, u), u)

    def g_cusp(x):
        return g_of_u(u_of(x))

    def h_disc(x):
        return h_of_u(u_of(x))

    def count(x):
        return count_of_u(u_of(x))

    # grid: uniform bulk + geometric refinement into the critical layer
    n_uniform = max(resolution // 2, 16)
    n_geo = max(resolution - n_uniform, 16)
    uniform = np.linspace(lo, hi, n_uniform)
    geo = comp.x_star - np.geomspace(comp.x_star - lo, max(comp.x_star - hi, 2e-7), n_geo)
    grid = np.unique(np.concatenate([uniform, geo, [hi]]))
    grid = grid[(grid >= lo) & (grid <= hi)]
    u_grid = comp.eval_many(grid)

    events: list[Event] = []

    g_vals = np.array([g_of_u(u) for u in u_grid])
    for i in np.flatnonzero(np.sign(g_vals[:-1]) * np.sign(g_vals[1:]) < 0):
        x_ev = _bisect_to_machine(g_cusp, grid[i], grid[i + 1], g_vals[i])
        events.append(Event("cusp", u_value=u_of(x_ev), x_value=x_ev))

    h_vals = np.array([h_of_u(u) for u in u_grid])
    coalescences = []
    for i in np.flatnonzero(np.sign(h_vals[:-1]) * np.sign(h_vals[1:]) < 0):
        x_ev = _bisect_to_machine(h_disc, grid[i], grid[i + 1], h_vals[i])
        coalescences.append(Event("root-coalescence", u_value=u_of(x_ev), x_value=x_ev))
    events.extend(coalescences)

    c_vals = np.array([count_of_u(u) for u in u_grid])
    for i in np.flatnonzero(np.diff(c_vals) != 0):
        jump = int(c_vals[i + 1] - c_vals[i])
        if jump % 2 == 0:
            # a root pair left/entered the real axis: that is the coalescence,
            # already reported through the discriminant crossing
            if any(grid[i] <= ev.x_value <= grid[i + 1] for ev in coalescences):
                continue
            kind = "root-coalescence"
        else:
            kind = "zero-count-change"
        x_ev = _bisect_transition(count, grid[i], grid[i + 1], int(c_vals[i]))
        events.append(Event(kind, u_value=u_of(x_ev), x_value=x_ev))

    def order_key(ev: Event):
        return (ev.x_value, _EVENT_PRIORITY[ev.kind])

    events.sort(key=order_key)
    # collapse events that bisected to the same abscissa with the same kind
    deduped: list[Event] = []
    for ev in events:
        if deduped and deduped[-1].kind == ev.kind and abs(deduped[-1].x_value - ev.x_value) < 1e-12:
            continue
        deduped.append(ev)
    return deduped


# -- frame emission ------------------------------------------------------

def emit_frames(source, abscissas: Sequence[float], outdir, n: int = 400,
                events: Optional[list[Event]] = None,
                X_range: Optional[tuple[float, float]] = None) -> dict:
    """Write frame_<index>.csv per abscissa plus a JSON manifest with events.

    `source` is a KdV CompositeSolution (finger frames; events detected over
    the abscissa span unless given), a TodaInner (bubble frames at inner
    times t~), or a callable  abscissa -> InterfaceFrame.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    abscissas = [float(x) for x in abscissas]

    if isinstance(source, CompositeSolution):
        comp = source

        def frame_at(x: float) -> InterfaceFrame:
            u = comp.eval(x)
            lo = max(u, X_range[0]) if X_range else u
            hi_x = X_range[1] if X_range else max(2.5, u + 1.0)
            return finger_curve(u, comp.cp.times_c.with_x(x), X_range=(lo, hi_x), n=n)

        if events is None and abscissas:
            events = detect_events(comp, (min(abscissas), max(abscissas)))
    elif isinstance(source, TodaInner):
        inner = source

        def frame_at(t_tilde: float) -> InterfaceFrame:
            u, v = toda_composite(t_tilde, inner)
            return bubble_curve(u, v, float(inner.crit.t_3), X_range=X_range, n=n, x_label=t_tilde)
    else:
        frame_at = source

    events = events or []
    manifest: dict = {"frames": [], "events": [ev.to_json() for ev in events]}
    for index, x in enumerate(abscissas):
        frame = frame_at(x)
        frame.events_so_far = [ev for ev in events if ev.x_value <= x]
        name = f"frame_{index:03d}.csv"
        path = outdir / name
        with open(path, "w") as fh:
            fh.write("X,Y\n")
            for xv, yv in frame.samples:
                fh.write(f"{fmt(xv)},{fmt(yv)}\n")
        manifest["frames"].append({
            "index": index,
            "x": x,
            "file": name,
            "n_samples": len(frame.samples),
            "n_events_so_far": len(frame.events_so_far),
        })
    with open(outdir / "manifest.json", "w") as fh:
        fh.write(json_text(manifest))
        fh.write("\n")
    return manifest
