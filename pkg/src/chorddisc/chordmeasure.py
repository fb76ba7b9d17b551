"""The endpoint-pair measure of a convex body and its integral-geometry toolkit.

The invariant measure on lines meeting a convex body pushes forward to a
probability measure mu on ordered boundary-parameter pairs (s, t) in
[0, 1)^2.  Everything this package needs about mu is closed-form:

* density (fraction coordinates):  perimeter * sin(a) * sin(b) / (2 w),
  where a, b are the angles between the chord and the boundary tangents at
  its endpoints and w is the chord length;
* rectangle masses: for disjoint boundary arcs [a,b) and [c,d),
  mu([a,b) x [c,d)) = (d(a,c) + d(b,d) - d(a,d) - d(b,c)) / (2 * perimeter)
  with d(x, y) the Euclidean distance of the boundary points -- the
  classical four-point crossing-measure identity; arcs are first cut into
  pieces so every piece pair is disjoint or identical;
* the first marginal is uniform, and the conditional law of the second
  endpoint given the first is the illumination law: the chord leaves the
  boundary at angle theta from the tangent with CDF (1 - cos(theta)) / 2,
  so conditional inversion is a single ray-shooting step.

A numeric quadrature of the density is kept alongside as a cross-check
oracle; it is deliberately independent of the closed forms above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    Chord,
    ConvexBody,
    ConvexPolygon,
    Disk,
    cyclic_length,
    wrap_param,
    wrap_params,
)

__all__ = [
    "InternalConsistencyError",
    "ParamRect",
    "EndpointMeasure",
    "VariationBudget",
    "hk_variation",
    "KoksmaCheck",
    "koksma_gap_check",
    "chord_length_grid",
]


class InternalConsistencyError(RuntimeError):
    """Two internal evaluation routes disagreed beyond tolerance."""


@dataclass(frozen=True)
class ParamRect:
    """Product of two cyclic half-open parameter intervals.

    Each axis is stored as (lo, length) with lo in [0, 1) and
    0 < length <= 1, so the full square is representable.
    """

    s_lo: float
    s_len: float
    t_lo: float
    t_len: float

    def __post_init__(self):
        for lo, ln in ((self.s_lo, self.s_len), (self.t_lo, self.t_len)):
            if not (0.0 <= lo < 1.0):
                raise ValueError(f"interval start {lo} outside [0, 1)")
            if not (0.0 < ln <= 1.0):
                raise ValueError(f"interval length {ln} outside (0, 1]")

    @classmethod
    def from_bounds(cls, a: float, b: float, c: float, d: float) -> "ParamRect":
        """Rectangle [a,b) x [c,d); (x, x+1) denotes a full axis."""

        def interval(lo, hi):
            if hi == lo + 1.0:
                return wrap_param(lo), 1.0
            lo = wrap_param(lo)
            hi = wrap_param(hi)
            ln = cyclic_length(lo, hi)
            if ln == 0.0:
                raise ValueError("empty parameter interval")
            return lo, ln

        s_lo, s_len = interval(a, b)
        t_lo, t_len = interval(c, d)
        return cls(s_lo, s_len, t_lo, t_len)

    @classmethod
    def full_square(cls) -> "ParamRect":
        return cls(0.0, 1.0, 0.0, 1.0)


def _segments(cuts: np.ndarray) -> list[tuple[float, float]]:
    """Consecutive cyclic segments between sorted cut points."""
    segs = []
    for i in range(len(cuts)):
        lo = cuts[i]
        hi = cuts[(i + 1) % len(cuts)]
        ln = cyclic_length(lo, hi)
        if ln == 0.0 and len(cuts) > 1:
            continue
        segs.append((lo, ln if ln > 0.0 else 1.0))
    return segs


class EndpointMeasure:
    """The normalized endpoint-pair measure mu of one convex body."""

    def __init__(self, body: ConvexBody):
        self.body = body
        self.line_measure = body.perimeter  # total invariant measure of lines meeting the body
        self._anchor = np.asarray(body.boundary_point(0.0), dtype=float)

    # ------------------------------------------------------------------
    # pointwise density
    # ------------------------------------------------------------------

    def density(self, s, t):
        """Density of mu w.r.t. ds dt on [0,1)^2, in fraction coordinates.

        Zero on the diagonal and on degenerate (same flat side) pairs.
        """
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        s_b, t_b = np.broadcast_arrays(s_arr, t_arr)
        shape = s_b.shape
        sf = wrap_params(s_b.ravel().copy())
        tf = wrap_params(t_b.ravel().copy())
        ps = np.atleast_2d(self.body.boundary_point(sf))
        pt = np.atleast_2d(self.body.boundary_point(tf))
        e = pt - ps
        w = np.linalg.norm(e, axis=1)
        ok = w > 1e-14 * self.body.diameter
        out = np.zeros(sf.shape)
        if np.any(ok):
            ts = np.atleast_2d(self.body.boundary_tangent(sf))
            tt = np.atleast_2d(self.body.boundary_tangent(tf))
            sin_a = np.abs(e[:, 0] * ts[:, 1] - e[:, 1] * ts[:, 0])
            sin_b = np.abs(e[:, 0] * tt[:, 1] - e[:, 1] * tt[:, 0])
            with np.errstate(divide="ignore", invalid="ignore"):
                val = self.body.perimeter * sin_a * sin_b / (2.0 * w**3)
            out[ok] = val[ok]
        if isinstance(self.body, ConvexPolygon):
            same = self.body.side_of_param(sf) == self.body.side_of_param(tf)
            out[same] = 0.0
        out = out.reshape(shape)
        return out.item() if np.isscalar(s) and np.isscalar(t) else out

    # ------------------------------------------------------------------
    # exact rectangle masses
    # ------------------------------------------------------------------

    def chord_distance(self, x, y):
        """Euclidean distance between the boundary points at parameters x, y."""
        px = np.atleast_2d(self.body.boundary_point(np.atleast_1d(np.asarray(x, float))))
        py = np.atleast_2d(self.body.boundary_point(np.atleast_1d(np.asarray(y, float))))
        d = np.linalg.norm(px - py, axis=1)
        return d.item() if np.isscalar(x) and np.isscalar(y) else d

    def _four_point(self, p: tuple[float, float], q: tuple[float, float]) -> float:
        """Mass of P x Q for two disjoint cyclic segments (lo, length)."""
        p1, p2 = p[0], wrap_param(p[0] + p[1])
        q1, q2 = q[0], wrap_param(q[0] + q[1])
        d = self.chord_distance
        val = d(p1, q1) + d(p2, q2) - d(p1, q2) - d(p2, q1)
        return val / (2.0 * self.line_measure)

    def rect_mass(self, rect: ParamRect) -> float:
        """mu(rect), exactly, via the four-point crossing identity."""
        s_end = wrap_param(rect.s_lo + rect.s_len)
        t_end = wrap_param(rect.t_lo + rect.t_len)
        cuts = np.unique([rect.s_lo, s_end, rect.t_lo, t_end])
        segs = _segments(cuts)

        def covered(seg, lo, ln):
            mid = (seg[0] + 0.5 * seg[1]) % 1.0
            return ((mid - lo) % 1.0) < ln or ln == 1.0

        s_segs = [g for g in segs if covered(g, rect.s_lo, rect.s_len)]
        t_segs = [g for g in segs if covered(g, rect.t_lo, rect.t_len)]
        total = 0.0
        for p in s_segs:
            for q in t_segs:
                if p == q:
                    total += p[1] - self.chord_distance(p[0], wrap_param(p[0] + p[1])) / self.line_measure
                else:
                    total += self._four_point(p, q)
        return total

    def anchored_mass(self, x, y):
        """mu([0, x) x [0, y)) for x, y in [0, 1]; vectorized.

        Closed form: min(x, y) + (d(x, y) - d(0, x) - d(0, y)) / (2 * perimeter).
        """
        x_arr = np.asarray(x, dtype=float)
        y_arr = np.asarray(y, dtype=float)
        xb, yb = np.broadcast_arrays(x_arr, y_arr)
        shape = xb.shape
        xf = np.clip(xb.ravel(), 0.0, 1.0)
        yf = np.clip(yb.ravel(), 0.0, 1.0)
        px = np.atleast_2d(self.body.boundary_point(xf))
        py = np.atleast_2d(self.body.boundary_point(yf))
        dxy = np.linalg.norm(px - py, axis=1)
        d0x = np.linalg.norm(px - self._anchor[None, :], axis=1)
        d0y = np.linalg.norm(py - self._anchor[None, :], axis=1)
        out = np.minimum(xf, yf) + (dxy - d0x - d0y) / (2.0 * self.line_measure)
        out = out.reshape(shape)
        return out.item() if np.isscalar(x) and np.isscalar(y) else out

    def total_mass(self) -> float:
        return self.rect_mass(ParamRect.full_square())

    # ------------------------------------------------------------------
    # marginal / conditional transport maps
    # ------------------------------------------------------------------

    def conditional_cdf(self, s, t):
        """Conditional CDF of the second endpoint given the first.

        Equals (1 - cos(theta)) / 2 where theta is the angle at the first
        endpoint between the forward tangent and the chord direction.
        """
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        sb, tb = np.broadcast_arrays(s_arr, t_arr)
        ps = np.atleast_2d(self.body.boundary_point(sb.ravel()))
        pt = np.atleast_2d(self.body.boundary_point(tb.ravel()))
        tan = np.atleast_2d(self.body.boundary_tangent(sb.ravel()))
        e = pt - ps
        cross = tan[:, 0] * e[:, 1] - tan[:, 1] * e[:, 0]
        dot = (tan * e).sum(axis=1)
        theta = np.arctan2(np.maximum(cross, 0.0), dot)
        out = 0.5 * (1.0 - np.cos(theta)).reshape(sb.shape)
        return out.item() if np.isscalar(s) and np.isscalar(t) else out

    def conditional_inverse(self, s, q):
        """Second endpoint t with conditional CDF q given first endpoint s.

        Shoots a ray from the boundary point at s, tilted by
        theta = arccos(1 - 2q) from the tangent into the body, and returns
        the exit parameter.  q -> 0 or 1 yields a degenerate pair; callers
        guard for that.
        """
        scalar = np.isscalar(s) and np.isscalar(q)
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        q_arr = np.atleast_1d(np.asarray(q, dtype=float))
        sb, qb = np.broadcast_arrays(s_arr, q_arr)
        sf = wrap_params(sb.ravel().copy())
        theta = np.arccos(1.0 - 2.0 * np.clip(qb.ravel(), 0.0, 1.0))
        if isinstance(self.body, Disk):
            t = wrap_params(sf + theta / math.pi)
        else:
            t, _ = _polygon_ray_exit(self.body, sf, theta)
        t = t.reshape(sb.shape)
        return t.item() if scalar else t

    def ray_chord_length(self, s, theta):
        """Length of the chord leaving parameter s at tangent angle theta."""
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        th = np.atleast_1d(np.asarray(theta, dtype=float))
        sb, tb = np.broadcast_arrays(s_arr, th)
        if isinstance(self.body, Disk):
            return 2.0 * self.body.radius * np.sin(np.clip(tb, 0.0, math.pi))
        _, rho = _polygon_ray_exit(self.body, sb.ravel().copy(), tb.ravel())
        return rho.reshape(sb.shape)

    # ------------------------------------------------------------------
    # Crofton identities
    # ------------------------------------------------------------------

    def mean_chord_length(self, check_tol: float = 1e-6) -> float:
        """Mean chord length pi * area / perimeter (Crofton).

        Also evaluates the defining integral by quadrature and raises
        InternalConsistencyError if the routes disagree beyond check_tol
        (relative).
        """
        closed = math.pi * self.body.area / self.line_measure
        quad = self.mean_chord_quadrature()
        if abs(quad - closed) > check_tol * abs(closed):
            raise InternalConsistencyError(
                f"mean chord length: closed form {closed!r} vs quadrature {quad!r}"
            )
        return closed

    def mean_chord_quadrature(self, n_outer: int = 64, n_inner: int = 64) -> float:
        """Quadrature of the mean chord length over (s, exit-angle) space."""
        gl_x, gl_w = np.polynomial.legendre.leggauss(n_outer)
        if isinstance(self.body, Disk):
            pieces = [(0.0, 1.0)]
        else:
            vp = np.sort(self.body.vertex_params)
            pieces = [(vp[i], vp[i + 1] if i + 1 < len(vp) else vp[0] + 1.0) for i in range(len(vp))]
        total = 0.0
        for a, b in pieces:
            s_nodes = 0.5 * (a + b) + 0.5 * (b - a) * gl_x
            s_weights = 0.5 * (b - a) * gl_w
            for s0, ws in zip(wrap_params(s_nodes), s_weights):
                total += ws * self._inner_theta_integral(float(s0), n_inner)
        return total

    def _inner_theta_integral(self, s: float, n_inner: int) -> float:
        """integral over theta in (0, pi) of rho(s, theta) sin(theta)/2."""
        breaks = [0.0, math.pi]
        if isinstance(self.body, ConvexPolygon):
            o = np.asarray(self.body.boundary_point(s))
            tan = np.asarray(self.body.boundary_tangent(s))
            rel = self.body.vertices - o[None, :]
            cross = tan[0] * rel[:, 1] - tan[1] * rel[:, 0]
            dot = rel @ tan
            ang = np.arctan2(cross, dot)
            breaks.extend(float(a) for a in ang if 1e-12 < a < math.pi - 1e-12)
        breaks = sorted(set(breaks))
        gl_x, gl_w = np.polynomial.legendre.leggauss(n_inner)
        total = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            th = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl_x
            wt = 0.5 * (hi - lo) * gl_w
            rho = self.ray_chord_length(np.full(th.shape, s), th)
            total += float(np.sum(wt * rho * np.sin(th) * 0.5))
        return total

    def crossing_mass(self, chord) -> float:
        """mu-mass of the set of chords crossing the given test chord.

        Equals 2 * (test chord length) / perimeter: the crossing set is
        exactly the endpoint pairs split by either boundary arc of the
        test chord.
        """
        if isinstance(chord, Chord):
            w = chord.w
        else:
            s, t = chord
            w = self.chord_distance(float(s), float(t))
        return 2.0 * w / self.line_measure

    def crossing_set_mass(self, s: float, t: float) -> float:
        """Mass of the crossing set as rectangles (I x Ic) u (Ic x I)."""
        s = wrap_param(s)
        t = wrap_param(t)
        r1 = ParamRect.from_bounds(s, s + cyclic_length(s, t), t, t + cyclic_length(t, s))
        r2 = ParamRect.from_bounds(t, t + cyclic_length(t, s), s, s + cyclic_length(s, t))
        return self.rect_mass(r1) + self.rect_mass(r2)

    # ------------------------------------------------------------------
    # independent numeric cross-check
    # ------------------------------------------------------------------

    def rect_mass_quadrature(self, rect: ParamRect, n_gauss: int = 32, graded_levels: int = 26) -> float:
        """Quadrature of the density over the rectangle (cross-check oracle).

        Segments are additionally split at polygon vertices; pairs sharing
        a vertex use a geometrically graded mesh toward the singular
        corner.  Identical segments integrate over the gap coordinate.
        """
        s_end = wrap_param(rect.s_lo + rect.s_len)
        t_end = wrap_param(rect.t_lo + rect.t_len)
        cut_vals = [rect.s_lo, s_end, rect.t_lo, t_end]
        if isinstance(self.body, ConvexPolygon):
            cut_vals.extend(self.body.vertex_params.tolist())
        cuts = np.unique(cut_vals)
        segs = _segments(cuts)

        def covered(seg, lo, ln):
            mid = (seg[0] + 0.5 * seg[1]) % 1.0
            return ((mid - lo) % 1.0) < ln or ln == 1.0

        s_segs = [g for g in segs if covered(g, rect.s_lo, rect.s_len)]
        t_segs = [g for g in segs if covered(g, rect.t_lo, rect.t_len)]
        gl_x, gl_w = np.polynomial.legendre.leggauss(n_gauss)
        total = 0.0
        for p in s_segs:
            for q in t_segs:
                if p == q:
                    total += self._self_segment_quadrature(p, gl_x, gl_w)
                else:
                    total += self._cross_segment_quadrature(p, q, gl_x, gl_w, graded_levels)
        return total

    def _self_segment_quadrature(self, seg, gl_x, gl_w) -> float:
        lo, ln = seg
        if isinstance(self.body, ConvexPolygon):
            # a segment that stays within one flat side carries no mass
            if self.body.side_of_param(lo + 1e-12) == self.body.side_of_param(lo + ln - 1e-12):
                return 0.0
        # disk: translation invariance along the diagonal; integrate the gap
        gam = 0.5 * ln + 0.5 * ln * gl_x
        wts = 0.5 * ln * gl_w
        dens = self.density(np.full(gam.shape, lo), lo + gam)
        return 2.0 * float(np.sum(wts * (ln - gam) * dens))

    def _cross_segment_quadrature(self, p, q, gl_x, gl_w, graded_levels) -> float:
        share_lo = wrap_param(p[0] + p[1]) == q[0]
        share_hi = wrap_param(q[0] + q[1]) == p[0]

        def grade(seg, toward_start):
            lo, ln = seg
            knots = [0.0] + [ln * 0.5**k for k in range(graded_levels, 0, -1)] + [ln]
            knots = np.unique(knots)
            if not toward_start:
                knots = ln - knots[::-1]
            return lo + knots

        sk = grade(p, share_hi) if (share_lo or share_hi) else np.array([p[0], p[0] + p[1]])
        tk = grade(q, share_lo) if (share_lo or share_hi) else np.array([q[0], q[0] + q[1]])
        total = 0.0
        for i in range(len(sk) - 1):
            s_nodes = 0.5 * (sk[i] + sk[i + 1]) + 0.5 * (sk[i + 1] - sk[i]) * gl_x
            s_wts = 0.5 * (sk[i + 1] - sk[i]) * gl_w
            for j in range(len(tk) - 1):
                t_nodes = 0.5 * (tk[j] + tk[j + 1]) + 0.5 * (tk[j + 1] - tk[j]) * gl_x
                t_wts = 0.5 * (tk[j + 1] - tk[j]) * gl_w
                dens = self.density(s_nodes[:, None], t_nodes[None, :])
                total += float(s_wts @ dens @ t_wts)
        return total

    # ------------------------------------------------------------------
    # degeneracy guard for transported points
    # ------------------------------------------------------------------

    def is_degenerate_pair(self, s: float, t: float, tol: float = 1e-9) -> bool:
        """Membership test for the null set of non-chord endpoint pairs."""
        if self.body.chord_is_degenerate(s, t, tol):
            return True
        if isinstance(self.body, ConvexPolygon):
            vp = self.body.vertex_params
            for x in (s, t):
                gap = np.abs(vp - x)
                if np.min(np.minimum(gap, 1.0 - gap)) < 1e-12:
                    return True
        return False


def _polygon_ray_exit(poly: ConvexPolygon, s: np.ndarray, theta: np.ndarray):
    """Exit parameter and ray length for rays leaving the boundary.

    The ray starts at boundary parameter s[i] and makes angle theta[i]
    (counterclockwise, into the body) with the forward tangent.
    """
    o = np.atleast_2d(poly.boundary_point(s))
    tan = np.atleast_2d(poly.boundary_tangent(s))
    ct, st = np.cos(theta), np.sin(theta)
    d = np.stack([tan[:, 0] * ct - tan[:, 1] * st, tan[:, 0] * st + tan[:, 1] * ct], axis=1)
    a = poly.vertices
    e = poly.side_dirs * poly.side_lengths[:, None]
    ao = a[None, :, :] - o[:, None, :]
    denom = d[:, None, 0] * e[None, :, 1] - d[:, None, 1] * e[None, :, 0]
    cross_ao_e = ao[:, :, 0] * e[None, :, 1] - ao[:, :, 1] * e[None, :, 0]
    cross_ao_d = ao[:, :, 0] * d[:, None, 1] - ao[:, :, 1] * d[:, None, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = cross_ao_e / denom
        tau = cross_ao_d / denom
    tol = 1e-12 * poly.diameter
    valid = np.isfinite(lam) & (lam > tol) & (tau >= -1e-12) & (tau <= 1.0 + 1e-12)
    lam = np.where(valid, lam, np.inf)
    k = np.argmin(lam, axis=1)
    rows = np.arange(s.shape[0])
    rho = lam[rows, k]
    tau_k = np.clip(tau[rows, k], 0.0, 1.0)
    missing = ~np.isfinite(rho)
    rho = np.where(missing, 0.0, rho)
    t = wrap_params((poly._cum[k] + tau_k * poly.side_lengths[k]) / poly.perimeter)
    t = np.where(missing, s, t)
    return t, rho


@dataclass(frozen=True)
class VariationBudget:
    """Hardy-Krause variation of a grid function, split into its four terms."""

    total: float
    corner: float
    face_s: float
    face_t: float
    mixed: float
    grid_shape: tuple

    def __post_init__(self):
        parts = math.fsum((self.corner, self.face_s, self.face_t, self.mixed))
        if abs(self.total - parts) > 1e-12 * max(1.0, abs(self.total)):
            raise InternalConsistencyError("variation components do not sum to total")


def hk_variation(values: np.ndarray, diagonal_jump: float | None = None,
                 x_grid: np.ndarray | None = None, y_grid: np.ndarray | None = None) -> VariationBudget:
    """Hardy-Krause variation of samples of f on a grid over [0, 1]^2.

    Computes |f(1,1)|, the two edge total variations at x=1 and y=1, and
    the grid Vitali (mixed-difference) mass.  ``diagonal_jump`` declares a
    known ridge |slope| along the main diagonal (chord-length functions
    behave like perimeter * |s - t| there); cells crossed by the diagonal
    then contribute at least the ridge model mass 2 * slope * overlap,
    which protects grids whose nodes miss the diagonal.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 2:
        raise ValueError("need a grid of at least 2 x 2 samples")
    nx, ny = values.shape
    xg = np.linspace(0.0, 1.0, nx) if x_grid is None else np.asarray(x_grid, float)
    yg = np.linspace(0.0, 1.0, ny) if y_grid is None else np.asarray(y_grid, float)
    corner = abs(float(values[-1, -1]))
    face_s = float(np.abs(np.diff(values[:, -1])).sum())
    face_t = float(np.abs(np.diff(values[-1, :])).sum())
    mixed_cells = np.abs(np.diff(np.diff(values, axis=0), axis=1))
    if diagonal_jump is not None:
        overlap = np.maximum(
            0.0,
            np.minimum(xg[1:, None], yg[None, 1:]) - np.maximum(xg[:-1, None], yg[None, :-1]),
        )
        mixed_cells = np.maximum(mixed_cells, 2.0 * abs(diagonal_jump) * overlap)
    mixed = float(mixed_cells.sum())
    total = math.fsum((corner, face_s, face_t, mixed))
    return VariationBudget(total=total, corner=corner, face_s=face_s, face_t=face_t,
                           mixed=mixed, grid_shape=values.shape)


@dataclass(frozen=True)
class KoksmaCheck:
    lhs: float
    bound: float
    delta: float
    variation: float
    holds: bool


def koksma_gap_check(points: np.ndarray, measure: EndpointMeasure, f_values: np.ndarray,
                     delta: float | None = None, diagonal_jump: float | None = None) -> KoksmaCheck:
    """Koksma-Hlawka style check: |sum f(z_i) - N int f dmu| <= V_HK(f) * Delta.

    ``delta`` is the all-rectangle discrepancy of the points against mu in
    count units; when omitted it is measured exactly.  f is supplied as a
    uniform grid of samples on [0, 1]^2 and integrated cell by cell against
    exact rectangle masses.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if delta is None:
        from .lowdisc import rect_discrepancy

        delta = rect_discrepancy(points, measure, family="all").value
    f_values = np.asarray(f_values, dtype=float)
    m = f_values.shape[0] - 1
    grid = np.linspace(0.0, 1.0, m + 1)
    a_table = measure.anchored_mass(grid[:, None], grid[None, :])
    cell_mass = np.diff(np.diff(a_table, axis=0), axis=1)
    cell_mean = 0.25 * (f_values[:-1, :-1] + f_values[1:, :-1] + f_values[:-1, 1:] + f_values[1:, 1:])
    integral = float(np.sum(cell_mass * cell_mean))
    # bilinear interpolation of the grid at the points
    xs = np.clip(points[:, 0], 0.0, 1.0) * m
    ys = np.clip(points[:, 1], 0.0, 1.0) * m
    i = np.clip(xs.astype(int), 0, m - 1)
    j = np.clip(ys.astype(int), 0, m - 1)
    fx = xs - i
    fy = ys - j
    vals = ((1 - fx) * (1 - fy) * f_values[i, j] + fx * (1 - fy) * f_values[i + 1, j]
            + (1 - fx) * fy * f_values[i, j + 1] + fx * fy * f_values[i + 1, j + 1])
    lhs = abs(float(np.sum(vals)) - n * integral)
    variation = hk_variation(f_values, diagonal_jump=diagonal_jump).total
    bound = variation * delta
    return KoksmaCheck(lhs=lhs, bound=bound, delta=float(delta), variation=variation,
                       holds=lhs <= bound + 1e-9 * n)


def chord_length_grid(body: ConvexBody, n: int) -> np.ndarray:
    """Chord length sampled on the uniform (n+1) x (n+1) parameter grid."""
    grid = np.linspace(0.0, 1.0, n + 1)
    pts = np.atleast_2d(body.boundary_point(wrap_params(grid.copy())))
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt((diff**2).sum(-1))
