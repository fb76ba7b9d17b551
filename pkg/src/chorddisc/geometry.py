"""Convex bodies, boundary parametrization, chords, and crossing tests.

Boundary convention: every boundary point is addressed by its arclength
fraction in [0, 1), measured counterclockwise from a fixed anchor (angle 0
for disks, the first vertex for polygons).  Out-of-range parameters wrap
cyclically.  A full chord is the maximal segment a line cuts out of the
body; it is stored as an ordered boundary-parameter pair (compared as
unordered) plus its cached Euclidean length.

Lines are parametrized by a normal angle ``phi`` in [0, pi) and a signed
offset ``p``: the line is {x : x . n = p} with n = (cos phi, sin phi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GeometryError",
    "ExceptionalConfiguration",
    "DegenerateChordError",
    "ConvexBody",
    "Disk",
    "ConvexPolygon",
    "make_disk",
    "make_polygon",
    "wrap_param",
    "cyclic_contains",
    "cyclic_length",
    "boundary_point",
    "Chord",
    "chord_from_params",
    "chords_cross",
    "segments_properly_cross",
    "ChordSet",
    "sample_lines",
]

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Invalid geometric input (bad body, bad parameters)."""


class ExceptionalConfiguration(GeometryError):
    """A measure-zero configuration (shared endpoints, tangency, chord in a
    flat side) that evaluators must resolve by perturbation rather than by
    guessing a boolean answer."""


class DegenerateChordError(ExceptionalConfiguration):
    """Parameter pair that does not define a genuine full chord."""


def wrap_param(s: float) -> float:
    """Reduce a boundary parameter to the canonical range [0, 1)."""
    s = s - math.floor(s)
    return 0.0 if s == 1.0 else s


def wrap_params(s: np.ndarray) -> np.ndarray:
    out = s - np.floor(s)
    out[out == 1.0] = 0.0
    return out


def cyclic_length(lo: float, hi: float) -> float:
    """Length of the cyclic half-open interval [lo, hi) in fraction units."""
    return (hi - lo) % 1.0


def cyclic_contains(lo: float, hi: float, x) -> bool | np.ndarray:
    """Membership of x in the cyclic half-open interval [lo, hi)."""
    return ((x - lo) % 1.0) < ((hi - lo) % 1.0)


class ConvexBody:
    """Common interface of the supported convex bodies.

    Concrete bodies expose scalar metrics (area, perimeter, diameter) and
    the boundary machinery used throughout: parameter -> point/tangent maps,
    point -> parameter inversion, support intervals and line clipping.
    """

    kind: str
    area: float
    perimeter: float
    diameter: float

    def boundary_point(self, s):
        raise NotImplementedError

    def boundary_tangent(self, s):
        raise NotImplementedError

    def param_of_point(self, point, tol: float = 1e-9) -> float:
        raise NotImplementedError

    def support_interval(self, phi):
        """Range of x . n(phi) over the body, as (lo, hi) arrays."""
        raise NotImplementedError

    def clip_line_params(self, phi, p):
        """Boundary parameters cut out by the lines (phi, p).

        Returns (u, v, w, valid): boundary parameters of the two
        intersection points, the chord length, and a validity mask (False
        for lines missing the body or tangent to it).
        """
        raise NotImplementedError

    def chord_is_degenerate(self, s: float, t: float, tol: float = 1e-9) -> bool:
        """True if (s, t) is not the endpoint pair of a genuine full chord."""
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Disk(ConvexBody):
    center: tuple
    radius: float
    kind: str = "disk"

    def __post_init__(self):
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise GeometryError(f"disk radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    @property
    def area(self) -> float:
        return math.pi * self.radius * self.radius

    @property
    def perimeter(self) -> float:
        return TWO_PI * self.radius

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    def boundary_point(self, s):
        ang = TWO_PI * np.asarray(s, dtype=float)
        x = self.center[0] + self.radius * np.cos(ang)
        y = self.center[1] + self.radius * np.sin(ang)
        return np.stack([x, y], axis=-1)

    def boundary_tangent(self, s):
        ang = TWO_PI * np.asarray(s, dtype=float)
        return np.stack([-np.sin(ang), np.cos(ang)], axis=-1)

    def param_of_point(self, point, tol: float = 1e-9) -> float:
        dx = point[0] - self.center[0]
        dy = point[1] - self.center[1]
        rr = math.hypot(dx, dy)
        if abs(rr - self.radius) > tol * self.diameter:
            raise GeometryError("point is not on the disk boundary")
        return wrap_param(math.atan2(dy, dx) / TWO_PI)

    def support_interval(self, phi):
        phi = np.asarray(phi, dtype=float)
        cp = self.center[0] * np.cos(phi) + self.center[1] * np.sin(phi)
        return cp - self.radius, cp + self.radius

    def clip_line_params(self, phi, p):
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        cp = self.center[0] * np.cos(phi) + self.center[1] * np.sin(phi)
        d = p - cp
        valid = np.abs(d) < self.radius
        half = np.sqrt(np.maximum(self.radius**2 - d**2, 0.0))
        # foot of the normal at angle phi, chord direction phi + pi/2
        ca, sa = np.cos(phi), np.sin(phi)
        fx = self.center[0] + d * ca
        fy = self.center[1] + d * sa
        x1, y1 = fx - half * sa, fy + half * ca
        x2, y2 = fx + half * sa, fy - half * ca
        u = wrap_params(np.arctan2(y1 - self.center[1], x1 - self.center[0]) / TWO_PI)
        v = wrap_params(np.arctan2(y2 - self.center[1], x2 - self.center[0]) / TWO_PI)
        w = 2.0 * half
        return u, v, w, valid

    def chord_is_degenerate(self, s: float, t: float, tol: float = 1e-9) -> bool:
        if s == t:
            return True
        gap = cyclic_length(s, t)
        w = 2.0 * self.radius * abs(math.sin(math.pi * gap))
        return w < tol * self.diameter

    def descriptor(self) -> dict:
        return {"kind": "disk", "center": list(self.center), "radius": self.radius}


class ConvexPolygon(ConvexBody):
    kind = "polygon"

    def __init__(self, vertices: Sequence[Sequence[float]]):
        verts = np.asarray(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 2 or verts.shape[0] < 3:
            raise GeometryError("polygon needs at least 3 planar vertices")
        n = verts.shape[0]
        edges = np.roll(verts, -1, axis=0) - verts
        scale2 = float(np.max(np.abs(verts))) ** 2 + 1.0
        cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        if np.any(cross <= 1e-12 * scale2):
            if np.all(cross <= 0.0):
                raise GeometryError("polygon vertices are in clockwise order")
            raise GeometryError("polygon is not strictly convex (collinear or reflex vertex)")
        self.vertices = verts
        self.n_sides = n
        self.side_dirs = edges / np.linalg.norm(edges, axis=1)[:, None]
        self.side_lengths = np.linalg.norm(edges, axis=1)
        self.perimeter = float(math.fsum(self.side_lengths))
        cum = np.concatenate([[0.0], np.cumsum(self.side_lengths)])
        cum[-1] = self.perimeter
        self._cum = cum
        self.vertex_params = wrap_params(cum[:-1] / self.perimeter)
        x, y = verts[:, 0], verts[:, 1]
        self.area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
        diff = verts[:, None, :] - verts[None, :, :]
        self.diameter = float(np.sqrt((diff**2).sum(-1)).max())

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def side_of_param(self, s) -> np.ndarray:
        """Index of the side containing the boundary point at parameter s.

        A vertex parameter is assigned to the side it starts.
        """
        arc = wrap_params(np.atleast_1d(np.asarray(s, dtype=float))) * self.perimeter
        k = np.searchsorted(self._cum, arc, side="right") - 1
        return np.clip(k, 0, self.n_sides - 1)

    def boundary_point(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        arc = wrap_params(s_arr) * self.perimeter
        k = np.clip(np.searchsorted(self._cum, arc, side="right") - 1, 0, self.n_sides - 1)
        pts = self.vertices[k] + (arc - self._cum[k])[:, None] * self.side_dirs[k]
        return pts[0] if np.isscalar(s) or np.asarray(s).ndim == 0 else pts

    def boundary_tangent(self, s):
        k = self.side_of_param(s)
        out = self.side_dirs[k]
        return out[0] if np.isscalar(s) or np.asarray(s).ndim == 0 else out

    def param_of_point(self, point, tol: float = 1e-9) -> float:
        point = np.asarray(point, dtype=float)
        rel = point[None, :] - self.vertices
        t = np.clip((rel * self.side_dirs).sum(1), 0.0, self.side_lengths)
        foot = self.vertices + t[:, None] * self.side_dirs
        dist = np.linalg.norm(foot - point[None, :], axis=1)
        k = int(np.argmin(dist))
        if dist[k] > tol * self.diameter:
            raise GeometryError("point is not on the polygon boundary")
        return wrap_param((self._cum[k] + t[k]) / self.perimeter)

    def support_interval(self, phi):
        phi = np.asarray(phi, dtype=float)
        n = np.stack([np.cos(phi), np.sin(phi)], axis=0)
        proj = self.vertices @ n
        return proj.min(axis=0), proj.max(axis=0)

    def clip_line_params(self, phi, p):
        phi = np.atleast_1d(np.asarray(phi, dtype=float))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        m = phi.shape[0]
        nx, ny = np.cos(phi), np.sin(phi)
        # tau[k, i]: position along side k where line i crosses its support line
        an = self.vertices @ np.stack([nx, ny])        # (V, m)
        en = self.side_dirs @ np.stack([nx, ny])       # (V, m)
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = (p[None, :] - an) / (en * self.side_lengths[:, None])
        hit = np.isfinite(tau) & (tau >= 0.0) & (tau < 1.0)
        u = np.full(m, np.nan)
        v = np.full(m, np.nan)
        valid = np.zeros(m, dtype=bool)
        counts = hit.sum(axis=0)
        ok = counts == 2
        if np.any(ok):
            idx = np.nonzero(ok)[0]
            sides = np.argsort(~hit[:, idx], axis=0, kind="stable")[:2, :]
            k1, k2 = sides[0], sides[1]
            t1 = tau[k1, idx] * self.side_lengths[k1]
            t2 = tau[k2, idx] * self.side_lengths[k2]
            u[idx] = wrap_params((self._cum[k1] + t1) / self.perimeter)
            v[idx] = wrap_params((self._cum[k2] + t2) / self.perimeter)
            valid[idx] = True
        pts_u = self.boundary_point(np.nan_to_num(u))
        pts_v = self.boundary_point(np.nan_to_num(v))
        w = np.linalg.norm(pts_u - pts_v, axis=1)
        tiny = w < 1e-12 * self.diameter
        valid &= ~tiny
        return u, v, w, valid

    def contains_interior(self, point, tol: float = 1e-12) -> bool:
        point = np.asarray(point, dtype=float)
        rel = point[None, :] - self.vertices
        cross = self.side_dirs[:, 0] * rel[:, 1] - self.side_dirs[:, 1] * rel[:, 0]
        return bool(np.all(cross > tol * self.diameter))

    def chord_is_degenerate(self, s: float, t: float, tol: float = 1e-9) -> bool:
        if s == t:
            return True
        a = self.boundary_point(s)
        b = self.boundary_point(t)
        w = float(np.linalg.norm(a - b))
        if w < tol * self.diameter:
            return True
        return not self.contains_interior(0.5 * (a + b))

    def descriptor(self) -> dict:
        return {"kind": "polygon", "vertices": self.vertices.tolist()}


def make_disk(center: Sequence[float], radius: float) -> Disk:
    """Disk with the given center and positive radius."""
    return Disk(center=(float(center[0]), float(center[1])), radius=float(radius))


def make_polygon(vertices: Sequence[Sequence[float]]) -> ConvexPolygon:
    """Strictly convex polygon from counterclockwise vertices."""
    return ConvexPolygon(vertices)


def boundary_point(body: ConvexBody, s):
    """Point on the boundary of ``body`` at arclength fraction ``s``."""
    return body.boundary_point(wrap_param(float(s)) if np.isscalar(s) else wrap_params(np.asarray(s, float)))


@dataclass(frozen=True)
class Chord:
    """One full chord as an ordered boundary-parameter pair with cached length."""

    s: float
    t: float
    w: float

    def key(self) -> tuple:
        return (self.s, self.t) if self.s <= self.t else (self.t, self.s)


def chord_from_params(body: ConvexBody, s: float, t: float) -> Chord:
    """Chord of ``body`` joining the boundary points at parameters s and t.

    Raises DegenerateChordError for pairs that do not cut the interior
    (s == t, or a polygon pair lying in one flat side); that signal is what
    the measure-support guard keys on.
    """
    s = wrap_param(float(s))
    t = wrap_param(float(t))
    if s == t:
        raise DegenerateChordError(f"coincident boundary parameters s = t = {s}")
    if body.chord_is_degenerate(s, t):
        raise DegenerateChordError(f"parameter pair ({s}, {t}) does not span the interior")
    a = body.boundary_point(s)
    b = body.boundary_point(t)
    w = float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
    return Chord(s=s, t=t, w=w)


def chords_cross(a: Chord, b: Chord) -> bool:
    """Whether two chords cross, by the endpoint-alternation criterion.

    True iff exactly one endpoint of ``b`` lies in the open boundary arc
    (a.s, a.t).  Shared endpoints are exceptional and raise.
    """
    params = (a.s, a.t, b.s, b.t)
    if len(set(params)) != 4:
        raise ExceptionalConfiguration("chords share a boundary endpoint")
    lo, hi = a.s, a.t
    arc = (hi - lo) % 1.0
    in1 = 0.0 < ((b.s - lo) % 1.0) < arc
    in2 = 0.0 < ((b.t - lo) % 1.0) < arc
    return in1 != in2


def segments_properly_cross(p1, p2, q1, q2) -> bool:
    """Cartesian proper-crossing test for two open segments.

    Independent of boundary parameters; used as the oracle for
    :func:`chords_cross`.
    """

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1 = orient(p1, p2, q1)
    d2 = orient(p1, p2, q2)
    d3 = orient(q1, q2, p1)
    d4 = orient(q1, q2, p2)
    return (d1 * d2 < 0.0) and (d3 * d4 < 0.0)


class ChordSet:
    """Finite union of distinct full chords of one body.

    Precomputes the sorted endpoint table used by all counting routines:
    ``endpoint_params`` (sorted fractions), ``endpoint_chord`` (owning chord
    per slot) and ``partner_pos`` (slot of the other endpoint of the same
    chord).  Instances are immutable by convention.
    """

    def __init__(self, body: ConvexBody, chords: Iterable[Chord], allow_duplicates: bool = False, meta: dict | None = None):
        self.body = body
        self.chords = tuple(chords)
        n = len(self.chords)
        self.s_params = np.array([c.s for c in self.chords], dtype=float)
        self.t_params = np.array([c.t for c in self.chords], dtype=float)
        self.lengths = np.array([c.w for c in self.chords], dtype=float)
        keys = [c.key() for c in self.chords]
        self.has_duplicates = len(set(keys)) != n
        if self.has_duplicates and not allow_duplicates:
            raise GeometryError("duplicate chords (as unordered endpoint pairs)")
        self.L = math.fsum(c.w for c in self.chords)
        flat = np.concatenate([self.s_params, self.t_params])
        chord_id = np.concatenate([np.arange(n), np.arange(n)])
        partner_flat = np.concatenate([np.arange(n) + n, np.arange(n)])
        order = np.argsort(flat, kind="stable")
        inv = np.empty(2 * n, dtype=np.intp)
        inv[order] = np.arange(2 * n)
        self.endpoint_params = flat[order]
        self.endpoint_chord = chord_id[order]
        self.partner_pos = inv[partner_flat[order]]
        self.meta = dict(meta) if meta else {}

    @property
    def n_chords(self) -> int:
        return len(self.chords)

    @property
    def F(self) -> np.ndarray:
        """Sorted multiset of all 2N endpoint parameters."""
        return self.endpoint_params

    def contains_param(self, x: float) -> bool:
        i = np.searchsorted(self.endpoint_params, x)
        return bool(i < self.endpoint_params.size and self.endpoint_params[i] == x)

    def count_one_endpoint_in(self, lo: float, hi: float) -> int:
        """Number of chords with exactly one endpoint in the cyclic arc [lo, hi).

        Symmetric under complementation, so wrapped arcs are reduced to
        their (linear) complement first.
        """
        if lo > hi:
            lo, hi = hi, lo
        i0 = int(np.searchsorted(self.endpoint_params, lo, side="left"))
        i1 = int(np.searchsorted(self.endpoint_params, hi, side="left"))
        inside = i1 - i0
        part = self.partner_pos[i0:i1]
        both = int(np.count_nonzero((part >= i0) & (part < i1))) // 2
        return inside - 2 * both

    def with_chords_added(self, extra: Iterable[Chord]) -> "ChordSet":
        return ChordSet(self.body, self.chords + tuple(extra), meta=self.meta)


def sample_lines(body: ConvexBody, m: int, rng: np.random.Generator):
    """Sample m lines hitting the body from the invariant line measure.

    Draws (normal angle, offset) uniformly from [0, pi) x [-R, R] with R a
    bound on the support function, rejecting misses; the accepted lines are
    exactly invariant-measure distributed over the hitting set.  Returns
    (phi, p) arrays.
    """
    if isinstance(body, Disk):
        radius_bound = math.hypot(*body.center) + body.radius
    else:
        radius_bound = float(np.max(np.linalg.norm(body.vertices, axis=1)))
    phi_out = np.empty(m)
    p_out = np.empty(m)
    filled = 0
    while filled < m:
        k = max(2 * (m - filled), 1024)
        phi = rng.uniform(0.0, math.pi, size=k)
        p = rng.uniform(-radius_bound, radius_bound, size=k)
        lo, hi = body.support_interval(phi)
        acc = (p >= lo) & (p < hi)
        take = min(int(np.count_nonzero(acc)), m - filled)
        idx = np.nonzero(acc)[0][:take]
        phi_out[filled : filled + take] = phi[idx]
        p_out[filled : filled + take] = p[idx]
        filled += take
    return phi_out, p_out
