"""Chord-set builders and the exact length correction.

Three construction families: measure transport of a low-discrepancy point
set (the quasi-uniform construction), i.i.d. sampling from the endpoint
measure (baseline), and the classical direction-lattice of evenly spaced
directions with offset lattices (the polynomial-error baseline).  The
length correction tops a set up to a prescribed total length with a few
generic-direction chords, never sharing a segment with existing ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chordmeasure import EndpointMeasure
from .geometry import (
    Chord,
    ChordSet,
    ConvexBody,
    ConvexPolygon,
    Disk,
    GeometryError,
    chord_from_params,
    wrap_param,
)
from .lowdisc import ld_sequence_2d, rect_discrepancy, transport_to_measure

__all__ = [
    "BuildRecipe",
    "CorrectionReport",
    "build_transport",
    "build_random",
    "build_direction_lattice",
    "correct_length",
    "usable_chord_length",
    "build_from_recipe",
]

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class BuildRecipe:
    """Declarative description of one chord-set construction."""

    method: str  # transport | random | direction-lattice
    n: int = 0
    m: int = 0
    k: int = 0
    gen: str = "kronecker-fibonacci"
    seed: int = 0
    scramble: bool = False
    shift: str = "deterministic"
    target_length: float | None = None

    def __post_init__(self):
        if self.method not in ("transport", "random", "direction-lattice"):
            raise ValueError(f"unknown build method {self.method!r}")
        if self.method in ("transport", "random") and self.n < 1:
            raise ValueError("need n >= 1 chords")
        if self.method == "direction-lattice" and (self.m < 1 or self.k < 1):
            raise ValueError("need m, k >= 1")


def _chords_from_params(body: ConvexBody, params: np.ndarray) -> list[Chord]:
    return [chord_from_params(body, s, t) for s, t in params]


def build_transport(body: ConvexBody, n: int, gen: str = "kronecker-fibonacci",
                    seed: int = 0, scramble: bool = False,
                    record_discrepancy: bool = True) -> ChordSet:
    """N distinct chords whose endpoint pairs are a transported
    low-discrepancy point set; records the achieved rectangle discrepancy
    against the endpoint measure in the set's metadata."""
    if n < 2:
        raise GeometryError("transport construction needs n >= 2")
    measure = EndpointMeasure(body)
    ps = ld_sequence_2d(n, gen, seed=seed, scramble=scramble)
    tr = transport_to_measure(ps, measure)
    meta = {
        "method": "transport",
        "generator": gen,
        "seed": seed,
        "scramble": scramble,
        "perturbations": tr.perturbations,
    }
    if record_discrepancy:
        meta["rect_delta_anchored"] = rect_discrepancy(tr.params, measure, family="anchored").value
    return ChordSet(body, _chords_from_params(body, tr.params), meta=meta)


def build_random(body: ConvexBody, n: int, seed: int = 0) -> ChordSet:
    """N i.i.d. chords from the endpoint measure (inverse-CDF sampling)."""
    if n < 1:
        raise GeometryError("need n >= 1 chords")
    measure = EndpointMeasure(body)
    ps = ld_sequence_2d(n, "pseudorandom", seed=seed)
    tr = transport_to_measure(ps, measure)
    meta = {"method": "random", "seed": seed, "perturbations": tr.perturbations}
    return ChordSet(body, _chords_from_params(body, tr.params), meta=meta)


def _clip_params_single(body: ConvexBody, phi: float, p: float):
    u, v, w, valid = body.clip_line_params(np.array([phi]), np.array([p]))
    if not valid[0]:
        return None
    return float(u[0]), float(v[0]), float(w[0])


def build_direction_lattice(body: ConvexBody, m: int, k: int,
                            shift: str = "deterministic", seed: int = 0) -> ChordSet:
    """Chords from m evenly spaced directions with k lattice offsets each.

    Deterministic mode centers the offsets in the body's width; random mode
    applies an independent uniform shift per direction.  Lines missing the
    body (or tangent) are dropped; exact duplicate chords are perturbed.
    """
    if m < 1 or k < 1:
        raise GeometryError("need m >= 1 directions and k >= 1 offsets")
    rng = np.random.default_rng(seed)
    chords: list[Chord] = []
    seen: set = set()
    perturbations = []
    for j in range(m):
        theta = j * math.pi / m  # chord direction
        phi = math.fmod(theta + 0.5 * math.pi, math.pi)
        lo, hi = body.support_interval(np.array([phi]))
        lo, hi = float(lo[0]), float(hi[0])
        width = hi - lo
        u_shift = rng.random() if shift == "random" else 0.5
        for l in range(k):
            frac = math.fmod(l + u_shift, k) / k if shift == "random" else (l + 0.5) / k
            p0 = lo + frac * width
            p = p0
            for attempt in range(32):
                res = _clip_params_single(body, phi, p)
                if res is None:
                    break
                u, v, w = res
                key = (u, v) if u <= v else (v, u)
                if key not in seen:
                    seen.add(key)
                    chords.append(Chord(s=u, t=v, w=w))
                    if p != p0:
                        perturbations.append((j, l, p - p0))
                    break
                p += width * 1e-9 * (attempt + 1)
    meta = {"method": "direction-lattice", "m": m, "k": k, "shift": shift, "seed": seed,
            "perturbations": tuple(perturbations)}
    return ChordSet(body, chords, meta=meta)


@dataclass(frozen=True)
class CorrectionReport:
    """Chords added by the exact length correction and its budget."""

    added: tuple
    delta: float
    count: int
    budget_bound: float
    usable_length: float

    def __post_init__(self):
        added_len = math.fsum(c.w for c in self.added)
        if abs(added_len - self.delta) > 1e-12 * max(1.0, abs(self.delta)):
            raise GeometryError("added chord lengths do not sum to the requested delta")
        if self.count > self.budget_bound + 1e-9:
            raise GeometryError("length correction exceeded its chord budget")


def _polygon_chord_profile(poly: ConvexPolygon, theta: float):
    """Piecewise-affine chord-length profile over offsets in direction theta.

    The boundary crossing points move along fixed sides between consecutive
    vertex offsets, so the length is affine per panel; each panel is probed
    at two interior offsets (vertex-grazing lines are never clipped) and
    extended affinely to its ends.  Returns (phi, panels) with panels as
    (p_lo, p_hi, w_lo, w_hi) in increasing offset order.
    """
    phi = math.fmod(theta + 0.5 * math.pi, math.pi)
    n = np.array([math.cos(phi), math.sin(phi)])
    offs = np.unique(poly.vertices @ n)
    panels = []
    for a, b in zip(offs[:-1], offs[1:]):
        if b - a < 1e-14 * poly.diameter:
            continue
        p1 = a + 0.25 * (b - a)
        p2 = a + 0.75 * (b - a)
        r1 = _clip_params_single(poly, phi, float(p1))
        r2 = _clip_params_single(poly, phi, float(p2))
        w1 = r1[2] if r1 is not None else 0.0
        w2 = r2[2] if r2 is not None else 0.0
        slope = (w2 - w1) / (p2 - p1)
        panels.append((float(a), float(b), w1 + slope * (a - p1), w1 + slope * (b - p1)))
    return phi, panels


def _profile_max(panels) -> float:
    return max(max(w_lo, w_hi) for _, _, w_lo, w_hi in panels)


def usable_chord_length(body: ConvexBody):
    """A chord length d > 0 and a direction window W such that every
    direction in W admits chords of every length in [0, d].

    For a disk every direction works and d is the diameter.  For a polygon
    the window avoids the finitely many side directions; d is a safety
    fraction of the smallest direction-wise maximum over the window.
    """
    if isinstance(body, Disk):
        return body.diameter, (0.0, math.pi)
    poly = body
    side_angles = np.mod(np.arctan2(poly.side_dirs[:, 1], poly.side_dirs[:, 0]), math.pi)
    margin = 2e-3
    grid = np.linspace(0.0, math.pi, 721)[:-1]
    ang_dist = np.abs(grid[:, None] - side_angles[None, :])
    ang_dist = np.minimum(ang_dist, math.pi - ang_dist)
    admissible = ang_dist.min(axis=1) > margin
    best_theta, best_len = None, -1.0
    for theta in grid[admissible]:
        w = _profile_max(_polygon_chord_profile(poly, float(theta))[1])
        if w > best_len:
            best_len, best_theta = w, float(theta)
    rho = margin / 2.0
    window = (best_theta - rho, best_theta + rho)
    samples = np.linspace(window[0], window[1], 9)
    d = 0.9 * min(_profile_max(_polygon_chord_profile(poly, float(t))[1]) for t in samples)
    return d, window


def _chord_of_length(body: ConvexBody, theta: float, length: float) -> Chord:
    """A chord of exactly the requested length in direction theta."""
    if isinstance(body, Disk):
        phi = math.fmod(theta + 0.5 * math.pi, math.pi)
        r = body.radius
        p0 = body.center[0] * math.cos(phi) + body.center[1] * math.sin(phi)
        p = p0 + math.sqrt(max(r * r - 0.25 * length * length, 0.0))
        res = _clip_params_single(body, phi, p)
        return Chord(s=res[0], t=res[1], w=res[2])
    phi, panels = _polygon_chord_profile(body, theta)
    if length > _profile_max(panels):
        raise GeometryError(f"no chord of length {length} in direction {theta}")
    # walk the increasing branch of the concave profile
    for p_lo, p_hi, w_lo, w_hi in panels:
        if w_hi < w_lo:
            break
        if w_lo - 1e-12 <= length <= w_hi + 1e-12 and w_hi > w_lo:
            t = min(max((length - w_lo) / (w_hi - w_lo), 0.0), 1.0)
            p = p_lo + t * (p_hi - p_lo)
            res = _clip_params_single(body, phi, float(p))
            return Chord(s=res[0], t=res[1], w=res[2])
    raise GeometryError(f"offset search failed for length {length} in direction {theta}")


def _chord_direction(body: ConvexBody, c: Chord) -> float:
    a = np.asarray(body.boundary_point(c.s))
    b = np.asarray(body.boundary_point(c.t))
    return math.fmod(math.atan2(b[1] - a[1], b[0] - a[0]) + math.pi, math.pi)


def correct_length(body: ConvexBody, base: ChordSet, target_length: float):
    """Extend a chord set to exactly the target total length.

    The gap is decomposed as n * d + r with d the usable chord length; the
    pieces are laid in generically chosen distinct directions (golden-angle
    sequence over the admissible window, avoiding existing chord
    directions), so no added chord shares a segment with any other.
    Returns the corrected set and a CorrectionReport.
    """
    delta = target_length - base.L
    if delta < -1e-12 * max(1.0, target_length):
        raise GeometryError(f"target length {target_length} below current length {base.L}")
    delta = max(delta, 0.0)
    d, window = usable_chord_length(body)
    m_body = max(1, math.ceil(1.0 / d))
    if delta == 0.0:
        report = CorrectionReport(added=(), delta=0.0, count=0,
                                  budget_bound=m_body * (delta + 1.0), usable_length=d)
        return base, report

    n_full = int(math.floor(delta / d + 1e-15))
    rem = delta - n_full * d
    if rem > 1e-12 * max(1.0, delta):
        pieces = [d] * n_full + [rem]
    elif n_full >= 1:
        # split the last full piece so the final chord stays strictly below
        # the maximum and can absorb float drift in either direction
        pieces = [d] * (n_full - 1) + [0.5 * (d + rem), 0.5 * (d + rem)]
    else:
        pieces = []

    taken = [_chord_direction(body, c) for c in base.chords]

    def too_close(theta):
        for t in taken:
            dd = abs(theta - t)
            if min(dd, math.pi - dd) < 1e-6:
                return True
        return False

    w_lo, w_hi = window
    added: list[Chord] = []
    step = 0
    for piece in pieces:
        while True:
            theta = w_lo + math.fmod((step + 1) * GOLDEN_ANGLE, w_hi - w_lo)
            step += 1
            if not too_close(theta):
                break
        taken.append(theta)
        added.append(_chord_of_length(body, theta, piece))

    # absorb float drift in the last piece so the total is exact
    for _ in range(3):
        total = math.fsum([base.L] + [c.w for c in added])
        drift = target_length - total
        if abs(drift) <= 1e-13 * max(1.0, target_length):
            break
        last = added[-1]
        theta = _chord_direction(body, last)
        added[-1] = _chord_of_length(body, theta, last.w + drift)

    out = base.with_chords_added(added)
    report = CorrectionReport(added=tuple(added), delta=math.fsum(c.w for c in added),
                              count=len(added), budget_bound=m_body * (delta + 1.0),
                              usable_length=d)
    return out, report


def build_to_length(body: ConvexBody, target_length: float, method: str = "transport",
                    gen: str = "kronecker-fibonacci", seed: int = 0,
                    scramble: bool = False, reserve_length: float | None = None) -> ChordSet:
    """Build a set of exactly the target total length.

    Chooses the chord count as floor(target / mean chord length) minus a
    reserve (transport builds track the mean tightly, random ones fluctuate
    like sqrt(n)), shrinking further if the build still overshoots, then
    tops up with the exact length correction.
    """
    measure = EndpointMeasure(body)
    w_bar = measure.mean_chord_length()
    n_guess = int(target_length / w_bar)
    if reserve_length is None:
        if method == "transport":
            reserve_length = 2.0 * w_bar
        else:
            reserve_length = 2.0 * body.diameter * math.sqrt(max(n_guess, 1))
    n = max(2, int((target_length - reserve_length) / w_bar))

    def build(n):
        if method == "transport":
            return build_transport(body, n, gen=gen, seed=seed, scramble=scramble,
                                   record_discrepancy=False)
        return build_random(body, n, seed=seed)

    cs = build(n)
    while cs.L > target_length and n > 2:
        n = max(2, n - max(1, int(math.ceil((cs.L - target_length) / w_bar))))
        cs = build(n)
    if cs.L > target_length:
        raise GeometryError(f"target length {target_length} too small for a {method} build")
    out, _ = correct_length(body, cs, target_length)
    return out


def build_from_recipe(body: ConvexBody, recipe: BuildRecipe) -> ChordSet:
    """Construct a chord set from a recipe, applying the optional length target."""
    if recipe.target_length is not None and recipe.method in ("transport", "random"):
        return build_to_length(body, recipe.target_length, method=recipe.method,
                               gen=recipe.gen, seed=recipe.seed, scramble=recipe.scramble)
    if recipe.method == "transport":
        cs = build_transport(body, recipe.n, gen=recipe.gen, seed=recipe.seed,
                             scramble=recipe.scramble)
    elif recipe.method == "random":
        cs = build_random(body, recipe.n, seed=recipe.seed)
    else:
        cs = build_direction_lattice(body, recipe.m, recipe.k, shift=recipe.shift,
                                     seed=recipe.seed)
    if recipe.target_length is not None:
        cs, _ = correct_length(body, cs, recipe.target_length)
    return cs
