"""Buffon-discrepancy evaluation: exact essential suprema, cut counts, and
the localized window probe.

A test line is identified with its boundary-parameter pair (a, b).  The
number of chords it crosses equals the number of chords with exactly one
endpoint in the arc (a, b), so between consecutive chord endpoints the
count is constant while the Crofton target varies continuously.  The exact
evaluators enumerate those cells and take one-sided limits at their
corners (plus interior stationary points of the target), which realizes
the essential supremum over lines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chordmeasure import InternalConsistencyError
from .geometry import (
    Chord,
    ChordSet,
    ConvexPolygon,
    Disk,
    ExceptionalConfiguration,
    GeometryError,
    cyclic_length,
    sample_lines,
    wrap_param,
)
from .lowdisc import RectDiscReport, RectWitness

__all__ = [
    "ArcInterval",
    "InadmissibleArcError",
    "DiscReport",
    "LocalizedWindow",
    "crofton_target",
    "count_crossings",
    "cut_count",
    "pair_count",
    "exact_discrepancy",
    "exact_discrepancy_disk",
    "exact_discrepancy_polygon",
    "mc_discrepancy",
    "evaluate_witness",
    "localized_rect_sup",
    "default_localized_window",
    "reevaluate_localized",
]


class InadmissibleArcError(ExceptionalConfiguration):
    """Arc endpoint coincides with a chord endpoint; its test line is exceptional."""


@dataclass(frozen=True)
class ArcInterval:
    """Cyclic half-open boundary arc [lo, lo + length) in fraction units."""

    lo: float
    length: float

    def __post_init__(self):
        if not (0.0 <= self.lo < 1.0):
            raise GeometryError(f"arc start {self.lo} outside [0, 1)")
        if not (0.0 < self.length < 1.0):
            raise GeometryError(f"arc length {self.length} outside (0, 1)")

    @classmethod
    def from_bounds(cls, a: float, b: float) -> "ArcInterval":
        a = wrap_param(float(a))
        return cls(a, cyclic_length(a, wrap_param(float(b))))

    @classmethod
    def from_angles(cls, a: float, b: float) -> "ArcInterval":
        two_pi = 2.0 * math.pi
        return cls.from_bounds(a / two_pi, b / two_pi)

    @property
    def end(self) -> float:
        return wrap_param(self.lo + self.length)

    def contains(self, x) -> np.ndarray | bool:
        return ((np.asarray(x) - self.lo) % 1.0) < self.length

    def is_admissible(self, cs: ChordSet) -> bool:
        return not (cs.contains_param(self.lo) or cs.contains_param(self.end))


@dataclass(frozen=True)
class DiscReport:
    """Evaluated discrepancy with a witness test line.

    ``value`` is in count units.  ``witness`` is an admissible boundary
    pair at which the count equals the witness cell's count, and
    ``witness_chord_length`` is the exact chord length at which the target
    is evaluated (a one-sided limit when the supremum sits on a cell
    corner); re-evaluating with those reproduces ``value``.
    """

    value: float
    witness: tuple
    witness_chord_length: float
    method: str
    cells: int
    target_coefficient: float
    flags: tuple = field(default=())


def crofton_target(body, length: float, chord_length: float) -> float:
    """Expected crossing count of length ``length`` spread by the Crofton
    rule: 2 * length * chord_length / (pi * area)."""
    return 2.0 * length * chord_length / (math.pi * body.area)


def _check_nonexceptional(cs: ChordSet, a: float, b: float) -> None:
    if a == b:
        raise ExceptionalConfiguration("test line with coincident boundary parameters")
    if cs.contains_param(a) or cs.contains_param(b):
        raise ExceptionalConfiguration("test line passes through a chord endpoint")


def count_crossings(cs: ChordSet, test) -> int:
    """Number of chords of the set crossing the (nonexceptional) test chord."""
    if isinstance(test, Chord):
        a, b = test.s, test.t
    else:
        a, b = wrap_param(float(test[0])), wrap_param(float(test[1]))
    _check_nonexceptional(cs, a, b)
    return cs.count_one_endpoint_in(a, b)


def cut_count(cs: ChordSet, arc: ArcInterval) -> int:
    """Number of chords with exactly one endpoint in the admissible arc."""
    if not arc.is_admissible(cs):
        raise InadmissibleArcError("arc endpoint lies in the chord endpoint set")
    return cs.count_one_endpoint_in(arc.lo, arc.end)


def pair_count(cs: ChordSet, arc_i: ArcInterval, arc_j: ArcInterval) -> int:
    """Chords with one endpoint in each of two disjoint admissible arcs.

    Counts directly and via the four cut counts of the contiguous arcs
    built from the gap between the two arcs; the two routes must agree
    exactly (the bracket identity), otherwise the arc arithmetic is broken.
    """
    a, b = arc_i.lo, arc_i.end
    c, d = arc_j.lo, arc_j.end
    gap_ij = cyclic_length(b, c)
    gap_ji = cyclic_length(d, a)
    if arc_i.length + arc_j.length + gap_ij + gap_ji > 1.0 + 1e-12:
        raise GeometryError("arcs overlap; pair counting needs disjoint arcs")
    for x in (a, b, c, d):
        if cs.contains_param(x):
            raise InadmissibleArcError("window endpoint lies in the chord endpoint set")
    in_i_s = arc_i.contains(cs.s_params)
    in_i_t = arc_i.contains(cs.t_params)
    in_j_s = arc_j.contains(cs.s_params)
    in_j_t = arc_j.contains(cs.t_params)
    direct = int(np.count_nonzero((in_i_s & in_j_t) | (in_j_s & in_i_t)))

    def cut(lo, hi):
        return cs.count_one_endpoint_in(lo, hi) if cyclic_length(lo, hi) > 0.0 else 0

    bracket = cut(a, c) + cut(b, d) - cut(b, c) - cut(a, d)
    if bracket % 2 != 0 or bracket // 2 != direct:
        raise InternalConsistencyError(
            f"pair count identity failed: direct {direct}, bracket {bracket}"
        )
    return direct


# ----------------------------------------------------------------------
# exact evaluators
# ----------------------------------------------------------------------


def _empty_report(cs: ChordSet, method: str) -> DiscReport:
    coef = 2.0 * cs.L / (math.pi * cs.body.area)
    return DiscReport(value=0.0, witness=(0.25, 0.75), witness_chord_length=0.0,
                      method=method, cells=0, target_coefficient=coef,
                      flags=("duplicate-chords",) if cs.has_duplicates else ())


def exact_discrepancy_disk(cs: ChordSet) -> DiscReport:
    """Exact essential supremum of |crossings - Crofton target| on a disk.

    Sweeps all O(N^2) endpoint-gap cells; per cell the count is constant
    and the target 2L/(pi |O|) * 2r sin(pi * gap) is unimodal in the gap,
    so the supremum sits at a one-sided corner limit or at the interior
    stationary gap 1/2.
    """
    if not isinstance(cs.body, Disk):
        raise GeometryError("exact_discrepancy_disk needs a disk body")
    n = cs.n_chords
    if n == 0:
        return _empty_report(cs, "exact-disk")
    body = cs.body
    coef = 2.0 * cs.L / (math.pi * body.area)
    r = body.radius
    scale = coef * 2.0 * r  # target = scale * sin(pi * gap)
    peak_value = scale
    m2 = 2 * n
    g = cs.endpoint_params
    partner = cs.partner_pos
    lens = (np.roll(g, -1) - g) % 1.0
    lens[-1] = (g[0] + 1.0 - g[-1])
    g_ext = np.concatenate([g, g + 1.0])
    lens_ext = np.concatenate([lens, lens])
    partner_ext = np.concatenate([partner, partner])
    # sin(pi (g_j - g_i)) expands over precomputed tables, avoiding per-cell sin
    sin_t = np.sin(math.pi * g_ext)
    cos_t = np.cos(math.pi * g_ext)
    half = max(m2 // 2, 1)  # complementary arcs give identical cells; enumerate half
    ks = np.arange(half)

    best = -1.0
    best_cell = None  # (i, m, kind)
    for i in range(m2):
        if lens[i] == 0.0:
            continue
        l = i + 1
        # windows over rotated endpoint positions l .. l+m (m = 0 .. half-1)
        rot_part = (partner_ext[l : l + half] - l) % m2
        inside = rot_part < ks
        b_cum = np.cumsum(inside)
        counts = (ks + 1) - 2 * b_cum
        d_lo = g_ext[l : l + half] - g_ext[l]
        j_lens = lens_ext[l : l + half]
        d_hi = d_lo + lens[i] + j_lens
        t_lo = scale * (sin_t[l : l + half] * cos_t[l] - cos_t[l : l + half] * sin_t[l])
        t_hi = scale * (sin_t[l + 1 : l + half + 1] * cos_t[i] - cos_t[l + 1 : l + half + 1] * sin_t[i])
        vals = np.maximum(np.abs(counts - t_lo), np.abs(counts - t_hi))
        peak_mask = (d_lo <= 0.5) & (0.5 <= d_hi)
        if np.any(peak_mask):
            vals = np.where(peak_mask, np.maximum(vals, np.abs(counts - peak_value)), vals)
        vals = np.where(j_lens > 0.0, vals, -np.inf)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            cands = [(abs(counts[k] - t_lo[k]), "lo"), (abs(counts[k] - t_hi[k]), "hi")]
            if peak_mask[k]:
                cands.append((abs(counts[k] - peak_value), "peak"))
            kind = max(cands)[1]
            best_cell = (i, k, kind)
        # same-gap cells: count 0, gap ranges (0, len_i) and (1 - len_i, 1)
        for gap_limit in (min(lens[i], 0.5), max(1.0 - lens[i], 0.5)):
            v = scale * math.sin(math.pi * gap_limit)
            if v > best:
                best = v
                best_cell = (i, None, gap_limit)

    witness, w_len = _disk_witness(cs, best_cell, g_ext, lens, lens_ext)
    flags = ("duplicate-chords",) if cs.has_duplicates else ()
    return DiscReport(value=best, witness=witness, witness_chord_length=w_len,
                      method="exact-disk", cells=m2 * (m2 - 1) + 2 * m2,
                      target_coefficient=coef, flags=flags)


def _disk_witness(cs: ChordSet, cell, g_ext, lens, lens_ext):
    body = cs.body
    m2 = lens.size
    i, k, kind = cell
    a_lo, a_hi = g_ext[i], g_ext[i] + lens[i]
    if k is None:
        gap = kind
        delta = lens[i] * 1e-3
        if gap < lens[i]:  # interior stationary gap inside one endpoint gap
            a = a_lo + 0.5 * (lens[i] - gap)
            b = a + gap
        elif gap == lens[i]:  # limit arc spanning the whole gap
            a, b = a_lo + delta, a_hi - delta
        else:  # wrapped-arc limit containing every endpoint, gap -> 1 - len_i
            a, b = a_hi - delta, a_lo + delta
    else:
        l = i + 1
        b_lo = g_ext[l + k]
        b_hi = b_lo + lens_ext[l + k]
        if kind == "lo":
            gap = b_lo - a_hi
            delta_a = lens[i] * 1e-3
            delta_b = lens_ext[l + k] * 1e-3
            a, b = a_hi - delta_a, b_lo + delta_b
        elif kind == "hi":
            gap = b_hi - a_lo
            delta_a = lens[i] * 1e-3
            delta_b = lens_ext[l + k] * 1e-3
            a, b = a_lo + delta_a, b_hi - delta_b
        else:  # interior stationary gap
            gap = 0.5
            lo = max(a_lo, b_lo - 0.5)
            hi = min(a_hi, b_hi - 0.5)
            a = 0.5 * (lo + hi)
            b = a + 0.5
    w_len = 2.0 * body.radius * math.sin(math.pi * min(max(gap, 0.0), 1.0))
    return (wrap_param(a), wrap_param(b)), w_len


def _segment_pair_min(p1, d1, l1, p2, d2, l2):
    """Closest points of segments p1 + u l1 d1 and p2 + v l2 d2, u, v in [0, 1].

    Vectorized over leading axes; returns (dist, u, v).
    """
    e1 = d1 * np.asarray(l1)[..., None] if np.ndim(l1) else d1 * l1
    e2 = d2 * np.asarray(l2)[..., None] if np.ndim(l2) else d2 * l2
    p1, e1_b = np.broadcast_arrays(p1, e1)
    p2, e2_b = np.broadcast_arrays(p2, e2)
    p1, p2 = np.broadcast_arrays(p1, p2)
    e1, e2 = np.broadcast_arrays(e1_b, e2_b)
    r = p1 - p2
    a = (e1 * e1).sum(-1)
    e = (e2 * e2).sum(-1)
    b = (e1 * e2).sum(-1)
    c = (e1 * r).sum(-1)
    f = (e2 * r).sum(-1)
    denom = a * e - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(np.abs(denom) > 1e-18, (b * f - c * e) / denom, 0.0)
    u = np.clip(u, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(e > 0.0, (b * u + f) / e, 0.0)
    safe_a = np.where(a > 0.0, a, 1.0)
    u = np.where(v < 0.0, np.clip(-c / safe_a, 0.0, 1.0), u)
    u = np.where(v > 1.0, np.clip((b - c) / safe_a, 0.0, 1.0), u)
    v = np.clip(v, 0.0, 1.0)
    q1 = p1 + u[..., None] * e1
    q2 = p2 + v[..., None] * e2
    dist = np.linalg.norm(q1 - q2, axis=-1)
    return dist, u, v


def exact_discrepancy_polygon(cs: ChordSet) -> DiscReport:
    """Exact essential supremum of the Buffon discrepancy on a convex polygon.

    The cell grid is the chord endpoints merged with the vertex parameters,
    so on each cell both boundary points of the test line move along fixed
    sides: the count is constant and the chord length ranges between the
    maximal corner distance and the segment-to-segment minimum, both closed
    form.  Cells with both parameters on one side are the (measure-zero)
    lines containing that side and are skipped.
    """
    if not isinstance(cs.body, ConvexPolygon):
        raise GeometryError("exact_discrepancy_polygon needs a polygon body")
    n = cs.n_chords
    if n == 0:
        return _empty_report(cs, "exact-polygon")
    body = cs.body
    coef = 2.0 * cs.L / (math.pi * body.area)

    grid = np.unique(np.concatenate([cs.endpoint_params, body.vertex_params]))
    mg = grid.size
    lens = (np.roll(grid, -1) - grid) % 1.0
    lens[-1] = grid[0] + 1.0 - grid[-1]
    mids = (grid + 0.5 * lens) % 1.0
    gap_side = body.side_of_param(mids)
    pts = np.atleast_2d(body.boundary_point(grid))
    dirs = body.side_dirs[gap_side]

    # endpoint multiplicity and chord windows on the merged grid
    gpos_s = np.searchsorted(grid, cs.s_params)
    gpos_t = np.searchsorted(grid, cs.t_params)
    pts_at = np.bincount(np.concatenate([gpos_s, gpos_t]), minlength=mg)

    best = -1.0
    best_wit = None  # (u_param, v_param, w_star)
    cells = 0
    for i in range(mg):
        if lens[i] == 0.0:
            continue
        l = i + 1
        rot = (l + np.arange(mg)) % mg
        pts_cum = np.cumsum(pts_at[rot])
        enter = np.zeros(mg, dtype=np.int64)
        p1 = (gpos_s - l) % mg
        p2 = (gpos_t - l) % mg
        np.add.at(enter, np.maximum(p1, p2), 1)
        b_cum = np.cumsum(enter)
        ms = np.arange(mg - 1)
        counts = pts_cum[:-1] - 2 * b_cum[:-1]
        j_idx = rot[:-1]
        ok = (lens[j_idx] > 0.0) & (gap_side[j_idx] != gap_side[i])
        if not np.any(ok):
            continue
        cells += int(np.count_nonzero(ok))
        jj = j_idx[ok]
        # corner distances
        i0 = pts[i][None, :]
        i1 = pts[(i + 1) % mg][None, :]
        q0 = pts[jj]
        q1 = pts[(jj + 1) % mg]
        w = np.stack([
            np.linalg.norm(i0 - q0, axis=1),
            np.linalg.norm(i0 - q1, axis=1),
            np.linalg.norm(i1 - q0, axis=1),
            np.linalg.norm(i1 - q1, axis=1),
        ])
        w_max = w.max(axis=0)
        corner_arg = w.argmax(axis=0)
        w_min, u_at, v_at = _segment_pair_min(
            i0, dirs[i][None, :], lens[i] * body.perimeter,
            q0, dirs[jj], lens[jj] * body.perimeter,
        )
        c_ok = counts[ok]
        v_hi = np.abs(c_ok - coef * w_max)
        v_lo = np.abs(c_ok - coef * w_min)
        vals = np.maximum(v_hi, v_lo)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            j = int(jj[k])
            if v_hi[k] >= v_lo[k]:
                ca = int(corner_arg[k])
                ui = 0.0 if ca in (0, 1) else 1.0
                vi = 0.0 if ca in (0, 2) else 1.0
                w_star = float(w_max[k])
            else:
                ui, vi = float(u_at[k]), float(v_at[k])
                w_star = float(w_min[k])
            u_param = grid[i] + min(max(ui, 1e-3), 1.0 - 1e-3) * lens[i]
            v_param = grid[j] + min(max(vi, 1e-3), 1.0 - 1e-3) * lens[j]
            best_wit = (wrap_param(u_param), wrap_param(v_param), w_star)

    flags = ("duplicate-chords",) if cs.has_duplicates else ()
    return DiscReport(value=best, witness=(best_wit[0], best_wit[1]),
                      witness_chord_length=best_wit[2], method="exact-polygon",
                      cells=cells, target_coefficient=coef, flags=flags)


def exact_discrepancy(cs: ChordSet) -> DiscReport:
    if isinstance(cs.body, Disk):
        return exact_discrepancy_disk(cs)
    return exact_discrepancy_polygon(cs)


def evaluate_witness(cs: ChordSet, report: DiscReport) -> float:
    """Value |crossings - target| at the report's witness, target taken at
    the recorded one-sided-limit chord length."""
    a, b = report.witness
    count = cs.count_one_endpoint_in(a, b)
    return abs(count - report.target_coefficient * report.witness_chord_length)


# ----------------------------------------------------------------------
# Monte-Carlo evaluator
# ----------------------------------------------------------------------


class _ContainedChordCounter:
    """Batch counting of chords contained in non-wrapped index windows.

    Chords are sorted by descending lower endpoint rank; prefix snapshots
    of the sorted upper ranks taken every ``block`` chords let each query
    be answered with one snapshot lookup plus a bounded brute-force
    correction, all vectorized.
    """

    def __init__(self, cs: ChordSet, block: int = 128):
        n = cs.n_chords
        lo = np.minimum.reduce([
            np.searchsorted(cs.endpoint_params, cs.s_params, side="left"),
            np.searchsorted(cs.endpoint_params, cs.t_params, side="left"),
        ])
        hi = np.searchsorted(cs.endpoint_params, np.maximum(cs.s_params, cs.t_params), side="left")
        order = np.argsort(-lo, kind="stable")
        self.lo_desc = lo[order]
        self.hi_desc = hi[order].astype(np.float64)
        self.block = block
        self.snapshots = [np.empty(0)]
        for c in range(block, n + 1, block):
            self.snapshots.append(np.sort(self.hi_desc[:c]))
        self.hi_padded = np.concatenate([self.hi_desc, np.full(block, np.inf)])

    def count(self, i0: np.ndarray, i1: np.ndarray) -> np.ndarray:
        """#{chords with lo >= i0 and hi < i1}, vectorized over queries."""
        m = np.searchsorted(-self.lo_desc, -i0 + 0.5, side="left")
        full = m // self.block
        rem = m - full * self.block
        out = np.zeros(m.shape, dtype=np.int64)
        for c in np.unique(full):
            sel = full == c
            out[sel] = np.searchsorted(self.snapshots[c], i1[sel] - 0.5)
        starts = full * self.block
        window = self.hi_padded[starts[:, None] + np.arange(self.block)[None, :]]
        mask = (np.arange(self.block)[None, :] < rem[:, None]) & (window < i1[:, None])
        out += mask.sum(axis=1)
        return out


def counts_for_arcs(cs: ChordSet, lo: np.ndarray, hi: np.ndarray,
                    counter: _ContainedChordCounter | None = None) -> np.ndarray:
    """Cut counts C([lo, hi)) for a batch of non-wrapped arcs (lo < hi)."""
    if counter is None:
        counter = _ContainedChordCounter(cs)
    i0 = np.searchsorted(cs.endpoint_params, lo, side="left")
    i1 = np.searchsorted(cs.endpoint_params, hi, side="left")
    inside = i1 - i0
    both = counter.count(i0, i1)
    return inside - 2 * both


def mc_discrepancy(cs: ChordSet, samples: int, seed: int = 0, chunk: int = 16384) -> DiscReport:
    """Monte-Carlo lower bound on the discrepancy from invariant-measure lines.

    Draws lines in fixed-size chunks from one seeded stream, so runs with
    larger sample counts extend smaller ones and their maxima are monotone.
    """
    if samples < 1:
        raise ValueError("need at least one sample line")
    coef = 2.0 * cs.L / (math.pi * cs.body.area)
    rng = np.random.default_rng(seed)
    counter = _ContainedChordCounter(cs) if cs.n_chords else None
    best = -1.0
    best_line = (0.25, 0.75)
    best_w = 0.0
    remaining = samples
    while remaining > 0:
        m = chunk
        phi, p = sample_lines(cs.body, m, rng)
        take = min(m, remaining)
        phi, p = phi[:take], p[:take]
        remaining -= take
        u, v, w, valid = cs.body.clip_line_params(phi, p)
        u, v, w = u[valid], v[valid], w[valid]
        if u.size == 0:
            continue
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        if cs.n_chords:
            counts = counts_for_arcs(cs, lo, hi, counter)
        else:
            counts = np.zeros(lo.shape, dtype=np.int64)
        vals = np.abs(counts - coef * w)
        k = int(np.argmax(vals))
        if vals[k] > best:
            best = float(vals[k])
            best_line = (float(lo[k]), float(hi[k]))
            best_w = float(w[k])
    flags = ("duplicate-chords",) if cs.has_duplicates else ()
    return DiscReport(value=max(best, 0.0), witness=best_line, witness_chord_length=best_w,
                      method="monte-carlo", cells=samples, target_coefficient=coef, flags=flags)


# ----------------------------------------------------------------------
# localized window probe
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class LocalizedWindow:
    """Two disjoint separated boundary arcs and the chords joining them."""

    u: ArcInterval
    v: ArcInterval
    min_separation: float = 1.0 / 16.0

    def __post_init__(self):
        gap_uv = cyclic_length(self.u.end, self.v.lo)
        gap_vu = cyclic_length(self.v.end, self.u.lo)
        if self.u.length + self.v.length + gap_uv + gap_vu > 1.0 + 1e-12:
            raise GeometryError("window arcs overlap")
        if min(gap_uv, gap_vu) + 1e-15 < self.min_separation:
            raise GeometryError(
                f"window separation {min(gap_uv, gap_vu)} below minimum {self.min_separation}"
            )

    def pair_list(self, cs: ChordSet) -> np.ndarray:
        """Ordered (x in U, y in V) pairs of chords with one endpoint in each."""
        su = self.u.contains(cs.s_params)
        tu = self.u.contains(cs.t_params)
        sv = self.v.contains(cs.s_params)
        tv = self.v.contains(cs.t_params)
        x = np.concatenate([cs.s_params[su & tv], cs.t_params[sv & tu]])
        y = np.concatenate([cs.t_params[su & tv], cs.s_params[sv & tu]])
        return np.stack([x, y], axis=1) if x.size else np.empty((0, 2))


def default_localized_window(eta: float = math.pi / 8.0) -> LocalizedWindow:
    """Default arcs of angular half-length eta at centers 0 and 3 pi / 8.

    The second center is pushed out from pi/3 just enough to keep the
    separation at least pi/8.
    """
    two_pi = 2.0 * math.pi
    c2 = max(math.pi / 3.0, 2.0 * eta + math.pi / 8.0)
    u = ArcInterval.from_angles(-eta, eta)
    v = ArcInterval.from_angles(c2 - eta, c2 + eta)
    return LocalizedWindow(u=u, v=v, min_separation=(math.pi / 8.0) / two_pi)


def _localized_target_parts(L: float, radius: float, a, b, c, d):
    """Separable split of the window-rectangle Crofton target.

    target([a,b) x [c,d)) = phi(c) - phi(d) with the four-sine combination;
    returns (phi_c(c), psi_d(d)) such that target = phi_c + psi_d.
    """
    k = 2.0 * L / (math.pi**2 * radius)
    phi_c = k * (np.sin(math.pi * (c - a)) - np.sin(math.pi * (c - b)))
    psi_d = k * (np.sin(math.pi * (d - b)) - np.sin(math.pi * (d - a)))
    return phi_c, psi_d


def localized_rect_sup(cs: ChordSet, window: LocalizedWindow | None = None) -> RectDiscReport:
    """Exact supremum over admissible subarc rectangles I x J of the window
    of |N(I, J) - window Crofton target|, for disk bodies.

    Counts are constant on cells of the grid induced by the window pairs
    and the target is monotone in each arc edge, so enumerating one-sided
    corner limits is exact.
    """
    if not isinstance(cs.body, Disk):
        raise GeometryError("localized window probe is defined on disk bodies")
    if window is None:
        window = default_localized_window()
    pairs = window.pair_list(cs)
    # unrolled local coordinates: x measured from u.lo, y from u.lo as well
    off_v = cyclic_length(window.u.lo, window.v.lo)
    xs = (pairs[:, 0] - window.u.lo) % 1.0
    ys = ((pairs[:, 1] - window.v.lo) % 1.0) + off_v
    xc = np.unique(np.concatenate([xs, [0.0, window.u.length]]))
    yc = np.unique(np.concatenate([ys, [off_v, off_v + window.v.length]]))
    nx, ny = xc.size, yc.size
    # prefix count matrices over candidate values, closed and open per axis
    xr_le = np.searchsorted(xc, xs, side="left")
    yr_le = np.searchsorted(yc, ys, side="left")
    h = np.zeros((nx, ny), dtype=np.int64)
    np.add.at(h, (xr_le, yr_le), 1)
    cum = h.cumsum(axis=0).cumsum(axis=1)

    best = -1.0
    best_w = None
    l_total = cs.L
    radius = cs.body.radius
    for ia in range(nx):
        for ib in range(ia, nx):
            a, b = xc[ia], xc[ib]
            phi_c, psi_d = _localized_target_parts(l_total, radius, a, b, yc, yc)
            # closed x-window [a, b]
            row_hi = cum[ib]
            row_lo = cum[ia - 1] if ia > 0 else np.zeros(ny, dtype=np.int64)
            cle = row_hi - row_lo  # y <= yc counts with x in [a, b]
            clt = np.concatenate([[0], cle[:-1]])
            over_d = cle - psi_d
            under_c = clt + phi_c
            run_min = np.minimum.accumulate(under_c)
            over = over_d - run_min
            k = int(np.argmax(over))
            if over[k] > best:
                best = float(over[k])
                c = int(np.argmin(under_c[: k + 1]))
                best_w = (a, b, float(yc[c]), float(yc[k]), True)
            # open x-window (a, b): candidate values strictly between
            row_hi_o = cum[ib - 1] if ib >= 1 else np.zeros(ny, dtype=np.int64)
            ole = np.maximum(row_hi_o - cum[ia], 0)
            olt = np.concatenate([[0], ole[:-1]])
            u2 = psi_d - olt
            w2 = phi_c + ole
            run_max = np.maximum.accumulate(w2)
            under = u2 + run_max
            k = int(np.argmax(under))
            if under[k] > best:
                best = float(under[k])
                c = int(np.argmax(w2[: k + 1]))
                best_w = (a, b, float(yc[c]), float(yc[k]), False)

    a, b, c, d, closed = best_w
    witness = RectWitness(
        x_lo=wrap_param(window.u.lo + a),
        x_hi=wrap_param(window.u.lo + b),
        y_lo=wrap_param(window.u.lo + c),
        y_hi=wrap_param(window.u.lo + d),
        x_closed=closed,
        y_closed=closed,
    )
    return RectDiscReport(value=best, witness=witness, family="localized",
                          candidates=nx * (nx + 1) * ny * (ny + 1) // 4)


def reevaluate_localized(cs: ChordSet, window: LocalizedWindow, report: RectDiscReport) -> float:
    """Recompute |N(I, J) - target| for the localized witness rectangle."""
    wit = report.witness
    pairs = window.pair_list(cs)
    xs = (pairs[:, 0] - window.u.lo) % 1.0
    ys = ((pairs[:, 1] - window.v.lo) % 1.0) + cyclic_length(window.u.lo, window.v.lo)
    a = (wit.x_lo - window.u.lo) % 1.0
    b = (wit.x_hi - window.u.lo) % 1.0
    c = (wit.y_lo - window.u.lo) % 1.0
    d = (wit.y_hi - window.u.lo) % 1.0
    if wit.x_closed:
        cnt = np.count_nonzero((xs >= a) & (xs <= b) & (ys >= c) & (ys <= d))
    else:
        cnt = np.count_nonzero((xs > a) & (xs < b) & (ys > c) & (ys < d))
    phi_c, psi_d = _localized_target_parts(cs.L, cs.body.radius, a, b, np.array([c]), np.array([d]))
    return abs(float(cnt) - float(phi_c[0] + psi_d[0]))
