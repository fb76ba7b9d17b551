"""Low-discrepancy point sets, measure transport, and exact rectangle discrepancy.

The exact evaluators exploit that within any cell of the grid induced by
the point coordinates the count is constant while the rectangle mass is
monotone in every edge, so suprema are attained at one-sided limits at
cell corners; values are reported in count units N * sup |count/N - mass|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chordmeasure import EndpointMeasure
from .geometry import wrap_params

__all__ = [
    "PointSet2D",
    "ld_sequence_2d",
    "TransportResult",
    "transport_to_measure",
    "RectWitness",
    "RectDiscReport",
    "rect_discrepancy",
    "reevaluate_rect",
]

GOLDEN_FRAC = (math.sqrt(5.0) - 1.0) / 2.0
_BITS = 32
_SCALE = float(2**_BITS)
# column masks of the Pascal matrix mod 2: bit k set iff C(k, j) is odd
_PASCAL_MASKS = [sum(1 << k for k in range(_BITS) if (k & j) == j) for j in range(_BITS)]


@dataclass(frozen=True)
class PointSet2D:
    """Finite point set in [0,1)^2 with its generator descriptor."""

    points: np.ndarray
    kind: str
    seed: int
    scramble: bool = False

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("point set must be a nonempty (n, 2) array")
        if np.any(pts < 0.0) or np.any(pts >= 1.0):
            raise ValueError("points must lie in [0, 1)^2")
        if len({(x, y) for x, y in pts.tolist()}) != pts.shape[0]:
            raise ValueError("points must be pairwise distinct")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _bit_reverse(i: np.ndarray) -> np.ndarray:
    v = i.astype(np.uint64)
    v = ((v >> np.uint64(1)) & np.uint64(0x55555555)) | ((v & np.uint64(0x55555555)) << np.uint64(1))
    v = ((v >> np.uint64(2)) & np.uint64(0x33333333)) | ((v & np.uint64(0x33333333)) << np.uint64(2))
    v = ((v >> np.uint64(4)) & np.uint64(0x0F0F0F0F)) | ((v & np.uint64(0x0F0F0F0F)) << np.uint64(4))
    v = ((v >> np.uint64(8)) & np.uint64(0x00FF00FF)) | ((v & np.uint64(0x00FF00FF)) << np.uint64(8))
    v = ((v >> np.uint64(16)) & np.uint64(0x0000FFFF)) | ((v & np.uint64(0x0000FFFF)) << np.uint64(16))
    return v


def _parity(v: np.ndarray) -> np.ndarray:
    v = v ^ (v >> np.uint64(32))
    v = v ^ (v >> np.uint64(16))
    v = v ^ (v >> np.uint64(8))
    v = v ^ (v >> np.uint64(4))
    v = v ^ (v >> np.uint64(2))
    v = v ^ (v >> np.uint64(1))
    return v & np.uint64(1)


def _digital_pair(n: int, seed: int, scramble: bool) -> np.ndarray:
    """Radical-inverse-paired digital (0, m, 2)-net in base 2.

    First coordinate is the 32-bit radical inverse of the index; the second
    applies the Pascal-matrix (binomial mod 2) digit map, giving the
    classical two-dimensional base-2 net.  Scrambling is a digital XOR
    shift, which preserves the net structure and distinctness.
    """
    i = np.arange(n, dtype=np.uint64)
    x_int = _bit_reverse(i)
    y_int = np.zeros(n, dtype=np.uint64)
    for j in range(_BITS):
        y_int |= _parity(i & np.uint64(_PASCAL_MASKS[j])) << np.uint64(_BITS - 1 - j)
    if scramble:
        rng = np.random.default_rng(seed)
        rx, ry = rng.integers(0, 2**_BITS, size=2, dtype=np.uint64)
        x_int = x_int ^ rx
        y_int = y_int ^ ry
    return np.stack([x_int, y_int], axis=1).astype(np.float64) / _SCALE


def ld_sequence_2d(n: int, kind: str = "digital-base2", seed: int = 0, scramble: bool = False) -> PointSet2D:
    """Two-dimensional point set of one of the supported generator kinds.

    ``digital-base2``: paired radical-inverse digital net; ``kronecker-
    fibonacci``: the golden-ratio lattice ({i * golden}, (i + 1/2) / n);
    ``pseudorandom``: seeded uniform points.  Same (kind, n, seed,
    scramble) always yields the identical set.
    """
    if n < 1:
        raise ValueError("need n >= 1 points")
    if kind == "digital-base2":
        pts = _digital_pair(n, seed, scramble)
    elif kind == "kronecker-fibonacci":
        # golden-ratio Kronecker line paired with the midpoint lattice; the
        # half-shift keeps the second coordinate away from 0 and 1
        i = np.arange(n, dtype=np.float64)
        pts = np.stack([np.mod(i * GOLDEN_FRAC, 1.0), (i + 0.5) / n], axis=1)
        if scramble:
            rng = np.random.default_rng(seed)
            pts = np.mod(pts + rng.random(2)[None, :], 1.0)
    elif kind == "pseudorandom":
        rng = np.random.default_rng(seed)
        pts = rng.random((n, 2))
        while len({(x, y) for x, y in pts.tolist()}) != n:  # pragma: no cover
            pts = rng.random((n, 2))
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    return PointSet2D(points=pts, kind=kind, seed=seed, scramble=scramble)


@dataclass(frozen=True)
class TransportResult:
    """Endpoint-pair parameters produced by transport, plus the applied nudges."""

    params: np.ndarray
    perturbations: tuple


def transport_to_measure(ps: PointSet2D, measure: EndpointMeasure) -> TransportResult:
    """Map uniform points to endpoint pairs distributed by the measure.

    The first marginal of the endpoint measure is uniform in arclength, so
    s = x directly; t inverts the conditional law at q.  Outputs falling in
    the degenerate null set (coincident or same-flat-side pairs, vertex
    hits) get their driving coordinate nudged by a deterministic tie-break
    ladder, and duplicates are resolved the same way; every nudge is
    recorded.
    """
    x = ps.points[:, 0].copy()
    q = ps.points[:, 1].copy()
    records = []

    def resolve(i: int) -> None:
        base_q = q[i]
        base_x = x[i]
        for attempt in range(1, 64):
            eps = 2.0**-44 * 3.0**attempt
            q_new = min(max(base_q + eps, 2.0**-44), 1.0 - 2.0**-44)
            x_new = base_x
            t_new = measure.conditional_inverse(x_new, q_new)
            if not measure.is_degenerate_pair(x_new, t_new):
                if (q_new != base_q) or (x_new != base_x):
                    records.append((i, "q", float(base_q), float(q_new)))
                q[i] = q_new
                x[i] = x_new
                return
            # vertex hits on the first endpoint need the other coordinate moved
            x_new = (base_x + eps) % 1.0
            t_new = measure.conditional_inverse(x_new, q_new)
            if not measure.is_degenerate_pair(x_new, t_new):
                records.append((i, "xq", float(base_x), float(x_new)))
                q[i] = q_new
                x[i] = x_new
                return
        raise RuntimeError(f"could not nudge degenerate transport input at index {i}")

    s = x
    t = np.asarray(measure.conditional_inverse(s, q), dtype=float)
    for i in range(ps.n):
        if measure.is_degenerate_pair(float(s[i]), float(t[i])):
            resolve(i)
    t = np.asarray(measure.conditional_inverse(s, q), dtype=float)
    # enforce pairwise-distinct output pairs
    seen: dict = {}
    for i in range(ps.n):
        key = (s[i], t[i]) if s[i] <= t[i] else (t[i], s[i])
        while key in seen:
            resolve_from = q[i]
            q[i] = min(max(resolve_from + 2.0**-40, 2.0**-44), 1.0 - 2.0**-44)
            records.append((i, "q", float(resolve_from), float(q[i])))
            t[i] = measure.conditional_inverse(float(s[i]), float(q[i]))
            key = (s[i], t[i]) if s[i] <= t[i] else (t[i], s[i])
        seen[key] = i
    params = np.stack([wrap_params(s), wrap_params(t)], axis=1)
    return TransportResult(params=params, perturbations=tuple(records))


@dataclass(frozen=True)
class RectWitness:
    """Witness rectangle with explicit one-sided closure flags.

    ``x_closed``/``y_closed`` give the closure of the point count on each
    axis (True: endpoints included).  Rectangle masses are atomless, so
    closure affects only the count.
    """

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    x_closed: bool
    y_closed: bool


@dataclass(frozen=True)
class RectDiscReport:
    """Supremum rectangle discrepancy in count units, with its witness."""

    value: float
    witness: RectWitness
    family: str
    candidates: int


def _as_cdf(mass) -> Callable:
    if isinstance(mass, EndpointMeasure):
        return mass.anchored_mass
    if mass == "uniform":
        return lambda x, y: np.asarray(x, float) * np.asarray(y, float)
    if callable(mass):
        return mass
    raise TypeError("mass must be 'uniform', an EndpointMeasure, or an anchored-CDF callable")


def _rect_mass_from_cdf(cdf, x_lo, x_hi, y_lo, y_hi):
    return cdf(x_hi, y_hi) - cdf(x_lo, y_hi) - cdf(x_hi, y_lo) + cdf(x_lo, y_lo)


def reevaluate_rect(points: np.ndarray, mass, witness: RectWitness) -> float:
    """Recompute |count - N * mass| for a witness rectangle exactly."""
    cdf = _as_cdf(mass)
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    if witness.x_closed:
        in_x = (pts[:, 0] >= witness.x_lo) & (pts[:, 0] <= witness.x_hi)
    else:
        in_x = (pts[:, 0] > witness.x_lo) & (pts[:, 0] < witness.x_hi)
    if witness.y_closed:
        in_y = (pts[:, 1] >= witness.y_lo) & (pts[:, 1] <= witness.y_hi)
    else:
        in_y = (pts[:, 1] > witness.y_lo) & (pts[:, 1] < witness.y_hi)
    count = int(np.count_nonzero(in_x & in_y))
    m = _rect_mass_from_cdf(cdf, witness.x_lo, witness.x_hi, witness.y_lo, witness.y_hi)
    return abs(count - n * float(m))


def _anchored_exact(points: np.ndarray, cdf) -> RectDiscReport:
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    xs, ys = pts[:, 0], pts[:, 1]
    n = pts.shape[0]
    x_cand = np.unique(np.concatenate([xs, [1.0]]))
    y_cand = np.unique(np.concatenate([ys, [1.0]]))
    best = -1.0
    best_w = None
    ybuf = np.empty(n)
    filled = 0
    ptr = 0
    for u in x_cand:
        # points with x < u are already inserted; group with x == u joins for the closed variant
        while ptr < n and xs[ptr] < u:
            pos = np.searchsorted(ybuf[:filled], ys[ptr])
            ybuf[pos + 1 : filled + 1] = ybuf[pos:filled]
            ybuf[pos] = ys[ptr]
            filled += 1
            ptr += 1
        grp_end = ptr
        while grp_end < n and xs[grp_end] == u:
            grp_end += 1
        grp_ys = np.sort(ys[ptr:grp_end])
        masses = cdf(np.full(y_cand.shape, u), y_cand) * n
        open_lt = np.searchsorted(ybuf[:filled], y_cand, side="left")
        open_le = np.searchsorted(ybuf[:filled], y_cand, side="right")
        clos_lt = open_lt + np.searchsorted(grp_ys, y_cand, side="left")
        clos_le = open_le + np.searchsorted(grp_ys, y_cand, side="right")
        for counts, x_closed, y_closed in (
            (open_lt, False, False),
            (open_le, False, True),
            (clos_lt, True, False),
            (clos_le, True, True),
        ):
            vals = np.abs(counts - masses)
            k = int(np.argmax(vals))
            if vals[k] > best:
                best = float(vals[k])
                best_w = RectWitness(0.0, float(u), 0.0, float(y_cand[k]), x_closed, y_closed)
    return RectDiscReport(value=best, witness=best_w, family="anchored",
                          candidates=4 * x_cand.size * y_cand.size)


def _allrect_exact(points: np.ndarray, cdf) -> RectDiscReport:
    pts = points[np.lexsort((points[:, 1], points[:, 0]))]
    n = pts.shape[0]
    xu = np.unique(np.concatenate([pts[:, 0], [0.0, 1.0]]))
    yv = np.unique(np.concatenate([pts[:, 1], [0.0, 1.0]]))
    nx, ny = xu.size, yv.size
    # per-x-group histograms of y against the candidate grid
    h_le = np.zeros((nx, ny), dtype=np.int64)
    h_lt = np.zeros((nx, ny), dtype=np.int64)
    start = 0
    for g, xval in enumerate(xu):
        end = start
        while end < n and pts[end, 0] == xval:
            end += 1
        grp = np.sort(pts[start:end, 1])
        h_le[g] = np.searchsorted(grp, yv, side="right")
        h_lt[g] = np.searchsorted(grp, yv, side="left")
        start = end
    s_le = np.cumsum(h_le, axis=0)
    s_lt = np.cumsum(h_lt, axis=0)
    a_tab = np.empty((nx, ny))
    for g in range(nx):
        a_tab[g] = cdf(np.full(ny, xu[g]), yv)
    best = -1.0
    best_w = None
    for i in range(nx):
        rows = slice(i, nx)
        g_mat = n * (a_tab[rows] - a_tab[i][None, :])
        cle = s_le[rows] - (s_le[i - 1][None, :] if i > 0 else 0)
        clt = s_lt[rows] - (s_lt[i - 1][None, :] if i > 0 else 0)
        # open-x window (xu[i], xu[j]) excludes groups i and j
        j_idx = np.arange(i, nx)
        inner_hi = np.maximum(j_idx - 1, i)
        ole = s_le[inner_hi] - s_le[i]
        olt = s_lt[inner_hi] - s_lt[i]
        ole[0] = 0
        olt[0] = 0
        # overfull side: closed counts minus masses
        u_mat = cle - g_mat
        l_mat = clt - g_mat
        run_min = np.minimum.accumulate(l_mat, axis=1)
        over = u_mat - run_min
        # underfull side: masses minus open counts
        a_mat = g_mat - olt
        b_mat = g_mat - ole
        run_min2 = np.minimum.accumulate(b_mat, axis=1)
        under = a_mat - run_min2
        o_j, o_d = np.unravel_index(int(np.argmax(over)), over.shape)
        u_j, u_d = np.unravel_index(int(np.argmax(under)), under.shape)
        if over[o_j, o_d] > best:
            best = float(over[o_j, o_d])
            c = int(np.argmin(l_mat[o_j, : o_d + 1]))
            best_w = RectWitness(float(xu[i]), float(xu[i + o_j]), float(yv[c]), float(yv[o_d]), True, True)
        if under[u_j, u_d] > best:
            best = float(under[u_j, u_d])
            c = int(np.argmin(b_mat[u_j, : u_d + 1]))
            best_w = RectWitness(float(xu[i]), float(xu[i + u_j]), float(yv[c]), float(yv[u_d]), False, False)
    return RectDiscReport(value=best, witness=best_w, family="all-rectangles",
                          candidates=nx * (nx + 1) * ny * (ny + 1) // 4)


def _allrect_exhaustive(points: np.ndarray, cdf) -> RectDiscReport:
    """Literal enumeration over candidate 4-tuples; oracle for small sets."""
    pts = np.asarray(points, dtype=float)
    n = pts.shape[0]
    xc = np.unique(np.concatenate([pts[:, 0], [0.0, 1.0]]))
    yc = np.unique(np.concatenate([pts[:, 1], [0.0, 1.0]]))
    best = -1.0
    best_w = None
    cands = 0
    for i, a in enumerate(xc):
        for b in xc[i:]:
            for j, c in enumerate(yc):
                for d in yc[j:]:
                    cands += 1
                    m = n * float(_rect_mass_from_cdf(cdf, a, b, c, d))
                    cnt_cc = int(np.count_nonzero((pts[:, 0] >= a) & (pts[:, 0] <= b)
                                                  & (pts[:, 1] >= c) & (pts[:, 1] <= d)))
                    cnt_oo = int(np.count_nonzero((pts[:, 0] > a) & (pts[:, 0] < b)
                                                  & (pts[:, 1] > c) & (pts[:, 1] < d)))
                    if cnt_cc - m > best:
                        best = cnt_cc - m
                        best_w = RectWitness(float(a), float(b), float(c), float(d), True, True)
                    if m - cnt_oo > best:
                        best = m - cnt_oo
                        best_w = RectWitness(float(a), float(b), float(c), float(d), False, False)
    return RectDiscReport(value=best, witness=best_w, family="all-rectangles", candidates=cands)


def rect_discrepancy(points, mass, family: str = "anchored") -> RectDiscReport:
    """Exact supremum rectangle discrepancy of a point set, in count units.

    ``family`` is "anchored" for boxes [0,u) x [0,v), "all" for arbitrary
    axis-parallel rectangles, or "all-exhaustive" for the brute-force
    variant kept as an oracle.
    """
    pts = np.asarray(points, dtype=float)
    if isinstance(points, PointSet2D):
        pts = points.points
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("empty point set")
    cdf = _as_cdf(mass)
    if family == "anchored":
        return _anchored_exact(pts, cdf)
    if family == "all":
        return _allrect_exact(pts, cdf)
    if family == "all-exhaustive":
        return _allrect_exhaustive(pts, cdf)
    raise ValueError(f"unknown rectangle family {family!r}")
