"""Persistence, scaling scans, verification suites, and report emission.

Scans build chord sets over a size ladder, evaluate them (exact Buffon
discrepancy, Monte-Carlo lower bound, endpoint-measure rectangle
discrepancy, localized window supremum), and emit one CSV row per
(method, size, seed) plus a JSON summary with least-squares fits of the
discrepancy against polylog and square-root growth models.  Rows are
computed independently (optionally in a process pool) and merged by key,
so results are byte-identical regardless of parallelism.
"""

from __future__ import annotations

import concurrent.futures
import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import buffon
from .chordmeasure import EndpointMeasure
from .construct import build_random, build_transport
from .geometry import ChordSet, ConvexBody, ConvexPolygon, Disk, GeometryError, make_disk, make_polygon
from .lowdisc import rect_discrepancy

__all__ = [
    "SerializationError",
    "UnsupportedVersionError",
    "BodyMismatchError",
    "save_chordset",
    "load_chordset",
    "body_from_descriptor",
    "ScanConfig",
    "ScanRow",
    "run_scan",
    "rows_to_csv",
    "fit_models",
    "evaluate_exact_capped",
    "verify",
    "SuiteResult",
]

SCHEMA_VERSION = 1
CSV_HEADER = "method,n,length,exact_d,mc_d,rect_delta,localized_sup,wall_time_s"


class SerializationError(ValueError):
    """Malformed chord-set file."""


class UnsupportedVersionError(SerializationError):
    """Chord-set file written by an unknown schema version."""


class BodyMismatchError(SerializationError):
    """Loaded body differs from the expected one."""


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def body_from_descriptor(desc: dict) -> ConvexBody:
    kind = desc.get("kind")
    if kind == "disk":
        return make_disk([float(c) for c in desc["center"]], float(desc["radius"]))
    if kind == "polygon":
        return make_polygon([[float(x), float(y)] for x, y in desc["vertices"]])
    raise SerializationError(f"unknown body kind {kind!r}")


def _body_descriptor_strings(body: ConvexBody) -> dict:
    if isinstance(body, Disk):
        return {"kind": "disk", "center": [_fmt(body.center[0]), _fmt(body.center[1])],
                "radius": _fmt(body.radius)}
    return {"kind": "polygon",
            "vertices": [[_fmt(x), _fmt(y)] for x, y in body.vertices.tolist()]}


def save_chordset(cs: ChordSet, path: str) -> None:
    """Write a chord set as versioned JSON with 17-significant-digit decimals."""
    doc = {
        "version": SCHEMA_VERSION,
        "body": _body_descriptor_strings(cs.body),
        "chords": [[_fmt(c.s), _fmt(c.t)] for c in cs.chords],
    }
    if cs.meta:
        doc["meta"] = {k: v for k, v in cs.meta.items() if _json_safe(v)}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _json_safe(v) -> bool:
    try:
        json.dumps(v)
        return True
    except TypeError:
        return False


def load_chordset(path: str, expect_body: ConvexBody | None = None) -> ChordSet:
    """Load a chord set saved by :func:`save_chordset`.

    Round-trips parameters bit-exactly.  Rejects unknown schema versions,
    degenerate entries, duplicate chords, and (when ``expect_body`` is
    given) sets built on a different body.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SerializationError(f"cannot read chord-set file {path}: {exc}") from exc
    version = doc.get("version")
    if version != SCHEMA_VERSION:
        raise UnsupportedVersionError(f"unsupported chord-set schema version {version!r}")
    if "body" not in doc or "chords" not in doc:
        raise SerializationError("chord-set file missing body or chords")
    body = body_from_descriptor(doc["body"])
    if expect_body is not None and body.descriptor() != expect_body.descriptor():
        raise BodyMismatchError("chord-set body differs from the expected body")
    from .geometry import chord_from_params

    chords = []
    for entry in doc["chords"]:
        chords.append(chord_from_params(body, float(entry[0]), float(entry[1])))
    meta = doc.get("meta", {})
    return ChordSet(body, chords, meta=meta)


# ----------------------------------------------------------------------
# scans
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    """One scaling experiment: body, methods, ladder, seeds, outputs."""

    body: dict
    methods: tuple = ("transport", "random")
    ladder: tuple = tuple(2**k for k in range(6, 14))
    transport_seeds: int = 5
    random_seeds: int = 10
    mc_samples: int = 50_000
    gen: str = "kronecker-fibonacci"
    threads: int = 1
    timings: bool = True
    cell_cap: float = 1e8

    def __post_init__(self):
        if not self.methods:
            raise ValueError("scan needs at least one method")
        if not self.ladder or list(self.ladder) != sorted(set(self.ladder)):
            raise ValueError("scan ladder must be strictly increasing and nonempty")
        for m in self.methods:
            if m not in ("transport", "random"):
                raise ValueError(f"unknown scan method {m!r}")


@dataclass(frozen=True)
class ScanRow:
    method: str
    n: int
    length: float
    exact_d: float
    mc_d: float
    rect_delta: float
    localized_sup: float
    wall_time_s: float

    def __post_init__(self):
        if self.exact_d + 1e-9 < self.mc_d:
            raise GeometryError("exact discrepancy fell below its Monte-Carlo lower bound")


def evaluate_exact_capped(cs: ChordSet, cell_cap: float = 1e8, mc_samples: int = 200_000,
                          seed: int = 0):
    """Exact discrepancy, except polygons whose cell grid would exceed the
    cap fall back to the Monte-Carlo evaluator (flagged)."""
    if isinstance(cs.body, ConvexPolygon):
        grid = 2 * cs.n_chords + cs.body.n_sides
        if grid * grid > cell_cap:
            rep = buffon.mc_discrepancy(cs, mc_samples, seed=seed)
            return rep, True
    return buffon.exact_discrepancy(cs), False


def _scan_job(args: dict) -> dict:
    body = body_from_descriptor(args["body"])
    method = args["method"]
    n = args["n"]
    seed = args["seed"]
    t0 = time.perf_counter()
    if method == "transport":
        cs = build_transport(body, n, gen=args["gen"], seed=seed, scramble=seed > 0)
        rect_delta = cs.meta["rect_delta_anchored"]
    else:
        cs = build_random(body, n, seed=seed)
        measure = EndpointMeasure(body)
        params = np.stack([cs.s_params, cs.t_params], axis=1)
        rect_delta = rect_discrepancy(params, measure, family="anchored").value
    exact_rep, capped = evaluate_exact_capped(cs, cell_cap=args["cell_cap"],
                                              mc_samples=args["mc_samples"], seed=seed)
    mc_rep = buffon.mc_discrepancy(cs, args["mc_samples"], seed=seed)
    if isinstance(body, Disk):
        localized = buffon.localized_rect_sup(cs).value
    else:
        localized = float("nan")
    wall = time.perf_counter() - t0
    return {
        "method": method,
        "n": n,
        "seed": seed,
        "length": cs.L,
        "exact_d": exact_rep.value,
        "mc_d": mc_rep.value,
        "rect_delta": rect_delta,
        "localized_sup": localized,
        "wall_time_s": wall,
        "capped": capped,
    }


def run_scan(config: ScanConfig):
    """Execute the scan; returns (rows, summary) with rows sorted by key."""
    jobs = []
    for method in config.methods:
        seeds = range(config.transport_seeds if method == "transport" else config.random_seeds)
        for n in config.ladder:
            for seed in seeds:
                jobs.append({
                    "body": config.body, "method": method, "n": int(n), "seed": int(seed),
                    "gen": config.gen, "mc_samples": config.mc_samples,
                    "cell_cap": config.cell_cap,
                })
    if config.threads > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.threads) as pool:
            raw = list(pool.map(_scan_job, jobs))
    else:
        raw = [_scan_job(j) for j in jobs]
    raw.sort(key=lambda r: (r["method"], r["n"], r["seed"]))
    rows = []
    for r in raw:
        rows.append(ScanRow(
            method=r["method"], n=r["n"], length=r["length"], exact_d=r["exact_d"],
            mc_d=r["mc_d"], rect_delta=r["rect_delta"], localized_sup=r["localized_sup"],
            wall_time_s=r["wall_time_s"] if config.timings else 0.0,
        ))
    summary = _summarize(config, rows)
    return rows, summary


MODELS = {
    "polylog32": lambda L: np.log(L) ** 1.5,
    "log": lambda L: np.log(L),
    "sqrt": lambda L: np.sqrt(L),
}


def fit_models(lengths, values) -> dict:
    """Least-squares fits a + b * phi(L) for each growth model, with RMS residuals."""
    L = np.asarray(lengths, dtype=float)
    y = np.asarray(values, dtype=float)
    out = {}
    for name, phi in MODELS.items():
        design = np.stack([np.ones_like(L), phi(L)], axis=1)
        beta, *_ = np.linalg.lstsq(design, y, rcond=None)
        resid = float(np.sqrt(np.mean((y - design @ beta) ** 2)))
        out[name] = {"a": float(beta[0]), "b": float(beta[1]), "rms_residual": resid}
    return out


def _summarize(config: ScanConfig, rows) -> dict:
    summary: dict = {
        "config": {
            "body": config.body, "methods": list(config.methods),
            "ladder": [int(n) for n in config.ladder],
            "transport_seeds": config.transport_seeds, "random_seeds": config.random_seeds,
            "mc_samples": config.mc_samples, "gen": config.gen,
        },
        "methods": {},
    }
    top_n = max(config.ladder)
    for method in config.methods:
        mrows = [r for r in rows if r.method == method]
        med_L, med_D = [], []
        for n in config.ladder:
            sub = [r for r in mrows if r.n == n]
            med_L.append(float(np.median([r.length for r in sub])))
            med_D.append(float(np.median([r.exact_d for r in sub])))
        fits = fit_models(med_L, med_D)
        winner = min(fits, key=lambda k: fits[k]["rms_residual"])
        top = [r.exact_d for r in mrows if r.n == top_n]
        summary["methods"][method] = {
            "median_length": med_L,
            "median_exact_d": med_D,
            "fits": fits,
            "best_model": winner,
            "top_median_exact_d": float(np.median(top)),
        }
    if {"transport", "random"} <= set(config.methods):
        t = summary["methods"]["transport"]["top_median_exact_d"]
        r = summary["methods"]["random"]["top_median_exact_d"]
        summary["top_ratio_transport_over_random"] = t / r
    return summary


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        buf.write(",".join([
            r.method, str(r.n), _fmt(r.length), _fmt(r.exact_d), _fmt(r.mc_d),
            _fmt(r.rect_delta), _fmt(r.localized_sup), _fmt(r.wall_time_s),
        ]) + "\n")
    return buf.getvalue()


# ----------------------------------------------------------------------
# verification suites
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    details: tuple = field(default=())


def _suite_normalization(seed: int, density_scale: float) -> SuiteResult:
    from .chordmeasure import ParamRect

    details = []
    ok = True
    bodies = {
        "disk": (make_disk((0.0, 0.0), 1.0), 1e-9),
        "square": (make_polygon([(0, 0), (1, 0), (1, 1), (0, 1)]), 1e-6),
    }
    for name, (body, tol) in bodies.items():
        measure = EndpointMeasure(body)
        closed = measure.total_mass()
        quad = density_scale * measure.rect_mass_quadrature(ParamRect.full_square())
        good = abs(closed - 1.0) <= 1e-12 and abs(quad - 1.0) <= tol
        ok &= good
        details.append(f"{name}: closed {closed:.12f}, density quadrature {quad:.9f} (tol {tol})")
    m = EndpointMeasure(make_disk((0.0, 0.0), 1.0))
    window = m.rect_mass(ParamRect.from_bounds(0.0, 0.5, 0.5, 1.0))
    good = abs(window - 1.0 / math.pi) <= 1e-9
    ok &= good
    details.append(f"disk window mass {window:.12f} vs 1/pi")
    return SuiteResult("normalization", ok, tuple(details))


def _suite_cut_identity(seed: int, density_scale: float) -> SuiteResult:
    rng = np.random.default_rng(seed)
    body = make_disk((0.0, 0.0), 1.0)
    checked = 0
    for trial in range(20):
        cs = build_random(body, int(rng.integers(2, 200)), seed=trial)
        for _ in range(10):
            cuts = np.sort(rng.random(4))
            try:
                arc_i = buffon.ArcInterval.from_bounds(cuts[0], cuts[1])
                arc_j = buffon.ArcInterval.from_bounds(cuts[2], cuts[3])
                buffon.pair_count(cs, arc_i, arc_j)
                checked += 1
            except buffon.InadmissibleArcError:  # pragma: no cover
                continue
    return SuiteResult("cut-identity", True, (f"{checked} window pairs integer-exact",))


def _suite_localized_window(seed: int, density_scale: float) -> SuiteResult:
    body = make_disk((0.0, 0.0), 1.0)
    details = []
    ok = True
    for cs in (build_transport(body, 64, record_discrepancy=False),
               build_transport(body, 256, record_discrepancy=False),
               build_random(body, 100, seed=seed)):
        d = buffon.exact_discrepancy_disk(cs).value
        loc = buffon.localized_rect_sup(cs).value
        good = loc <= 2.0 * d + 1e-9
        ok &= good
        details.append(f"N={cs.n_chords}: localized {loc:.4f} <= 2 * {d:.4f}")
    return SuiteResult("localized-window", ok, tuple(details))


def _suite_koksma(seed: int, density_scale: float) -> SuiteResult:
    from .chordmeasure import chord_length_grid, koksma_gap_check
    from .lowdisc import ld_sequence_2d, transport_to_measure

    body = make_disk((0.0, 0.0), 1.0)
    measure = EndpointMeasure(body)
    f_grid = chord_length_grid(body, 512)
    details = []
    ok = True
    for n in (16, 64, 256):
        tr = transport_to_measure(ld_sequence_2d(n, "kronecker-fibonacci"), measure)
        chk = koksma_gap_check(tr.params, measure, f_grid, diagonal_jump=body.perimeter)
        ok &= chk.holds
        details.append(f"N={n}: lhs {chk.lhs:.4f} <= bound {chk.bound:.4f}")
    return SuiteResult("koksma", ok, tuple(details))


def _suite_oracle_dominance(seed: int, density_scale: float) -> SuiteResult:
    body = make_disk((0.0, 0.0), 1.0)
    details = []
    ok = True
    for n, s in ((8, 0), (32, 1), (64, 2)):
        cs = build_random(body, n, seed=s)
        ex = buffon.exact_discrepancy_disk(cs).value
        mc = buffon.mc_discrepancy(cs, 20_000, seed=s).value
        good = ex >= mc - 1e-12
        ok &= good
        details.append(f"N={n}: exact {ex:.4f} >= mc {mc:.4f}")
    return SuiteResult("oracle-dominance", ok, tuple(details))


_SUITES = {
    "normalization": _suite_normalization,
    "cut-identity": _suite_cut_identity,
    "localized-window": _suite_localized_window,
    "koksma": _suite_koksma,
    "oracle-dominance": _suite_oracle_dominance,
}


def verify(suites=None, seed: int = 0, density_scale: float = 1.0, echo=print):
    """Run the cross-module invariant suites; returns the list of results.

    ``density_scale`` is a negative-control hook: scaling the density used
    by the normalization quadrature away from 1 must fail that suite.
    """
    names = list(_SUITES) if suites is None else list(suites)
    results = []
    for name in names:
        if name not in _SUITES:
            raise ValueError(f"unknown verification suite {name!r}")
        try:
            res = _SUITES[name](seed, density_scale)
        except Exception as exc:  # bubbled evaluation errors fail the suite
            res = SuiteResult(name, False, (f"error: {exc}",))
        results.append(res)
        if echo is not None:
            status = "PASS" if res.passed else "FAIL"
            echo(f"{status} {name}")
            for d in res.details:
                echo(f"    {d}")
    return results
