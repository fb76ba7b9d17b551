"""Command-line interface: construct, eval, correct-length, scan, verify."""

from __future__ import annotations

import argparse
import json
import sys

from . import buffon
from .construct import BuildRecipe, build_from_recipe, correct_length
from .geometry import ConvexBody, make_disk, make_polygon
from .harness import (
    ScanConfig,
    evaluate_exact_capped,
    load_chordset,
    rows_to_csv,
    run_scan,
    save_chordset,
    verify,
)


def _parse_vertices(text: str):
    verts = []
    for part in text.replace(";", " ").split():
        x, y = part.split(",")
        verts.append((float(x), float(y)))
    return verts


def _body_from_args(args) -> ConvexBody:
    if args.body == "disk":
        return make_disk((0.0, 0.0), args.radius)
    if not args.vertices:
        raise SystemExit("--body polygon requires --vertices 'x,y x,y ...'")
    return make_polygon(_parse_vertices(args.vertices))


def _add_body_args(p):
    p.add_argument("--body", choices=("disk", "polygon"), default="disk")
    p.add_argument("--radius", type=float, default=1.0, help="disk radius")
    p.add_argument("--vertices", help="polygon vertices as 'x,y x,y ...' (counterclockwise)")


def _cmd_construct(args) -> int:
    body = _body_from_args(args)
    recipe = BuildRecipe(method=args.method, n=args.n, m=args.m, k=args.k, gen=args.gen,
                         seed=args.seed, scramble=args.scramble, shift=args.shift,
                         target_length=args.target_length)
    cs = build_from_recipe(body, recipe)
    save_chordset(cs, args.out)
    print(f"wrote {cs.n_chords} chords, total length {cs.L:.12g}, to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    cs = load_chordset(args.infile)
    out = {"n": cs.n_chords, "length": cs.L}
    if args.mode in ("exact", "both"):
        rep, capped = evaluate_exact_capped(cs, mc_samples=args.samples, seed=args.seed)
        out["exact"] = _report_dict(rep)
        if capped:
            out["exact"]["warning"] = "cell cap exceeded; Monte-Carlo fallback"
            print("warning: exact cell cap exceeded, fell back to Monte-Carlo", file=sys.stderr)
    if args.mode in ("mc", "both"):
        rep = buffon.mc_discrepancy(cs, args.samples, seed=args.seed)
        out["mc"] = _report_dict(rep)
    text = json.dumps(out, indent=1)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _report_dict(rep) -> dict:
    return {
        "value": rep.value,
        "witness": list(rep.witness),
        "witness_chord_length": rep.witness_chord_length,
        "method": rep.method,
        "cells": rep.cells,
        "target_coefficient": rep.target_coefficient,
    }


def _cmd_correct_length(args) -> int:
    cs = load_chordset(args.infile)
    out, report = correct_length(cs.body, cs, args.target_length)
    save_chordset(out, args.out)
    print(f"added {report.count} chords (delta {report.delta:.12g}); "
          f"final length {out.L:.12g} -> {args.out}")
    return 0


def _cmd_scan(args) -> int:
    body = _body_from_args(args)
    ladder = tuple(int(x) for x in args.ladder.split(","))
    config = ScanConfig(
        body=body.descriptor(), methods=tuple(args.methods.split(",")), ladder=ladder,
        transport_seeds=args.transport_seeds, random_seeds=args.random_seeds,
        mc_samples=args.samples, gen=args.gen, threads=args.threads,
        timings=not args.no_timings,
    )
    rows, summary = run_scan(config)
    csv_path = args.out + ".csv"
    json_path = args.out + ".json"
    with open(csv_path, "w") as fh:
        fh.write(rows_to_csv(rows))
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=1)
        fh.write("\n")
    print(f"wrote {len(rows)} rows to {csv_path}; summary to {json_path}")
    for method, info in summary["methods"].items():
        print(f"  {method}: best model {info['best_model']}, "
              f"top median exact D = {info['top_median_exact_d']:.4f}")
    return 0


def _cmd_verify(args) -> int:
    suites = args.suites.split(",") if args.suites else None
    results = verify(suites=suites, seed=args.seed)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="chorddisc",
                                     description="Full-chord sets and their Buffon discrepancy.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a chord set and save it")
    _add_body_args(p)
    p.add_argument("--method", choices=("transport", "random", "direction-lattice"),
                   default="transport")
    p.add_argument("--n", type=int, default=0, help="number of chords")
    p.add_argument("--m", type=int, default=0, help="directions (direction-lattice)")
    p.add_argument("--k", type=int, default=0, help="offsets per direction")
    p.add_argument("--gen", default="kronecker-fibonacci",
                   choices=("digital-base2", "kronecker-fibonacci", "pseudorandom"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scramble", action="store_true")
    p.add_argument("--shift", choices=("deterministic", "random"), default="deterministic")
    p.add_argument("--target-length", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("eval", help="evaluate the discrepancy of a saved chord set")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--mode", choices=("exact", "mc", "both"), default="both")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("correct-length", help="extend a saved set to an exact total length")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--target-length", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_correct_length)

    p = sub.add_parser("scan", help="run a scaling scan and emit CSV + JSON summary")
    _add_body_args(p)
    p.add_argument("--methods", default="transport,random")
    p.add_argument("--ladder", default=",".join(str(2**k) for k in range(6, 14)))
    p.add_argument("--transport-seeds", type=int, default=5)
    p.add_argument("--random-seeds", type=int, default=10)
    p.add_argument("--samples", type=int, default=50_000)
    p.add_argument("--gen", default="kronecker-fibonacci")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-timings", action="store_true",
                   help="write wall_time_s as 0 for byte-reproducible output")
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("verify", help="run the cross-module invariant suites")
    p.add_argument("--suites", help="comma-separated subset of suites")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_verify)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
