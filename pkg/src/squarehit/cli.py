"""Command-line interface: squarehit {gen,solve,approx,verify,certify,falsify,bench}."""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import constructions
from .approx import MODE_ALIASES, colour_squares, colour_unit_squares, hit_greedy, resolve_mode
from .errors import ModeInapplicable, SquareHitError
from .exact import exact_chi, exact_nu, exact_omega, exact_tau, max_degree_Delta
from .geometry import SQRT2, Square, family
from .hitters import (
    AXIS_PARALLEL_4,
    AXIS_PARALLEL_LEFTMOST_2,
    NEIGHBOURS_FOR,
    SIX_POINT_LEFTMOST,
    SIX_POINT_T,
    TEN_POINT,
    TWELVE_COVER_CENTRES,
    TWELVE_POINT_COVER,
    certify_nine_gon,
    cover_check,
    falsify_hitter,
    hitter_points,
    nine_gon,
    right_halfdisk,
    six_point_claim_inequalities,
)
from .io import (
    ResultDocument,
    instance_hash,
    read_instance,
    read_result,
    verify_result,
    witness_to_json,
    write_instance,
)
from .svg import render_svg

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SOLVERS = {"tau": exact_tau, "nu": exact_nu, "chi": exact_chi, "omega": exact_omega, "Delta": max_degree_Delta}


class UsageError(Exception):
    pass


def _read_bytes(path: Optional[str]) -> bytes:
    if path in (None, "-"):
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _emit(data: bytes, path: Optional[str] = None) -> None:
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _json(obj) -> bytes:
    return (json.dumps(obj, indent=1, allow_nan=False) + "\n").encode()


def _load(args):
    fam = read_instance(_read_bytes(args.input))
    if args.dedup:
        # duplicates are meaningful (replication), so dropping them is opt-in
        fam = family(list(dict.fromkeys(fam)), fam.eps)
    return fam


def _runtime(args, t0: float) -> Optional[float]:
    # wall time breaks byte-identical output, so it is opt-in
    return round(time.perf_counter() - t0, 6) if args.timing else None


# ------------------------------------------------------------------ commands


def cmd_gen(args) -> int:
    if args.name:
        try:
            nc = constructions.build(args.name, args.m)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from exc
        fam = nc.family
    else:
        if args.n is None:
            raise UsageError("gen needs --name or --n")
        fam = constructions.random_family(args.n, (args.side_min, args.side_max), args.angle_mode,
                                          args.window, args.seed)
    if args.eps is not None:
        fam = family(list(fam), args.eps)
    _emit(write_instance(fam), args.out)
    if args.svg:
        _emit(render_svg(fam), args.svg)
    return EXIT_OK


def cmd_solve(args) -> int:
    fam = _load(args)
    t0 = time.perf_counter()
    solver = SOLVERS[args.param]
    res = solver(fam) if args.param == "Delta" else solver(fam, limit=args.limit)
    doc = ResultDocument(instance_hash(fam), args.param, {"limit": args.limit}, res.value,
                         witness_to_json(args.param, res.witness), None, None, _runtime(args, t0),
                         {"nodes": res.nodes_explored})
    _emit(doc.to_bytes(), args.out)
    if args.svg:
        pts = res.witness if args.param == "tau" else None
        cols = res.witness if args.param == "chi" else None
        _emit(render_svg(fam, points=pts, colouring=cols), args.svg)
    return EXIT_OK


def cmd_approx(args) -> int:
    fam = _load(args)
    t0 = time.perf_counter()
    if args.op == "hit":
        kind = resolve_mode(args.mode)
        run = hit_greedy(fam, kind)
        doc = ResultDocument(instance_hash(fam), "hit", {"mode": kind}, len(run.points),
                             witness_to_json("hit", run.points), run.guarantee, None, _runtime(args, t0),
                             {"pivots": run.pivots, "packing_lower_bound": run.nu_lower})
        regions = [right_halfdisk(fam[i]) for i in run.pivots] if NEIGHBOURS_FOR[kind].right_half else None
        svg = (lambda: render_svg(fam, points=run.points, pivots=run.pivots, certificates=regions,
                                  point_labels=[str(r + 1) for r, rd in enumerate(run.rounds) for _ in rd.points]))
    else:
        run = colour_unit_squares(fam) if args.mode == "unit" else colour_squares(fam)
        doc = ResultDocument(instance_hash(fam), "colour", {"mode": args.mode}, run.k_used,
                             list(run.colour_of), run.bound, None, _runtime(args, t0),
                             {"Delta": run.delta, "order": run.order})
        svg = lambda: render_svg(fam, colouring=run.colour_of)  # noqa: E731
    _emit(doc.to_bytes(), args.out)
    if args.svg:
        _emit(svg(), args.svg)
    return EXIT_OK


def cmd_verify(args) -> int:
    fam = read_instance(_read_bytes(args.instance))
    doc = read_result(_read_bytes(args.result))
    verdict = verify_result(doc, fam)
    _emit(_json({"accepted": verdict.ok, "reason": verdict.reason}))
    return EXIT_OK if verdict.ok else EXIT_FAIL


def cmd_certify(args) -> int:
    hitter = resolve_mode(args.hitter)
    if hitter == TEN_POINT:
        cfg = nine_gon()
        cert = certify_nine_gon(cfg.angles)
        # condition (i) is tight by construction (ring on the unit circle)
        report = {"hitter": hitter, "ok": bool(cert.ok), "margin": cfg.margin,
                  "min_slacks": {k: float(np.min(v)) for k, v in cert.slacks.items()},
                  "largest_gap": float(max(cfg.gaps())), "angles": list(cfg.angles)}
        ok = bool(cert.ok)
    elif hitter == TWELVE_POINT_COVER:
        res = cover_check(TWELVE_COVER_CENTRES, 0.5, SQRT2 + 1)
        report = {"hitter": hitter, "ok": res.ok, "margin": res.margin, "cells": res.cells}
        ok = res.ok
    elif hitter == SIX_POINT_LEFTMOST:
        s1, s2 = six_point_claim_inequalities(SIX_POINT_T)
        ok = s1 >= -1e-12 and s2 >= -1e-12
        report = {"hitter": hitter, "ok": ok, "t": SIX_POINT_T, "slacks": [s1, s2]}
    else:
        raise UsageError(f"certify supports ten-point, six-point and twelve-point, not {args.hitter!r}")
    _emit(_json(report))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_falsify(args) -> int:
    kind = resolve_mode(args.hitter)
    if kind not in NEIGHBOURS_FOR:
        raise UsageError(f"unknown hitter {args.hitter!r}")
    rng = np.random.default_rng(args.seed)
    per = max(1, args.budget // args.angles)
    found = []
    axis = NEIGHBOURS_FOR[kind].axis_parallel
    for a in range(args.angles):
        rot = 0.0 if axis else float(rng.uniform(0.0, math.pi / 2))
        pivot = Square((0.0, 0.0), 1.0, rot)
        pts = hitter_points(kind, pivot)
        bad = falsify_hitter(pivot, pts, NEIGHBOURS_FOR[kind], budget=per, seed=int(rng.integers(2**31)))
        if bad is not None:
            found.append({"pivot_rot": rot, "cx": bad.centre.x, "cy": bad.centre.y, "side": bad.side, "rot": bad.rot})
    _emit(_json({"hitter": kind, "seed": args.seed, "budget": per * args.angles, "angles": args.angles,
                 "counterexamples": found}))
    return EXIT_FAIL if found else EXIT_OK


def cmd_bench(args) -> int:
    kind = resolve_mode(args.mode)
    angle_mode = args.angle_mode or ("axis" if kind in (AXIS_PARALLEL_4, AXIS_PARALLEL_LEFTMOST_2) else
                                     "unit-rotated" if kind in (SIX_POINT_LEFTMOST, TWELVE_POINT_COVER) else "free")
    side_range = (1.0, 1.0) if angle_mode == "unit-rotated" else (args.side_min, args.side_max)
    rng = np.random.default_rng(args.seed)
    seeds = rng.integers(0, 2**31, size=args.n)
    header = ["idx", "n", "nu", "tau", "tau/nu", "hit", "hit/nu", "bound", "chi", "colours", "colour_bound"]
    rows = []
    for i, s in enumerate(seeds):
        fam = constructions.random_family(args.size, side_range, angle_mode, args.window, int(s))
        nu, tau, chi = exact_nu(fam).value, exact_tau(fam).value, exact_chi(fam).value
        run = hit_greedy(fam, kind)
        col = colour_unit_squares(fam) if fam.is_unit() else colour_squares(fam)
        rows.append([i, len(fam), nu, tau, tau / nu, len(run.points), len(run.points) / nu, run.k,
                     chi, col.k_used, col.bound])
    lines = ["\t".join(header)]
    for r in rows:
        lines.append("\t".join(f"{v:.4f}" if isinstance(v, float) else str(v) for v in r))
    worst = max(r[6] for r in rows)
    lines.append(f"# mode={kind} angle_mode={angle_mode} seed={args.seed} worst hit/nu={worst:.4f} bound={rows[0][7]}")
    _emit(("\n".join(lines) + "\n").encode(), args.out)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="squarehit", description="Hitting, packing and colouring of squares.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a named construction or a random family as JSON")
    g.add_argument("--name", choices=sorted(constructions.CONSTRUCTIONS))
    g.add_argument("--m", type=int, default=1, help="replication / length parameter")
    g.add_argument("--n", type=int)
    g.add_argument("--side-min", type=float, default=1.0)
    g.add_argument("--side-max", type=float, default=1.0)
    g.add_argument("--angle-mode", choices=constructions.ANGLE_MODES, default="free")
    g.add_argument("--window", type=float, default=4.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--eps", type=float)
    g.add_argument("--out")
    g.add_argument("--svg")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="exact tau, nu, chi, omega or Delta")
    s.add_argument("--param", choices=sorted(SOLVERS), required=True)
    s.add_argument("--input")
    s.add_argument("--dedup", action="store_true", help="drop exact duplicate squares first")
    s.add_argument("--limit", type=int, default=30)
    s.add_argument("--out")
    s.add_argument("--svg")
    s.add_argument("--timing", action="store_true")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("approx", help="greedy hitting set or degeneracy colouring")
    a.add_argument("--op", choices=("hit", "colour"), required=True)
    a.add_argument("--mode", default="ten-point",
                   help=f"hit: one of {sorted(MODE_ALIASES)}; colour: unit or general")
    a.add_argument("--input")
    a.add_argument("--dedup", action="store_true", help="drop exact duplicate squares first")
    a.add_argument("--out")
    a.add_argument("--svg")
    a.add_argument("--timing", action="store_true")
    a.set_defaults(func=cmd_approx)

    v = sub.add_parser("verify", help="re-check a result document against its instance")
    v.add_argument("--instance", required=True)
    v.add_argument("--result")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("certify", help="certify a neighbour hitter")
    c.add_argument("--hitter", required=True)
    c.set_defaults(func=cmd_certify)

    f = sub.add_parser("falsify", help="random search for a neighbour a hitter misses")
    f.add_argument("--hitter", required=True)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--budget", type=int, default=100000)
    f.add_argument("--angles", type=int, default=10)
    f.set_defaults(func=cmd_falsify)

    b = sub.add_parser("bench", help="exact vs greedy ratios on random families")
    b.add_argument("--n", type=int, default=20)
    b.add_argument("--size", type=int, default=15)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--mode", default="six-point")
    b.add_argument("--angle-mode", choices=constructions.ANGLE_MODES)
    b.add_argument("--side-min", type=float, default=1.0)
    b.add_argument("--side-max", type=float, default=2.0)
    b.add_argument("--window", type=float, default=4.0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.command == "approx" and args.op == "colour" and args.mode not in ("unit", "general"):
        args.mode = "general" if args.mode == "ten-point" else args.mode
        if args.mode not in ("unit", "general"):
            print("squarehit: colour mode must be 'unit' or 'general'", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ModeInapplicable) as exc:
        print(f"squarehit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SquareHitError, OSError) as exc:
        print(f"squarehit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def entry() -> None:
    sys.exit(main())
