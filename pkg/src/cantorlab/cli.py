"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 a verification failed, 4 a resource cap
(depth, precision, schedule length) was hit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from typing import Callable

from . import cbsets, covering, opensets, pipeline, schwarz, trigseries
from .creals import Interval, fmt, q
from .errors import (
    BadAmbient,
    ComparisonStuck,
    DepthCapExceeded,
    DomainExceeded,
    MalformedFamily,
    NonConvergence,
    PreconditionError,
    ToleranceNotMet,
)
from .handles import polynomial_handle

OK, INPUT_ERROR, VERIFY_FAILED, RESOURCE_CAP = 0, 2, 3, 4


class VerificationFailed(Exception):
    pass


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _pair(text: str):
    lo, hi = text.split(",")
    return q(lo), q(hi)


def _emit(args, text: str) -> None:
    if not args.out:
        sys.stdout.write(text)
        return
    target = os.path.abspath(args.out)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, target)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _grid(count: int):
    if count < 1 or count % 2 == 0:
        raise PreconditionError("grid count must be odd and positive")
    return [q(-1) + q(2 * k, count - 1) for k in range(count)] if count > 1 else [q(0)]


def _points(args):
    return [q(args.x)] if args.x is not None else _grid(args.grid)


# --- subcommands ---------------------------------------------------------------------


def cmd_eval(args) -> None:
    s = trigseries.TrigSeries.from_json(_load_json(args.series))
    rows = []
    for u in _points(args):
        iv = trigseries.eval_partial(s, u, args.precision)
        rows.append((fmt(u), fmt(iv.lo), fmt(iv.hi)))
    _emit(args, _csv(("x", "lo", "hi"), rows))


def cmd_smooth(args) -> None:
    s = trigseries.TrigSeries.from_json(_load_json(args.series))
    rows = []
    for u in _points(args):
        iv = trigseries.smooth_eval(
            s, u, args.precision, truncate_at=args.truncate, coeff_bound=q(args.bound) if args.bound else None
        )
        rows.append((fmt(u), fmt(iv.lo), fmt(iv.hi)))
    _emit(args, _csv(("x", "lo", "hi"), rows))


def cmd_probe(args) -> None:
    s = trigseries.TrigSeries.from_json(_load_json(args.series))
    probe = trigseries.d2_probe if args.order == 2 else trigseries.d1_probe
    tol = q(args.tol)
    if args.x is not None:
        rep = probe(s, q(args.x), tol, args.steps)
        _emit(args, _csv(("h", "lo", "hi"), rep.rows()))
        _check_probe(s, rep, args)
        return
    rows, failed = [], []
    for u in _grid(args.grid):
        if abs(u) == 1:
            continue
        rep = probe(s, u, tol, args.steps)
        lim = rep.limit
        rows.append((fmt(u), str(rep.converged).lower(), fmt(lim.lo) if lim else "", fmt(lim.hi) if lim else ""))
        try:
            _check_probe(s, rep, args)
        except VerificationFailed as exc:
            failed.append(str(exc))
    _emit(args, _csv(("x", "converged", "lo", "hi"), rows))
    if failed:
        raise VerificationFailed("; ".join(failed[:3]))


def _check_probe(s, rep, args) -> None:
    if not rep.converged:
        raise NonConvergence(f"probe at {fmt(rep.x)} did not settle")
    target = trigseries.eval_partial(s, rep.x, args.precision) if rep.order == 2 else Interval.point(0)
    if not rep.limit.overlaps(target):
        raise VerificationFailed(f"limit at {fmt(rep.x)} misses the expected value")


def cmd_rank(args) -> None:
    if args.tree:
        rep = cbsets.cb_fullness(cbsets.CBTree.from_json(_load_json(args.tree)), args.stage, args.max_rank)
    elif args.set:
        rep = opensets.fullness_rank(opensets.OpenSet.from_json(_load_json(args.set)), args.max_rank)
    else:
        raise PreconditionError("rank needs --set or --tree")
    _emit(args, _json(rep.to_json()))


def _cover_oracle(cfg: dict):
    kind = cfg.get("type")
    if kind in ("uniform-radius", "cbset"):
        r = q(cfg.get("r", "1/16"))
        if r <= 0:
            raise PreconditionError("radius must be positive")
        return lambda x, m: (x - r, x + r)
    raise PreconditionError(f"unknown oracle type {kind!r}")


def cmd_cover(args) -> None:
    cfg = _load_json(args.config)
    oracle_cfg = cfg.get("oracle", {})
    oracle = _cover_oracle(oracle_cfg)
    tree_obj = cfg.get("target", {}).get("tree") or oracle_cfg.get("tree")
    if tree_obj is not None:
        tree = cbsets.CBTree.from_json(tree_obj)
        ambient = (tree.a, tree.b)
        cert = covering.located_subcover(lambda x, m: cbsets.cb_distance(tree, x, m), ambient, oracle, args.depth_cap)
        probes = [cbsets.cb_index(tree, i) for i in range(cfg.get("check", 200) + 1)]
    else:
        ambient = tuple(q(v) for v in cfg.get("ambient", ["0", "1"]))
        if not ambient[0] < ambient[1]:
            raise BadAmbient("ambient must satisfy lo < hi")
        cert = covering.heine_borel_subcover(ambient, oracle, args.depth_cap)
        probes = covering.grid(ambient[0], ambient[1], cfg.get("check", 10_001))
    missed = covering.verify_cover(cert.pieces, probes)
    if missed:
        raise VerificationFailed(f"{len(missed)} check points uncovered, first {fmt(missed[0])}")
    _emit(args, _json(cert.to_json()))


def cmd_avoid(args) -> None:
    pts = [q(p) for p in _load_json(args.enum)]
    lo, hi = _pair(args.interval)
    w = schwarz.diagonal_avoid(pts, interval=(lo, hi))
    for p, step in zip(pts, w.steps):
        if not abs(w.x - p) > step.bound:
            raise VerificationFailed(f"witness too close to point {step.index}")
    _emit(args, _json(w.to_json()))


def _parse_g(text: str, domain: Interval):
    aliases = {"x(1-x)": "poly:0,1,-1"}
    text = aliases.get(text, text)
    if not text.startswith("poly:"):
        raise PreconditionError("G must be 'poly:c0,c1,...' or 'x(1-x)'")
    return polynomial_handle([q(c) for c in text[5:].split(",")], domain)


def cmd_trisect(args) -> None:
    lo, hi = _pair(args.interval)
    G = _parse_g(args.g, Interval(lo, hi))
    cert = schwarz.rho_z_search(G, q(args.x), args.steps, q(args.eps) if args.eps else None, (lo, hi))
    if schwarz.verify_max_certificate(G, cert):
        raise VerificationFailed("margin schedule does not verify")
    rows = [s.row() for s in cert.states]
    _emit(args, _csv(("step", "aN", "bN", "cN", "dN", "deltaN"), rows))


def cmd_cb_index(args) -> None:
    tree = cbsets.CBTree.from_json(_load_json(args.tree))
    rows = [(str(n), fmt(cbsets.cb_index(tree, n))) for n in args.indices]
    _emit(args, _csv(("n", "value"), rows))


def cmd_cb_distance(args) -> None:
    tree = cbsets.CBTree.from_json(_load_json(args.tree))
    iv = cbsets.cb_distance(tree, q(args.x), args.precision)
    _emit(args, _json(iv.to_json(args.precision)))


def cmd_residual(args) -> None:
    pts = [q(p) for p in _load_json(args.points)]
    exps = [int(c) for c in args.c.split(",")] if args.c else []
    res = cbsets.residual_set(pts, exps, _pair(args.ambient))
    obj = res.to_json()
    obj["empty"] = res.is_empty
    _emit(args, _json(obj))


def cmd_demo(args) -> None:
    cfg = _load_json(args.config)
    s = trigseries.TrigSeries.from_json(cfg["series"])
    exc = pipeline.Exceptional.from_json(cfg.get("exceptional", {"type": "finite", "points": []}))
    rep = pipeline.uniqueness_demo(
        s, exc, grid=cfg.get("grid", 33), tol=q(args.tol), stage=args.stage, precision=args.precision
    )
    _emit(args, _json(rep.to_json()))
    if not rep.ok:
        raise VerificationFailed(f"stage {rep.failed_stage} failed")


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=40, help="enclosure width 2**-precision")
    common.add_argument("--tol", default="1/1000000", help="rational tolerance p/q")
    common.add_argument("--depth-cap", type=int, default=24)
    common.add_argument("--stage", type=int, default=2)
    common.add_argument("--out", help="write here (atomically) instead of stdout")

    parser = argparse.ArgumentParser(prog="cantorlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    for name, fn in (("eval", cmd_eval), ("smooth", cmd_smooth)):
        p = add(name, fn, f"enclose {'F' if name == 'eval' else 'G'} on a grid")
        p.add_argument("--series", required=True)
        p.add_argument("--grid", type=int, default=33)
        p.add_argument("--x")
        if name == "smooth":
            p.add_argument("--truncate", type=int)
            p.add_argument("--bound")
    p = add("probe", cmd_probe, "symmetric-derivative probes of G")
    p.add_argument("--series", required=True)
    p.add_argument("--order", type=int, choices=(1, 2), default=2)
    p.add_argument("--x")
    p.add_argument("--grid", type=int, default=33)
    p.add_argument("--steps", type=int)
    p = add("rank", cmd_rank, "fullness rank of an open set or tree complement")
    p.add_argument("--set")
    p.add_argument("--tree")
    p.add_argument("--max-rank", type=int, default=8)
    p = add("cover", cmd_cover, "finite subcover certificate")
    p.add_argument("--config", required=True)
    p = add("avoid", cmd_avoid, "point apart from an enumeration")
    p.add_argument("--enum", required=True)
    p.add_argument("--interval", default="0,1")
    p = add("trisect", cmd_trisect, "rho/z trisection trace")
    p.add_argument("--g", default="x(1-x)")
    p.add_argument("--interval", default="0,1")
    p.add_argument("--x", default="1/2")
    p.add_argument("--eps")
    p.add_argument("--steps", type=int, default=20)
    p = add("cb-index", cmd_cb_index, "enumerate a coded CB set")
    p.add_argument("--tree", required=True)
    p.add_argument("indices", type=int, nargs="+")
    p = add("cb-distance", cmd_cb_distance, "distance to a coded CB set")
    p.add_argument("--tree", required=True)
    p.add_argument("--x", required=True)
    p = add("residual", cmd_residual, "ambient minus closed balls")
    p.add_argument("--points", required=True)
    p.add_argument("--c", default="")
    p.add_argument("--ambient", default="-1,1")
    p = add("demo", cmd_demo, "uniqueness pipeline")
    p.add_argument("--config", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        args.func(args)
    except DepthCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RESOURCE_CAP
    except (ToleranceNotMet, NonConvergence, ComparisonStuck) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RESOURCE_CAP
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return VERIFY_FAILED
    except (PreconditionError, BadAmbient, DomainExceeded, MalformedFamily, OSError, ValueError, KeyError,
            ZeroDivisionError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    return OK


if __name__ == "__main__":
    sys.exit(main())
