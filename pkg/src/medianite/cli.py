"""``medianite`` command line.

Exit codes: 0 success or pass, 1 axiom violation or counterexample, 2 bad
input, failed precondition or exhausted budget.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import dual, metrics, verify
from .errors import (
    AxiomViolation,
    DegenerateWall,
    DocumentError,
    GridTooFine,
    MedianiteError,
    NotSeparated,
    TooManyWalls,
    WeightMismatch,
)
from .jsonio import _weights, load_pocset
from .refine import approximation_check, deformation_bound_check, refine, subdivision_isometry_check
from .pocset import PocSet
from .reports import NOT_APPLICABLE, Report

CHECKS = ("dagger", "hyperconvex", "helly", "deform", "subdivide", "approx", "separation", "oracle")


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="medianite", description="Poc sets, dual cubings and their metrics.")
    ap.add_argument("--max-walls", type=_positive_int, default=dual.DEFAULT_MAX_WALLS,
                    help="largest wall count enumerated exhaustively (flip search above it)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the poc-set axioms")
    p.add_argument("path")

    p = sub.add_parser("dual", help="export the dual cubing")
    p.add_argument("path")
    p.add_argument("--format", choices=("dot", "json"), default="json")

    p = sub.add_parser("dist", help="distance between two vertices",
                       usage="medianite dist PATH [options] SOURCE TARGET",
                       description="SOURCE and TARGET are sign strings such as +-+ or vertex indices.")
    p.add_argument("path")
    p.add_argument("--metric", choices=("l1", "linf"), default="l1")
    p.add_argument("--witness", action="store_true", help="also print the separator or heaviest chain")

    p = sub.add_parser("matrix", help="full distance matrix")
    p.add_argument("path")
    p.add_argument("--metric", choices=("l1", "linf"), default="l1")
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("check", help="run a verification sweep")
    p.add_argument("which", choices=CHECKS)
    p.add_argument("path")
    p.add_argument("--metric", choices=("l1", "linf"), default="linf")
    p.add_argument("--subdiv-n", type=_positive_int, default=None,
                   help="subdivision parts (subdivide), largest n of the sweep (approx, oracle)")
    p.add_argument("--max-family", type=_positive_int, default=4)
    p.add_argument("--radii-grid", type=_positive_float, default=1.0, help="radius step")
    p.add_argument("--other-weights", default=None,
                   help="deform: JSON mapping wall -> weight, or a path to one")
    return ap


def _vertex(p: PocSet, token: str) -> dual.Ultrafilter:
    verts = dual.enumerate_ultrafilters(p)
    if token.isdigit():
        i = int(token)
        if not 0 <= i < len(verts):
            raise DocumentError(f"vertex index {i} out of range")
        return verts[i]
    if token and set(token) <= set("+-") and len(token) == p.n_walls:
        u = dual.Ultrafilter.from_string(token)
        if not dual.is_coherent(p, u):
            raise DocumentError(f"{token} is not an ultrafilter")
        return u
    raise DocumentError(f"cannot read vertex {token!r}")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=False) + "\n")


def _describe_violation(p_names, exc: AxiomViolation) -> str:
    a, b = exc.witness
    return f"{exc.kind} violated by {p_names(a)} and {p_names(b)}"


def cmd_validate(args) -> int:
    from .jsonio import pocset_from_document
    try:
        with open(args.path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        p = pocset_from_document(doc)
    except AxiomViolation as exc:
        walls = doc.get("walls", []) if isinstance(doc, dict) else []

        def name(e):
            base = walls[e.wall] if e.wall < len(walls) else f"w{e.wall}"
            return base + ("" if e.side > 0 else "*")

        msg = _describe_violation(name, exc)
        _emit({"valid": False, "violation": exc.kind, "witness": [name(e) for e in exc.witness], "message": msg})
        print(f"invalid: {msg}", file=sys.stderr)
        return 1
    except (DocumentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _emit({"valid": True, "walls": p.n_walls, "relations": len(p.cover_relations())})
    return 0


def cmd_dual(args, p: PocSet) -> int:
    g = dual.build_cubing(p)
    if args.format == "dot":
        sys.stdout.write(g.to_dot())
    else:
        _emit(g.to_json())
    return 0


def cmd_dist(args, p: PocSet) -> int:
    u, v = _vertex(p, args.source), _vertex(p, args.target)
    if args.metric == "l1":
        d = metrics.l1_distance_vertices(p, u, v)
        wit = [p.element_name(e) for e in metrics.separator_vertices(p, u, v)]
    else:
        d = metrics.linf_distance_vertices(p, u, v)
        wit = [p.element_name(e) for e in metrics.linf_witness_chain(p, u, v, weighted=True)]
    if args.witness:
        _emit({"distance": d, "witness": wit})
    else:
        print(metrics._fmt(d))
    return 0


def cmd_matrix(args, p: PocSet) -> int:
    D = metrics.distance_matrix(p, args.metric)
    labels = [str(u) for u in dual.enumerate_ultrafilters(p)]
    if args.format == "csv":
        sys.stdout.write(metrics.matrix_to_csv(D, labels))
    else:
        _emit({"vertices": labels, "metric": args.metric, "matrix": D.tolist()})
    return 0


def _read_weights(raw: str, p: PocSet) -> list[float]:
    text = raw
    if not raw.lstrip().startswith(("{", "[")):
        with open(raw) as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed weights: {exc}") from None
    return _weights(obj, p.labels)


def _sweep(top: int) -> list[int]:
    out, n = [], 1
    while n <= top:
        out.append(n)
        n *= 2
    return out


def run_check(args, p: PocSet) -> Report:
    which = args.which
    if which == "dagger":
        return verify.check_dagger(p)
    if which == "hyperconvex":
        m = verify.metric_from_pocset(p, args.metric)
        return verify.hyperconvexity_check(m, args.radii_grid, args.max_family)
    if which == "helly":
        return verify.helly_sweep(p, args.max_family)
    if which == "deform":
        if args.other_weights is None:
            return Report("deform", NOT_APPLICABLE, None, None, {"reason": "--other-weights is required"})
        return deformation_bound_check(p, p.weights, _read_weights(args.other_weights, p))
    if which == "subdivide":
        n = args.subdiv_n or 2
        r = refine(p, {i: [p.weights[i] / n] * n for i in range(p.n_walls)})
        return subdivision_isometry_check(r)
    if which == "approx":
        return approximation_check(p, _sweep(args.subdiv_n or 16))
    if which == "oracle":
        ns = [n for n in _sweep(args.subdiv_n or 16) if n >= 8] or [args.subdiv_n]
        return verify.oracle_sweep(p, ns, weighted=True)
    if which == "separation":
        return verify.ball_separation_sweep(p)
    raise AssertionError(which)


def cmd_check(args, p: PocSet) -> int:
    try:
        rep = run_check(args, p)
    except (GridTooFine, TooManyWalls, DegenerateWall, NotSeparated, WeightMismatch) as exc:
        rep = Report(args.which, NOT_APPLICABLE, None, None, {"reason": str(exc)})
    _emit(_jsonable(rep.to_dict()))
    return rep.exit_code


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def _is_sign(t: str) -> bool:
    return bool(t) and set(t) <= set("+-")


def _parse(argv) -> argparse.Namespace:
    """Parse ``argv``; the two vertices of ``dist`` are picked out by hand.

    A sign string such as ``-+`` or ``--`` looks like an option to argparse,
    so inside ``dist`` every token made of ``+`` and ``-`` is a vertex.  A
    separating ``--`` before them is tolerated.
    """
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if "dist" not in argv:
        return ap.parse_args(argv)
    k = argv.index("dist") + 1
    body = argv[k:]
    signs = [i for i, t in enumerate(body) if _is_sign(t)]
    if len(signs) > 2 and body[signs[0]] == "--":
        del body[signs[0]]
        signs = [i - 1 for i in signs[1:]]
    others = [t for i, t in enumerate(body) if i not in signs]
    args, rest = ap.parse_known_args(argv[:k] + others)
    bad = [t for t in rest if not t.isdigit()]
    if bad:
        ap.error(f"unrecognized arguments: {' '.join(bad)}")
    given = [t for i, t in enumerate(body) if i in signs or (t.isdigit() and t in rest)]
    if len(given) != 2:
        ap.error("dist needs exactly two vertices")
    args.source, args.target = given
    return args


def main(argv=None) -> int:
    args = _parse(argv)
    if args.command == "validate":
        return cmd_validate(args)
    try:
        p = load_pocset(args.path)
    except AxiomViolation as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 1
    except (DocumentError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        dual.vertex_bits(p, max_walls=args.max_walls)
        handler = {"dual": cmd_dual, "dist": cmd_dist, "matrix": cmd_matrix, "check": cmd_check}[args.command]
        return handler(args, p)
    except (MedianiteError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
