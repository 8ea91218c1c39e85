"""Command line interface: ``flowlat <subcommand> ...``.

Results are printed as one JSON object (or the vertices text format) on
stdout or to ``--out``.  Exit status: 0 success, 2 bad input, 3 refused by a
resource guard.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .counting import count as run_count
from .errors import GuardError
from .flows import format_vertices, vertex_matrix
from .groups import build_embedding, parse_group
from .invariants import (
    find_subdivision,
    intersection_dimension,
    jc_quadric_cover,
    parse_binomial,
    two_prolongation_cover,
    verify_binomial,
)
from .normality import DEFAULT_MAX_DEG, DEFAULT_MAX_N, normality_check, transfer_witness, very_ample_check
from .trees import parse_builtin, parse_tree, to_newick

EXIT_OK, EXIT_INPUT, EXIT_GUARD = 0, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def load_tree(source: str):
    """``builtin:name[:param]``, a path to a Newick file, or an inline Newick string."""
    if source.startswith("builtin:"):
        return parse_builtin(source)
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return parse_tree(fh.read())
    if source.strip().endswith(";"):
        return parse_tree(source)
    raise InputError(f"no such tree file or builtin: {source}")


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _positive(text: str) -> int:
    v = _nonneg(text)
    if v == 0:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flowlat", description="Polytopes of group-based phylogenetic models.")
    p.add_argument("--version", action="version", version=f"flowlat {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, tree=True, group=True):
        if tree:
            sp.add_argument("--tree", required=True, help="builtin:NAME[:k], Newick file, or inline Newick")
        if group:
            sp.add_argument("--group", required=True, help="e.g. Z2, Z4xZ2")
        sp.add_argument("--out", help="write output here instead of stdout")

    sp = sub.add_parser("vertices", help="vertex matrix, one column per line")
    common(sp)

    sp = sub.add_parser("count", help="Ehrhart or Hilbert count of a dilation")
    common(sp)
    sp.add_argument("--dilation", type=_nonneg, required=True)
    sp.add_argument("--kind", choices=("ehrhart", "hilbert"), default="ehrhart")
    sp.add_argument("--method", choices=("direct", "fiber"), default="fiber")
    sp.add_argument("--mod", type=_positive, help="report the count modulo this number")
    sp.add_argument("--threads", type=_positive, default=1)

    sp = sub.add_parser("normality", help="bounded normality check")
    common(sp)
    sp.add_argument("--max-n", type=_nonneg, default=DEFAULT_MAX_N)
    sp.add_argument("--threads", type=_positive, default=1)

    sp = sub.add_parser("very-ample", help="bounded very-ampleness check")
    common(sp)
    sp.add_argument("--max-deg", type=_nonneg, default=DEFAULT_MAX_DEG)
    sp.add_argument("--threads", type=_positive, default=1)

    sp = sub.add_parser("transfer", help="carry a tripod non-normality witness along an embedding")
    common(sp)
    sp.add_argument("--target", required=True, help="larger group")
    sp.add_argument("--images", required=True, nargs="+", help="generator images, e.g. 1,0")
    sp.add_argument("--max-n", type=_nonneg, default=DEFAULT_MAX_N)

    sp = sub.add_parser("intersect", help="torus intersection of claw prolongations")
    common(sp, tree=False)
    sp.add_argument("--claw", type=_nonneg, required=True)
    sp.add_argument("--pairs-only", action="store_true", help="look for two prolongations that suffice")

    for name in ("verify-binomial", "subdivide"):
        sp = sub.add_parser(name)
        common(sp, tree=False, group=False)
        sp.add_argument("--file", required=True)

    sp = sub.add_parser("conjecture", help="evidence for the claw conjectures")
    common(sp, tree=False, group=False)
    sp.add_argument("which", choices=("jc-quadrics",))
    sp.add_argument("--claw", type=_nonneg, required=True)
    return p


def _read_binomial(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_binomial(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _tree_name(source: str, tree) -> str:
    if source.startswith("builtin:"):
        return source
    try:
        return to_newick(tree)
    except ValueError:
        return source


def dispatch(args) -> dict | str:
    cmd = args.command
    if cmd in ("vertices", "count", "normality", "very-ample", "transfer"):
        tree = load_tree(args.tree)
        group = parse_group(args.group)
        base = {"tree": _tree_name(args.tree, tree), "group": str(group)}
    if cmd == "vertices":
        return format_vertices(vertex_matrix(tree, group))
    if cmd == "count":
        value = run_count(tree, group, args.dilation, args.kind, args.method, args.threads)
        out = dict(base, n=args.dilation, kind=args.kind, method=args.method)
        if args.mod is not None:
            out["mod"] = args.mod
            value %= args.mod
        out["count"] = str(value)
        return out
    if cmd == "normality":
        if args.max_n < 2:
            raise InputError("--max-n must be at least 2")
        rep = normality_check(tree, group, args.max_n, args.threads)
        out = dict(base, verdict=rep.verdict, bound=rep.bound)
        if rep.witness is not None:
            out["witness"] = {"n": rep.witness.n, "x": list(rep.witness.x)}
        return out
    if cmd == "very-ample":
        if args.max_deg < 1:
            raise InputError("--max-deg must be at least 1")
        rep = very_ample_check(tree, group, args.max_deg, args.threads)
        out = dict(base, verdict=rep.verdict, bound=rep.bound)
        if rep.y is not None:
            out["witness"] = {
                "n": rep.n,
                "x": list(rep.x),
                "vertex": [group.format_element(group.elements[g]) for g in rep.vertex],
                "y": list(rep.y),
            }
        return out
    if cmd == "transfer":
        target = parse_group(args.target)
        emb = build_embedding(group, target, [target.parse_element(t) for t in args.images])
        rep = normality_check(tree, group, args.max_n)
        out = dict(base, target=str(target))
        if rep.witness is None:
            out["verdict"] = f"no witness for {group} up to {args.max_n}"
            return out
        moved = transfer_witness(rep.witness, emb, tree)
        out.update(verdict=moved.verdict, witness={"n": moved.witness.n, "x": list(moved.witness.x)})
        return out
    if cmd == "intersect":
        group = parse_group(args.group)
        if args.pairs_only:
            rep = two_prolongation_cover(args.claw, group)
            if rep is None:
                return {"claw": args.claw, "group": str(group), "pairs_only": True, "hip2_verified": False}
        else:
            rep = intersection_dimension(args.claw, group)
        return {
            "claw": args.claw,
            "group": str(group),
            "pairs_only": bool(args.pairs_only),
            "prolongations": list(rep.prolongations),
            "sockets": rep.sockets,
            "kernel_sum_dim": rep.kernel_sum_dim,
            "intersection_dim": rep.intersection_dim,
            "claw_rank": rep.claw_rank,
            "hip2_verified": rep.matches_claw,
        }
    if cmd == "verify-binomial":
        p = _read_binomial(args.file)
        return {"group": str(p.group), "degree": p.degree, "valid": verify_binomial(p)}
    if cmd == "subdivide":
        p = _read_binomial(args.file)
        if not verify_binomial(p):
            raise InputError("binomial does not verify")
        w = find_subdivision(p)
        out = {"group": str(p.group), "degree": p.degree}
        if w is None:
            out["subdivision"] = None
        else:
            out["subdivision"] = {"S": list(w.S), "split": str(w.spec), "permutation": list(w.permutation)}
        return out
    if cmd == "conjecture":
        rep = jc_quadric_cover(args.claw)
        return {
            "conjecture": args.which,
            "claw": args.claw,
            "binomials": rep.binomials,
            "covered": rep.covered,
            "all_covered": rep.all_covered,
            "three_splits_suffice": rep.three_splits,
        }
    raise InputError(f"unknown command {cmd}")


def run(argv=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = dispatch(args)
    except GuardError as exc:
        print(f"flowlat: refused: {exc}", file=stderr)
        return EXIT_GUARD
    except (InputError, ValueError, KeyError, OSError) as exc:
        msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        print(f"flowlat: error: {msg}", file=stderr)
        return EXIT_INPUT
    if isinstance(result, dict):
        result = {"version": __version__, "invocation": argv, **result}
        text = json.dumps(result, indent=None) + "\n"
    else:
        text = result
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"flowlat: error: cannot write {args.out}: {exc.strerror}", file=stderr)
            return EXIT_INPUT
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
