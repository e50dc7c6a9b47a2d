"""Command line front end: enumerate, rewire, verify, series, casebook."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import casebook
from .companion import enumerate_companion
from .necklace import NecklaceSystem, SystemError_, parse_system
from .rewiring import (
    InternalDefectsError,
    NotNonNegativeError,
    UnbalancedError,
    companion_status,
    rewire,
    unrewire,
)
from .series import NonWellFoundedError, solve_catalytic, solve_companion_system
from .trees import (
    ResourceLimitError,
    TreeSyntaxError,
    InvalidTreeError,
    enumerate_nonneg,
    excess,
    format_companion,
    format_qtree,
    parse_companion,
    parse_qtree,
    validate_qtree,
)
from . import verify as verify_mod

EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_CEILING = 3
EXIT_NOT_NONNEG = 4
EXIT_UNBALANCED = 5

SCHEMA = "v1"
SERIES_NAMES = ("F", "f", "Csq", "Cb", "Cd", "Ct", "Co")


class UsageError(Exception):
    pass


def resolve_system(spec: str, max_pearls: int = 4) -> NecklaceSystem:
    if spec in casebook.CASES:
        system = casebook.CASES[spec].system
    elif spec == "all":
        system = casebook.ALL4 if max_pearls == 4 else casebook.q_all(max_pearls)
    elif os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            system = parse_system(fh.read(), name=os.path.splitext(os.path.basename(spec))[0])
    else:
        raise UsageError(f"unknown system {spec!r} (not a case name or a file)")
    if system.regular is not None:
        system = system.bounded(max_pearls)
    return system


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _nonneg(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return n


def _emit(args, data: dict, lines: list[str]) -> None:
    if args.format == "dump":
        doc = {"schema": SCHEMA, "command": args.command}
        doc.update(data)
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write("".join(line + "\n" for line in lines))


def cmd_enumerate(args) -> int:
    system = resolve_system(args.system, args.max_pearls)
    if args.companion:
        trees = enumerate_companion(system, args.size, args.root_kind, args.defects)
        texts = [format_companion(t) for t in trees]
    else:
        trees = enumerate_nonneg(system, args.size, args.excess)
        texts = [format_qtree(t.node) for t in trees]
    _emit(args, {"system": system.name, "size": args.size, "trees": texts, "count": len(texts)},
          texts + [f"count: {len(texts)}"])
    return 0


def _read_tree_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read().strip()
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return fh.read().strip()
    return source.strip()


def cmd_rewire(args) -> int:
    system = resolve_system(args.system, args.max_pearls)
    text = _read_tree_text(args.tree)
    if args.invert:
        tree = parse_companion(text)
        out = unrewire(tree)
        body = format_qtree(out.node)
        summary = f"excess: {excess(out)}"
        data = {"tree": body, "excess": excess(out)}
    else:
        tree = parse_qtree(text, system)
        validate_qtree(tree, system)
        out = rewire(tree)
        st = companion_status(out)
        body = format_companion(out)
        summary = (f"balanced: {'yes' if st.balanced else 'no'}, "
                   f"defects: internal={st.internal} external={st.external}")
        data = {"tree": body, "balanced": st.balanced, "internal": st.internal, "external": st.external}
    _emit(args, data, [body, summary])
    return 0


def cmd_verify(args) -> int:
    system = resolve_system(args.system, args.max_pearls)
    suites = args.suite or list(verify_mod.SUITES) + ["series"]
    results = []
    for name in suites:
        if name == "series":
            results.append(verify_mod.series_check(system, args.order, bivariate_size=args.max_size))
        else:
            results.append(verify_mod.SUITES[name](system, args.max_size))
    ok = all(r.ok for r in results)
    lines = [line for r in results for line in r.lines()]
    lines.append("all checks passed" if ok else "some checks FAILED")
    _emit(args, {"system": system.name, "ok": ok, "suites": [r.to_data() for r in results]}, lines)
    return 0 if ok else EXIT_FAILED


def cmd_series(args) -> int:
    system = resolve_system(args.system, args.max_pearls)
    graded = system.graded
    if args.which == "F":
        s = solve_catalytic(system, args.order, graded=graded)
    else:
        s = solve_companion_system(system, args.order, graded=graded).get(args.which)
    _emit(args, {"system": system.name, "series": args.which, "var": s.var, "coefficients": s.to_data()},
          s.lines())
    return 0


def cmd_casebook(args) -> int:
    if args.list or not args.name:
        lines = [f"{c.name}: {c.description}" for c in casebook.CASES.values()]
        _emit(args, {"cases": list(casebook.CASES)}, lines)
        return 0
    if args.name not in casebook.CASES:
        raise UsageError(f"unknown case {args.name!r}")
    res = casebook.run_case(args.name, args.max_size, args.order)
    _emit(args, res.to_data(), res.lines())
    return 0 if res.ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", default="lambda", help="case name, 'all', or a system file")
    common.add_argument("--format", choices=("table", "dump"), default="table")
    common.add_argument("--max-pearls", type=_positive, default=4,
                        help="bound for regular systems (default 4)")
    common.add_argument("--seedless", action="store_true",
                        help="accepted for compatibility; nothing here is random")

    p = argparse.ArgumentParser(prog="catrewire", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", parents=[common], help="list trees of one size")
    e.add_argument("--size", "--max-size", dest="size", type=_positive, required=True)
    e.add_argument("--excess", type=_nonneg, default=None)
    e.add_argument("--companion", action="store_true", help="list companion trees instead")
    e.add_argument("--root-kind", choices=("s", "b", "d", "t", "u"), default="s")
    e.add_argument("--defects", type=_nonneg, default=0)
    e.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("rewire", parents=[common], help="rewire one tree")
    r.add_argument("tree", nargs="?", default="-", help="tree text, a file, or - for stdin")
    r.add_argument("--invert", action="store_true", help="map a companion tree back")
    r.set_defaults(func=cmd_rewire)

    v = sub.add_parser("verify", parents=[common], help="run the check suites")
    v.add_argument("--max-size", type=_positive, default=8)
    v.add_argument("--order", type=_positive, default=12)
    v.add_argument("--suite", action="append", choices=list(verify_mod.SUITES) + ["series"])
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("series", parents=[common], help="print a generating series")
    s.add_argument("--order", type=_positive, default=8)
    s.add_argument("--which", choices=SERIES_NAMES, default="f")
    s.set_defaults(func=cmd_series)

    c = sub.add_parser("casebook", parents=[common], help="run a named example")
    c.add_argument("name", nargs="?")
    c.add_argument("--list", action="store_true")
    c.add_argument("--max-size", type=_nonneg, default=None)
    c.add_argument("--order", type=_positive, default=None)
    c.set_defaults(func=cmd_casebook)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, SystemError_, TreeSyntaxError, InvalidTreeError, NonWellFoundedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CEILING
    except NotNonNegativeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_NONNEG
    except (UnbalancedError, InternalDefectsError) as exc:
        print(f"error: unbalanced or internal defects: {exc}", file=sys.stderr)
        return EXIT_UNBALANCED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
