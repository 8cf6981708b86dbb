"""Command-line front end.

Exit codes: 0 pass, 1 fail, 2 usage or parse error, 3 budget exceeded.
Inputs are record files (see ``shellkit.formats``); ``-`` reads stdin.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from . import fixtures as fx_mod
from .errors import (
    BudgetExceeded,
    CheckerPreconditionFailed,
    NotGRAO,
    NotRAO,
    NotSelfConsistentTopologicalCL,
    ParseError,
    ShellkitError,
    TimeBudgetExceeded,
)
from .formats import Bundle, format_labeling, format_ordering, format_poset, parse_text
from .labelings import (
    CheckReport,
    check_CC,
    check_CL,
    check_EC,
    check_EL,
    check_self_consistency,
    check_topological_CL,
    check_UE,
    lex_chain_order,
)
from .orderings import (
    check_GRAO,
    check_GRAO_extended,
    check_RAO,
    grao_to_cc,
    labeling_to_grao,
    rao_to_cc,
    rao_to_cl,
    reorder,
    search_GRAO,
    search_RAO,
)
from .shelling import chain_indices, is_shelling, mobius_via_descents, order_complex_facets
from .uncrossing import build_uncrossing, to_dot, verify_uncrossing_pipeline

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
JSON_SCHEMA = 1

LABELING_CHECKS = {
    "el": check_EL,
    "cl": check_CL,
    "ec": check_EC,
    "cc": check_CC,
    "tcl": check_topological_CL,
    "ue": check_UE,
    "sc": check_self_consistency,
}
ORDERING_CHECKS = {"grao": check_GRAO, "rao": check_RAO}
CHECK_KINDS = tuple(LABELING_CHECKS) + tuple(ORDERING_CHECKS) + ("shelling",)


class UsageError(ShellkitError):
    pass


def _load(paths: list[str]) -> Bundle:
    b = Bundle()
    for p in paths:
        if p == "-":
            parse_text(sys.stdin.read(), "<stdin>", b)
            continue
        try:
            text = Path(p).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read: {exc.strerror}", p) from None
        parse_text(text, p, b)
    return b


def _write(args, text: str) -> None:
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_report(args, report: CheckReport, timings: dict) -> int:
    if args.json:
        doc = {
            "schema": JSON_SCHEMA,
            "check": report.check,
            "verdict": report.verdict,
            "witnesses": [w.to_dict() for w in report.witnesses],
            "timings": timings,
        }
        if report.info:
            doc["info"] = report.info
        print(json.dumps(doc, indent=2, default=str))
    else:
        for line in report.lines():
            print(line)
    return EXIT_PASS if report.passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    b = _load(args.files)
    P = b.poset()
    t_parse = time.perf_counter() - t0
    t1 = time.perf_counter()
    kind = args.kind
    if kind in LABELING_CHECKS:
        L = b.labeling(P)
        if kind in ("el", "ec") and not L.is_edge:
            raise UsageError(f"check {kind} needs label records (an edge labeling)")
        report = LABELING_CHECKS[kind](L, max_witnesses=args.max_witnesses, jobs=args.jobs)
    elif kind in ORDERING_CHECKS:
        if not b.has_ordering():
            raise UsageError(f"check {kind} needs atoms records or 'default element-order'")
        C = b.ordering(P)
        if kind == "grao" and args.extended:
            report = check_GRAO_extended(C, max_witnesses=args.max_witnesses)
        else:
            report = ORDERING_CHECKS[kind](C, max_witnesses=args.max_witnesses, jobs=args.jobs)
    else:
        report = _check_shelling(b, P, args)
    timings = {"parse_s": round(t_parse, 6), "check_s": round(time.perf_counter() - t1, 6)}
    return _emit_report(args, report, timings)


def _check_shelling(b: Bundle, P, args) -> CheckReport:
    """Facet records if present, else the lex order of the labeling, else ElementOrder chains."""
    if b.facets:
        F, order = b.facet_list()
        return is_shelling(F, order, max_witnesses=args.max_witnesses)
    F = order_complex_facets(P, "full")
    if b.has_labeling():
        order = chain_indices(P, lex_chain_order(b.labeling(P)))
    else:
        order = None
    return is_shelling(F, order, max_witnesses=args.max_witnesses)


def cmd_reorder(args) -> int:
    b = _load(args.files)
    P = b.poset()
    if not b.has_ordering():
        raise UsageError("reorder needs atoms records or 'default element-order'")
    R = reorder(b.ordering(P))
    _write(args, format_poset(P) + format_ordering(R, full=args.full))
    return EXIT_PASS


CONVERSIONS = ("grao-cc", "rao-cc", "rao-cl", "tcl-grao")


def cmd_convert(args) -> int:
    b = _load(args.files)
    P = b.poset()
    if args.conversion == "tcl-grao":
        C = labeling_to_grao(b.labeling(P))
        _write(args, format_poset(P) + format_ordering(C, full=args.full))
        return EXIT_PASS
    if not b.has_ordering():
        raise UsageError(f"convert {args.conversion} needs an ordering")
    C = b.ordering(P)
    fn = {"grao-cc": grao_to_cc, "rao-cc": rao_to_cc, "rao-cl": rao_to_cl}[args.conversion]
    _write(args, format_poset(P) + format_labeling(fn(C)))
    return EXIT_PASS


def cmd_search(args) -> int:
    b = _load(args.files)
    P = b.poset()
    rng = random.Random(args.seed) if args.seed is not None else None
    fn = search_RAO if args.kind == "rao" else search_GRAO
    try:
        C = fn(P, time_budget=args.time_budget, rng=rng)
    except ShellkitError as exc:
        if isinstance(exc, TimeBudgetExceeded):
            raise
        print(f"no {args.kind.upper()} found: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _write(args, format_poset(P) + format_ordering(C, full=args.full))
    return EXIT_PASS


def cmd_mobius(args) -> int:
    b = _load(args.files)
    P = b.poset()
    u = args.u if args.u is not None else P.bottom
    v = args.v if args.v is not None else P.top
    for x in (u, v):
        if x not in P:
            raise UsageError(f"unknown element {x!r}")
    oracle = P.mobius(u, v)
    out = {"u": u, "v": v, "mobius": oracle}
    status = EXIT_PASS
    if args.via_descents:
        val = mobius_via_descents(b.labeling(P), u, v, topological=args.topological)
        out["via_descents"] = val
        if val != oracle:
            status = EXIT_FAIL
    if args.json:
        print(json.dumps({"schema": JSON_SCHEMA, **out}))
    else:
        print(f"mu({u},{v}) = {oracle}")
        if "via_descents" in out:
            print(f"descending-chain count = {out['via_descents']}" + ("" if status == EXIT_PASS else " (mismatch)"))
    return status


def cmd_uncrossing(args) -> int:
    if args.pipeline:
        rep = verify_uncrossing_pipeline(args.n, jobs=args.jobs, allow_large=args.allow_large)
        if args.json:
            print(json.dumps({
                "schema": JSON_SCHEMA,
                "n": args.n,
                "verdict": "pass" if rep.passed else "fail",
                "stages": [{"name": s.name, "verdict": s.report.verdict,
                            "witnesses": [w.to_dict() for w in s.report.witnesses]} for s in rep.stages],
                "timings": {s.name: round(s.seconds, 6) for s in rep.stages},
            }, indent=2, default=str))
        else:
            print("\n".join(rep.lines()))
        return EXIT_PASS if rep.passed else EXIT_FAIL
    P, E = build_uncrossing(args.n, allow_large=args.allow_large)
    if args.dot:
        _write(args, to_dot(P, E, name=f"P{args.n}"))
    else:
        # dual poset with its labeling, ready for `check`
        _write(args, format_poset(E.poset) + format_labeling(E))
    return EXIT_PASS


def cmd_fixtures(args) -> int:
    if args.list or not args.name:
        for fx in fx_mod.all_fixtures():
            exp = " ".join(f"{k}={'pass' if v else 'fail'}" for k, v in fx.expected.items())
            print(f"{fx.name}\t{exp}")
        return EXIT_PASS
    try:
        fx = fx_mod.get_fixture(args.name)
    except KeyError:
        raise UsageError(f"unknown fixture {args.name!r}; try --list") from None
    if args.emit:
        for path in fx_mod.emit(fx, args.out_dir):
            print(path)
    else:
        for fname, text in fx.files().items():
            sys.stdout.write(f"# {fname}\n{text}")
    return EXIT_PASS


def cmd_dual(args) -> int:
    b = _load(args.files)
    _write(args, format_poset(b.poset().dual()))
    return EXIT_PASS


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="structured report")
    common.add_argument("--jobs", type=int, default=1, help="threads for rooted-interval scans")
    common.add_argument("--max-witnesses", type=int, default=10)
    common.add_argument("-o", "--output", help="write to this file instead of stdout")

    p = argparse.ArgumentParser(prog="shellkit", description="Lexicographic shellability checks for finite bounded posets.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="run a checker")
    c.add_argument("kind", choices=CHECK_KINDS)
    c.add_argument("files", nargs="+")
    c.add_argument("--extended", action="store_true", help="grao: quantify (i)(b) over all w above the atom")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("reorder", parents=[common], help="atom reordering process")
    r.add_argument("files", nargs="+")
    r.add_argument("--full", action="store_true", help="list every root, not only non-default ones")
    r.set_defaults(func=cmd_reorder)

    v = sub.add_parser("convert", parents=[common], help="ordering/labeling conversions")
    v.add_argument("conversion", choices=CONVERSIONS)
    v.add_argument("files", nargs="+")
    v.add_argument("--full", action="store_true")
    v.set_defaults(func=cmd_convert)

    s = sub.add_parser("search", parents=[common], help="backtracking search for an RAO or GRAO")
    s.add_argument("kind", choices=("rao", "grao"))
    s.add_argument("files", nargs="+")
    s.add_argument("--seed", type=int)
    s.add_argument("--time-budget", type=float, default=30.0)
    s.add_argument("--full", action="store_true")
    s.set_defaults(func=cmd_search)

    m = sub.add_parser("mobius", parents=[common], help="Mobius function, optionally via descending chains")
    m.add_argument("files", nargs="+")
    m.add_argument("--u")
    m.add_argument("--v")
    m.add_argument("--via-descents", action="store_true")
    m.add_argument("--topological", action="store_true")
    m.set_defaults(func=cmd_mobius)

    u = sub.add_parser("uncrossing", parents=[common], help="uncrossing poset of perfect matchings")
    u.add_argument("--n", type=int, required=True)
    u.add_argument("--pipeline", action="store_true")
    u.add_argument("--dot", action="store_true")
    u.add_argument("--allow-large", action="store_true", help="permit n=5")
    u.set_defaults(func=cmd_uncrossing)

    f = sub.add_parser("fixtures", parents=[common], help="list or emit named fixtures")
    f.add_argument("--name")
    f.add_argument("--emit", action="store_true")
    f.add_argument("--out-dir", default="fixtures")
    f.add_argument("--list", action="store_true")
    f.set_defaults(func=cmd_fixtures)

    d = sub.add_parser("dual", parents=[common], help="write the dual poset")
    d.add_argument("files", nargs="+")
    d.set_defaults(func=cmd_dual)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except (BudgetExceeded, TimeBudgetExceeded) as exc:
        print(f"shellkit: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ParseError as exc:
        print(f"shellkit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except UsageError as exc:
        print(f"shellkit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ShellkitError as exc:
        # structural problems with the input or failed conversion preconditions
        print(f"shellkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL if _is_verdict_error(exc) else EXIT_INPUT


def _is_verdict_error(exc: ShellkitError) -> bool:
    return isinstance(exc, (NotGRAO, NotRAO, NotSelfConsistentTopologicalCL, CheckerPreconditionFailed))


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
