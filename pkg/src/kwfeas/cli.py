"""``kwfeas`` command line: enumerate, check, show, report.

Exit codes: 0 success, 2 invalid input, 3 a selected system stayed Unknown.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from fractions import Fraction
from pathlib import Path

from .catalog import Catalog, check_orbits, default_path, enumerate_catalog, report, restricted_system
from .feasibility import STRATEGIES, UNKNOWN, SearchConfig
from .kw import Restriction
from .model import MAX_CUBE_BITS, RegressionSpec

EXIT_OK, EXIT_INVALID, EXIT_UNKNOWN = 0, 2, 3

log = logging.getLogger("kwfeas")


class InputError(Exception):
    pass


def parse_budget(text: str) -> float:
    m = re.fullmatch(r"\s*([0-9.]+)\s*([smh]?)\s*", text)
    if not m:
        raise InputError(f"cannot parse budget {text!r}; use e.g. 600s, 10m, 1h")
    return float(m.group(1)) * {"": 1, "s": 1, "m": 60, "h": 3600}[m.group(2)]


def parse_box(text: str) -> tuple:
    try:
        lo, hi = (Fraction(s) for s in text.split(":"))
    except ValueError:
        raise InputError(f"cannot parse box {text!r}; use LO:HI, e.g. 1e-3:1e3") from None
    if lo <= 0 or hi < lo:
        raise InputError("box must satisfy 0 < LO <= HI")
    return lo, hi


def parse_orbits(text: str, catalog: Catalog) -> list:
    if text == "all":
        return [o.id for o in catalog.orbits]
    ids = []
    for part in text.split(","):
        try:
            oid = int(part)
        except ValueError:
            raise InputError(f"bad orbit selector {part!r}") from None
        try:
            catalog.orbit(oid)
        except KeyError as exc:
            raise InputError(str(exc)) from None
        ids.append(oid)
    return ids


def _catalog_path(args) -> Path:
    if args.catalog:
        return Path(args.catalog)
    if getattr(args, "k", None) is None:
        raise InputError("give --catalog PATH or --k/--d to locate the catalog")
    return default_path(args.k, args.d)


def _load(args) -> Catalog:
    path = _catalog_path(args)
    if not path.exists():
        raise InputError(f"no catalog at {path}; run 'kwfeas enumerate' first")
    return Catalog.load(path)


def cmd_enumerate(args) -> int:
    if args.k < 1 or args.k > MAX_CUBE_BITS:
        raise InputError(f"k must be between 1 and {MAX_CUBE_BITS}")
    try:
        RegressionSpec(args.k, args.d)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    cat = enumerate_catalog(args.k, args.d)
    path = _catalog_path(args)
    cat.save(path)
    print(f"supports: {cat.total_supports}")
    print(f"nondegenerate: {cat.nondegenerate_supports}")
    print(f"orbits: {len(cat.orbits)}")
    print(f"catalog: {path}")
    return EXIT_OK


def cmd_check(args) -> int:
    cat = _load(args)
    ids = parse_orbits(args.orbit, cat)
    try:
        restrictions = [Restriction.parse(r) for r in args.restrict]
    except ValueError as exc:
        raise InputError(str(exc)) from None
    box = parse_box(args.box) if args.box else None
    cfg = SearchConfig(
        seed=args.seed,
        time_budget=parse_budget(args.budget),
        degree=args.degree,
        order=args.order,
        box_budget=args.box_budget,
    )
    try:
        results = check_orbits(cat, ids, args.strategy, cfg, restrictions, box, jobs=args.jobs)
    except (IndexError, ValueError) as exc:
        raise InputError(str(exc)) from None
    cat.save(_catalog_path(args))
    unknown = False
    for oid in ids:
        v = results[oid]
        unknown |= v.status == UNKNOWN
        extra = f" [{v.scope}]" if v.scope else ""
        print(f"orbit {oid}: {v.status} via {v.method or '-'}{extra} ({v.wall_time:.2f}s)")
        if args.verbose:
            for line in v.diagnostics:
                print(f"    {line}")
    return EXIT_UNKNOWN if unknown else EXIT_OK


def cmd_show(args) -> int:
    cat = _load(args)
    try:
        rec = cat.orbit(args.orbit)
    except KeyError as exc:
        raise InputError(str(exc)) from None
    try:
        system = restricted_system(rec.system, [Restriction.parse(r) for r in args.restrict])
    except (IndexError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if args.format == "json":
        print(system.to_json())
    else:
        print(f"# orbit {rec.id}: support {rec.representative}, size {rec.size}")
        print(system.to_text())
    return EXIT_OK


def cmd_report(args) -> int:
    path = _catalog_path(args)
    cat = Catalog.load(path) if path.exists() else None
    print(report(cat, args.key))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kwfeas", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def locate(p):
        p.add_argument("--catalog", help="catalog JSON file (default: $KWFEAS_CATALOG_DIR/catalog_k{k}_d{d}.json)")
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--d", type=int, default=1)

    p = sub.add_parser("enumerate", help="enumerate saturated supports and orbits, write catalog")
    locate(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("check", help="decide feasibility of selected orbit systems")
    locate(p)
    p.add_argument("--orbit", default="all", help="orbit id, comma list, or 'all'")
    p.add_argument("--strategy", choices=STRATEGIES, default="auto")
    p.add_argument("--restrict", action="append", default=[], help="e.g. m3=m4 or m2=1/2; repeatable")
    p.add_argument("--box", help="LO:HI applied to every variable, e.g. 1e-3:1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", default="600s")
    p.add_argument("--degree", type=int, default=4, help="certificate multiplier degree bound")
    p.add_argument("--order", type=int, default=2, help="certificate product order bound")
    p.add_argument("--box-budget", type=int, default=200_000)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("show", help="print one orbit system")
    locate(p)
    p.add_argument("--orbit", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--restrict", action="append", default=[])
    p.set_defaults(func=cmd_show)

    p = sub.add_parser("report", help="markdown table of verdicts")
    locate(p)
    p.add_argument("--key", default="default", help="which stored check to report")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "enumerate" and args.k is None:
        print("error: enumerate needs --k", file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.func(args)
    except (InputError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
