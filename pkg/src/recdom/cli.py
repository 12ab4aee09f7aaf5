"""Command-line front end: ``recdom solve`` and ``recdom check``."""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .errors import DslError, IsoNotFound, RecdomError
from .fixpoint import bekic_solve
from .poset import Poset, to_dot
from .report import LawReport
from .sessiondsl import (Decl, check_pi_embeddings, check_substitution, check_unfolding, expand,
                         parse, solve, system)
from .terms import flatten, render

BUILTINS = ("conway", "eplaws", "bekic", "parameter", "all")
SUITES = ("substitution", "unfolding", "embedding", "bekic", "all")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="recdom", description="Solve recursive domain equations and check fixed-point laws.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve the declarations in a file")
    s.add_argument("file")
    s.add_argument("--rank", type=int, default=5)
    s.add_argument("--format", choices=("text", "json", "dot"), default="text")
    s.add_argument("--type", dest="type_name")

    c = sub.add_parser("check", help="run law suites")
    c.add_argument("file", nargs="?")
    c.add_argument("--builtin", choices=BUILTINS)
    c.add_argument("--suite", choices=SUITES, default="all")
    c.add_argument("--rank", type=int, default=4)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--format", choices=("text", "json"), default="text")
    return p


def _read(path: str) -> List[Decl]:
    try:
        with open(path, encoding="utf-8") as fh:
            source = fh.read()
    except OSError as exc:
        raise DslError(f"cannot read {path}: {exc.strerror}")
    return parse(source)


def _dot(name: str, compacts, domain) -> str:
    terms = {flatten(c): c for c in compacts}
    pairs = [(a, b) for a in terms for b in terms if domain.leq(terms[a], terms[b])]
    return to_dot(Poset(list(terms), pairs, check=False), name)


def cmd_solve(args, out) -> int:
    if args.rank < 0:
        raise DslError("--rank must be non-negative")
    decls = _read(args.file)
    names = [d.name for d in decls]
    if args.type_name is not None and args.type_name not in names:
        raise DslError(f"no declaration named {args.type_name}")
    sols = solve(decls)
    laws: List[LawReport] = []
    if len(decls) > 1:
        rep = LawReport("pairing identity", "simultaneous vs nested solution")
        try:
            res = bekic_solve(system(decls), (), min(args.rank, 4))
            for k in res.isos:
                rep.record(k, True)
        except IsoNotFound as exc:
            rep.fail(str(exc))
        laws.append(rep)
    chosen = [(n, s) for n, s in zip(names, sols) if args.type_name in (None, n)]
    if args.format == "dot":
        for n, s in chosen:
            out.write(_dot(n, s.elements(args.rank), s))
            out.write("\n")
    elif args.format == "json":
        types = []
        for n, s in chosen:
            elems = s.elements(args.rank)
            ranks = []
            for r in range(args.rank + 1):
                at = [c for c in elems if c.rank == r]
                ranks.append({"rank": r, "count": len(at),
                              "elements": [{"rank": c.rank, "value": render(c.value)} for c in at]})
            types.append({"name": n, "total": len(elems), "ranks": ranks})
        doc = {"types": types, "laws": [_law_json(r) for r in laws]}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for n, s in chosen:
            elems = s.elements(args.rank)
            out.write(f"{n}: {len(elems)} compact elements at rank <= {args.rank}\n")
            for r in range(args.rank + 1):
                at = [render(c.value) for c in elems if c.rank == r]
                out.write(f"  rank {r}: {len(at):4d}  {', '.join(at)}\n")
        for r in laws:
            out.write(r.to_text() + "\n")
    return 2 if any(not r.ok for r in laws) else 0


def _law_json(r: LawReport) -> dict:
    d = {"name": r.name, "instance": r.instance, "verdict": r.verdict}
    if r.counterexample is not None and r.verdict == "FAIL":
        d["counterexample"] = r.counterexample
    if r.skipped is not None:
        d["reason"] = r.skipped
    if r.seed is not None:
        d["seed"] = r.seed
    return d


def _builtin_reports(name: str, seed: int, rank: int) -> List[LawReport]:
    from . import laws
    out: List[LawReport] = []
    if name in ("conway", "all"):
        out += laws.conway_suite(seed, rank)
    if name in ("parameter", "all"):
        out += laws.parameter_suite(seed, rank)
    if name in ("eplaws", "all"):
        out += laws.eplaws_suite(seed)
    if name in ("bekic", "all"):
        out.append(laws.bekic_report((), rank))
    return out


def _file_reports(decls: List[Decl], suite: str, rank: int) -> List[LawReport]:
    names = [d.name for d in decls]
    closed = [expand(decls, n) for n in names]
    out: List[LawReport] = []
    for d, t in zip(decls, closed):
        if suite in ("substitution", "all"):
            out.append(check_substitution([], closed, names, d.body, rank))
        if suite in ("unfolding", "all"):
            out.append(check_unfolding([], t, rank))
        if suite in ("embedding", "all"):
            out.append(check_pi_embeddings([], t, rank))
    if suite in ("bekic", "all") and len(decls) > 1:
        rep = LawReport("pairing identity", "simultaneous vs nested solution")
        try:
            for k in bekic_solve(system(decls), (), rank).isos:
                rep.record(k, True)
        except IsoNotFound as exc:
            rep.fail(str(exc))
        out.append(rep)
    return out


def cmd_check(args, out) -> int:
    if args.rank < 0:
        raise DslError("--rank must be non-negative")
    reports: List[LawReport] = []
    if args.file is not None:
        reports += _file_reports(_read(args.file), args.suite, args.rank)
    if args.builtin is not None or args.file is None:
        reports += _builtin_reports(args.builtin or "all", args.seed, args.rank)
    for r in reports:
        if r.seed is None:
            r.seed = args.seed
    failed = sum(r.verdict == "FAIL" for r in reports)
    if args.format == "json":
        doc = {"seed": args.seed, "rank": args.rank, "laws": [_law_json(r) for r in reports]}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for r in reports:
            out.write(r.to_text() + "\n")
        skipped = sum(r.verdict == "SKIPPED" for r in reports)
        out.write(f"{len(reports) - failed - skipped} passed, {failed} failed, {skipped} skipped\n")
    return 2 if failed else 0


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1, --help exits 0
        return exc.code if isinstance(exc.code, int) else 1
    try:
        if args.command == "solve":
            return cmd_solve(args, out)
        return cmd_check(args, out)
    except DslError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except RecdomError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
