"""Command-line front end.

Subcommands: ``scott-rank`` (back-and-forth rank of structures in a file),
``hjorth`` (level tables, ranks and the rank partition of an action system),
``verify`` (lemma/property suites), ``compare`` (back-and-forth vs table
levels on the relabeling action).

Exit codes: 0 pass, 1 check failure, 2 usage/parse error, 3 budget.
Text output is human-oriented; ``--format records`` is the stable machine
contract (one record per line, fixed key order).  Identical invocations,
seed included, produce byte-identical records output.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import hjorth as hj
from . import scott as sc
from . import verify as vf
from .actions import (ALL_SUBSETS, SINGLETONS_PLUS_G, FiniteLogicAction,
                      SymbolicLogicAction, parse_action_file)
from .common import (Budgets, BudgetError, InvalidBaseRelationError,
                     RankforgeError, UnsupportedOperationError)
from .oracle import LeqOracle
from .structures import (FinStructure, Signature, StructureError,
                         SuppStructure, parse_structures_file)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

_CONFIG_KEYS = ("command", "input", "suite", "seed", "sizes", "count", "logic",
                "symbolic", "n", "k", "support", "max_tuple", "rels", "basis",
                "max_level", "dump", "oracle", "format")


@dataclass(frozen=True)
class RunConfig:
    """One invocation, fully pinned: the seed determines every generated
    instance, and every report embeds these fields as its first record."""

    command: str
    input: str | None = None
    suite: str | None = None
    seed: int | None = None
    sizes: str | None = None
    count: int | None = None
    logic: bool | None = None
    symbolic: bool | None = None
    n: int | None = None
    k: int | None = None
    support: int | None = None
    max_tuple: int | None = None
    rels: str | None = None
    basis: str | None = None
    max_level: int | None = None
    dump: bool | None = None
    oracle: bool | None = None
    format: str = "text"

    def record(self) -> str:
        parts = []
        for key in _CONFIG_KEYS:
            value = getattr(self, key)
            if value is None:
                continue
            if isinstance(value, bool):
                value = int(value)
            parts.append(f"{key}={value}")
        return "CONFIG " + " ".join(parts)


def _parse_sizes(text: str) -> dict[str, int]:
    sizes: dict[str, int] = {}
    if not text:
        return sizes
    for token in text.split(","):
        token = token.strip().replace("≤", "<=")
        key, sep, value = token.partition("<=")
        if not sep or key.strip() not in ("g", "x", "n", "s", "k") \
                or not value.strip().isdigit():
            raise argparse.ArgumentTypeError(f"bad sizes token {token!r}")
        sizes[key.strip()] = int(value)
    return sizes


def _sizes_str(sizes: dict[str, int]) -> str:
    return ",".join(f"{k}<={sizes[k]}" for k in ("g", "x", "n", "s", "k")
                    if k in sizes) or "-"


def _parse_rel(token: str) -> tuple[str, int]:
    name, sep, arity = token.partition(":")
    if not sep or not arity.isdigit() or int(arity) < 1 or not name:
        raise argparse.ArgumentTypeError(f"bad relation spec {token!r}")
    return name, int(arity)


class Output:
    """Buffered report writer; everything is emitted once, at the end."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []

    def record(self, line: str):
        if self.fmt == "records":
            self.lines.append(line)

    def text(self, line: str):
        if self.fmt == "text":
            self.lines.append(line)

    def both(self, line: str):
        self.lines.append(line)

    def flush(self):
        for line in self.lines:
            print(line)


def cmd_scott_rank(args, budgets: Budgets) -> int:
    out = Output(args.format)
    with open(args.file, encoding="utf-8") as handle:
        _, structures = parse_structures_file(handle.read())
    config = RunConfig(command="scott-rank", input=args.file, format=args.format)
    out.record(config.record())
    for ident, struct in structures.items():
        if args.structure and ident != args.structure:
            continue
        if not isinstance(struct, FinStructure):
            print(f"error: {ident} is not a finite structure", file=sys.stderr)
            return EXIT_USAGE
        rank = sc.scott_rank(struct)
        out.record(hj.rank_record(ident, rank.value, rank.stabilized_at))
        out.text(f"{ident}: rank {rank.value} (levels stabilize at "
                 f"{rank.stabilized_at})")
    out.flush()
    return EXIT_PASS


def _build_system(args, budgets: Budgets):
    if args.logic or args.symbolic:
        if not args.structures:
            raise RankforgeError("--structures is required for logic systems")
        with open(args.structures, encoding="utf-8") as handle:
            sig, structures = parse_structures_file(handle.read())
        if not structures:
            raise RankforgeError("structure file holds no structures")
        if args.symbolic:
            support = args.support if args.support is not None else budgets.s
            k = args.k if args.k is not None else budgets.k
            points = list(structures.values())
            if not all(isinstance(m, SuppStructure) for m in points):
                raise RankforgeError("--symbolic needs supported structures")
            return (SymbolicLogicAction(sig, support, k, points, budgets),
                    list(structures))
        n = args.n if args.n is not None else budgets.n
        if n > budgets.n:
            raise BudgetError(f"n={n} exceeds budget n={budgets.n}")
        k = args.k if args.k is not None else min(n, budgets.k)
        points = list(structures.values())
        if not all(isinstance(m, FinStructure) and m.size == n for m in points):
            raise RankforgeError(f"--logic needs finite structures of size {n}")
        sysb = FiniteLogicAction(sig, n, k, points, budgets)
        by_struct = {m: ident for ident, m in structures.items()}
        ids = [by_struct.get(m, sysb.points[i])
               for i, m in enumerate(sysb.structures)]
        return sysb, ids
    if not args.file:
        raise RankforgeError("an action file (or --logic/--symbolic) is required")
    with open(args.file, encoding="utf-8") as handle:
        sysb = parse_action_file(handle.read(), budgets)
    if args.basis:
        sysb = sysb.with_basis(args.basis)
    return sysb, None


def cmd_hjorth(args, budgets: Budgets) -> int:
    out = Output(args.format)
    sysb, ids = _build_system(args, budgets)
    config = RunConfig(command="hjorth", input=args.file or args.structures,
                       logic=args.logic, symbolic=args.symbolic,
                       n=args.n, k=args.k, support=args.support,
                       basis=args.basis or "-",
                       max_level=args.max_level if args.max_level else "-",
                       dump=args.dump, oracle=args.oracle, format=args.format)
    out.record(config.record())
    out.text(sysb.describe())
    try:
        table = hj.leq_table(sysb, max_level=args.max_level)
        sysb._leq_table = table
    except InvalidBaseRelationError as exc:
        x0, v0, x1, v1 = exc.witness
        witness = (f"(x0={sysb.points[x0]},V0={sysb.basis[v0]},"
                   f"x1={sysb.points[x1]},V1={sysb.basis[v1]})")
        out.both(hj.check_record("level_monotonicity", False, witness))
        out.flush()
        return EXIT_FAIL

    if args.dump:
        for level in range(1, table.max_level() + 1):
            arr = table._level_array(level)
            for x0 in range(table.npoints):
                for v0 in range(table.nbasis):
                    for x1 in range(table.npoints):
                        for v1 in range(table.nbasis):
                            out.record(hj.leq_record(
                                level, sysb.points[x0], sysb.basis[v0],
                                sysb.points[x1], sysb.basis[v1],
                                bool(arr[x0, v0, x1, v1])))

    if not table.stabilized:
        out.both(hj.check_record("stabilization", False,
                                 f"truncated@{table.max_level()}"))
        out.flush()
        return EXIT_FAIL

    failures = 0
    if args.oracle:
        oracle = LeqOracle(sysb, depth_cap=table.stab + 2)
        mismatch = None
        for x0 in range(table.npoints):
            for v0 in range(table.nbasis):
                for x1 in range(table.npoints):
                    for v1 in range(table.nbasis):
                        for a in range(1, table.stab + 2):
                            if oracle.query(x0, v0, x1, v1, a) != \
                                    table.leq(x0, v0, x1, v1, a):
                                mismatch = (f"(x0={sysb.points[x0]},"
                                            f"V0={sysb.basis[v0]},"
                                            f"x1={sysb.points[x1]},"
                                            f"V1={sysb.basis[v1]})@level={a}")
                                break
                        if mismatch:
                            break
                    if mismatch:
                        break
                if mismatch:
                    break
            if mismatch:
                break
        out.both(hj.check_record("leq_oracle_equivalence", mismatch is None,
                                 mismatch))
        failures += mismatch is not None

    point_ids = ids or list(sysb.points)
    wanted = range(len(sysb.points))
    if args.point is not None:
        if args.point not in point_ids:
            print(f"error: unknown point {args.point}", file=sys.stderr)
            return EXIT_USAGE
        wanted = [point_ids.index(args.point)]
    for x in wanted:
        rank = hj.hjorth_rank(sysb, x)
        m = hj.minimal_m(sysb, x) if sysb.has_action else "NA"
        out.record(hj.rank_record(point_ids[x], rank.value, rank.stabilized_at, m))
        out.text(f"point {point_ids[x]}: rank {rank.value}, stab "
                 f"{rank.stabilized_at}, m {m}")
    for value, block in hj.partition_by_rank(sysb):
        names = ";".join(point_ids[x] for x in sorted(block))
        out.record(f"PART rank={value} points={names}")
        out.text(f"rank {value}: {names}")
    out.flush()
    return EXIT_FAIL if failures else EXIT_PASS


def cmd_verify(args, budgets: Budgets) -> int:
    out = Output(args.format)
    sizes = dict(args.sizes or {})
    sizes.setdefault("g", min(8, budgets.g))
    sizes.setdefault("x", min(6, budgets.x))
    sizes.setdefault("n", min(3, budgets.n))
    config = RunConfig(command="verify", suite=args.suite, seed=args.seed,
                       sizes=_sizes_str(sizes), count=args.count,
                       format=args.format)
    out.record(config.record())
    out.text(f"suite {args.suite}, seed {args.seed}, sizes {_sizes_str(sizes)}, "
             f"{args.count} systems")
    reports = vf.run_suite(args.suite, args.seed, sizes, count=args.count)
    failed = 0
    for report in reports:
        for check in report.checks:
            out.both(check.record())
            if check.stats and args.format == "text":
                out.text("  " + " ".join(f"{k}={v}" for k, v in
                                         sorted(check.stats.items())))
            failed += not check.passed
    out.text(f"{'PASS' if not failed else 'FAIL'} "
             f"({sum(len(r.checks) for r in reports)} checks, {failed} failed)")
    out.flush()
    return EXIT_FAIL if failed else EXIT_PASS


def cmd_compare(args, budgets: Budgets) -> int:
    out = Output(args.format)
    if args.n > min(3, budgets.n):
        raise BudgetError(f"comparison scan n={args.n} exceeds budget "
                          f"n={min(3, budgets.n)}")
    if args.empty_signature:
        signature = Signature(())
    else:
        signature = Signature(tuple(args.rel or [("edge", 2)]))
    rels = ",".join(f"{name}:{arity}" for name, arity in signature.relations) or "-"
    config = RunConfig(command="compare", n=args.n, max_tuple=args.max_tuple,
                       seed=args.seed, rels=rels, format=args.format)
    out.record(config.record())
    counterexamples, profile, scanned = vf.comparison_scan(
        max_n=args.n, max_tuple=args.max_tuple, seed=args.seed,
        signature=signature)
    witness = None
    if counterexamples:
        n, i, t, j, u, b = counterexamples[0]
        witness = f"n={n}:M{i}{t}~M{j}{u}->b={b}"
    out.both(hj.check_record("scott_implies_hjorth", not counterexamples, witness))
    out.text(f"scanned {scanned} instances, {len(counterexamples)} counterexamples")
    for (s_level, h_level) in sorted(profile):
        out.record(f"PROFILE {s_level} {h_level} count={profile[(s_level, h_level)]}")
        out.text(f"  {s_level:<12} {h_level:<12} {profile[(s_level, h_level)]}")
    out.flush()
    return EXIT_FAIL if counterexamples else EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rankforge",
        description="Level tables, ranks and back-and-forth analysis of "
                    "finite group-action systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scott-rank", help="rank the structures in a file")
    p.add_argument("file")
    p.add_argument("--structure", help="only this structure id")
    p.add_argument("--format", choices=("text", "records"), default="text")

    p = sub.add_parser("hjorth", help="level tables and ranks of an action system")
    p.add_argument("file", nargs="?", help="action file")
    p.add_argument("--logic", action="store_true",
                   help="relabeling action on the structures file")
    p.add_argument("--symbolic", action="store_true",
                   help="windowed full-group action")
    p.add_argument("--structures", help="structure file for logic systems")
    p.add_argument("--n", type=int, help="universe size (logic)")
    p.add_argument("--support", type=int, help="support window (symbolic)")
    p.add_argument("--k", type=int, help="tuple-length cap for coset bases")
    p.add_argument("--point", help="report this point only")
    p.add_argument("--basis", choices=(ALL_SUBSETS, SINGLETONS_PLUS_G),
                   help="override the basis spec")
    p.add_argument("--max-level", type=int, dest="max_level")
    p.add_argument("--dump", action="store_true", help="emit LEQ records")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check every table entry against the naive oracle")
    p.add_argument("--format", choices=("text", "records"), default="text")

    p = sub.add_parser("verify", help="run a lemma/property suite")
    p.add_argument("suite", choices=vf.SUITES + ("all",))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", type=_parse_sizes, default=None,
                   help="caps like g<=8,x<=6,n<=3")
    p.add_argument("--count", type=int, default=200, help="ensemble size")
    p.add_argument("--format", choices=("text", "records"), default="text")

    p = sub.add_parser("compare", help="back-and-forth vs table levels scan")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--max-tuple", type=int, default=2, dest="max_tuple")
    p.add_argument("--rel", type=_parse_rel, action="append",
                   help="relation as name:arity (repeatable; default edge:2)")
    p.add_argument("--empty-signature", action="store_true",
                   help="scan the pure-equality signature")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("text", "records"), default="text")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        budgets = Budgets.from_env()
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {"scott-rank": cmd_scott_rank, "hjorth": cmd_hjorth,
                "verify": cmd_verify, "compare": cmd_compare}
    try:
        return handlers[args.command](args, budgets)
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (StructureError, UnsupportedOperationError, RankforgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
