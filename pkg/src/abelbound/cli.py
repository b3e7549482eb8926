"""Command-line front end: ``abl <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .bounds import BoundReport, verify_instance
from .groups import AmbientGroup, CapacityError, GroupHandle, gl_order, reduction_check, sp_order
from .modring import DomainError, StructuralError, factorize, is_prime
from .search import SearchConfig, exhaustive_verify
from .submodules import Submodule, canonical_shape, l_primary_parts, stabilizer_pattern

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_VIOLATION, EXIT_CAPACITY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="abl", description="Index vs submodule-size bounds over Z/nZ.")
    parser.add_argument("--seed", type=int, help="reserved; every computation is deterministic")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("order", help="exact order of GL_m or Sp(2m) over Z/nZ")
    p.add_argument("--kind", choices=["gl", "sp"], required=True)
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)

    p = sub.add_parser("verify", help="check the bounds for one (Gamma, W) pair")
    p.add_argument("--group", type=Path, required=True)
    p.add_argument("--module", type=Path, required=True)
    p.add_argument("--j-row", type=_positive, default=2)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    p = sub.add_parser("search", help="exhaustive verification and extremal ratios")
    p.add_argument("--kind", choices=["gl", "sp"], required=True)
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--n", type=_positive, required=True)
    p.add_argument("--top", type=int, default=5)
    p.add_argument("--max-generators", type=_positive)
    p.add_argument("--max-ambient-order", type=_positive, default=10**4)
    p.add_argument("--jobs", type=_positive, default=1)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true")
    fmt.add_argument("--csv", action="store_true")

    p = sub.add_parser("stabilizer", help="divisibility pattern of matrices preserving W")
    p.add_argument("--module", type=Path, required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("decompose", help="l-primary parts of W")
    p.add_argument("--module", type=Path, required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("reduction-check", help="Sp(2m, Z/p^(k+1)) -> Sp(2m, Z/p^k)")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--p", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    return parser


def _load_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _ambient(kind: str, m: int, n: int) -> AmbientGroup:
    factorize(n)
    return AmbientGroup.gl(m, n) if kind == "gl" else AmbientGroup.sp(m, n)


def _render_report(rep: BoundReport) -> str:
    lines = [f"setting      {rep.setting}  m={rep.m}  n={rep.n}",
             f"|Gamma|      {rep.gamma_order}",
             f"index I      {rep.index}",
             f"|W|          {rep.w_order}"]
    if rep.diagnosis:
        lines.append(f"hypothesis   VIOLATED: {rep.diagnosis}")
        return "\n".join(lines)
    if rep.shape is not None:
        lines.append(f"shape        i={rep.i}  j={list(rep.shape.j)}  J={rep.J}")
    lines.append(f"main bound   {float(rep.main_bound):.6f}  -> {'holds' if rep.verdict_main else 'VIOLATED'}")
    if rep.intermediate_bound is not None:
        lines.append(f"index lower  {float(rep.intermediate_bound):.6f}  -> "
                     f"{'holds' if rep.verdict_intermediate else 'VIOLATED'}")
    for part in rep.parts:
        lines.append(f"  part l={part.l}: |W_l|={part.w_order} I={part.index} i={part.i} J={part.J} "
                     f"main={'holds' if part.verdict_main else 'VIOLATED'} "
                     f"index-lower={'holds' if part.verdict_intermediate else 'VIOLATED'}")
    return "\n".join(lines)


def _write_csv(reports, out) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(BoundReport.CSV_COLUMNS)
    for rep in reports:
        writer.writerow(rep.csv_row())


def _cmd_order(args, out) -> int:
    ring = factorize(args.n)
    print(gl_order(args.m, ring) if args.kind == "gl" else sp_order(args.m, ring), file=out)
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    gamma = GroupHandle.from_json(_load_json(args.group))
    w = Submodule.from_json(_load_json(args.module))
    rep = verify_instance(gamma, w, args.j_row)
    if args.json:
        print(_dump(rep.to_json()), file=out)
    elif args.csv:
        _write_csv([rep], out)
    else:
        print(_render_report(rep), file=out)
    if rep.diagnosis:
        return EXIT_HYPOTHESIS
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def _cmd_search(args, out) -> int:
    config = SearchConfig(_ambient(args.kind, args.m, args.n), max_ambient_order=args.max_ambient_order,
                          parallelism=args.jobs, report_top_k=args.top, max_generators=args.max_generators)
    reports, summary = exhaustive_verify(config)
    if args.json:
        print(_dump(summary.to_json()), file=out)
    elif args.csv:
        _write_csv(reports, out)
    else:
        s = summary
        print(f"{s.setting} m={s.m} n={s.n}: {s.subgroups} subgroups, {s.instances} instances "
              f"({s.skipped_nonabelian} non-abelian pairs skipped)", file=out)
        print(f"main-bound violations:  {s.violations}", file=out)
        print(f"index-lower violations: {s.intermediate_violations}", file=out)
        if s.target_exponent is not None:
            print(f"target exponent (existence claim, not asserted): {s.target_exponent}", file=out)
        for k, rec in enumerate(s.top, 1):
            r = rec.report
            print(f"{k:>3}. ratio {rec.ratio:.6f} (>= {rec.ratio_lower})  |W|={r.w_order}  I={r.index}  "
                  f"|Gamma|={r.gamma_order}  W={[list(g) for g in r.module.generators]}", file=out)
    return EXIT_VIOLATION if summary.violations or summary.intermediate_violations else EXIT_OK


def _cmd_stabilizer(args, out) -> int:
    w = Submodule.from_json(_load_json(args.module))
    shape = canonical_shape(w)
    pattern = stabilizer_pattern(shape)
    if args.json:
        print(_dump({"l": shape.l, "e": shape.e, "i": shape.i, "j": list(shape.j),
                     "pattern": [list(r) for r in pattern]}), file=out)
    else:
        print(f"shape i={shape.i} j={list(shape.j)} over Z/{shape.l}^{shape.e}", file=out)
        for row in pattern:
            print(" ".join(f"{x:>3}" for x in row), file=out)
    return EXIT_OK


def _cmd_decompose(args, out) -> int:
    w = Submodule.from_json(_load_json(args.module))
    parts = l_primary_parts(w)
    if args.json:
        print(_dump({"order": w.order, "parts": [{"modulus": r.n, "order": p.order, **p.to_json()}
                                                 for r, p in parts]}), file=out)
    else:
        print(f"|W| = {w.order}", file=out)
        for ring, part in parts:
            shape = canonical_shape(part)
            print(f"Z/{ring.n}: |W_l|={part.order} i={shape.i} j={list(shape.j)} "
                  f"generators={[list(g) for g in part.generators]}", file=out)
    return EXIT_OK


def _cmd_reduction(args, out) -> int:
    if not is_prime(args.p):
        raise DomainError(f"p = {args.p} is not prime")
    surjective, kernel = reduction_check(args.m, args.p, args.k)
    expected = args.p ** (2 * args.m * args.m + args.m)
    print(f"surjective={str(surjective).lower()} kernel={kernel} expected={expected}", file=out)
    return EXIT_OK if surjective and kernel == expected else EXIT_VIOLATION


COMMANDS = {"order": _cmd_order, "verify": _cmd_verify, "search": _cmd_search,
            "stabilizer": _cmd_stabilizer, "decompose": _cmd_decompose, "reduction-check": _cmd_reduction}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except (UsageError, DomainError, StructuralError) as exc:
        print(f"abl: error: {exc}", file=err)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"abl: capacity exceeded: {exc}", file=err)
        return EXIT_CAPACITY


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
