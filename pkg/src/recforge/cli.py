"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from recforge import cyclic, families, hunt, modeval
from recforge.poly import format_poly
from recforge.seqcore import BudgetExceeded, TestSpec, named_spec, spec_from_denominator

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_int(text: str) -> int:
    """Integers, also written as ``1e6`` or ``2e6`` (must be exact)."""
    try:
        value = Decimal(text.strip().replace("_", ""))
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value != value.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(value)


def parse_coeffs(text: str) -> list[int]:
    try:
        return [int(c) for c in text.replace(" ", "").split(",") if c != ""]
    except ValueError:
        raise UsageError(f"malformed polynomial {text!r}: expected comma-separated integers") from None


def parse_family(text: str) -> families.FamilySpec:
    fields = {}
    for part in text.split(","):
        key, sep, val = part.partition("=")
        if not sep or key.strip() not in {"c", "b", "a", "d", "i0", "b2", "j0"}:
            raise UsageError(f"malformed family {text!r}: expected key=value among c,b,a,d,i0,b2,j0")
        try:
            fields[key.strip()] = int(val)
        except ValueError:
            raise UsageError(f"malformed family value {part!r}") from None
    if "c" not in fields:
        fields["c"] = 1
    if "b" not in fields:
        raise UsageError("family needs a base b")
    try:
        return families.FamilySpec(**fields)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def resolve_spec(args) -> TestSpec:
    sources = [x for x in (args.q, args.test, args.spec) if x is not None]
    if len(sources) != 1:
        raise UsageError("give exactly one of --q, --test, --spec")
    if args.q is not None:
        return spec_from_denominator(parse_coeffs(args.q), args.label or "")
    if args.test is not None:
        try:
            return named_spec(args.test)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
    data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    return TestSpec.from_json(data)


# --- output ----------------------------------------------------------------


def emit(args, payload, rows: list[dict] | None = None, plain: str | None = None) -> None:
    fmt = args.format
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    elif fmt == "csv":
        rows = rows if rows is not None else [payload]
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ";".join(map(str, v)) if isinstance(v, list) else v for k, v in row.items()})
        sys.stdout.write(buf.getvalue())
    else:
        print(plain if plain is not None else json.dumps(payload, indent=2))


def spec_payload(spec: TestSpec) -> dict:
    out = spec.to_json()
    out["recurrence"] = spec.recurrence_text()
    out["charpoly"] = format_poly(modeval.charpoly_of(spec).coeffs, "y")
    if spec.notes:
        out["notes"] = list(spec.notes)
    return out


# --- subcommands -----------------------------------------------------------


def cmd_derive(args) -> int:
    spec = spec_from_denominator(parse_coeffs(args.q), args.label or "")
    payload = spec_payload(spec)
    emit(args, payload, plain=spec.describe())
    return EXIT_OK


def cmd_eval(args) -> int:
    spec = resolve_spec(args)
    m = args.m if args.m is not None else args.n
    value = modeval.trace_term_mod(spec, args.n, m)
    payload = {"label": spec.label, "n": str(args.n), "m": str(m), "residue": str(value)}
    if m == args.n and args.n >= 2:
        payload["passes"] = value == spec.target % m
    emit(args, payload, plain=f"a({args.n}) mod {m} = {value}")
    return EXIT_OK


def _progress_printer(enabled: bool):
    if not enabled:
        return None

    def show(done, total, bound):
        print(f"[{done}/{total}] chunk ending {bound}", file=sys.stderr)

    return show


def _search(args, spec: TestSpec, bound: int) -> hunt.PseudoprimeReport:
    return hunt.find_pseudoprimes(
        spec,
        (args.lo, bound),
        args.workers,
        chunk=args.chunk,
        progress=_progress_printer(args.progress),
        checkpoint=args.checkpoint,
    )


def _emit_report(args, report: hunt.PseudoprimeReport) -> None:
    payload = report.to_json(stable=args.stable_output)
    plain = f"{report.label}: pseudoprimes in [{report.lo}, {report.hi}]: {list(report.hits)}"
    emit(args, payload, plain=plain)


def cmd_search(args) -> int:
    spec = resolve_spec(args)
    _emit_report(args, _search(args, spec, args.bound))
    return EXIT_OK


def cmd_rank(args) -> int:
    board = hunt.rank_tests(hunt.EnumBox(args.kmax, args.cmax), args.bound, args.top, args.workers)
    rows = [entry.to_json() for entry in board]
    plain = "\n".join(
        f"{i:>3}  {e.label:<24} hits={e.hits:<6} smallest={e.smallest}" for i, e in enumerate(board, 1)
    )
    emit(args, {"bound": str(args.bound), "leaderboard": rows}, rows=rows, plain=plain)
    return EXIT_OK


def cmd_family(args) -> int:
    reports = []
    if args.catalog:
        if args.family:
            raise UsageError("--family cannot be combined with --catalog")
        for spec, fams in families.builtin_catalog():
            if args.test and args.test.lower() not in {spec.label, _catalog_alias(spec.label)}:
                continue
            reports += [families.verify_family(spec, f, args.cap, args.workers) for f in fams]
        if not reports:
            raise UsageError(f"no catalog test named {args.test!r} (T1..T5)")
    else:
        if not args.family:
            raise UsageError("give --family or --catalog")
        spec = resolve_spec(args)
        reports = [families.verify_family(spec, parse_family(f), args.cap, args.workers) for f in args.family]
    rows = [r.to_json() for r in reports]
    plain = "\n".join(
        f"{r.test:<5} {str(r.family):<28} members={len(r.members):<5} all_pass={r.all_pass}"
        + ("  " + "; ".join(r.notes) if r.notes else "")
        + (f"  failing={r.failures()[:5]}" if not r.all_pass else "")
        for r in reports
    )
    emit(args, {"reports": rows}, rows=rows, plain=plain)
    return EXIT_OK if all(r.all_pass for r in reports) else EXIT_FAIL


def _catalog_alias(label: str) -> str:
    return {"pell": "t1"}.get(label, label)


def cmd_cyclic(args) -> int:
    if (args.patterns is None) == (args.avoid is None):
        raise UsageError("give exactly one of --patterns FILE or --s/--avoid")
    if args.patterns is not None:
        ps = cyclic.load_patterns(args.patterns)
    else:
        if args.s is None:
            raise UsageError("--avoid needs --s")
        ps = cyclic.PatternSystem.make(args.s, [w for w in args.avoid.split(",") if w])
    spec = cyclic.spec_from_patterns(ps, args.label or "")
    T = cyclic.build_transfer(ps)
    payload = {"patterns": ps.to_json(), "states": T.dim, "spec": spec_payload(spec)}
    if args.search is None:
        emit(args, payload, plain=spec.describe())
        return EXIT_OK
    report = _search(args, spec, args.search)
    payload["search"] = report.to_json(stable=args.stable_output)
    if args.format == "csv":
        emit(args, report.to_json(stable=args.stable_output))
    else:
        emit(args, payload, plain=spec.describe() + f"\npseudoprimes <= {args.search}: {list(report.hits)}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from recforge.selftest import run_selftest

    results = run_selftest(inject_fault=args.inject_fault)
    rows = [{"check": r.name, "ok": r.ok, "detail": r.detail,
             **({} if args.stable_output else {"seconds": round(r.seconds, 3)})} for r in results]
    plain = "\n".join(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<26} {r.detail}" for r in results)
    emit(args, {"checks": rows, "all_pass": all(r.ok for r in results)}, rows=rows, plain=plain)
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    common.add_argument("--stable-output", action="store_true",
                        help="omit timing fields so reruns compare byte-for-byte")
    common.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    common.add_argument("-v", "--verbose", action="store_true")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--q", help="denominator coefficients, constant term first, e.g. 1,-2,-1")
    source.add_argument("--test", help="named test: perrin, lucas, pell/t1, dbz, t2..t5")
    source.add_argument("--spec", help="JSON spec file")
    source.add_argument("--label")

    scan = argparse.ArgumentParser(add_help=False)
    scan.add_argument("--lo", type=parse_int, default=2)
    scan.add_argument("--chunk", type=parse_int, default=hunt.DEFAULT_CHUNK)
    scan.add_argument("--checkpoint", help="resume file holding the last fully scanned bound")
    scan.add_argument("--progress", action="store_true", help="per-chunk progress on stderr")

    parser = argparse.ArgumentParser(prog="recforge", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", parents=[common], help="build a test from a denominator Q(x)")
    p.add_argument("--q", required=True)
    p.add_argument("--label")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("eval", parents=[common, source], help="a(n) mod m")
    p.add_argument("--n", type=parse_int, required=True)
    p.add_argument("--m", type=parse_int, help="modulus (default n)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("search", parents=[common, source, scan], help="pseudoprimes up to a bound")
    p.add_argument("--bound", type=parse_int, required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("rank", parents=[common], help="rank enumerated tests by pseudoprime scarcity")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--cmax", type=int, required=True)
    p.add_argument("--bound", type=parse_int, required=True)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("family", parents=[common, source], help="verify explicit pseudoprime families")
    p.add_argument("--catalog", action="store_true", help="use the built-in families")
    p.add_argument("--family", action="append", help="c=..,b=..,a=..,d=..,i0=..[,b2=..,j0=..]")
    p.add_argument("--cap", type=parse_int, required=True)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("cyclic", parents=[common, scan], help="test from forbidden circular factors")
    p.add_argument("--s", type=int, help="alphabet size")
    p.add_argument("--avoid", help="comma-separated forbidden words, e.g. 000,11")
    p.add_argument("--patterns", help="pattern file (text grammar or JSON)")
    p.add_argument("--search", type=parse_int, help="also search pseudoprimes up to this bound")
    p.add_argument("--label")
    p.set_defaults(func=cmd_cyclic)

    p = sub.add_parser("selftest", parents=[common], help="run the fast self-checks")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except (UsageError, BudgetExceeded, cyclic.NoTestError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"recforge {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
