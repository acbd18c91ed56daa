"""Command-line interface: compute, verify, scan, classify, plot.

Exit codes: 0 success, 2 input error, 3 computational failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .engines import ENGINES, EngineRun, run_engine
from .errors import ComputationError, InputError, LPolyError
from .field import PolySpec, build_field, is_prime
from .polygon import classify_family, hodge_polygon, lies_above, lower_hull, NewtonPolygon, pattern_degree
from .store import RunRecord, Store, StoreConfig, record_id
from .svg import render
from .valuation import AtLeast, INF, fmt_val, parse_val
from . import __version__

EXIT_OK, EXIT_INPUT, EXIT_COMPUTE = 0, 2, 3


def make_inputs(f: PolySpec, engine: str, K: int | None) -> dict:
    return {
        "p": f.field.p,
        "m": f.field.m,
        "d": f.degree,
        "coefficients": list(f.coeffs),
        "engine": engine,
        "K": K,
    }


def build_record(run: EngineRun, K: int | None) -> RunRecord:
    f = run.poly
    d = f.degree
    vals = run.valuations
    outputs: dict = {"valuations": [fmt_val(v) for v in vals]}
    np_ = lower_hull(list(enumerate(vals, start=1)), d)
    outputs["newton_polygon"] = np_.to_json()
    if d >= 2:
        hp = hodge_polygon(d)
        outputs["hodge_polygon"] = hp.to_json()
        outputs["above_hodge"] = lies_above(np_, hp)
        outputs["equals_hodge"] = np_ == hp
    if run.direct is not None:
        outputs["direct"] = run.direct.to_json()
    if run.dwork is not None:
        outputs["dwork"] = run.dwork.to_json()
    outputs["engines_agree"] = run.agree
    return RunRecord.create(make_inputs(f, run.engine, K), outputs)


def compute_record(f: PolySpec, engine: str, K: int | None) -> RunRecord:
    run = run_engine(f, engine, K)
    if run.agree is False:
        raise ComputationError(
            "engines disagree: direct "
            + str([fmt_val(v) for v in run.direct.valuations()])
            + " vs dwork "
            + str([fmt_val(v) for v in run.dwork.valuations()])
        )
    return build_record(run, K)


def csv_rows(record: RunRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "m", "d", "n", "ord_num", "ord_den", "engine"])
    inp = record.inputs
    for n, text in enumerate(record.outputs["valuations"], start=1):
        v = parse_val(text)
        if v == INF:
            num, den = "inf", ""
        elif isinstance(v, AtLeast):
            num, den = f">={v.bound.numerator}", str(v.bound.denominator)
        else:
            num, den = str(v.numerator), str(v.denominator)
        w.writerow([inp["p"], inp["m"], inp["d"], n, num, den, inp["engine"]])
    return buf.getvalue()


def _emit(record: RunRecord, out: str) -> None:
    if out == "csv":
        sys.stdout.write(csv_rows(record))
    else:
        sys.stdout.write(json.dumps(record.to_json(), sort_keys=True, indent=2) + "\n")


def _store(args) -> Store:
    return Store(StoreConfig.resolve(args.store))


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise InputError(f"malformed integer list {text!r}") from None


def parse_primes(args) -> list[int]:
    if args.primes:
        return parse_int_list(args.primes)
    if args.prime_range:
        try:
            lo, hi = (int(t) for t in args.prime_range.split(":"))
        except ValueError:
            raise InputError("--prime-range expects LO:HI") from None
        return [p for p in range(lo, hi + 1) if is_prime(p)]
    raise InputError("give --primes or --prime-range")


# ---------------------------------------------------------------------------

def cmd_compute(args) -> int:
    field = build_field(args.p, args.m)
    f = PolySpec.from_text(field, args.poly)
    record = compute_record(f, args.engine, args.prec)
    if not args.no_store:
        _store(args).put(record)
    _emit(record, args.out)
    return EXIT_OK


def _scan_task(job):
    pattern, p, engine, K = job
    d = pattern_degree(pattern)
    if not is_prime(p):
        return "skip", p, f"{p}: not prime, skipped"
    if p <= d:
        return "skip", p, f"{p}: requires d < p, skipped"
    if pattern[d - 1] % p == 0:
        return "skip", p, f"{p}: leading coefficient vanishes mod p, skipped"
    try:
        f = PolySpec.from_pattern(pattern, build_field(p))
        return "ok", p, compute_record(f, engine, K).to_json()
    except LPolyError as exc:
        return "error", p, f"{p}: {exc}"


def run_scan(pattern: list[int], primes: list[int], engine: str, K: int | None, jobs: int, store: Store | None):
    """Records for every usable prime (reusing stored ones); returns (records, notices, errors)."""
    records: dict[int, RunRecord] = {}
    notices, errors = [], []
    todo = []
    for p in sorted(set(primes)):
        if store is not None and is_prime(p) and p > pattern_degree(pattern) and pattern[pattern_degree(pattern) - 1] % p:
            f = PolySpec.from_pattern(pattern, build_field(p))
            hit = store.get(record_id(make_inputs(f, engine, K)), f.degree, p)
            if hit is not None:
                records[p] = hit
                continue
        todo.append((pattern, p, engine, K))
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_task, todo))
    else:
        results = [_scan_task(job) for job in todo]
    for kind, p, payload in results:
        if kind == "ok":
            rec = RunRecord.from_json(payload)
            records[p] = rec
            if store is not None:
                store.put(rec)
        elif kind == "skip":
            notices.append(payload)
        else:
            errors.append(payload)
    return dict(sorted(records.items())), notices, errors


def cmd_scan(args) -> int:
    pattern = parse_int_list(args.pattern)
    d = pattern_degree(pattern)
    records, notices, errors = run_scan(pattern, parse_primes(args), args.engine, args.prec, args.jobs, _store(args))
    header = ["p", f"p mod {d}"] + [f"ord M_{n}" for n in range(1, d)] + ["NP=HP"]
    print("\t".join(header))
    for p, rec in records.items():
        row = [str(p), str(p % d)] + rec.outputs["valuations"] + [str(rec.outputs.get("equals_hodge", ""))]
        print("\t".join(row))
    for msg in notices + errors:
        print(f"notice: {msg}", file=sys.stderr)
    print(f"{len(records)} records", file=sys.stderr)
    return EXIT_COMPUTE if errors else EXIT_OK


def cmd_classify(args) -> int:
    pattern = parse_int_list(args.pattern)
    primes = parse_primes(args)
    records, notices, errors = run_scan(pattern, primes, args.engine, args.prec, args.jobs, _store(args))
    if errors:
        for msg in errors:
            print(f"notice: {msg}", file=sys.stderr)
        return EXIT_COMPUTE

    def vals(p: int):
        out = [parse_val(t) for t in records[p].outputs["valuations"]]
        if any(isinstance(v, AtLeast) for v in out):
            from .direct import l_coeffs

            out = l_coeffs(PolySpec.from_pattern(pattern, build_field(p))).valuations()
        return out

    report = classify_family(pattern, sorted(records), D=args.modulus, engine=args.engine, valuations_fn=vals)
    report.notices[:0] = notices
    payload = json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(payload, encoding="utf-8")
    if args.out == "json":
        sys.stdout.write(payload)
    else:
        print(report.table())
    return EXIT_OK


def cmd_plot(args) -> int:
    if args.id:
        rec = _store(args).get(args.id)
        if rec is None:
            raise InputError(f"record not found: {args.id}")
    else:
        if args.p is None or args.poly is None:
            raise InputError("plot needs --id or --p/--poly")
        f = PolySpec.from_text(build_field(args.p, args.m), args.poly)
        rec = compute_record(f, args.engine, args.prec)
    np_ = NewtonPolygon.from_json(rec.outputs["newton_polygon"])
    hp = NewtonPolygon.from_json(rec.outputs["hodge_polygon"]) if "hodge_polygon" in rec.outputs else None
    inp = rec.inputs
    title = f"f = {inp['coefficients']} over F_{inp['p']}^{inp['m']}"
    output = Path(args.output or f"np_{rec.id}.svg")
    output.write_text(render(np_, hp, title), encoding="utf-8")
    print(output)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpoly", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--store", help="store root (overrides $LPOLY_STORE)")
    sub = parser.add_subparsers(dest="command", required=True)

    def single(p: argparse.ArgumentParser, engine: bool = True) -> None:
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--m", type=int, default=1)
        p.add_argument("--poly", required=True, help='coefficients "a1,...,ad", ascending')
        if engine:
            p.add_argument("--engine", choices=ENGINES, default="direct")
        p.add_argument("--prec", type=int, default=None, help="p-adic digits K for the dwork engine")
        p.add_argument("--out", choices=("json", "csv"), default="json")
        p.add_argument("--no-store", action="store_true")

    single(c := sub.add_parser("compute", help="L-function valuations and Newton polygon of one f"))
    c.set_defaults(func=cmd_compute)
    single(v := sub.add_parser("verify", help="compute with both engines and check agreement"), engine=False)
    v.set_defaults(func=cmd_compute, engine="both")

    def family(p: argparse.ArgumentParser) -> None:
        p.add_argument("--pattern", required=True, help="integer coefficients a1,...,ad reduced mod each p")
        p.add_argument("--primes")
        p.add_argument("--prime-range")
        p.add_argument("--engine", choices=ENGINES, default="direct")
        p.add_argument("--prec", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1)

    family(s := sub.add_parser("scan", help="valuations of a pattern across primes"))
    s.set_defaults(func=cmd_scan)
    family(k := sub.add_parser("classify", help="fit (u p - v)/(D (p - 1)) forms per residue class"))
    k.add_argument("--modulus", type=int, default=None)
    k.add_argument("--out", choices=("table", "json"), default="table")
    k.add_argument("--report", help="also write the JSON report here")
    k.set_defaults(func=cmd_classify)

    pl = sub.add_parser("plot", help="SVG of NP(f) over HP(d)")
    pl.add_argument("--id")
    pl.add_argument("--p", type=int)
    pl.add_argument("--m", type=int, default=1)
    pl.add_argument("--poly")
    pl.add_argument("--engine", choices=ENGINES, default="direct")
    pl.add_argument("--prec", type=int, default=None)
    pl.add_argument("--output")
    pl.set_defaults(func=cmd_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ComputationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
