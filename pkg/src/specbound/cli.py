"""Command-line front end: ``specbound {bound,table,rate,zeros,certify}``.

Every command prints one JSON record (or CSV rows for the tabular commands).
Exit codes: 0 success, 1 invalid input, 2 no admissible bound / failed
certificate.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from typing import List, Optional

import numpy as np

from . import asymptotics
from .bounds import BoundQuery, NoBound, bound_sweep, spectral_bound
from .certificate import (DEFAULT_GRID, Certificate, OutsideWindowError, build_certificate,
                          verify_certificate)
from .families import FamilyError, FamilySpec
from .tridiag import all_zeros, largest_zero

SCHEMA_VERSION = "1.0"

SPACES = ("hamming", "johnson", "sphere", "projective-real", "projective-complex",
          "projective-quaternion")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def make_family(space: str, n: int, w: Optional[int] = None) -> FamilySpec:
    if space == "hamming":
        return FamilySpec.hamming(n)
    if space == "johnson":
        if w is None:
            raise UsageError("johnson space needs -w")
        return FamilySpec.johnson(n, w)
    if space == "sphere":
        return FamilySpec.sphere(n)
    return FamilySpec.projective(n, space.split("-", 1)[1])


def make_query(family: FamilySpec, d=None, t=None) -> BoundQuery:
    if family.is_discrete:
        if d is None:
            raise UsageError(f"{family.kind} space needs -d")
        return BoundQuery(family, d)
    if t is None:
        raise UsageError(f"{family.kind} space needs -t")
    return BoundQuery(family, t)


def parse_range(spec: str, integer: bool) -> list:
    """'start:stop:step' with an inclusive stop."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"range must look like start:stop:step, got {spec!r}")
    conv = int if integer else float
    try:
        start, stop, step = (conv(p) for p in parts)
    except ValueError:
        raise UsageError(f"bad range {spec!r}") from None
    if step <= 0 or stop < start:
        raise UsageError(f"empty range {spec!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    vals = [start + i * step for i in range(count)]
    return vals if integer else [round(v, 12) for v in vals]


def parse_values(spec: str) -> list:
    """Comma-separated numbers or a start:stop:step range."""
    if ":" in spec:
        return parse_range(spec, integer=False)
    try:
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad number list {spec!r}") from None


def _clean(obj):
    """Make numpy scalars/arrays JSON-ready; non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def dump_json(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(_clean(obj), indent=2)


def record(command: str, inputs: dict, results, started: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "timings_ms": (time.perf_counter() - started) * 1e3,
    }


def _fmt(v, precision: int) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.{precision}g}"
    return str(v)


def dump_csv(rows: List[dict], columns: List[str], precision: int) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(_clean(row.get(c)), precision) for c in columns])
    return buf.getvalue()


BOUND_COLUMNS = ["space", "n", "w", "distance", "status", "k_star", "lambda_k", "bound_log2",
                 "bound_value", "k_min", "k_max"]


def _flat_bound(space: str, res) -> dict:
    d = res.to_dict()
    q = d["query"]
    row = {"space": space, "n": q["family"]["n"], "w": q["family"].get("w"),
           "distance": q["distance"], "status": d["status"]}
    if d["status"] == "bound":
        row.update(k_star=d["k_star"], lambda_k=d["lambda_k"], bound_log2=d["bound_log2"],
                   bound_value=d["bound_value"], k_min=d["k_window"][0], k_max=d["k_window"][1])
    return row


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_bound(args) -> int:
    started = time.perf_counter()
    family = make_family(args.space, args.n, args.w)
    query = make_query(family, args.d, args.t)
    res = spectral_bound(query, k_cap=args.k_cap, tol=args.tol, per_k=args.per_k)
    inputs = {"space": args.space, "n": args.n, "w": args.w, "d": args.d, "t": args.t,
              "k_cap": args.k_cap, "tol": args.tol, "per_k": args.per_k}
    if args.format == "csv":
        sys.stdout.write(dump_csv([_flat_bound(args.space, res)], BOUND_COLUMNS, args.precision))
    else:
        print(dump_json(record("bound", inputs, res.to_dict(), started)))
    return 2 if isinstance(res, NoBound) else 0


def cmd_table(args) -> int:
    started = time.perf_counter()
    ns = parse_range(args.n_range, integer=True) if args.n_range else [args.n]
    if ns == [None]:
        raise UsageError("give -n or --n-range")
    if args.d_range is not None:
        dists = parse_range(args.d_range, integer=True)
    elif args.t_range is not None:
        dists = parse_range(args.t_range, integer=False)
    else:
        raise UsageError("give --d-range or --t-range")
    queries = []
    for n in ns:
        family = make_family(args.space, n, args.w)
        for dist in dists:
            queries.append(make_query(family, d=dist, t=dist))
    rows_out = bound_sweep(queries, k_cap=args.k_cap, tol=args.tol, workers=args.workers)
    rows = []
    for sr in rows_out:
        if sr.error is not None:
            rows.append({"space": args.space, "n": sr.query.family.n, "status": "error",
                         "distance": sr.query.distance, "error": sr.error})
            continue
        row = _flat_bound(args.space, sr.result)
        if args.rate and row.get("bound_log2") is not None:
            row["rate"] = row["bound_log2"] / row["n"]
        rows.append(row)
    inputs = {"space": args.space, "n": args.n, "n_range": args.n_range, "w": args.w,
              "d_range": args.d_range, "t_range": args.t_range, "k_cap": args.k_cap,
              "rate": args.rate}
    if args.format == "csv":
        cols = BOUND_COLUMNS + (["rate"] if args.rate else [])
        sys.stdout.write(dump_csv(rows, cols, args.precision))
    else:
        print(dump_json(record("table", inputs, rows, started)))
    return 0


def cmd_rate(args) -> int:
    started = time.perf_counter()
    fn = asymptotics.CURVES[args.curve]
    if args.curve in ("mrrw1", "mrrw2"):
        if args.delta is None:
            raise UsageError(f"curve {args.curve} needs --delta")
        grid = parse_values(args.delta)
        if args.curve == "mrrw2" and args.omega is None:
            raise UsageError("curve mrrw2 needs --omega")
    else:
        if args.t is None:
            raise UsageError(f"curve {args.curve} needs --t")
        grid = parse_values(args.t)
    if not grid:
        raise UsageError("empty argument grid")
    rows = []
    for x in grid:
        try:
            pt = fn(args.omega, x) if args.curve == "mrrw2" else fn(x)
            rows.append(pt.to_dict())
        except (ValueError, ArithmeticError) as exc:
            rows.append({"argument": x, "error": str(exc)})
    inputs = {"curve": args.curve, "delta": args.delta, "omega": args.omega, "t": args.t,
              "log_base": 2}
    if args.format == "csv":
        flat = []
        for r in rows:
            arg = r["argument"]
            flat.append({"argument": arg[-1] if isinstance(arg, list) else arg,
                         "omega": args.omega, "auxiliary": r.get("auxiliary"),
                         "rate": r.get("rate"), "error": r.get("error")})
        sys.stdout.write(dump_csv(flat, ["argument", "omega", "auxiliary", "rate", "error"],
                                  args.precision))
    else:
        print(dump_json(record("rate", inputs, rows, started)))
    return 0 if any("error" not in r for r in rows) else 1


def cmd_zeros(args) -> int:
    started = time.perf_counter()
    family = make_family(args.space, args.n, args.w)
    if args.k < 0:
        raise UsageError("-k must be nonnegative")
    results = {"degree": args.k + 1, "largest_zero": largest_zero(family, args.k + 1)}
    if args.all:
        results["zeros"] = all_zeros(family, args.k + 1)
    inputs = {"space": args.space, "n": args.n, "w": args.w, "k": args.k, "all": args.all}
    print(dump_json(record("zeros", inputs, results, started)))
    return 0


def cmd_certify(args) -> int:
    started = time.perf_counter()
    if args.from_json:
        with open(args.from_json) as fh:
            data = json.load(fh)
        payload = data.get("results", data)
        cert = Certificate.from_dict(payload)
        inputs = {"from_json": args.from_json}
    else:
        family = make_family(args.space, args.n, args.w)
        query = make_query(family, args.d, args.t)
        k = args.k
        if k is None:
            res = spectral_bound(query, k_cap=args.k_cap, tol=args.tol)
            if isinstance(res, NoBound):
                print(dump_json(record("certify", {}, res.to_dict(), started)))
                return 2
            k = res.k_star
        cert = build_certificate(query, k, strict=False)
        inputs = {"space": args.space, "n": args.n, "w": args.w, "d": args.d, "t": args.t,
                  "k": args.k, "grid": args.grid}
    cert = verify_certificate(cert, args.grid)
    print(dump_json(record("certify", inputs, cert.to_dict(), started)))
    failed = [name for name, c in cert.checks.items() if not c["passed"]]
    if failed:
        print(f"certificate failed checks: {', '.join(failed)}", file=sys.stderr)
        return 2
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _space_args(p, distance=True):
    p.add_argument("--space", required=True, choices=SPACES)
    p.add_argument("-n", type=int, required=True, help="length / dimension")
    p.add_argument("-w", type=int, help="weight (johnson only, w <= n/2)")
    if distance:
        p.add_argument("-d", type=int, help="minimum distance (johnson: half the distance)")
        p.add_argument("-t", type=float, help="inner-product ceiling (sphere, projective)")


def _output_args(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--precision", type=int, default=6, help="significant digits in CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specbound", description="Spectral LP bounds on codes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", help="best spectral bound for one query")
    _space_args(p)
    p.add_argument("--k-cap", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--per-k", action="store_true", help="include the per-k table")
    _output_args(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("table", help="bounds over a range of distances")
    p.add_argument("--space", required=True, choices=SPACES)
    p.add_argument("-n", type=int)
    p.add_argument("--n-range")
    p.add_argument("-w", type=int)
    p.add_argument("--d-range", help="start:stop:step, inclusive")
    p.add_argument("--t-range", help="start:stop:step, inclusive")
    p.add_argument("--k-cap", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--rate", action="store_true", help="add a bound_log2/n column")
    p.add_argument("--workers", type=int, default=1)
    _output_args(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("rate", help="asymptotic rate curves")
    p.add_argument("--curve", required=True, choices=sorted(asymptotics.CURVES))
    p.add_argument("--delta", help="values: a,b,c or start:stop:step")
    p.add_argument("--omega", type=float)
    p.add_argument("--t", help="values: a,b,c or start:stop:step")
    _output_args(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("zeros", help="largest zero of p_{k+1}")
    _space_args(p, distance=False)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--all", action="store_true", help="print every zero")
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("certify", help="emit and verify the LP certificate")
    p.add_argument("--from-json", help="re-verify a certificate record")
    p.add_argument("--space", choices=SPACES)
    p.add_argument("-n", type=int)
    p.add_argument("-w", type=int)
    p.add_argument("-d", type=int)
    p.add_argument("-t", type=float)
    p.add_argument("-k", type=int)
    p.add_argument("--k-cap", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "certify" and not args.from_json and (args.space is None or args.n is None):
        parser.error("certify needs --space and -n (or --from-json)")
    try:
        return args.func(args)
    except OutsideWindowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, FamilyError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
