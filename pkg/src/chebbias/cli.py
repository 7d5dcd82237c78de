"""Command-line surface.

Subcommands:
  constants     print a named constant (value, certified digits, method)
  scan          drift extremum scan for a semigroup spec
  bounds        exact squarefree remainder verification
  verify        exact race verification; exit 0 iff the inequality holds
  sieve-export  sample grid of (x, M_f, psi_f, mu_f, lambda_f) as CSV/JSON
  report        full certification pipeline for one or all bias pairs

Numbers in JSON reports are decimal strings so digits survive round-trips;
the timestamp field can be suppressed for byte-identical reruns.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import bounds as bounds_mod
from . import constants as constants_mod
from . import races as races_mod
from .multfun import ALL_PRIMES, B1, SemigroupSpec, export_grid, series_for
from .sieve import SieveTables

SCHEMA_VERSION = 1

_SPEC_NAMES = {
    "g_3_1": SemigroupSpec.residue_class(3, 1),
    "g_3_2": SemigroupSpec.residue_class(3, 2),
    "g_4_1": SemigroupSpec.residue_class(4, 1),
    "g_4_3": SemigroupSpec.residue_class(4, 3),
    "b1": B1,
    "all": ALL_PRIMES,
}


def _default_prec() -> int:
    return int(os.environ.get("CHEBBIAS_PRECISION", "50"))


def _spec(name: str) -> SemigroupSpec:
    try:
        return _SPEC_NAMES[name]
    except KeyError:
        raise SystemExit(2, f"unknown spec {name}")


def _emit(report: dict, args) -> None:
    report = {"schema_version": SCHEMA_VERSION, **report}
    if not args.no_timestamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the JSON report to this path")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit the timestamp for byte-identical output")
    p.add_argument("--threads", type=int, default=1,
                   help="worker hint (scans are vectorized; kept for reports)")


def _cmd_constants(args) -> int:
    prec = max(args.digits + 10, _default_prec())
    res = constants_mod.constant_by_name(args.name, prec)
    if args.format == "json" or args.out:
        _emit({"constant": {**res.to_json(), "value": res.value.digits_prefix(args.digits)}}, args)
    else:
        print(res.value.digits_prefix(args.digits))
    return 0


def _cmd_scan(args) -> int:
    tables = SieveTables.build(args.to)
    series = series_for(_spec(args.drift), tables)
    res = bounds_mod.drift_scan(series, args.to, prec=args.digits)
    _emit(
        {
            "quantity": f"sum Lambda_f(n)/n - tau log x for {args.drift}",
            "interval": [1, args.to],
            "sup": res.sup_value.to_str(12),
            "sup_at": res.sup_arg,
            "sup_change_points_only": res.sup_cp_value.to_str(12),
            "sup_change_points_at": res.sup_cp_arg,
            "inf": res.inf_value.to_str(12),
            "inf_at": res.inf_arg,
            "change_points": res.change_points,
            "conditional": res.conditional,
        },
        args,
    )
    return 0


_BOUND_CHECKS = [
    ("Q", "sqrt", None),
    ("Q", "cohen_dress", None),
    ("Q_odd", "half_sqrt_plus_1", None),
    ("Q_odd", "qodd_sharp", None),
    ("Q_chi3", "half_sqrt_plus_1", None),
]


def _cmd_bounds(args) -> int:
    tables = SieveTables.build(args.to)
    results = []
    ok = True
    for variant, bound, x_from in _BOUND_CHECKS:
        v = bounds_mod.squarefree_remainder_scan(tables, variant, bound, args.to, x_from)
        ok &= v.holds
        results.append(v.to_json())
    _emit({"quantity": "squarefree remainder bounds", "checks": results}, args)
    return 0 if ok else 1


def _cmd_verify(args) -> int:
    left, right = args.pair.split(":")
    sl = tuple(int(v) for v in left.split(","))
    sr = tuple(int(v) for v in right.split(","))
    tables = SieveTables.build(max(args.to, 100))
    verdict = races_mod.race(tables, args.metric, sl, sr, args.x_from, args.to)
    _emit({"verify": verdict.to_json()}, args)
    return 0 if verdict.holds else 1


def _cmd_sieve_export(args) -> int:
    tables = SieveTables.build(args.to)
    series = series_for(_spec(args.spec), tables)
    xs = range(args.step, args.to + 1, args.step)
    if args.out:
        export_grid(series, xs, fmt=args.format, out=args.out)
    else:
        rows = export_grid(series, xs, fmt=args.format)
        if args.format == "json":
            sys.stdout.write(json.dumps({"spec": args.spec, "rows": rows}, indent=2) + "\n")
        else:
            sys.stdout.write("x,m_f,psi_f,mu_f,lambda_f\n")
            for r in rows:
                sys.stdout.write(f"{r['x']},{r['m_f']},{r['psi_f']},{r['mu_f']},{r['lambda_f']}\n")
    return 0


def _cmd_report(args) -> int:
    pairs = list(races_mod.PAIR_CONFIGS) if args.pair == "all" else [args.pair]
    x_need = max(
        races_mod.PAIR_CONFIGS[races_mod._normalize_pair(p)]["default_x_max"] for p in pairs
    )
    tables = SieveTables.build(max(args.to or 0, x_need))
    out = []
    ok = True
    for p in pairs:
        rep = races_mod.theorem2_pipeline(tables, p, x_max=args.to, constants_source=args.constants)
        ok &= rep.status == "certified-at-desk-scale"
        out.append(rep.to_json())
    _emit({"pipeline": out}, args)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chebbias", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", help="print a named constant")
    p.add_argument("--name", required=True, choices=constants_mod.CONSTANT_NAMES)
    p.add_argument("--digits", type=int, default=19)
    p.add_argument("--format", choices=["text", "json"], default="text")
    _add_common(p)
    p.set_defaults(fn=_cmd_constants)

    p = sub.add_parser("scan", help="drift extremum scan")
    p.add_argument("--drift", required=True, choices=sorted(_SPEC_NAMES))
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--digits", type=int, default=30)
    _add_common(p)
    p.set_defaults(fn=_cmd_scan)

    p = sub.add_parser("bounds", help="exact squarefree remainder bounds")
    p.add_argument("--to", type=int, default=10 ** 6)
    _add_common(p)
    p.set_defaults(fn=_cmd_bounds)

    p = sub.add_parser("verify", help="exact race verification")
    p.add_argument("--pair", required=True, help="e.g. 4,3:4,1")
    p.add_argument("--metric", default="N", choices=["pi", "theta_pp", "psi", "N", "lambda", "mu"])
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--x-from", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("sieve-export", help="grid export of summatory functions")
    p.add_argument("--spec", default="g_4_3", choices=sorted(_SPEC_NAMES))
    p.add_argument("--to", type=int, required=True)
    p.add_argument("--step", type=int, default=1000)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    _add_common(p)
    p.set_defaults(fn=_cmd_sieve_export)

    p = sub.add_parser("report", help="full bias certification pipeline")
    p.add_argument("--pair", default="all", help="e.g. 4,3:4,1 or 'all'")
    p.add_argument("--to", type=int, default=None)
    p.add_argument("--constants", choices=["theorem6", "scan"], default="theorem6")
    _add_common(p)
    p.set_defaults(fn=_cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors already
        return int(e.code or 0)
    try:
        return args.fn(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
