"""Command-line front end: ``qverify list | check | sweep``.

Exit status: 0 when every checked case passed or was skipped by its domain
clause, 1 when a case failed or did not converge, 2 for usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
import time

from . import __version__, identities, report
from .checks import FAIL, NO_CONVERGENCE
from .errors import ExactModeUnsupported, QVerifyError, UnknownIdentity

CONFIG_ENV = "QVERIFY_CONFIG"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
_DECIMAL = re.compile(r"[.eE]|inf|nan", re.IGNORECASE)


class UsageError(Exception):
    pass


# -- list ------------------------------------------------------------------------

def cmd_list(args) -> int:
    if args.id:
        try:
            defs = [identities.get(args.id)]
        except UnknownIdentity:
            raise UsageError(f"unknown identity {args.id!r}; run 'qverify list' for the ids")
    else:
        defs = identities.register_all()
    if args.json:
        print(json.dumps([d.describe() for d in defs], indent=2, sort_keys=True,
                         ensure_ascii=False))
        return EXIT_OK
    for d in defs:
        flag = "exact" if d.exact_capable else "float"
        slots = ",".join(s.name for s in d.slots)
        print(f"{d.id:14s} {flag:5s} tol={d.default_tol:<7.0e} ({slots})  \"{d.anchor}\"")
    return EXIT_OK


# -- check -------------------------------------------------------------------------

def _parse_assignments(items) -> dict:
    params = {}
    for item in items or []:
        for part in item.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise UsageError(f"parameter {part!r} must look like name=value")
            name, value = part.split("=", 1)
            params[name.strip()] = value.strip()
    return params


def _check_mode(args, idef, raw: dict) -> str:
    mode = "exact" if args.exact else args.mode
    if mode == "auto":
        rational = all(not _DECIMAL.search(v) for v in raw.values())
        return "exact" if idef.exact_capable and rational else "float"
    return mode


def cmd_check(args) -> int:
    try:
        idef = identities.get(args.identity)
    except UnknownIdentity:
        raise UsageError(f"unknown identity {args.identity!r}; run 'qverify list' for the ids")
    raw = _parse_assignments(args.param)
    mode = _check_mode(args, idef, raw)
    try:
        rep = identities.evaluate_identity(idef.id, raw, mode, args.tol)
    except (identities.ParameterError, ExactModeUnsupported) as exc:
        raise UsageError(str(exc))
    if args.json:
        print(json.dumps(report._clean(rep.to_dict()), indent=2, sort_keys=True))
    else:
        d = rep.to_dict()
        print(f"{idef.id}: {rep.verdict} ({mode})")
        print(f"  lhs = {d['lhs']}")
        print(f"  rhs = {d['rhs']}")
        if rep.rel_residual is not None:
            print(f"  abs_residual = {rep.abs_residual!r}  rel_residual = {rep.rel_residual!r}")
        for v in rep.diagnostics.get("violations", []):
            print(f"  violation: {v}")
        if "error" in rep.diagnostics:
            print(f"  error: {rep.diagnostics['error']}")
        if "precision" in rep.diagnostics:
            print(f"  precision: {rep.diagnostics['precision']}")
    return EXIT_FAIL if rep.verdict in (FAIL, NO_CONVERGENCE) else EXIT_OK


# -- sweep -----------------------------------------------------------------------

def _sweep_config(args) -> report.SweepConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    if path:
        cfg = report.load_config(path)
    else:
        cfg = report.parse_config(report.builtin_config("default"), "<default>")
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.count is not None:
        changes["count"] = args.count
    if args.mode is not None:
        changes["mode"] = args.mode
    if args.ids:
        changes["identities"] = tuple(s.strip() for s in args.ids.split(",") if s.strip())
    if args.tol is not None:
        changes["tol"] = args.tol
    if args.parallel is not None:
        changes["parallel"] = args.parallel
    if args.csv:
        changes["format"] = "csv"
    elif args.json:
        changes["format"] = "json"
    if not changes:
        return cfg
    cfg = dataclasses.replace(cfg, **changes)
    cfg.selected()
    if cfg.parallel < 1:
        raise report.ConfigError("--parallel must be at least 1")
    return cfg


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)
    start = time.perf_counter()
    rep = report.run_sweep(cfg, timing=args.timing)
    elapsed = time.perf_counter() - start
    text = report.to_csv(rep) if cfg.format == "csv" else report.to_json(rep)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        for line in report.summary_lines(rep):
            print(line, file=sys.stderr)
        print(f"wall time {elapsed:.2f}s", file=sys.stderr)
    return report.exit_status(rep)


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qverify", description="Check q-series identities exactly or numerically.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="show the registered identities")
    p.add_argument("--json", action="store_true", help="machine-readable registry dump")
    p.add_argument("--id", help="show one identity")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("check", help="check one parameter assignment")
    p.add_argument("identity")
    p.add_argument("-p", "--param", nargs="+", action="extend", metavar="NAME=VALUE",
                   help="parameter values; rationals such as 1/3 are accepted")
    p.add_argument("--mode", choices=("auto", "exact", "float"), default="auto",
                   help="auto uses exact arithmetic when all values are rational "
                        "and the identity supports it")
    p.add_argument("--exact", action="store_true", help="same as --mode exact")
    p.add_argument("--tol", type=float, help="relative tolerance (float mode)")
    p.add_argument("--json", action="store_true", help="print the check report as JSON")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="run a seeded sweep and write a report",
                       description=f"Config file defaults to ${CONFIG_ENV}, then the "
                                   "built-in default sweep.")
    p.add_argument("config", nargs="?", help="INI sweep configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, help="cases per identity")
    p.add_argument("--mode", choices=("auto", "exact", "float"))
    p.add_argument("--ids", help="comma separated identity ids (default: from config)")
    p.add_argument("--tol", type=float, help="relative tolerance for every identity")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON report (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV report, one row per case")
    p.add_argument("-o", "--output", help="report path (default: stdout)")
    p.add_argument("--parallel", type=int, metavar="N", help="worker processes")
    p.add_argument("--timing", action="store_true",
                   help="include wall time in the report (breaks byte equality)")
    p.add_argument("-q", "--quiet", action="store_true", help="no summary on stderr")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, report.ConfigError) as exc:
        print(f"qverify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QVerifyError as exc:
        print(f"qverify: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
