"""Seeded sweeps over the registry and their bit-stable reports.

A sweep is described by an INI file::

    [sweep]
    identities = all            ; or a comma separated list of ids
    mode = auto                 ; auto, exact or float
    seed = 1
    count = 10
    strategy = random           ; random or grid
    parallel = 1
    format = json               ; json or csv

    [identity CHU]              ; optional per-identity overrides
    mode = exact
    count = 500
    n = 0..30                   ; integer slot range

Report bytes depend only on the configuration and the package version.
Wall time is left out unless asked for, since it would break that.
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources

from . import __version__
from .checks import FAIL, NO_CONVERGENCE, PASS, SKIPPED, CheckReport
from .config import DEFAULT_POLICY
from .errors import QVerifyError
from . import identities

SCHEMA_VERSION = "qverify.sweep/1"
MODES = ("auto", "exact", "float")
FORMATS = ("json", "csv")
POLICY_KEYS = ("rel_tol", "n_max", "delta")


class ConfigError(QVerifyError, ValueError):
    """The sweep configuration cannot be used."""


@dataclass(frozen=True)
class IdentityOverride:
    mode: str | None = None
    count: int | None = None
    tol: float | None = None
    strategy: str | None = None
    int_ranges: tuple = ()


@dataclass(frozen=True)
class SweepConfig:
    identities: tuple = ("all",)
    mode: str = "auto"
    seed: int = 1
    count: int = 10
    strategy: str = "random"
    tol: float | None = None
    parallel: int = 1
    format: str = "json"
    policy: tuple = ()                  # sorted (key, value) truncation overrides
    overrides: tuple = ()               # sorted (id, IdentityOverride)

    def selected(self) -> list[str]:
        known = identities.ids()
        if "all" in self.identities:
            return known
        bad = [i for i in self.identities if i not in known]
        if bad:
            raise ConfigError(f"unknown identity id(s): {', '.join(bad)}")
        return [i for i in known if i in self.identities]

    def override(self, identity_id: str) -> IdentityOverride:
        return dict(self.overrides).get(identity_id, IdentityOverride())

    def to_dict(self) -> dict:
        """Configuration echo for the report (parallelism is not echoed)."""
        return {
            "identities": list(self.identities),
            "mode": self.mode,
            "seed": self.seed,
            "count": self.count,
            "strategy": self.strategy,
            "tol": self.tol,
            "format": self.format,
            "policy": dict(self.policy),
            "overrides": {k: _override_dict(o) for k, o in self.overrides},
        }


def _override_dict(o: IdentityOverride) -> dict:
    out = {k: v for k, v in (("mode", o.mode), ("count", o.count), ("tol", o.tol),
                             ("strategy", o.strategy)) if v is not None}
    if o.int_ranges:
        out["int_ranges"] = {name: list(r) for name, r in o.int_ranges}
    return out


# -- parsing -------------------------------------------------------------------

def _choice(value, allowed, what):
    if value not in allowed:
        raise ConfigError(f"{what} must be one of {', '.join(allowed)}, got {value!r}")
    return value


def _int_range(text: str, name: str) -> tuple:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError:
        raise ConfigError(f"integer range for {name} must look like 0..6, got {text!r}") from None


def _number(section, key, kind):
    try:
        return kind(section[key])
    except ValueError:
        raise ConfigError(f"[{section.name}] {key}: not a valid {kind.__name__}") from None


def parse_config(text: str, source: str = "<config>") -> SweepConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str        # slot names such as M and N are case sensitive
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    if not parser.has_section("sweep"):
        raise ConfigError(f"{source}: missing [sweep] section")
    sw = parser["sweep"]
    kwargs = {}
    if "identities" in sw:
        ids = tuple(s.strip() for s in sw["identities"].split(",") if s.strip())
        kwargs["identities"] = ids or ("all",)
    if "mode" in sw:
        kwargs["mode"] = _choice(sw["mode"], MODES, "mode")
    if "strategy" in sw:
        kwargs["strategy"] = _choice(sw["strategy"], ("random", "grid"), "strategy")
    if "format" in sw:
        kwargs["format"] = _choice(sw["format"], FORMATS, "format")
    for key in ("seed", "count", "parallel"):
        if key in sw:
            kwargs[key] = _number(sw, key, int)
    if "tol" in sw:
        kwargs["tol"] = _number(sw, "tol", float)
    policy = []
    for key in POLICY_KEYS:
        if key in sw:
            policy.append((key, _number(sw, key, int if key == "n_max" else float)))
    kwargs["policy"] = tuple(sorted(policy))
    known = set(POLICY_KEYS) | {"identities", "mode", "strategy", "format", "seed", "count",
                                "parallel", "tol"}
    unknown = sorted(set(sw) - known)
    if unknown:
        raise ConfigError(f"[sweep]: unknown key(s) {', '.join(unknown)}")

    overrides = []
    for name in parser.sections():
        if name == "sweep":
            continue
        head, _, ident = name.partition(" ")
        if head != "identity" or not ident.strip():
            raise ConfigError(f"{source}: unexpected section [{name}]")
        ident = ident.strip()
        try:
            idef = identities.get(ident)
        except KeyError:
            raise ConfigError(f"[{name}]: unknown identity {ident}") from None
        sec = parser[name]
        ints = {s.name for s in idef.int_slots()}
        ov = {}
        ranges = []
        for key in sec:
            if key == "mode":
                ov["mode"] = _choice(sec[key], MODES, "mode")
            elif key == "strategy":
                ov["strategy"] = _choice(sec[key], ("random", "grid"), "strategy")
            elif key == "count":
                ov["count"] = _number(sec, key, int)
            elif key == "tol":
                ov["tol"] = _number(sec, key, float)
            elif key in ints:
                ranges.append((key, _int_range(sec[key], key)))
            else:
                raise ConfigError(f"[{name}]: unknown key {key}")
        overrides.append((ident, IdentityOverride(int_ranges=tuple(sorted(ranges)), **ov)))
    kwargs["overrides"] = tuple(sorted(overrides))
    cfg = SweepConfig(**kwargs)
    if cfg.count < 0 or cfg.parallel < 1:
        raise ConfigError("count must be >= 0 and parallel >= 1")
    cfg.selected()
    return cfg


def load_config(path: str) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path)


def builtin_config(name: str = "default") -> str:
    return resources.files("qverify").joinpath("configs", f"{name}.ini").read_text("utf-8")


# -- cases -------------------------------------------------------------------------

def _resolve_mode(mode: str, idef) -> str:
    if mode == "auto":
        return "exact" if idef.exact_capable else "float"
    return mode


def build_cases(cfg: SweepConfig) -> list[dict]:
    """Every case of the sweep, in report order."""
    cases = []
    for ident in cfg.selected():
        idef = identities.get(ident)
        ov = cfg.override(ident)
        mode = _resolve_mode(ov.mode or cfg.mode, idef)
        if mode == "exact" and not idef.exact_capable:
            raise ConfigError(f"{ident} cannot run in exact mode")
        count = cfg.count if ov.count is None else ov.count
        strategy = ov.strategy or cfg.strategy
        tol = ov.tol if ov.tol is not None else cfg.tol
        points = identities.sample_params(ident, cfg.seed, count, strategy, mode,
                                          dict(ov.int_ranges) or None)
        for p in points:
            cases.append({"index": len(cases), "identity": ident, "mode": mode,
                          "tol": tol, "params": p, "policy": cfg.policy})
    return cases


def run_case(case: dict) -> dict:
    """One case as a report row; never raises."""
    policy = DEFAULT_POLICY.replace(**dict(case["policy"])) if case["policy"] else DEFAULT_POLICY
    try:
        rep = identities.evaluate_identity(case["identity"], case["params"], case["mode"],
                                           case["tol"], policy)
    except Exception as exc:  # one bad case must not end the sweep
        rep = CheckReport(case["identity"], case["params"], verdict=NO_CONVERGENCE,
                          diagnostics={"error": f"{type(exc).__name__}: {exc}"})
    row = rep.to_dict()
    row["index"] = case["index"]
    row["mode"] = case["mode"]
    return row


def run_cases(cases: list[dict], parallel: int = 1) -> list[dict]:
    if parallel <= 1 or len(cases) < 2:
        return [run_case(c) for c in cases]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        rows = list(pool.map(run_case, cases, chunksize=max(1, len(cases) // (4 * parallel))))
    return sorted(rows, key=lambda r: r["index"])


# -- aggregation and output ---------------------------------------------------------

def aggregate(rows: list[dict]) -> dict:
    out = {}
    for row in rows:
        agg = out.setdefault(row["identity"], {
            "cases": 0, PASS: 0, FAIL: 0, SKIPPED: 0, NO_CONVERGENCE: 0,
            "max_rel_residual": None})
        agg["cases"] += 1
        agg[row["verdict"]] += 1
        rel = row["rel_residual"]
        if rel is not None and (agg["max_rel_residual"] is None or rel > agg["max_rel_residual"]):
            agg["max_rel_residual"] = rel
    return out


def totals(aggs: dict) -> dict:
    keys = ("cases", PASS, FAIL, SKIPPED, NO_CONVERGENCE)
    return {k: sum(a[k] for a in aggs.values()) for k in keys}


def run_sweep(cfg: SweepConfig, parallel: int | None = None, timing: bool = False) -> dict:
    start = time.perf_counter()
    cases = build_cases(cfg)
    rows = run_cases(cases, cfg.parallel if parallel is None else parallel)
    aggs = aggregate(rows)
    report = {
        "schema": SCHEMA_VERSION,
        "version": __version__,
        "config": cfg.to_dict(),
        "cases": rows,
        "aggregates": aggs,
        "totals": totals(aggs),
    }
    if timing:
        report["wall_seconds"] = round(time.perf_counter() - start, 3)
    return report


def exit_status(report: dict) -> int:
    t = report["totals"]
    return 1 if t[FAIL] or t[NO_CONVERGENCE] else 0


def _clean(obj):
    """Non-finite floats as strings so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


CSV_FIELDS = ("index", "identity", "mode", "verdict", "lhs", "rhs", "abs_residual",
              "rel_residual", "precision", "params")


def to_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in report["cases"]:
        params = ";".join(f"{k}={v}" for k, v in sorted(row["params"].items()))
        writer.writerow([
            row["index"], row["identity"], row["mode"], row["verdict"],
            row["lhs"] or "", row["rhs"] or "",
            "" if row["abs_residual"] is None else repr(row["abs_residual"]),
            "" if row["rel_residual"] is None else repr(row["rel_residual"]),
            row["diagnostics"].get("precision", ""), params,
        ])
    return buf.getvalue()


def summary_lines(report: dict) -> list[str]:
    lines = []
    for ident, a in report["aggregates"].items():
        worst = a["max_rel_residual"]
        worst = "-" if worst is None else f"{worst:.2e}"
        lines.append(f"{ident:14s} cases={a['cases']:<5d} pass={a[PASS]:<5d} fail={a[FAIL]:<4d} "
                     f"skip={a[SKIPPED]:<4d} noconv={a[NO_CONVERGENCE]:<4d} max_rel={worst}")
    t = report["totals"]
    lines.append(f"total: {t['cases']} cases, {t[PASS]} pass, {t[FAIL]} fail, "
                 f"{t[SKIPPED]} skipped, {t[NO_CONVERGENCE]} no-convergence")
    return lines
