"""Registry plumbing: identity definitions, parameter schemas, evaluation
contexts and the two numeric engines.

An identity side is a function ``side(p, ctx)`` where ``p`` maps slot names
to scalars already converted into the context's tower.  It returns a scalar
or a :class:`~qverify.qcore.SeriesResult`.

Engines
-------
``double``
    Both sides in native floats (compiled kernels).  If the comparison
    fails, the case is re-run in mpmath, so a double-precision round-off
    shortfall is never reported as a failed identity.
``mp``
    Both sides in mpmath at a precision chosen by :func:`qops.stable_eval`,
    starting from the identity's precision hint.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from mpmath import mp

from .. import scalar
from ..checks import FAIL, NO_CONVERGENCE, PASS, SKIPPED, CheckReport, judge
from ..config import DEFAULT_POLICY, TruncationPolicy
from ..errors import (DenominatorPole, DomainError, ExactModeUnsupported,
                      NoConvergence, QVerifyError)
from ..qcore import SeriesResult
from ..qops import stable_eval
from ..scalar import DOUBLE, EXACT, MP

INT = "int"
SCALAR = "scalar"


@dataclass(frozen=True)
class Slot:
    """One named parameter.  Integer slots carry their admissible range."""
    name: str
    kind: str = SCALAR
    lo: int = 0
    hi: int = 0
    doc: str = ""
    draw_hi: int | None = None     # random draws stop here (defaults to hi)


@dataclass(frozen=True)
class IdentityDef:
    id: str
    title: str
    anchor: str
    slots: tuple
    lhs: Callable
    rhs: Callable
    validate: Callable
    sampler: Callable
    exact_capable: bool = False
    default_tol: float = 1e-8
    abs_tol: float = 0.0
    engine: str = "double"
    lhs_dps: Callable | None = None
    rhs_dps: Callable | None = None
    family: str = ""
    notes: str = ""
    grid: Mapping = field(default_factory=dict)

    @property
    def slot_names(self) -> tuple:
        return tuple(s.name for s in self.slots)

    def int_slots(self) -> tuple:
        return tuple(s for s in self.slots if s.kind == INT)

    def describe(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "anchor": self.anchor,
            "exact_capable": self.exact_capable,
            "default_tol": self.default_tol,
            "abs_tol": self.abs_tol,
            "engine": self.engine,
            "family": self.family,
            "params": [
                {"name": s.name, "kind": s.kind, **({"range": [s.lo, s.hi]} if s.kind == INT else {})}
                for s in self.slots
            ],
            "notes": self.notes,
        }


class ParameterError(QVerifyError, ValueError):
    """Parameters do not match an identity's schema."""


# -- contexts -------------------------------------------------------------------

@dataclass(frozen=True)
class EvalContext:
    tower: str
    policy: TruncationPolicy = DEFAULT_POLICY
    trace: bool = False

    def convert(self, params: Mapping, slots) -> dict:
        out = {}
        for s in slots:
            v = params[s.name]
            out[s.name] = int(v) if s.kind == INT else scalar.convert(v, self.tower)
        return out


def coerce_params(idef: IdentityDef, params: Mapping) -> dict:
    """Check names and parse strings.  Scalars keep their tower."""
    names = set(idef.slot_names)
    missing = [n for n in idef.slot_names if n not in params]
    extra = sorted(set(params) - names)
    if missing or extra:
        parts = []
        if missing:
            parts.append("missing " + ", ".join(missing))
        if extra:
            parts.append("unknown " + ", ".join(extra))
        raise ParameterError(f"{idef.id}: {'; '.join(parts)} "
                             f"(expected {', '.join(idef.slot_names)})")
    out = {}
    for s in idef.slots:
        v = params[s.name]
        if isinstance(v, str):
            try:
                v = scalar.parse_scalar(v)
            except ValueError as exc:
                raise ParameterError(f"{idef.id}: cannot parse {s.name}={v!r}") from exc
        if s.kind == INT:
            if isinstance(v, bool) or v != int(v):
                raise ParameterError(f"{idef.id}: {s.name} must be an integer")
            v = int(v)
        out[s.name] = v
    return out


def as_tower(params: Mapping, slots, exact: bool) -> dict:
    """Scalars as Fractions (exact) or floats (float mode)."""
    out = {}
    for s in slots:
        v = params[s.name]
        if s.kind == INT:
            out[s.name] = int(v)
        elif exact:
            if isinstance(v, float):
                raise ParameterError(f"{s.name}={v!r} is not exact; pass a rational")
            out[s.name] = Fraction(v)
        else:
            out[s.name] = float(v) if isinstance(v, (int, Fraction)) else v
    return out


# -- evaluation -------------------------------------------------------------------

def _value(res):
    return res.value if isinstance(res, SeriesResult) else res


def _side_diag(res) -> dict:
    if isinstance(res, SeriesResult):
        return {"terms": res.terms_used, "tail": scalar.to_float(abs(res.tail_estimate))}
    return {}


def _truncation_target(tol: float) -> float:
    if tol <= 0:
        return 1e-30
    return max(min(1e-12, tol * 1e-3), 1e-30)


def _run_mp(idef: IdentityDef, params: Mapping, tol: float, policy: TruncationPolicy):
    target = _truncation_target(tol)
    digits = int(-math.log10(target)) - 2
    pol = policy.replace(rel_tol=target)
    ctx = EvalContext(MP, pol)
    out = {}
    for name, side, hint in (("lhs", idef.lhs, idef.lhs_dps), ("rhs", idef.rhs, idef.rhs_dps)):
        dps0 = max(30, digits + 15)
        if hint is not None:
            dps0 = max(dps0, int(hint(params)) + digits)

        def run(side=side):
            return side(ctx.convert(params, idef.slots), ctx)
        res, dps = stable_eval(run, dps0, digits=digits)
        out[name] = (res, dps)
    return out


def _run_plain(idef: IdentityDef, params: Mapping, tower: str, policy: TruncationPolicy):
    pol = policy.replace(rel_tol=min(policy.rel_tol, 1e-16)) if tower == DOUBLE else policy
    ctx = EvalContext(tower, pol)
    conv = ctx.convert(params, idef.slots)
    return {"lhs": (idef.lhs(conv, ctx), None), "rhs": (idef.rhs(conv, ctx), None)}


def evaluate_sides(idef: IdentityDef, params: Mapping, tower: str,
                   tol: float | None = None,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> dict:
    """Raw side results ``{"lhs": (res, dps), "rhs": (res, dps)}`` without
    domain checks; ``tower`` is EXACT, DOUBLE or MP."""
    tol = idef.default_tol if tol is None else tol
    if tower == MP:
        return _run_mp(idef, params, tol, policy)
    return _run_plain(idef, params, tower, policy)


_DOMAIN_ERRORS = (DomainError, DenominatorPole, ZeroDivisionError)


def evaluate(idef: IdentityDef, params: Mapping, mode: str = "float",
             tol: float | None = None,
             policy: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """Evaluate both sides, compare them and build a CheckReport."""
    exact = mode == "exact"
    if exact and not idef.exact_capable:
        raise ExactModeUnsupported(f"{idef.id} is not exact-capable")
    params = coerce_params(idef, params)
    params = as_tower(params, idef.slots, exact)
    tol = (0.0 if exact else idef.default_tol) if tol is None else tol
    shown = {k: scalar.format_scalar(v) for k, v in params.items()}
    violations = idef.validate(params, policy)
    if violations:
        return CheckReport(idef.id, shown, None, None, None, None, SKIPPED,
                           {"violations": list(violations)})
    diag = {}
    try:
        if exact:
            sides = evaluate_sides(idef, params, EXACT, tol, policy)
            diag["precision"] = "exact"
        elif idef.engine == "double":
            sides = None
            try:
                sides = evaluate_sides(idef, params, DOUBLE, tol, policy)
                lhs, rhs = _value(sides["lhs"][0]), _value(sides["rhs"][0])
                if judge(lhs, rhs, tol, idef.abs_tol)[0] != PASS:
                    sides = None
            except (NoConvergence, OverflowError):
                sides = None
            if sides is None:
                sides = evaluate_sides(idef, params, MP, tol, policy)
                diag["precision"] = f"mp:{max(sides['lhs'][1], sides['rhs'][1])}"
            else:
                diag["precision"] = "double"
        else:
            sides = evaluate_sides(idef, params, MP, tol, policy)
            diag["precision"] = f"mp:{max(sides['lhs'][1], sides['rhs'][1])}"
    except _DOMAIN_ERRORS as exc:
        return CheckReport(idef.id, shown, None, None, None, None, SKIPPED,
                           {"violations": [str(exc) or type(exc).__name__]})
    except (NoConvergence, ArithmeticError, ValueError) as exc:
        d = {"error": f"{type(exc).__name__}: {exc}"}
        if isinstance(exc, NoConvergence):
            d["terms"] = exc.terms_used
        return CheckReport(idef.id, shown, None, None, None, None, NO_CONVERGENCE, d)
    lres, rres = sides["lhs"][0], sides["rhs"][0]
    lhs, rhs = _value(lres), _value(rres)
    diag["lhs"] = _side_diag(lres)
    diag["rhs"] = _side_diag(rres)
    if not exact:
        lhs, rhs = _round(lhs), _round(rhs)
    if not exact and not (scalar.is_finite(lhs) and scalar.is_finite(rhs)):
        diag["error"] = "non-finite side value"
        return CheckReport(idef.id, shown, lhs, rhs, None, None, NO_CONVERGENCE, diag)
    verdict, absr, relr = judge(lhs, rhs, tol, idef.abs_tol)
    diag = {k: v for k, v in diag.items() if v != {}}
    if verdict == FAIL:
        diag.update(_traces(idef, params, policy))
    return CheckReport(idef.id, shown, lhs, rhs, absr, relr, verdict, diag)


def _round(v):
    """mpmath values are reported and compared as doubles."""
    if isinstance(v, mp.mpf) or type(v).__module__.startswith("mpmath"):
        return float(v)
    return v


def _traces(idef: IdentityDef, params: Mapping, policy: TruncationPolicy) -> dict:
    """Partial-sum traces of both sides for failure triage (best effort)."""
    out = {}
    pol = policy.replace(rel_tol=1e-16)
    ctx = EvalContext(MP, pol, trace=True)
    with mp.workdps(40):
        conv = ctx.convert(params, idef.slots)
        for name, side in (("lhs", idef.lhs), ("rhs", idef.rhs)):
            try:
                res = side(conv, ctx)
            except Exception as exc:  # triage must never mask the verdict
                out[f"{name}_trace"] = [f"unavailable: {type(exc).__name__}"]
                continue
            tr = getattr(res, "trace", None)
            if tr:
                out[f"{name}_trace"] = [scalar.format_scalar(float(t)) for t in tr[-12:]]
    return out
