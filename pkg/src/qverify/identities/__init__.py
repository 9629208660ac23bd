"""Registry of identities as independently evaluated left/right sides.

>>> from qverify.identities import evaluate_identity
>>> evaluate_identity("CHU", {"n": 1, "x": "1/3", "y": "1/5", "q": "1/2"}, "exact").verdict
'pass'
"""
from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Mapping

from ..checks import CheckReport
from ..config import DEFAULT_POLICY, TruncationPolicy
from ..errors import QVerifyError, UnknownIdentity
from . import chu, generalized, integrals, operators, qbinomial
from .base import INT, EvalContext, IdentityDef, ParameterError, Slot, as_tower, coerce_params, evaluate
from .chu import function_G
from .generalized import function_F

__all__ = [
    "IdentityDef", "Slot", "EvalContext", "ParameterError", "register_all", "get", "ids",
    "evaluate_identity", "domain_validate", "sample_params", "function_F", "function_G",
]

_MODULES = (qbinomial, operators, generalized, chu, integrals)
_REGISTRY: dict[str, IdentityDef] = {}


def register_all() -> list[IdentityDef]:
    """Every registered identity, in a fixed order."""
    if not _REGISTRY:
        for module in _MODULES:
            for idef in module.entries():
                if idef.id in _REGISTRY:
                    raise QVerifyError(f"duplicate identity id {idef.id}")
                _REGISTRY[idef.id] = idef
    return list(_REGISTRY.values())


def ids() -> list[str]:
    return [d.id for d in register_all()]


def get(identity_id: str) -> IdentityDef:
    register_all()
    try:
        return _REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentity(identity_id) from None


def evaluate_identity(identity_id: str, params: Mapping, mode: str = "float",
                      tol: float | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> CheckReport:
    """Check one parameter assignment.  ``mode`` is ``"exact"`` or ``"float"``."""
    if mode not in ("exact", "float"):
        raise ValueError(f"mode must be 'exact' or 'float', not {mode!r}")
    return evaluate(get(identity_id), params, mode, tol, policy)


def _int_violations(idef: IdentityDef, params: Mapping) -> list[str]:
    out = []
    for s in idef.int_slots():
        if not s.lo <= params[s.name] <= s.hi:
            out.append(f"{s.lo} <= {s.name} <= {s.hi}")
    return out


def domain_validate(identity_id: str, params: Mapping, mode: str = "float",
                    policy: TruncationPolicy = DEFAULT_POLICY) -> list[str]:
    """Violated constraints for ``params``; an empty list means admissible."""
    idef = get(identity_id)
    p = as_tower(coerce_params(idef, params), idef.slots, mode == "exact")
    bad = _int_violations(idef, p)
    return bad or list(idef.validate(p, policy))


def _admissible(idef: IdentityDef, p: dict, policy: TruncationPolicy) -> bool:
    if _int_violations(idef, p):
        return False
    try:
        return not idef.validate(p, policy)
    except (ArithmeticError, ValueError):
        return False


def _draw(idef, rng, exact, ints, policy, attempts=500):
    for _ in range(attempts):
        p = dict(ints)
        p.update(idef.sampler(rng, exact, ints))
        p = {s.name: p[s.name] for s in idef.slots}
        if not exact:
            p = {k: float(v) if isinstance(v, Fraction) else v for k, v in p.items()}
        if _admissible(idef, p, policy):
            return p
    raise QVerifyError(f"{idef.id}: sampler found no admissible point in {attempts} draws")


def sample_params(identity_id: str, seed: int, count: int, strategy: str = "random",
                  mode: str = "float", int_ranges: Mapping | None = None,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> list[dict]:
    """Seeded admissible parameter assignments.

    ``random`` draws every integer slot from its range, then the scalars.
    ``grid`` walks the cross product of the integer grid and draws ``count``
    scalar points for each integer combination.  ``int_ranges`` maps slot
    names to inclusive ``(lo, hi)`` pairs and overrides the defaults.
    """
    idef = get(identity_id)
    if strategy not in ("random", "grid"):
        raise ValueError(f"strategy must be 'random' or 'grid', not {strategy!r}")
    exact = mode == "exact"
    if exact and not idef.exact_capable:
        raise ParameterError(f"{idef.id} has no exact mode")
    rng = random.Random(f"{seed}:{idef.id}")
    ranges = {}
    for s in idef.int_slots():
        lo, hi = s.lo, s.hi if s.draw_hi is None else s.draw_hi
        if int_ranges and s.name in int_ranges:
            lo, hi = int_ranges[s.name]
        ranges[s.name] = (lo, hi)
    out = []
    if strategy == "random":
        for _ in range(count):
            ints = {name: rng.randint(lo, hi) for name, (lo, hi) in ranges.items()}
            out.append(_draw(idef, rng, exact, ints, policy))
        return out
    axes = []
    for name, (lo, hi) in ranges.items():
        grid = idef.grid.get(name)
        if grid is None or (int_ranges and name in int_ranges):
            grid = range(lo, hi + 1)
        axes.append([(name, v) for v in grid])
    for combo in itertools.product(*axes):
        ints = dict(combo)
        for _ in range(count):
            out.append(_draw(idef, rng, exact, ints, policy))
    return out
