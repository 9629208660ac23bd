"""Per-case check records and residual arithmetic."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .scalar import format_scalar, to_float

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped-domain"
NO_CONVERGENCE = "no-convergence"
VERDICTS = (PASS, FAIL, SKIPPED, NO_CONVERGENCE)


@dataclass
class CheckReport:
    identity: str
    params: dict
    lhs: object = None
    rhs: object = None
    abs_residual: float | None = None
    rel_residual: float | None = None
    verdict: str = SKIPPED
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        return {
            "identity": self.identity,
            "params": {k: v if isinstance(v, str) else format_scalar(v)
                       for k, v in self.params.items()},
            "lhs": None if self.lhs is None else format_scalar(self.lhs),
            "rhs": None if self.rhs is None else format_scalar(self.rhs),
            "abs_residual": self.abs_residual,
            "rel_residual": self.rel_residual,
            "verdict": self.verdict,
            "diagnostics": self.diagnostics,
        }


def residuals(lhs, rhs) -> tuple[float, float]:
    """Absolute residual and residual relative to max(|lhs|, |rhs|)."""
    diff = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    rel = diff / scale if scale else 0 * diff
    return to_float(diff), to_float(rel)


def judge(lhs, rhs, tol, abs_tol=0.0) -> tuple[str, float, float]:
    if isinstance(lhs, Fraction) and isinstance(rhs, Fraction):
        ab, rel = residuals(lhs, rhs)
        return (PASS if lhs == rhs else FAIL), ab, rel
    ab, rel = residuals(lhs, rhs)
    scale = to_float(max(abs(lhs), abs(rhs)))
    ok = rel <= tol or (abs_tol > 0 and scale <= abs_tol)
    return (PASS if ok else FAIL), ab, rel
