"""Scalar towers.

Three number types flow through the library and are never mixed inside
one evaluation:

* ``Fraction`` -- exact rational arithmetic (terminating identities);
* ``float``    -- IEEE double, served by the compiled kernels;
* ``mpf``      -- mpmath floating point at the ambient ``mp.dps``.

The tower of a computation is read off its arguments (see :func:`tower_of`).
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction
from numbers import Integral

import mpmath
from mpmath import mp

EXACT = "exact"
DOUBLE = "double"
MP = "mp"

DOUBLE_DPS = 15


def tower_of(*xs) -> str:
    t = EXACT
    for x in xs:
        if isinstance(x, mpmath.mpf):
            return MP
        if isinstance(x, float):
            t = DOUBLE
        elif isinstance(x, (list, tuple)):
            sub = tower_of(*x)
            if sub == MP:
                return MP
            if sub == DOUBLE:
                t = DOUBLE
    return t


def is_exact(x) -> bool:
    return isinstance(x, (Fraction, Integral))


def parse_scalar(text: str) -> Fraction:
    """Parse ``"1/3"``, ``"-2"``, ``"0.125"`` or ``"1e-3"`` into a Fraction."""
    text = text.strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational or decimal literal: {text!r}") from exc


def convert(x, tower: str):
    """Move a scalar into ``tower``.  Floats become exact binary fractions."""
    if tower == EXACT:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, Integral):
            return Fraction(int(x))
        if isinstance(x, str):
            return parse_scalar(x)
        if isinstance(x, float):
            return Fraction(x)
        raise TypeError(f"cannot represent {x!r} exactly")
    if tower == DOUBLE:
        if isinstance(x, str):
            x = parse_scalar(x)
        return float(x)
    if isinstance(x, str):
        x = parse_scalar(x)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def one(tower: str):
    return convert(1, tower)


def zero(tower: str):
    return convert(0, tower)


def eps(tower: str):
    if tower == EXACT:
        return 0
    if tower == DOUBLE:
        return 2.220446049250313e-16
    return mp.eps


def to_float(x) -> float:
    """Nearest double; overflow saturates to +-inf instead of raising."""
    try:
        return float(x)
    except OverflowError:
        return math.copysign(math.inf, x)


def log10_abs(x) -> float:
    if x == 0:
        return -math.inf
    if isinstance(x, mpmath.mpf):
        return float(mpmath.log10(abs(x)))
    if isinstance(x, Fraction):
        return (math.log10(abs(x.numerator)) - math.log10(x.denominator))
    return math.log10(abs(x))


def is_finite(x) -> bool:
    if isinstance(x, float):
        return math.isfinite(x)
    if isinstance(x, mpmath.mpf):
        return mpmath.isfinite(x)
    return True


@contextmanager
def precision(dps: int | None):
    """Run a block at ``dps`` decimal digits (no-op for ``None``)."""
    if dps is None:
        yield
        return
    with mp.workdps(dps):
        yield


def format_scalar(x) -> str:
    """Stable text form used in reports: ``p/q`` for rationals, shortest
    round-trip repr for floating values."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Integral):
        return str(int(x))
    return repr(to_float(x))
