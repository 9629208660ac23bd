"""q-difference operators D and theta, their Leibniz expansions, the
five-parameter operator series T/E and the closed forms they produce.

Operators act numerically: a function handle is sampled on the geometric
lattice {a q^j} (D) or {a q^-j} (theta) and differenced in place.  Deep
difference tables cancel catastrophically, so the brute-force operator
runs under :func:`stable_eval`, which raises the mpmath precision until two
evaluations agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from mpmath import mp

from . import kernels, scalar
from .config import DEFAULT_POLICY, TruncationPolicy
from .errors import DomainError, NoConvergence
from .qcore import (HyperSpec, SeriesResult, effective_tol, phi_rs, pinf,
                    pinfs, poch_finite, pochs, qbinom, sum_series)
from .scalar import DOUBLE, tower_of

D = "D"
THETA = "theta"


@dataclass(frozen=True)
class FuncHandle:
    evaluator: Callable
    label: str = "f"

    def __call__(self, x):
        return self.evaluator(x)


class ProductKernel:
    """poly(x) * prod (alpha x; q)_inf / prod (beta x; q)_inf.

    ``poly`` is a list of roots rho, giving prod (x - rho), or None.  Lattice
    values come from one infinite product per parameter and a running
    finite correction, which is much cheaper than re-evaluating at every
    lattice point.
    """

    def __init__(self, num, den, q, roots=None, label: str = "product"):
        self.num = tuple(num)
        self.den = tuple(den)
        self.q = q
        self.roots = tuple(roots) if roots is not None else ()
        self.label = label

    def _poly(self, x):
        p = 1 + 0 * x
        for rho in self.roots:
            p = p * (x - rho)
        return p

    def __call__(self, x):
        top = pinfs([al * x for al in self.num], self.q) if self.num else 1
        bot = pinfs([be * x for be in self.den], self.q) if self.den else 1
        if bot == 0:
            raise DomainError(f"{self.label} has a pole at {x}")
        return self._poly(x) * top / bot

    def lattice(self, kind, x, q, n):
        if q != self.q:
            return [self(x * q ** j) for j in range(n + 1)]
        top = [pinf(al * x, q) for al in self.num]
        bot = [pinf(be * x, q) for be in self.den]
        out = []
        xj = x
        for j in range(n + 1):
            if j:
                if kind == D:
                    # (c x q^j)_inf = (c x q^{j-1})_inf / (1 - c x q^{j-1})
                    prev = xj
                    xj = xj * q
                    top = [_shift_down(t, al, prev, xj, q) for t, al in zip(top, self.num)]
                    bot = [_shift_down(t, be, prev, xj, q) for t, be in zip(bot, self.den)]
                else:
                    xj = xj / q
                    top = [t * (1 - al * xj) for t, al in zip(top, self.num)]
                    bot = [t * (1 - be * xj) for t, be in zip(bot, self.den)]
            den = 1
            for t in bot:
                den = den * t
            if den == 0:
                raise DomainError(f"{self.label} has a pole on the lattice")
            val = self._poly(xj)
            for t in top:
                val = val * t
            out.append(val / den)
        return out


def _shift_down(prod, c, prev, x, q):
    f = 1 - c * prev
    if f == 0:
        return pinf(c * x, q)
    return prod / f


def _lattice(kind, f, a, q, n):
    fast = getattr(f, "lattice", None)
    if fast is not None:
        return fast(kind, a, q, n)
    if kind == D:
        return [f(a * q ** j) for j in range(n + 1)]
    if kind == THETA:
        return [f(a * q ** (-j)) for j in range(n + 1)]
    raise ValueError(f"unknown operator kind {kind!r}")


def qdiff_orders(kind: str, f, a, q, n: int) -> list:
    """[f(a), Xf(a), X^2 f(a), ..., X^n f(a)] for X = D_a or theta_a."""
    if a == 0:
        raise DomainError("q-difference operators need a != 0")
    if n < 0:
        raise DomainError("order must be nonnegative")
    values = _lattice(kind, f, a, q, n)
    if isinstance(a, float) and all(isinstance(v, float) for v in values):
        table = kernels.impl.diff_table_d if kind == D else kernels.impl.diff_table_theta
        return table(values, a, q)
    g = list(values)
    out = [g[0]]
    for level in range(1, n + 1):
        if kind == D:
            xj = a
            for j in range(n + 1 - level):
                g[j] = (g[j] - g[j + 1]) / xj
                xj *= q
        else:
            xj = a / q
            for j in range(n + 1 - level):
                g[j] = (g[j + 1] - g[j]) / xj
                xj /= q
        out.append(g[0])
    return out


def qdiff_apply(kind: str, f, a, q, n: int):
    """n-fold D_a or theta_a applied to f and evaluated at a (n = 0 is f(a))."""
    return qdiff_orders(kind, f, a, q, n)[n]


def leibniz_apply(kind: str, f, g, a, q, n: int):
    """Right-hand side of the q-Leibniz rule for X^n {f g}.

    D:     sum_k [n k] q^{k(k-n)} D^k f(a) * D^{n-k}{g(q^k a)}
    theta: sum_k [n k] theta^k f(a) * theta^{n-k}{g(q^{-k} a)}
    """
    fk = qdiff_orders(kind, f, a, q, n)
    total = 0
    for k in range(n + 1):
        if kind == D:
            shift = q ** k
            weight = qbinom(n, k, q) * q ** (k * (k - n))
        else:
            shift = q ** (-k)
            weight = qbinom(n, k, q)
        shifted = (lambda s: (lambda x: g(s * x)))(shift)
        total = total + weight * fk[k] * qdiff_apply(kind, shifted, a, q, n - k)
    return total


LEMMA_FORMS = ("id1", "id2", "id3", "id4", "id5", "id6")


def lemma_closed_form(selector: str, a, s, q, k: int, omega=None,
                      policy: TruncationPolicy = DEFAULT_POLICY):
    """Closed forms of X^k applied to the standard product kernels.

    id1: D^k {1/(as)_inf}        id2: theta^k {1/(as)_inf}
    id3: D^k {(as)_inf}          id4: theta^k {(as)_inf}
    id5: D^k {(as)_inf/(a omega)_inf}
    id6: theta^k {(as)_inf/(a omega)_inf}
    """
    c2 = k * (k - 1) // 2
    if selector == "id1":
        return s ** k / pinf(a * s, q, policy)
    if selector == "id2":
        if a == 0:
            raise DomainError("theta forms need a != 0")
        return s ** k * q ** (-c2) / pinf(a * s * q ** (-k), q, policy)
    if selector == "id3":
        return (-s) ** k * q ** c2 * pinf(a * s * q ** k, q, policy)
    if selector == "id4":
        if a == 0:
            raise DomainError("theta forms need a != 0")
        return (-s) ** k * pinf(a * s, q, policy)
    if omega is None:
        raise DomainError(f"{selector} needs omega")
    ratio = pinf(a * s, q, policy) / pinf(a * omega, q, policy)
    if selector == "id5":
        den = poch_finite(a * s, q, k)
        if den == 0:
            raise DomainError("(as;q)_k vanishes")
        return omega ** k * poch_finite(s / omega, q, k) / den * ratio
    if selector == "id6":
        if a == 0:
            raise DomainError("theta forms need a != 0")
        den = poch_finite(q / (a * omega), q, k)
        if den == 0:
            raise DomainError("(q/(a omega);q)_k vanishes")
        return (-q / a) ** k * poch_finite(s / omega, q, k) / den * ratio
    raise ValueError(f"unknown lemma selector {selector!r}")


def lemma_kernel(selector: str, s, q, omega=None):
    """The function of a that ``selector`` differentiates."""
    if selector in ("id1", "id2"):
        return FuncHandle(lambda a: 1 / pinf(a * s, q), "1/(as;q)_inf")
    if selector in ("id3", "id4"):
        return FuncHandle(lambda a: pinf(a * s, q), "(as;q)_inf")
    return FuncHandle(lambda a: pinf(a * s, q) / pinf(a * omega, q),
                      "(as;q)_inf/(a omega;q)_inf")


def lemma_kind(selector: str) -> str:
    return THETA if selector in ("id2", "id4", "id6") else D


# -- the operator series ------------------------------------------------------

@dataclass(frozen=True)
class OperatorSpec:
    """T(a,b,c,d,e, y D_x) or E(a,b,c,d,e, y theta_x), truncated at order N."""
    kind: str
    a: object
    b: object
    c: object
    d: object
    e: object
    y: object
    truncation: int = 25

    def coefficient(self, n: int, q):
        c = pochs((self.a, self.b, self.c), q, n) / pochs((q, self.d, self.e), q, n)
        if self.kind == "E":
            c = c * (-1) ** n * q ** (n * (n - 1) // 2)
        return c

    def validate(self, q):
        for name in ("d", "e"):
            b = getattr(self, name)
            for n in range(1, self.truncation + 1):
                if poch_finite(b, q, n) == 0:
                    raise DomainError(f"({name};q)_{n} vanishes")


def operator_apply_bruteforce(op: OperatorSpec, f, x, q,
                              policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """sum_{n<=N} coeff_n y^n X^n f(x) from the raw difference table.

    Raises NoConvergence unless the geometric tail after order N is below
    ``policy.rel_tol`` relative to the sum.
    """
    if op.kind not in ("T", "E"):
        raise ValueError(f"operator kind must be T or E, got {op.kind!r}")
    op.validate(q)
    N = op.truncation
    orders = qdiff_orders(D if op.kind == "T" else THETA, f, x, q, N)
    terms = []
    yn = 1
    for n in range(N + 1):
        terms.append(op.coefficient(n, q) * yn * orders[n])
        yn = yn * op.y
    total = 0
    trace = []
    for t in terms:
        total = total + t
        trace.append(total)
    tol = max(effective_tol(policy, tower_of(total)), policy.rel_tol)
    tail = _geometric_tail(terms)
    last = max(abs(t) for t in terms[-4:])
    if not tail <= tol * abs(total) and last <= tol * abs(total) * 1e-2:
        # last terms sit at the rounding floor of the table, so their
        # ratios are noise; they are still negligible
        tail = 4 * last
    converged = tail <= tol * abs(total) or total == 0
    if not converged:
        raise NoConvergence(f"operator series not settled at order {N}", total, N + 1)
    return SeriesResult(total, N + 1, tail, True, trace)


def _geometric_tail(terms):
    """Tail bound from the decay of the last few terms of a truncated series."""
    last = [abs(t) for t in terms[-4:]]
    if last[-1] == 0:
        return 0 * last[-1]
    ratios = [b / a for a, b in zip(last, last[1:]) if a != 0]
    rho = max(ratios) if ratios else 0
    if rho >= 1:
        return scalar.convert(math.inf, tower_of(last[-1])) if tower_of(last[-1]) != "exact" else last[-1] * 10 ** 9
    return last[-1] * rho / (1 - rho)


def stable_eval(fn: Callable, dps: int, digits: int = 20, guard: int = 20,
                max_dps: int = 4000):
    """Evaluate ``fn`` at increasing mpmath precision until two runs
    ``guard`` digits apart agree to ``digits`` significant digits.

    Returns ``(value, dps_used)``; the value comes from the higher run.
    """
    dps = max(dps, 20)
    while True:
        with mp.workdps(dps):
            v1 = fn()
        with mp.workdps(dps + guard):
            v2 = fn()
            v1v = getattr(v1, "value", v1)
            v2v = getattr(v2, "value", v2)
            scale = max(abs(v1v), abs(v2v))
            if scale == 0 or abs(v1v - v2v) <= scale * mp.mpf(10) ** (-digits):
                return v2, dps + guard
        if dps >= max_dps:
            raise NoConvergence(f"no stable value below {max_dps} digits", v2v, 0)
        dps = min(2 * dps, max_dps)


def bruteforce_dps(kind: str, x, q, N: int, digits: int = 20) -> int:
    """Starting precision for an order-N difference table at x."""
    xf = abs(scalar.to_float(x))
    qf = scalar.to_float(q)
    if kind in (D, "T"):
        loss = N * math.log10(2.0 / xf) + (N * (N - 1) / 2) * math.log10(1.0 / qf)
    else:
        loss = N * math.log10(2.0 / xf) + N * math.log10(1.0 / qf)
    return int(digits + max(loss, 0.0)) + 10


# -- closed forms -------------------------------------------------------------

def _domain_moduli(values: dict, policy: TruncationPolicy, strict_margin: bool = True):
    bound = 1 - policy.delta if strict_margin else 1
    bad = [name for name, v in values.items() if abs(v) >= bound]
    if bad:
        raise DomainError("modulus constraint violated: " + ", ".join(f"|{b}|<1" for b in bad))


def thm13_closed_form(side: str, r, f, g, v, w, u, a, s, z, t, q,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """Closed double sums for T{(as)/(az,at)} (side T) and E{(az,at)/(as)}
    (side E), valid for max{|az|,|as|,|at|,|ut|} < 1."""
    _domain_moduli({"az": a * z, "as": a * s, "at": a * t, "ut": u * t}, policy)
    if side == "T":
        pre = pinf(a * s, q, policy) / pinfs((a * z, a * t), q, policy)

        def outer():
            k = 0
            while True:
                c = (pochs((r, f, g, s / z, a * t), q, k) * (z * u) ** k
                     / pochs((v, w, a * s, q), q, k))
                inner = phi_rs(HyperSpec((r * q ** k, f * q ** k, g * q ** k),
                                         (v * q ** k, w * q ** k), q, u * t), policy)
                yield c * inner.value
                k += 1
    elif side == "E":
        pre = pinfs((a * z, a * t), q, policy) / pinf(a * s, q, policy)

        def outer():
            k = 0
            while True:
                c = (pochs((r, f, g, z / s, q / (a * t)), q, k) * (-u * t) ** k
                     / pochs((v, w, q / (a * s), q), q, k))
                inner = phi_rs(HyperSpec((r * q ** k, f * q ** k, g * q ** k),
                                         (v * q ** k, w * q ** k, 0), q, -u * t), policy)
                yield c * inner.value
                k += 1
    else:
        raise ValueError(f"side must be T or E, got {side!r}")
    res = sum_series(outer(), policy)
    return SeriesResult(pre * res.value, res.terms_used, abs(pre) * res.tail_estimate,
                        res.converged)


def thm13_kernel(side: str, s, z, t, q):
    if side == "T":
        return ProductKernel((s,), (z, t), q, label="(as)/(az,at)")
    return ProductKernel((z, t), (s,), q, label="(az,at)/(as)")


def cor14_closed_form(side: str, r, f, g, v, w, u, x, s, q,
                      policy: TruncationPolicy = DEFAULT_POLICY):
    """T(r,f,g,v,w,uD_s){1/(xs)} and E(r,f,g,v,w,-u theta_s){(xs)} in closed form."""
    _domain_moduli({"xs": x * s, "xu": x * u}, policy)
    if side == "T":
        return phi_rs(HyperSpec((r, f, g), (v, w), q, x * u), policy).value / pinf(x * s, q, policy)
    return pinf(x * s, q, policy) * phi_rs(HyperSpec((r, f, g), (v, w, 0), q, x * u), policy).value


def cor14_kernel(side: str, x, q):
    if side == "T":
        return ProductKernel((), (x,), q, label="1/(xs)")
    return ProductKernel((x,), (), q, label="(xs)")


# -- difference equations of the seven-variable representation ---------------

@dataclass(frozen=True)
class SevenPointFunc:
    """f(a, b, c, d, e, x, y)."""
    evaluator: Callable
    label: str = "f"

    def __call__(self, a, b, c, d, e, x, y):
        return self.evaluator(a, b, c, d, e, x, y)


def diffeq_sides(which: str, f, point, q):
    """Both sides of difference equation I (T-type) or II (E-type)."""
    a, b, c, d, e, x, y = point

    def F(xx, yy):
        return f(a, b, c, d, e, xx, yy)

    s1 = a + b + c
    s2 = a * b + a * c + b * c
    s3 = a * b * c
    if which == "I":
        fy = [F(x, y * q ** j) for j in range(4)]
        fxq = [F(x * q, y * q ** j) for j in range(4)]
        lhs = x * ((fy[0] - fy[1]) - (d + e) / q * (fy[1] - fy[2])
                   + d * e / q ** 2 * (fy[2] - fy[3]))
        rhs = y * ((fy[0] - fxq[0]) - s1 * (fy[1] - fxq[1])
                   + s2 * (fy[2] - fxq[2]) - s3 * (fy[3] - fxq[3]))
    elif which == "II":
        fy = [F(x, y * q ** j) for j in range(5)]
        fxq = [F(x * q, y * q ** j) for j in range(5)]
        lhs = x * ((fxq[0] - fxq[1]) - (d + e) / q * (fxq[1] - fxq[2])
                   + d * e / q ** 2 * (fxq[2] - fxq[3]))
        rhs = y * ((fxq[1] - fy[1]) - s1 * (fxq[2] - fy[2])
                   + s2 * (fxq[3] - fy[3]) - s3 * (fxq[4] - fy[4]))
    else:
        raise ValueError(f"equation must be I or II, got {which!r}")
    return lhs, rhs


def diffeq_residual(which: str, f, point, q):
    """|LHS - RHS| of difference equation I or II at ``point``."""
    try:
        lhs, rhs = diffeq_sides(which, f, point, q)
    except ZeroDivisionError as exc:
        raise DomainError(f"shifted point not evaluable: {exc}") from exc
    return abs(lhs - rhs)
