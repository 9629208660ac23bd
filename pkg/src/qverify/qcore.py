"""q-shifted factorials, q-binomial coefficients, Cauchy polynomials and the
basic hypergeometric series, on top of a truncation-controlled series engine.

Every function accepts scalars from any one tower (``Fraction``, ``float``
or mpmath ``mpf``) and answers in the same tower.  Double-precision work is
routed to the compiled kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from mpmath import mp

from . import kernels, scalar
from .checks import FAIL, PASS, CheckReport, judge
from .config import DEFAULT_POLICY, TruncationPolicy
from .errors import (DenominatorPole, DomainError, ExactModeUnsupported,
                     NoConvergence)
from .scalar import DOUBLE, EXACT, MP, tower_of


@dataclass
class SeriesResult:
    value: object
    terms_used: int
    tail_estimate: object
    converged: bool
    trace: list | None = field(default=None, repr=False)

    def __float__(self):
        return scalar.to_float(self.value)


def effective_tol(policy: TruncationPolicy, tower: str) -> float | object:
    """Stopping tolerance actually used by the float engines.

    ``rel_tol`` is the truncation target; it is only raised to a small
    multiple of the working epsilon, below which further terms cannot
    change the sum.  A 50-digit mpmath value therefore needs a matching
    ``rel_tol``.
    """
    if tower == MP:
        return max(mp.mpf(policy.rel_tol), 8 * mp.eps)
    return max(policy.rel_tol, 4 * scalar.eps(DOUBLE))


def product_cutoff(policy: TruncationPolicy, tower: str):
    if tower == MP:
        return min(mp.mpf(policy.product_cutoff), mp.eps / 64)
    return policy.product_cutoff


def validate_q(q, policy: TruncationPolicy = DEFAULT_POLICY) -> None:
    if scalar.is_exact(q):
        if not 0 < q < 1:
            raise DomainError(f"q must satisfy 0 < q < 1, got {q}")
    elif not 0 < q <= policy.q_max:
        raise DomainError(f"q must satisfy 0 < q <= {policy.q_max}, got {q}")


# -- series engine -----------------------------------------------------------

def sum_series(terms: Iterable, policy: TruncationPolicy = DEFAULT_POLICY,
               bound: int | None = None, keep_trace: bool = False) -> SeriesResult:
    """Sum an indexed term stream.

    With ``bound`` the terms 0..bound are added and nothing else (the only
    mode allowed for exact scalars).  Otherwise the stream is cut once
    ``policy.patience`` consecutive terms are below ``rel_tol * |partial|``
    while the observed term ratio stays below one; the tail is then bounded
    by the geometric continuation of the largest such ratio.
    """
    it = iter(terms)
    trace = [] if keep_trace else None
    if bound is not None:
        total = None
        n = 0
        for n, t in zip(range(bound + 1), it):
            total = t if total is None else total + t
            if keep_trace:
                trace.append(total)
        if total is None:
            total = 0
        return SeriesResult(total, n + 1, 0 * total, True, trace)

    total = None
    prev = None
    small = 0
    ratio_max = 0
    tol = None
    n = 0
    for n, t in enumerate(it):
        if total is None:
            if scalar.is_exact(t):
                raise ExactModeUnsupported("exact summation needs an explicit bound")
            tol = effective_tol(policy, tower_of(t))
            total = t
        else:
            total = total + t
        if keep_trace:
            trace.append(total)
        if not scalar.is_finite(total):
            raise NoConvergence("partial sums are not finite", total, n + 1)
        ratio = abs(t / prev) if prev else 0 * abs(t)
        prev = t
        if n > 0 and (t == 0 or abs(t) <= tol * abs(total)) and ratio < 1:
            small += 1
            ratio_max = max(ratio_max, ratio)
            if small >= policy.patience:
                tail = abs(t) * ratio_max / (1 - ratio_max)
                return SeriesResult(total, n + 1, tail, True, trace)
        else:
            small = 0
            ratio_max = 0
        if n + 1 >= policy.n_max:
            break
    raise NoConvergence(f"series did not settle within {policy.n_max} terms",
                        total, n + 1)


# -- q-shifted factorials -----------------------------------------------------

def poch_finite(a, q, n: int):
    """(a;q)_n = prod_{k<n} (1 - a q^k)."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if isinstance(a, float) and isinstance(q, float):
        return kernels.impl.poch_finite(a, q, n)
    p = 1 + 0 * a * q
    qk = 1 + 0 * q
    for _ in range(n):
        p *= 1 - a * qk
        qk *= q
    return p


def pochs(params: Sequence, q, n: int):
    """(a_1, ..., a_r; q)_n."""
    p = 1
    for a in params:
        p = p * poch_finite(a, q, n)
    return p


def poch_infinite(a, q, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """(a;q)_inf with a certified tail.

    The product stops at the first K with |a| q^K below the cutoff; the
    omitted factors change the logarithm by at most
    sum_{k>=K} |a|q^k / (1 - |a|q^k), reported through ``tail_estimate``.
    """
    tower = tower_of(a, q)
    if tower == EXACT:
        if a == 0:
            return SeriesResult(Fraction(1), 0, Fraction(0), True)
        raise ExactModeUnsupported("(a;q)_inf is not rational for a != 0")
    if not 0 < q < 1:
        raise DomainError(f"infinite product needs 0 < q < 1, got {q}")
    cutoff = product_cutoff(policy, tower)
    k_max = policy.n_max * 10
    if tower == DOUBLE:
        value, used, tail = kernels.impl.poch_infinite(float(a), float(q), cutoff, k_max)
        if tail == math.inf:
            raise NoConvergence("infinite product factor cap reached", value, used)
        return SeriesResult(value, used, abs(value) * math.expm1(tail), True)
    p = mp.one
    t = a
    aq = abs(a)
    k = 0
    while aq >= cutoff:
        if k >= k_max:
            raise NoConvergence("infinite product factor cap reached", p, k)
        p *= 1 - t
        t *= q
        aq *= q
        k += 1
    tail = 0 if aq == 0 else aq / ((1 - q) * (1 - aq))
    return SeriesResult(p, k, abs(p) * mp.expm1(tail), True)


def pinf(a, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Value of (a;q)_inf (rational 1 for a = 0)."""
    return poch_infinite(a, q, policy).value


def pinfs(params: Sequence, q, policy: TruncationPolicy = DEFAULT_POLICY):
    p = 1
    for a in params:
        p = p * pinf(a, q, policy)
    return p


def poch_ratio_identities_check(a, q, n: int, m: int, reflection: bool = True,
                                tol: float = 1e-12) -> CheckReport:
    """Check (a;q)_{n+m} = (a;q)_n (aq^n;q)_m and, optionally, the reflection
    (q/a;q)_n = (-a)^{-n} q^{C(n+1,2)} (aq^{-n};q)_inf / (a;q)_inf.

    In exact mode the ratio of infinite products is replaced by the finite
    product (aq^{-n};q)_n it telescopes to.
    """
    lhs = poch_finite(a, q, n + m)
    rhs = poch_finite(a, q, n) * poch_finite(a * q ** n, q, m)
    verdict, ab, rel = judge(lhs, rhs, tol)
    diagnostics = {}
    if reflection:
        if a == 0:
            raise DomainError("reflection formula needs a != 0")
        r_lhs = poch_finite(q / a, q, n)
        pref = (-a) ** (-n) * q ** (n * (n + 1) // 2)
        if tower_of(a, q) == EXACT:
            r_rhs = pref * poch_finite(a * q ** (-n), q, n)
        else:
            r_rhs = pref * pinf(a * q ** (-n), q) / pinf(a, q)
        r_verdict, r_ab, r_rel = judge(r_lhs, r_rhs, tol)
        diagnostics["reflection"] = {
            "lhs": scalar.format_scalar(r_lhs), "rhs": scalar.format_scalar(r_rhs),
            "abs_residual": r_ab, "rel_residual": r_rel, "verdict": r_verdict,
        }
        if r_verdict != PASS:
            verdict = FAIL
    return CheckReport("POCH_SPLIT", {"a": a, "q": q, "n": n, "m": m},
                       lhs, rhs, ab, rel, verdict, diagnostics)


def qbinom(n: int, k: int, q):
    """Gaussian binomial [n k]_q (zero outside 0 <= k <= n)."""
    if k < 0 or k > n:
        return 0 * q
    k = min(k, n - k)
    num = 1 + 0 * q
    den = 1 + 0 * q
    for i in range(1, k + 1):
        num *= 1 - q ** (n - k + i)
        den *= 1 - q ** i
    return num / den


def cauchy_poly(n: int, x, y, q):
    """p_n(x, y) = (x - y)(x - qy)...(x - q^{n-1}y)."""
    p = 1 + 0 * (x + y + q)
    qk = 1 + 0 * q
    for _ in range(n):
        p *= x - qk * y
        qk *= q
    return p


# -- basic hypergeometric series ----------------------------------------------

@dataclass(frozen=True)
class HyperSpec:
    """r-Phi-s[num; den; q, z].

    ``terminating`` gives the last summation index explicitly; it is required
    in floating point, where a parameter equal to q^{-n} is never inferred.
    """
    num: tuple
    den: tuple
    q: object
    z: object
    terminating: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(self.num))
        object.__setattr__(self, "den", tuple(self.den))

    @property
    def tower(self) -> str:
        return tower_of(self.num, self.den, self.q, self.z)

    def termination_order(self) -> int | None:
        if self.terminating is not None:
            return self.terminating
        if self.tower != EXACT:
            return None
        best = None
        for a in self.num:
            n = exact_negative_power(a, self.q)
            if n is not None and (best is None or n < best):
                best = n
        if self.z == 0:
            best = 0
        return best


def exact_negative_power(a, q) -> int | None:
    """n >= 0 with a == q^{-n} exactly, else None (rationals only)."""
    if a <= 0:
        return None
    if a == 1:
        return 0
    if a < 1:
        return None
    n = round(math.log(a) / -math.log(q))
    for cand in (n - 1, n, n + 1):
        if cand >= 0 and a * q ** cand == 1:
            return cand
    return None


def _check_denominators(den, q, order, tower):
    """Reject any (b;q)_k == 0 within the summation range."""
    for b in den:
        if b == 0:
            continue
        if order is not None:
            qk = 1 + 0 * q
            for k in range(order):
                f = 1 - b * qk
                if f == 0 or (tower != EXACT and abs(f) <= 64 * scalar.eps(tower)):
                    raise DenominatorPole(f"denominator ({b};q)_{k + 1} vanishes")
                qk *= q
        elif b > 0 and b >= 1:
            j = round(math.log(scalar.to_float(b)) / -math.log(scalar.to_float(q)))
            for cand in (j - 1, j, j + 1):
                if cand >= 0 and abs(b * q ** cand - 1) <= 64 * scalar.eps(tower):
                    raise DenominatorPole(f"denominator parameter {b} equals q^-{cand}")


def _hyper_terms(num, den, q, z):
    e = 1 + len(den) - len(num)
    term = 1 + 0 * (q * z)
    qn = 1 + 0 * q
    yield term
    while True:
        ratio = z / (1 - qn * q)
        for b in den:
            ratio /= 1 - b * qn
        for a in num:
            ratio *= 1 - a * qn
        if e:
            ratio *= (-qn) ** e
        term = term * ratio
        qn *= q
        yield term


def phi_rs(spec: HyperSpec, policy: TruncationPolicy = DEFAULT_POLICY,
           keep_trace: bool = False) -> SeriesResult:
    """sum_n [(-1)^n q^{C(n,2)}]^{1+s-r} (num;q)_n / (den;q)_n z^n / (q;q)_n."""
    num, den, q, z = spec.num, spec.den, spec.q, spec.z
    tower = spec.tower
    order = spec.termination_order()
    if order is None:
        if tower == EXACT:
            raise ExactModeUnsupported("nonterminating series needs floating point")
        r, s = len(num), len(den)
        if z != 0:
            if r == s + 1 and abs(z) > 1 - policy.delta:
                raise DomainError(f"|z| = {scalar.to_float(abs(z)):.6g} exceeds 1 - delta")
            if r > s + 1:
                raise DomainError("nonterminating series with r > s + 1 diverges")
    _check_denominators(den, q, order if order is not None else None, tower)
    if tower == DOUBLE and not keep_trace:
        value, used, tail, status = kernels.impl.hyper_sum(
            [float(a) for a in num], [float(b) for b in den], float(q), float(z),
            effective_tol(policy, tower), policy.n_max, policy.patience,
            -1 if order is None else order)
        if status == kernels.POLE:
            raise DenominatorPole("denominator factor vanished during summation")
        if status != kernels.OK:
            raise NoConvergence("hypergeometric series did not converge", value, used)
        return SeriesResult(value, used, tail, True)
    if tower != EXACT:
        num = [scalar.convert(a, tower) for a in num]
        den = [scalar.convert(b, tower) for b in den]
        q = scalar.convert(q, tower)
        z = scalar.convert(z, tower)
    return sum_series(_hyper_terms(num, den, q, z), policy, bound=order,
                      keep_trace=keep_trace)


def phi(num, den, q, z, terminating=None, policy=DEFAULT_POLICY):
    """Value-only shorthand for :func:`phi_rs`."""
    return phi_rs(HyperSpec(num, den, q, z, terminating), policy).value
