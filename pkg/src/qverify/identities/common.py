"""Shared helpers for registry entries: domain checks, random draws and the
diagonal double sums that appear on both sides of the generalized theorems.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .. import scalar
from ..qcore import SeriesResult, poch_finite, sum_series


class Violations:
    """Collects violated constraints.  The safety margin delta applies to
    modulus constraints in float mode only."""

    def __init__(self, params, policy):
        self.exact = any(isinstance(v, Fraction) for v in params.values())
        self.bound = 1 if self.exact else 1 - policy.delta
        self.policy = policy
        self.items: list[str] = []

    def q(self, q):
        if not 0 < q < 1:
            self.items.append("0 < q < 1")
        elif not self.exact and q > self.policy.q_max:
            self.items.append(f"q <= {self.policy.q_max}")
        return self

    def below_one(self, label, value):
        if abs(value) >= self.bound:
            self.items.append(f"|{label}| < 1")
        return self

    def nonzero(self, label, value):
        if value == 0:
            self.items.append(f"{label} != 0")
        return self

    def poch_nonzero(self, label, b, q, n):
        """(b; q)_n != 0, i.e. b q^k != 1 for k < n."""
        qk = 1
        for k in range(n):
            f = 1 - b * qk
            if f == 0 or (not self.exact and abs(f) < 1e-9):
                self.items.append(f"({label}; q)_{n} != 0")
                return self
            qk = qk * q
        return self

    def never_qpow(self, label, b, q, kmax=200):
        """b q^k != 1 for every k >= 0 (nonterminating denominators)."""
        if b == 0 or abs(b) < 1 - 1e-12:
            return self
        return self.poch_nonzero(label, b, q, kmax)

    def result(self):
        return list(self.items)


# -- random draws ---------------------------------------------------------------

def mod(rng, lo, hi, signed=True):
    """A float with modulus uniform in [lo, hi] and random sign."""
    v = rng.uniform(lo, hi)
    return -v if signed and rng.random() < 0.5 else v


def rat(rng, lo, hi, den_max=9, signed=True):
    """A small rational with modulus in [lo, hi] (denominator <= den_max)."""
    for _ in range(1000):
        d = rng.randint(1, den_max)
        n = rng.randint(max(1, math.ceil(lo * d)), max(1, math.floor(hi * d)))
        v = Fraction(n, d)
        if lo <= v <= hi:
            return -v if signed and rng.random() < 0.5 else v
    return Fraction(hi) if hi else Fraction(0)


def qbase(rng, lo, hi, exact=False):
    if exact:
        for _ in range(1000):
            d = rng.randint(2, 9)
            n = rng.randint(1, d - 1)
            v = Fraction(n, d)
            if lo <= v <= hi:
                return v
        return Fraction(1, 2)
    return rng.uniform(lo, hi)


def draw(rng, exact, lo, hi, signed=True):
    return rat(rng, lo, hi, signed=signed) if exact else mod(rng, lo, hi, signed)


# -- lazily extended term sequences -----------------------------------------------

class Seq:
    """a_0, a_1, ... from a first value and a ratio rule a_{k+1} = a_k * ratio(k)."""

    def __init__(self, first, ratio):
        self.values = [first]
        self.ratio = ratio

    def __getitem__(self, k):
        vals = self.values
        while len(vals) <= k:
            n = len(vals) - 1
            vals.append(vals[-1] * self.ratio(n))
        return vals[k]


def poch_seq(num, den, z, q, one):
    """(num; q)_k / (den; q)_k z^k."""
    def ratio(k, num=tuple(num), den=tuple(den)):
        qk = q ** k
        r = z
        for a in num:
            r = r * (1 - a * qk)
        for b in den:
            r = r / (1 - b * qk)
        return r
    return Seq(one, ratio)


def gauss_seq(z, q, one):
    """q^{C(i,2)} z^i / (q; q)_i."""
    return Seq(one, lambda i: z * q ** i / (1 - q ** (i + 1)))


def diagonal_block(P, A, B, m):
    """P_m * sum_{j+i=m} A_j B_i."""
    acc = 0 * P[0]
    for j in range(m + 1):
        acc = acc + A[j] * B[m - j]
    return P[m] * acc


def diagonal_sum(P, A, B, z, policy, keep_trace=False) -> SeriesResult:
    """sum_{m>=0} z^m P_m sum_{j+i=m} A_j B_i, cut by the truncation policy."""
    def blocks():
        zm = 1 + 0 * z
        m = 0
        while True:
            yield zm * diagonal_block(P, A, B, m)
            zm = zm * z
            m += 1
    return sum_series(blocks(), policy, keep_trace=keep_trace)


def cauchy(n, x, y, q):
    """p_n(x, y) = prod_{k<n} (x - q^k y) = (y/x; q)_n x^n."""
    p = 1 + 0 * (x * y * q)
    qk = 1 + 0 * q
    for _ in range(n):
        p = p * (x - qk * y)
        qk = qk * q
    return p


def log10q(q):
    return math.log10(1.0 / scalar.to_float(q))


def chu_weights(n, ax, y, q, one):
    """(q^-n, ax; q)_k q^k / (y, q; q)_k for k = 0..n."""
    out = [one]
    qmn = q ** (-n)
    for k in range(n):
        qk = q ** k
        out.append(out[-1] * (1 - qmn * qk) * (1 - ax * qk) * q / ((1 - y * qk) * (1 - qk * q)))
    return out


def poch(a, q, n):
    return poch_finite(a, q, n)
