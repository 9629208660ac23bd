"""Generalizations of the q-binomial theorem built on the T/E operators.

Notation shared by the entries below (all Pochhammers in base q):

    P_m    = (r, f, g)_m / (v, w)_m
    ST_k   = sum_{j,i} P_{j+i} u^{j+i} (c/b, a x q^k)_j / (cx, q)_j b^j (a q^k)^i / (q)_i
    SE_k   = sum_{j,i} P_{j+i} (uc)^{j+i} (-1)^j (b q^-k / a, q/(cx))_j
                 / (q^{1-k}/(ax), q)_j  q^{C(i,2)} / (q)_i

The E-side sums use the sign (-1)^j and the parameter b q^-k / a; these are
the forms that agree with a brute-force application of the E operator.
"""
from __future__ import annotations

import math

from mpmath import mp

from .. import qops
from ..config import DEFAULT_POLICY
from ..errors import NoConvergence
from ..qcore import SeriesResult, pinf, pinfs, sum_series
from ..qops import SevenPointFunc
from ..scalar import MP
from .base import INT, IdentityDef, Slot
from .common import (Violations, cauchy, chu_weights, diagonal_block,
                     diagonal_sum, gauss_seq, log10q, mod, poch_seq, qbase)

S = Slot
TRUNCATION = 25
EXTENDED_TRUNCATION = 40   # retried when the order-25 tail does not certify
OP = ("r", "f", "g", "v", "w", "u")
BOX = 0.5
X_BOX = 0.2          # |x| (and |u| in THM2_1a) bound for the triple sums of THM2_1


def _one(p):
    return 1 + 0 * p["q"]


def _P(p):
    return poch_seq((p["r"], p["f"], p["g"]), (p["v"], p["w"]), 1, p["q"], _one(p))


class _Sums:
    """Per-evaluation cache of the inner double sums ST_k / SE_k."""

    def __init__(self, p, ctx, side):
        self.p, self.ctx, self.side = p, ctx, side
        self.P = _P(p)
        self.cache = {}
        # the k-sums that consume these values cancel heavily, so each
        # inner sum is carried to the full working precision
        self.inner = ctx.policy.replace(rel_tol=0.0)

    def _ab(self, k):
        p = self.p
        a, b, c, x, q = p["a"], p["b"], p["c"], p["x"], p["q"]
        one = _one(p)
        qk = q ** k
        if self.side == "T":
            A = poch_seq((c / b, a * x * qk), (c * x, q), b, q, one)
            B = poch_seq((), (q,), a * qk, q, one)
            return A, B, p["u"]
        A = poch_seq((b / (a * qk), q / (c * x)), (q / (a * x * qk), q), -1, q, one)
        B = gauss_seq(one, q, one)
        return A, B, p["u"] * c

    def value(self, k):
        if k not in self.cache:
            A, B, z = self._ab(k)
            self.cache[k] = diagonal_sum(self.P, A, B, z, self.inner).value
        return self.cache[k]

    def coefficient(self, k, m):
        key = (k, m)
        if key not in self.cache:
            A, B, z = self._ab(k)
            self.cache[key] = z ** m * diagonal_block(self.P, A, B, m)
        return self.cache[key]


def _outer_terms(p, inner):
    """(a)_n a^-n/(q)_n sum_{k<=n} (q^-n, ax)_k q^k/(q)_k inner(k)."""
    a, x, q = p["a"], p["x"], p["q"]
    one = _one(p)
    w = one
    n = 0
    while True:
        ks = chu_weights(n, a * x, 0 * q, q, one)
        acc = 0 * one
        for k, c in enumerate(ks):
            acc = acc + c * inner(k)
        yield w * acc
        w = w * (1 - a * q ** n) / (a * (1 - q ** (n + 1)))
        n += 1


# -- THM2_1a ------------------------------------------------------------------------

def _t21a_lhs(p, ctx):
    sums = _Sums(p, ctx, "T")
    return sum_series(_outer_terms(p, sums.value), ctx.policy, keep_trace=ctx.trace)


def _t21a_rhs(p, ctx):
    a, b, c, x, q = p["a"], p["b"], p["c"], p["x"], p["q"]
    one = _one(p)
    A = poch_seq((c / b, x), (c * x, q), b, q, one)
    B = poch_seq((), (q,), one, q, one)
    res = diagonal_sum(_P(p), A, B, p["u"], ctx.policy, keep_trace=ctx.trace)
    pre = pinf(a * x, q, ctx.policy) / pinf(x, q, ctx.policy)
    return SeriesResult(pre * res.value, res.terms_used, abs(pre) * res.tail_estimate,
                        True, [pre * t for t in res.trace] if res.trace else None)


def _outer_dps(p, ratio):
    """Cancellation estimate for the q^-n weighted inner sums."""
    lq = log10q(p["q"])
    r = min(abs(float(ratio)), 0.95)
    n = int(14 / max(math.log10(1 / r), 0.02)) + 6 if r > 0 else 6
    n = min(n, 400)
    ax = max(abs(float(p["a"] * p["x"])), 1e-6)
    return n * (n + 1) / 2 * lq + n * math.log10(1 / min(ax, 1.0)) + 10


def _t21_validate(p, policy, corrected_e=False):
    a, b, c, x, q, u = p["a"], p["b"], p["c"], p["x"], p["q"], p["u"]
    v = Violations(p, policy).q(q)
    v.nonzero("a", a).nonzero("b", b).nonzero("c", c).nonzero("x", x)
    v.below_one("x", x).below_one("b", b).below_one("u", u).below_one("cu", c * u)
    v.below_one("ax", a * x).below_one("cx", c * x)
    for name in ("v", "w"):
        v.never_qpow(name, p[name], q)
    v.never_qpow("cx", c * x, q)
    return v.result()


def _t21a_sample(rng, exact, ints):
    # the outer n-sum decays like max(|x|, |u|)^n and loses about
    # C(n,2) log10(1/q) digits to cancellation, so x, u, a and q are kept
    # where n stays small
    out = {k: mod(rng, 0.05, BOX) for k in OP}
    out.update(a=mod(rng, 0.3, BOX), b=mod(rng, 0.05, BOX), c=mod(rng, 0.05, BOX),
               x=mod(rng, 0.05, X_BOX), u=mod(rng, 0.05, X_BOX), q=qbase(rng, 0.5, 0.75))
    return out


# -- THM2_1b (coefficientwise in u) ---------------------------------------------------

def _t21b_lhs(p, ctx):
    """Outer sums of the u-polynomial sum_{m<=order} (uc)^m [SE_k]_m."""
    sums = _Sums(p, ctx, "E")
    order = p["order"]

    def poly(k):
        acc = 0
        for m in range(order + 1):
            acc = acc + sums.coefficient(k, m)
        return acc
    return sum_series(_outer_terms(p, poly), ctx.policy, keep_trace=ctx.trace)


def _t21b_rhs(p, ctx):
    a, b, c, x, q = p["a"], p["b"], p["c"], p["x"], p["q"]
    one = _one(p)
    A = poch_seq((b, q / (c * x)), (q / x, q), -1, q, one)
    B = gauss_seq(one, q, one)
    P = _P(p)
    z = c * p["u"]
    total = 0 * one
    for m in range(p["order"] + 1):
        total = total + z ** m * diagonal_block(P, A, B, m)
    pre = pinf(a * x, q, ctx.policy) / pinf(x, q, ctx.policy)
    return pre * total


def _t21b_validate(p, policy):
    v = _t21_validate(p, policy)
    q, x = p["q"], p["x"]
    if abs(x) >= q ** p["order"]:
        v.append(f"|x| < q^{p['order']} (u-coefficient of order {p['order']} converges)")
    return v


def _t21b_sample(rng, exact, ints):
    out = _t21a_sample(rng, exact, ints)
    out["x"] = mod(rng, 0.05, X_BOX) * out["q"] ** ints["order"]
    return out


# -- THM2_2 / COR2_3 -------------------------------------------------------------------

def _kernel(p, side, roots):
    a, b, c, q = p["a"], p["b"], p["c"], p["q"]
    if side == "T":
        return qops.ProductKernel((c,), (a, b), q, roots=roots, label="p_n (cx)/(ax,bx)")
    return qops.ProductKernel((b, c), (a,), q, roots=roots, label="p_n (bx,cx)/(ax)")


def _roots(p, with_y):
    n, q = p["n"], p["q"]
    if not with_y:
        return [0 * q] * n
    return [q ** k * p["y"] / p["a"] for k in range(n)]


def _gen_lhs(side, with_y):
    def apply(p, ctx, order):
        op = qops.OperatorSpec(side, p["r"], p["f"], p["g"], p["v"], p["w"], p["u"], order)
        kernel = _kernel(p, side, _roots(p, with_y))
        return qops.operator_apply_bruteforce(op, kernel, p["x"], p["q"], ctx.policy)

    def lhs(p, ctx):
        try:
            return apply(p, ctx, TRUNCATION)
        except NoConvergence:
            if ctx.tower != MP:
                raise
        # the longer difference table needs the extra digits it cancels
        extra = (qops.bruteforce_dps(side, p["x"], p["q"], EXTENDED_TRUNCATION, digits=0)
                 - qops.bruteforce_dps(side, p["x"], p["q"], TRUNCATION, digits=0))
        with mp.workdps(mp.dps + max(int(extra), 0)):
            res = apply(p, ctx, EXTENDED_TRUNCATION)
        return res
    return lhs


def _gen_rhs(side, with_y):
    def rhs(p, ctx):
        a, b, c, x, q, n = p["a"], p["b"], p["c"], p["x"], p["q"], p["n"]
        y = p["y"] if with_y else 0 * q
        one = _one(p)
        sums = _Sums(p, ctx, side)
        ks = chu_weights(n, a * x, y, q, one)
        acc = 0 * one
        for k, w in enumerate(ks):
            acc = acc + w * sums.value(k)
        if side == "T":
            pre = pinf(c * x, q, ctx.policy) / pinfs((a * x, b * x), q, ctx.policy)
        else:
            pre = pinfs((b * x, c * x), q, ctx.policy) / pinf(a * x, q, ctx.policy)
        lead = 1 + 0 * q
        for k in range(n):
            lead = lead * (1 - y * q ** k)
        return lead / a ** n * pre * acc
    return rhs


def _gen_validate(side, with_y):
    def validate(p, policy):
        a, b, c, x, q, u = p["a"], p["b"], p["c"], p["x"], p["q"], p["u"]
        v = Violations(p, policy).q(q)
        v.nonzero("a", a).nonzero("b", b).nonzero("c", c).nonzero("x", x)
        v.below_one("ax", a * x).below_one("bx", b * x).below_one("cx", c * x)
        v.below_one("u", u)
        if side == "E":
            v.below_one("cu", c * u)
        else:
            v.below_one("b", b)
        if with_y:
            v.poch_nonzero("y", p["y"], q, p["n"])
        for name in ("v", "w"):
            v.poch_nonzero(name, p[name], q, EXTENDED_TRUNCATION)
            v.never_qpow(name, p[name], q)
        v.never_qpow("cx", c * x, q)
        return v.result()
    return validate


def _gen_sample(with_y):
    def sample(rng, exact, ints):
        out = {k: mod(rng, 0.05, BOX) for k in OP}
        out.update(a=mod(rng, 0.1, BOX), b=mod(rng, 0.05, BOX), c=mod(rng, 0.05, BOX),
                   x=mod(rng, 0.1, BOX), q=qbase(rng, 0.4, 0.75))
        if with_y:
            out["y"] = mod(rng, 0.05, BOX)
        return out
    return sample


def _gen_dps(side):
    def hint(p):
        base = qops.bruteforce_dps(side, p["x"], p["q"], TRUNCATION, digits=0)
        return base + p["n"] * (p["n"] + 1) / 2 * log10q(p["q"])
    return hint


def _rhs_dps(p):
    return p["n"] * (p["n"] + 1) / 2 * log10q(p["q"]) + 10


# -- the seven-variable function used with difference equation I ------------------------

def function_F(b, c, q, policy=None):
    """(cx)/(bx, x) sum_{j,i} (r,f,g)_{j+i} u^{j+i}/((q)_i (v,w)_{j+i})
    (c/b, x)_j/(cx, q)_j b^j, as f(r, f, g, v, w, x, u)."""
    pol = policy or DEFAULT_POLICY

    def ev(r, f, g, v, w, x, u):
        p = {"r": r, "f": f, "g": g, "v": v, "w": w, "u": u, "q": q}
        one = _one(p)
        A = poch_seq((c / b, x), (c * x, q), b, q, one)
        B = poch_seq((), (q,), one, q, one)
        s = diagonal_sum(_P(p), A, B, u, pol).value
        return pinf(c * x, q, pol) / pinfs((b * x, x), q, pol) * s
    return SevenPointFunc(ev, "F")


def entries() -> list:
    family = "generalized q-binomial"
    op_slots = tuple(S(k) for k in OP)
    abcx = (S("a"), S("b"), S("c"), S("x"))
    q = (S("q"),)
    n_slot = (S("n", INT, 0, 5),)
    out = [
        IdentityDef(
            "THM2_1a", "T-type generalization of the q-binomial theorem (triple sum)",
            "(r,f,g;q)_{j+i} u^{j+i}",
            abcx + op_slots + q, _t21a_lhs, _t21a_rhs, _t21_validate, _t21a_sample,
            default_tol=1e-8, engine="mp",
            lhs_dps=lambda p: _outer_dps(p, max(abs(p["x"]), abs(p["u"]))), family=family,
            notes="sampler box: all free moduli <= 0.5"),
        IdentityDef(
            "THM2_1b", "E-type generalization of the q-binomial theorem, coefficientwise in u",
            "(r,f,g;q)_{j+i} u^{j+i}",
            abcx + op_slots + q + (S("order", INT, 0, 3),),
            _t21b_lhs, _t21b_rhs, _t21b_validate, _t21b_sample,
            default_tol=1e-8, engine="mp",
            lhs_dps=lambda p: _outer_dps(p, p["x"] / p["q"] ** p["order"]), family=family,
            notes="left side diverges for u != 0; both sides are compared as polynomials "
                  "in u truncated at degree 'order' (corrected right side)"),
    ]
    for side, suffix, op in (("T", "a", "T(r,f,g,v,w,uD_x)"), ("E", "b", "E(r,f,g,v,w,u theta_x)")):
        out.append(IdentityDef(
            f"THM2_2{suffix}", f"{op} on p_n(x,y/a) times products, with (y)_n/a^n prefactor",
            "(y;q)_n/a^n",
            n_slot + abcx + (S("y"),) + op_slots + q,
            _gen_lhs(side, True), _gen_rhs(side, True), _gen_validate(side, True),
            _gen_sample(True), default_tol=1e-8, engine="mp",
            lhs_dps=_gen_dps(side), rhs_dps=_rhs_dps, family=family,
            notes="" if side == "T" else "right side uses the k-sum with corrected E-side sums"))
    for side, suffix, op in (("T", "a", "T(r,f,g,v,w,uD_x)"), ("E", "b", "E(r,f,g,v,w,u theta_x)")):
        out.append(IdentityDef(
            f"COR2_3{suffix}", f"{op} on x^n times products",
            "max{|ax|,|bx|,|cx|,|cu|}<1",
            n_slot + abcx + op_slots + q,
            _gen_lhs(side, False), _gen_rhs(side, False), _gen_validate(side, False),
            _gen_sample(False), default_tol=1e-8, engine="mp",
            lhs_dps=_gen_dps(side), rhs_dps=_rhs_dps, family=family,
            notes="" if side == "T" else "corrected E-side sums"))
    return out
