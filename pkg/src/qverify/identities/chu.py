"""The q-Chu-Vandermonde sum and its two generalizations."""
from __future__ import annotations

import math

from ..config import DEFAULT_POLICY
from ..qcore import HyperSpec, SeriesResult, phi_rs, pinf, pinfs, qbinom
from ..qops import SevenPointFunc
from .base import INT, IdentityDef, Slot
from .common import (Violations, cauchy, diagonal_sum, draw, log10q, mod, poch,
                     poch_seq, qbase)

S = Slot


def _one(p):
    return 1 + 0 * p["q"]


def _chu_factor(p):
    """x^n (y/x)_n / (y)_n, written as p_n(x, y)/(y)_n so x = 0 is allowed."""
    n, x, y, q = p["n"], p["x"], p["y"], p["q"]
    return cauchy(n, x, y, q) / poch(y, q, n)


# -- CHU ----------------------------------------------------------------------------

def _chu_lhs(p, ctx):
    n, q = p["n"], p["q"]
    return phi_rs(HyperSpec((q ** (-n), p["x"]), (p["y"],), q, q, terminating=n),
                  ctx.policy, keep_trace=ctx.trace)


def _chu_rhs(p, ctx):
    return _chu_factor(p)


def _chu_validate(p, policy):
    v = Violations(p, policy).q(p["q"])
    v.poch_nonzero("y", p["y"], p["q"], p["n"])
    return v.result()


def _xy_sample(rng, exact, ints):
    q = qbase(rng, 0.2, 0.8, exact)
    return {"x": draw(rng, exact, 0.0, 2.0), "y": draw(rng, exact, 0.1, 2.0), "q": q}


def _n_dps(p):
    n = p["n"]
    return n * (n + 1) / 2 * log10q(p["q"]) + 10


# -- THM3_1 -------------------------------------------------------------------------

def _t31_lhs(p, ctx):
    n, x, y, q, u = p["n"], p["x"], p["y"], p["q"], p["u"]
    one = _one(p)
    total = 0 * one
    w = one
    qmn = q ** (-n)
    trace = [] if ctx.trace else None
    # the k-sum cancels heavily, so the inner series run to full precision
    inner_policy = ctx.policy.replace(rel_tol=0.0)
    for k in range(n + 1):
        inner = phi_rs(HyperSpec((p["r"], p["f"], p["g"]), (p["v"], p["w"]), q, u * q ** k),
                       inner_policy).value
        total = total + w * inner
        if trace is not None:
            trace.append(total)
        qk = q ** k
        w = w * (1 - qmn * qk) * (1 - x * qk) * q / ((1 - qk * q) * (1 - y * qk))
    if trace is not None:
        return SeriesResult(total, n + 1, 0 * total, True, trace)
    return total


def _t31_rhs(p, ctx):
    n, x, y, q, u = p["n"], p["x"], p["y"], p["q"], p["u"]
    one = _one(p)
    P = poch_seq((p["r"], p["f"], p["g"]), (p["v"], p["w"]), 1, q, one)
    A = poch_seq((q ** (1 - n) / y, q * x / y), (x * q ** (1 - n) / y, q), 1, q, one)
    B = poch_seq((), (q,), q / y, q, one)
    res = diagonal_sum(P, A, B, u, ctx.policy, keep_trace=ctx.trace)
    lead = _chu_factor(p)
    return SeriesResult(lead * res.value, res.terms_used, abs(lead) * res.tail_estimate,
                        True, [lead * t for t in res.trace] if res.trace else None)


def _t31_validate(p, policy):
    n, x, y, q, u = p["n"], p["x"], p["y"], p["q"], p["u"]
    v = Violations(p, policy).q(q).nonzero("y", y)
    if y == 0:
        return v.result()
    v.poch_nonzero("y", y, q, n)
    v.below_one("u", u).below_one("uq/y", u * q / y)
    v.never_qpow("x q^(1-n)/y", x * q ** (1 - n) / y, q)
    for name in ("v", "w"):
        v.never_qpow(name, p[name], q)
    return v.result()


def _t31_sample(rng, exact, ints):
    out = {k: mod(rng, 0.05, 0.5) for k in ("r", "f", "g", "v", "w")}
    q = qbase(rng, 0.3, 0.75)
    y = mod(rng, 0.3, 1.5)
    out.update(x=mod(rng, 0.05, 1.0), y=y, q=q,
               u=mod(rng, 0.0, 0.5 * min(1.0, abs(y) / q)))
    return out


# -- THM3_2 -------------------------------------------------------------------------

def _t32_lhs(p, ctx):
    n, m, q = p["n"], p["m"], p["q"]
    return phi_rs(HyperSpec((q ** (-n), p["x"]), (p["y"],), q, q ** (1 + m), terminating=n),
                  ctx.policy, keep_trace=ctx.trace)


def _t32_rhs(p, ctx):
    n, m, x, y, q = p["n"], p["m"], p["x"], p["y"], p["q"]
    one = _one(p)
    total = 0 * one
    for j in range(m + 1):
        l = m - j
        total = total + (qbinom(m, j, q) * poch(q ** (1 - n) / y, q, l) * poch(q * x / y, q, l)
                         / poch(x * q ** (1 - n) / y, q, l) * (q / y) ** j)
    return _chu_factor(p) * total


def _t32_validate(p, policy):
    n, m, x, y, q = p["n"], p["m"], p["x"], p["y"], p["q"]
    v = Violations(p, policy).q(q).nonzero("y", y)
    if y == 0:
        return v.result()
    v.poch_nonzero("y", y, q, n)
    v.poch_nonzero("x q^(1-n)/y", x * q ** (1 - n) / y, q, m)
    return v.result()


# -- REMARK3 ------------------------------------------------------------------------

def _r3_lhs(p, ctx):
    m, y, q = p["m"], p["y"], p["q"]
    total = 0 * _one(p)
    for j in range(m + 1):
        total = total + qbinom(m, j, q) * poch(q / y, q, m - j) * (q / y) ** j
    return total


def _r3_rhs(p, ctx):
    return _one(p)


def _r3_validate(p, policy):
    return Violations(p, policy).q(p["q"]).nonzero("y", p["y"]).result()


def _y_sample(rng, exact, ints):
    return {"y": draw(rng, exact, 0.1, 2.0), "q": qbase(rng, 0.2, 0.8, exact)}


def _r3_dps(p):
    m = p["m"]
    big = max(1.0, abs(float(p["q"] / p["y"])))
    return m * (m - 1) / 2 * log10q(p["q"]) + 2 * m * math.log10(big) + 10


# -- the seven-variable function G used with difference equation I ------------------

def function_G(n, y, q, policy=None):
    """(-1)^n y^n q^C(n,2)/(y)_n (x q^{1-n}/y)_inf/(x, qx/y)_inf times
    sum_{j,i} (r,f,g)_{j+i} u^{j+i}/((q)_i (v,w)_{j+i})
    (q^{1-n}/y, qx/y)_j/(x q^{1-n}/y, q)_j (q/y)^i, as f(r, f, g, v, w, x, u)."""
    pol = policy or DEFAULT_POLICY

    def ev(r, f, g, v, w, x, u):
        one = 1 + 0 * q
        P = poch_seq((r, f, g), (v, w), 1, q, one)
        A = poch_seq((q ** (1 - n) / y, q * x / y), (x * q ** (1 - n) / y, q), 1, q, one)
        B = poch_seq((), (q,), q / y, q, one)
        s = diagonal_sum(P, A, B, u, pol).value
        lead = (-1) ** n * y ** n * q ** (n * (n - 1) // 2) / poch(y, q, n)
        return lead * pinf(x * q ** (1 - n) / y, q, pol) / pinfs((x, q * x / y), q, pol) * s
    return SevenPointFunc(ev, "G")


def entries() -> list:
    family = "q-Chu-Vandermonde"
    return [
        IdentityDef(
            "CHU", "q-Chu-Vandermonde sum 2Phi1[q^-n, x; y; q, q]",
            "q-Chu-Vandermonde summation formula is recalled",
            (S("n", INT, 0, 30), S("x"), S("y"), S("q")), _chu_lhs, _chu_rhs,
            _chu_validate, _xy_sample, exact_capable=True, default_tol=1e-10,
            engine="mp", lhs_dps=_n_dps, family=family),
        IdentityDef(
            "THM3_1", "q-Chu-Vandermonde with a 3Phi2[r,f,g; v,w; q, uq^k] weight",
            "The following assertion holds true for y ≠ 0",
            (S("n", INT, 0, 8), S("x"), S("y"), S("r"), S("f"), S("g"), S("v"), S("w"),
             S("u"), S("q")),
            _t31_lhs, _t31_rhs, _t31_validate, _t31_sample, default_tol=1e-8,
            engine="mp", lhs_dps=_n_dps, rhs_dps=_n_dps, family=family),
        IdentityDef(
            "THM3_2", "2Phi1[q^-n, x; y; q, q^{1+m}] as a finite sum",
            "For m∈N_0 and y≠0",
            (S("n", INT, 0, 10), S("m", INT, 0, 10), S("x"), S("y"), S("q")),
            _t32_lhs, _t32_rhs, _t32_validate, _xy_sample, exact_capable=True,
            default_tol=1e-10, engine="mp", lhs_dps=_n_dps, rhs_dps=_n_dps, family=family),
        IdentityDef(
            "REMARK3", "sum_j [m j] (q/y)_{m-j} (q/y)^j = 1",
            "reduces to the following identity",
            (S("m", INT, 0, 20), S("y"), S("q")), _r3_lhs, _r3_rhs, _r3_validate,
            _y_sample, exact_capable=True, default_tol=1e-10, engine="mp",
            lhs_dps=_r3_dps, family=family),
    ]
