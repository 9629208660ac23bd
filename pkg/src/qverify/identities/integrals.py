"""Andrews-Askey integral and its terminating generalizations."""
from __future__ import annotations

from ..qcore import HyperSpec, phi_rs, pinfs
from ..qintegral import aa_function, aa_rhs, jackson_integral
from .base import INT, IdentityDef, Slot
from .common import Violations, log10q, mod, qbase

S = Slot
ABCD = ("a", "b", "c", "d")
MOD = 0.8          # largest of |ac|, |ad|, |bc|, |bd| drawn by the samplers


def _params(p):
    return tuple(p[k] for k in ABCD)


def _lhs(weight=None):
    def lhs(p, ctx):
        w = None if weight is None else weight(p)
        f = aa_function(_params(p), p["q"], w, ctx.policy)
        return jackson_integral(f, p["c"], p["d"], p["q"], ctx.policy)
    return lhs


def _base_violations(p, policy):
    a, b, c, d, q = _params(p) + (p["q"],)
    v = Violations(p, policy).q(q).nonzero("c", c).nonzero("d", d)
    for label, val in (("ac", a * c), ("ad", a * d), ("bc", b * c), ("bd", b * d)):
        v.below_one(label, val)
    return v


def _draw_abcd(rng, q, moduli=MOD, b_floor=0.0):
    c = mod(rng, 0.2, 1.5)
    d = mod(rng, 0.2, 1.5)
    big = max(abs(c), abs(d))
    a = mod(rng, 0.0, moduli / big)
    b = mod(rng, min(b_floor, moduli / big), moduli / big)
    return {"a": a, "b": b, "c": c, "d": d}


# -- AA -------------------------------------------------------------------------------

def _aa_rhs(p, ctx):
    return aa_rhs(_params(p), p["q"], ctx.policy)


def _aa_validate(p, policy):
    return _base_violations(p, policy).result()


def _aa_sample(rng, exact, ints):
    q = qbase(rng, 0.3, 0.8)
    out = _draw_abcd(rng, q)
    if rng.random() < 0.1:
        # degenerate endpoint c = qd: both sides vanish
        out["c"] = q * out["d"]
    out["q"] = q
    return out


# -- PROP4_2a / PROP4_2b -------------------------------------------------------------------

def _prop_a_rhs(p, ctx):
    a, b, c, d, q, w, v, N = _params(p) + (p["q"], p["w"], p["v"], p["N"])
    r = q ** (-N)
    pol = ctx.policy
    extra = pinfs((q * w / v, q * r / v), q, pol) / pinfs((q * w * r / v, q / v), q, pol)
    series = phi_rs(HyperSpec((w, r), (v,), q, q / (b * c), terminating=N), pol).value
    return aa_rhs(_params(p), q, pol) * extra * series


def _prop_a_validate(p, policy):
    q, w, v, N = p["q"], p["w"], p["v"], p["N"]
    viol = _base_violations(p, policy).nonzero("v", v).nonzero("b", p["b"])
    if v == 0:
        return viol.result()
    r = q ** (-N)
    viol.below_one("qwr/v", q * w * r / v).below_one("q/v", q / v)
    viol.poch_nonzero("ac", p["a"] * p["c"], q, N)
    viol.poch_nonzero("qwr/v", q * w * r / v, q, N)
    viol.poch_nonzero("v", v, q, N)
    return viol.result()


def _prop_a_sample(rng, exact, ints):
    q = qbase(rng, 0.3, 0.8)
    out = _draw_abcd(rng, q, b_floor=0.05)
    N = ints["N"]
    w = mod(rng, 0.05, 0.9)
    need = max(q, q * abs(w) * q ** (-N)) / 0.85
    out.update(q=q, w=w, v=mod(rng, need, 2 * need))
    return out


def _prop_b_rhs(p, ctx):
    a, b, c, d, q, w, v, N = _params(p) + (p["q"], p["w"], p["v"], p["N"])
    r = q ** (-N)
    pol = ctx.policy
    extra = pinfs((v / (w * r), v), q, pol) / pinfs((v / w, v / r), q, pol)
    series = phi_rs(HyperSpec((w, r), (v,), q, v * b * c / (w * r), terminating=N), pol).value
    return aa_rhs(_params(p), q, pol) * extra * series


def _prop_b_validate(p, policy):
    q, w, v, N = p["q"], p["w"], p["v"], p["N"]
    viol = _base_violations(p, policy).nonzero("w", w).nonzero("a", p["a"])
    if w == 0:
        return viol.result()
    r = q ** (-N)
    viol.below_one("v/w", v / w).below_one("v/r", v / r)
    viol.poch_nonzero("v", v, q, N)
    viol.poch_nonzero("qrw/v", q * r * w / v if v else 0, q, N)
    viol.nonzero("v", v)
    return viol.result()


def _prop_b_sample(rng, exact, ints):
    q = qbase(rng, 0.3, 0.8)
    out = _draw_abcd(rng, q)
    if out["a"] == 0:
        out["a"] = 0.1
    w = mod(rng, 0.3, 1.5)
    out.update(q=q, w=w, v=mod(rng, 0.05, 0.8 * abs(w)))
    return out


# -- THM4_3 / THM4_4 --------------------------------------------------------------------------

def _fgvw(p):
    return (p["f"], p["g"], p["v"], p["w"], p["M"])


def _t43_rhs(p, ctx):
    q, M = p["q"], p["M"]
    r = q ** (-M)
    series = phi_rs(HyperSpec((r, p["f"], p["g"]), (p["v"], p["w"]), q, q / (p["b"] * p["c"]),
                              terminating=M), ctx.policy).value
    return aa_rhs(_params(p), q, ctx.policy) * series


def _t44_rhs(p, ctx):
    q, M = p["q"], p["M"]
    r = q ** (-M)
    z = p["v"] * p["w"] * p["b"] * p["c"] / (r * p["f"] * p["g"])
    series = phi_rs(HyperSpec((r, p["f"], p["g"]), (p["v"], p["w"], 0 * q), q, z,
                              terminating=M), ctx.policy).value
    return aa_rhs(_params(p), q, ctx.policy) * series


def _t4_validate(which):
    def validate(p, policy):
        q, M = p["q"], p["M"]
        viol = _base_violations(p, policy)
        if which == "T":
            viol.nonzero("b", p["b"])
            if p["b"] != 0:
                viol.below_one("q/(bc)", q / (p["b"] * p["c"]))
            viol.poch_nonzero("ac", p["a"] * p["c"], q, M)
        else:
            viol.nonzero("f", p["f"]).nonzero("g", p["g"]).nonzero("a", p["a"])
        for name in ("v", "w"):
            viol.poch_nonzero(name, p[name], q, M)
        return viol.result()
    return validate


def _t43_sample(rng, exact, ints):
    q = qbase(rng, 0.3, 0.6)
    c = mod(rng, 0.5, 1.2)
    d = mod(rng, 0.5, 1.2)
    big = max(abs(c), abs(d))
    lo_b = q / (0.9 * abs(c))
    hi_b = MOD / big
    b = mod(rng, lo_b, max(hi_b, lo_b * 1.01))
    a = mod(rng, 0.0, MOD / big)
    out = {"a": a, "b": b, "c": c, "d": d, "q": q}
    out.update({k: mod(rng, 0.05, 0.9) for k in ("f", "g", "v", "w")})
    return out


def _t44_sample(rng, exact, ints):
    q = qbase(rng, 0.3, 0.8)
    out = _draw_abcd(rng, q)
    if out["a"] == 0:
        out["a"] = 0.1
    out["q"] = q
    out.update(f=mod(rng, 0.2, 0.9), g=mod(rng, 0.2, 0.9),
               v=mod(rng, 0.05, 0.9), w=mod(rng, 0.05, 0.9))
    return out


def _int_dps(slot):
    def hint(p):
        n = p[slot]
        return n * (n + 1) / 2 * log10q(p["q"]) + 5
    return hint


def entries() -> list:
    family = "q-integrals"
    abcd = tuple(S(k) for k in ABCD)
    q = (S("q"),)
    wv = (S("w"), S("v"))
    fgvw = (S("f"), S("g"), S("v"), S("w"))
    return [
        IdentityDef(
            "AA", "Andrews-Askey integral",
            "known as the Andrews-Askey integral",
            abcd + q, _lhs(), _aa_rhs, _aa_validate, _aa_sample,
            default_tol=1e-9, abs_tol=1e-12, family=family,
            notes="c = qd makes both sides vanish; judged at absolute 1e-12"),
        IdentityDef(
            "PROP4_2a", "Andrews-Askey integral with a terminating 4Phi2 weight",
            "For N∈N and r=q^{-N}",
            (S("N", INT, 1, 8, draw_hi=6),) + abcd + wv + q,
            _lhs(lambda p: ("prop_a", (p["w"], p["v"], p["N"]))), _prop_a_rhs,
            _prop_a_validate, _prop_a_sample, default_tol=1e-7, family=family,
            lhs_dps=_int_dps("N"), rhs_dps=_int_dps("N")),
        IdentityDef(
            "PROP4_2b", "Andrews-Askey integral with a balanced terminating weight at argument q",
            "For N∈N and r=q^{-N}",
            (S("N", INT, 1, 8, draw_hi=6),) + abcd + wv + q,
            _lhs(lambda p: ("prop_b", (p["w"], p["v"], p["N"]))), _prop_b_rhs,
            _prop_b_validate, _prop_b_sample, default_tol=1e-7, family=family,
            lhs_dps=_int_dps("N"), rhs_dps=_int_dps("N"),
            notes="weight summed as 4Phi3[r,w,c/t,q/(ad); q/(at), qrw/v, 0; q, q]"),
        IdentityDef(
            "THM4_3", "Andrews-Askey integral with a k-sum of 3Phi2 weights",
            "For M∈N and r=q^{-M}",
            (S("M", INT, 1, 8, draw_hi=6),) + abcd + fgvw + q,
            _lhs(lambda p: ("t_sum", _fgvw(p))), _t43_rhs,
            _t4_validate("T"), _t43_sample, default_tol=1e-7, family=family,
            lhs_dps=_int_dps("M"), rhs_dps=_int_dps("M"),
            grid={"M": (1, 2, 3, 4)}),
        IdentityDef(
            "THM4_4", "Andrews-Askey integral with a k-sum of 3Phi3 weights",
            "max{|ac|,|ad|,|bc|,|bd|}<1",
            (S("M", INT, 1, 8, draw_hi=6),) + abcd + fgvw + q,
            _lhs(lambda p: ("e_sum", _fgvw(p))), _t44_rhs,
            _t4_validate("E"), _t44_sample, default_tol=1e-7, family=family,
            lhs_dps=_int_dps("M"), rhs_dps=_int_dps("M"),
            grid={"M": (1, 2, 3, 4)},
            notes="inner 3Phi3 argument +vw/(rfg)"),
    ]
