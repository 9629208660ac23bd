"""Operator identities: the T/E series applied by brute force (difference
tables on the q-lattice) against the closed double sums."""
from __future__ import annotations

from .. import qops
from .base import IdentityDef, Slot
from .common import Violations, mod, qbase

S = Slot
TRUNCATION = 25
BOX = 0.25          # every free modulus is drawn in [LOW, BOX]
LOW = 0.05
OP_SLOTS = ("r", "f", "g", "v", "w", "u")


def _op(kind, p, u):
    return qops.OperatorSpec(kind, p["r"], p["f"], p["g"], p["v"], p["w"], u, TRUNCATION)


def _validate_op(v, p, q):
    for name in ("v", "w"):
        v.poch_nonzero(name, p[name], q, TRUNCATION)


def _thm13_side(side):
    def lhs(p, ctx):
        q = p["q"]
        kernel = qops.thm13_kernel(side, p["s"], p["z"], p["t"], q)
        return qops.operator_apply_bruteforce(_op(side, p, p["u"]), kernel, p["a"], q, ctx.policy)

    def rhs(p, ctx):
        return qops.thm13_closed_form(side, *(p[k] for k in OP_SLOTS),
                                      p["a"], p["s"], p["z"], p["t"], p["q"], ctx.policy)
    return lhs, rhs


def _thm13_validate(p, policy):
    q, a = p["q"], p["a"]
    v = Violations(p, policy).q(q).nonzero("a", a)
    for label, val in (("az", a * p["z"]), ("as", a * p["s"]), ("at", a * p["t"]),
                       ("ut", p["u"] * p["t"])):
        v.below_one(label, val)
    _validate_op(v, p, q)
    return v.result()


def _thm13_sample(rng, exact, ints):
    out = {k: mod(rng, LOW, BOX) for k in OP_SLOTS + ("a", "s", "z", "t")}
    out["q"] = qbase(rng, 0.4, 0.75)
    return out


def _cor14_side(side):
    def lhs(p, ctx):
        q = p["q"]
        u = p["u"] if side == "T" else -p["u"]
        kernel = qops.cor14_kernel(side, p["x"], q)
        return qops.operator_apply_bruteforce(_op(side, p, u), kernel, p["s"], q, ctx.policy)

    def rhs(p, ctx):
        return qops.cor14_closed_form(side, *(p[k] for k in OP_SLOTS),
                                      p["x"], p["s"], p["q"], ctx.policy)
    return lhs, rhs


def _cor14_validate(p, policy):
    q = p["q"]
    v = Violations(p, policy).q(q).nonzero("s", p["s"])
    v.below_one("xs", p["x"] * p["s"]).below_one("xu", p["x"] * p["u"])
    _validate_op(v, p, q)
    return v.result()


def _cor14_sample(rng, exact, ints):
    out = {k: mod(rng, LOW, BOX) for k in OP_SLOTS + ("x", "s")}
    out["q"] = qbase(rng, 0.4, 0.75)
    return out


def _dps(kind, point):
    def hint(p):
        return qops.bruteforce_dps(kind, p[point], p["q"], TRUNCATION, digits=0)
    return hint


def entries() -> list:
    family = "operators"
    thm_slots = tuple(S(k) for k in OP_SLOTS + ("a", "s", "z", "t", "q"))
    cor_slots = tuple(S(k) for k in OP_SLOTS + ("x", "s", "q"))
    out = []
    for side in ("T", "E"):
        lhs, rhs = _thm13_side(side)
        op = "T(r,f,g,v,w,uD_a)" if side == "T" else "E(r,f,g,v,w,u theta_a)"
        out.append(IdentityDef(
            f"THM1_3_{side}", f"{op} on the product kernel: brute force vs closed double sum",
            "provided that max{|az|,|as|,|at|,|ut|}<1",
            thm_slots, lhs, rhs, _thm13_validate, _thm13_sample,
            default_tol=1e-6, engine="mp", lhs_dps=_dps(side, "a"), family=family,
            notes=f"left side sums the operator series to order {TRUNCATION}"))
    for side in ("T", "E"):
        lhs, rhs = _cor14_side(side)
        op = "T(r,f,g,v,w,uD_s){1/(xs)}" if side == "T" else "E(r,f,g,v,w,-u theta_s){(xs)}"
        out.append(IdentityDef(
            f"COR1_4_{side}", f"{op}: brute force vs closed 3Phi2/3Phi3",
            "provided that max{|xs|,|xu|}<1",
            cor_slots, lhs, rhs, _cor14_validate, _cor14_sample,
            default_tol=1e-6, engine="mp", lhs_dps=_dps(side, "s"), family=family,
            notes=f"left side sums the operator series to order {TRUNCATION}"))
    return out
