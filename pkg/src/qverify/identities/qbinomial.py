"""The q-binomial family: generating functions of the Cauchy polynomials,
the q-binomial theorem and the two Euler identities."""
from __future__ import annotations

from ..qcore import HyperSpec, phi_rs, pinf, pinfs, sum_series
from .base import IdentityDef, Slot
from .common import Violations, draw, qbase

S = Slot
MOD = 0.9          # moduli drawn up to this bound


def _series(first, ratio, ctx):
    def terms():
        t = first
        n = 0
        while True:
            yield t
            t = t * ratio(n)
            n += 1
    return sum_series(terms(), ctx.policy, keep_trace=ctx.trace)


# -- GENFUN_SA: sum p_n(x,y) (lam)_n t^n/(q)_n = 2phi1[lam, y/x; 0; q, xt] --------

def _sa_lhs(p, ctx):
    x, y, t, lam, q = p["x"], p["y"], p["t"], p["lam"], p["q"]
    return _series(1 + 0 * q, lambda n: (x - q ** n * y) * (1 - lam * q ** n) * t / (1 - q ** (n + 1)), ctx)


def _sa_rhs(p, ctx):
    x, y, t, lam, q = p["x"], p["y"], p["t"], p["lam"], p["q"]
    return phi_rs(HyperSpec((lam, y / x), (0 * q,), q, x * t), ctx.policy)


def _sa_validate(p, policy):
    v = Violations(p, policy).q(p["q"]).nonzero("x", p["x"])
    v.below_one("xt", p["x"] * p["t"])
    return v.result()


def _sa_sample(rng, exact, ints):
    return {"x": draw(rng, exact, 0.05, MOD), "y": draw(rng, exact, 0.0, MOD),
            "t": draw(rng, exact, 0.0, MOD), "lam": draw(rng, exact, 0.0, MOD),
            "q": qbase(rng, 0.1, 0.9)}


# -- GENFUN_CAUCHY: sum p_n(x,y) t^n/(q)_n = (yt)_inf/(xt)_inf ------------------

def _cauchy_lhs(p, ctx):
    x, y, t, q = p["x"], p["y"], p["t"], p["q"]
    return _series(1 + 0 * q, lambda n: (x - q ** n * y) * t / (1 - q ** (n + 1)), ctx)


def _cauchy_rhs(p, ctx):
    x, y, t, q = p["x"], p["y"], p["t"], p["q"]
    return pinf(y * t, q, ctx.policy) / pinf(x * t, q, ctx.policy)


def _cauchy_validate(p, policy):
    v = Violations(p, policy).q(p["q"])
    v.below_one("xt", p["x"] * p["t"])
    return v.result()


def _cauchy_sample(rng, exact, ints):
    return {"x": draw(rng, exact, 0.0, MOD), "y": draw(rng, exact, 0.0, MOD),
            "t": draw(rng, exact, 0.0, MOD), "q": qbase(rng, 0.1, 0.9)}


# -- QBINOM_THM: 1phi0[a; -; q, z] = (az)_inf/(z)_inf ------------------------------

def _qb_lhs(p, ctx):
    return phi_rs(HyperSpec((p["a"],), (), p["q"], p["z"]), ctx.policy, keep_trace=ctx.trace)


def _qb_rhs(p, ctx):
    a, z, q = p["a"], p["z"], p["q"]
    return pinf(a * z, q, ctx.policy) / pinf(z, q, ctx.policy)


def _qb_validate(p, policy):
    return Violations(p, policy).q(p["q"]).below_one("z", p["z"]).result()


def _qb_sample(rng, exact, ints):
    return {"a": draw(rng, exact, 0.0, MOD), "z": draw(rng, exact, 0.0, MOD),
            "q": qbase(rng, 0.1, 0.9)}


# -- EULER / EULER_INV ------------------------------------------------------------

def _euler_lhs(p, ctx):
    z, q = p["z"], p["q"]
    return _series(1 + 0 * q, lambda n: z / (1 - q ** (n + 1)), ctx)


def _euler_rhs(p, ctx):
    return 1 / pinf(p["z"], p["q"], ctx.policy)


def _euler_validate(p, policy):
    return Violations(p, policy).q(p["q"]).below_one("z", p["z"]).result()


def _euler_inv_lhs(p, ctx):
    z, q = p["z"], p["q"]
    return _series(1 + 0 * q, lambda n: -z * q ** n / (1 - q ** (n + 1)), ctx)


def _euler_inv_rhs(p, ctx):
    return pinfs((p["z"],), p["q"], ctx.policy)


def _euler_inv_validate(p, policy):
    return Violations(p, policy).q(p["q"]).result()


def _z_sample(rng, exact, ints):
    return {"z": draw(rng, exact, 0.0, MOD), "q": qbase(rng, 0.1, 0.9)}


def entries() -> list:
    family = "q-binomial"
    tol = 1e-10
    return [
        IdentityDef(
            "GENFUN_SA", "Generating function of Cauchy polynomials with (lam;q)_n weights",
            "Srivastava-Agarwal type generating function",
            (S("x"), S("y"), S("t"), S("lam"), S("q")), _sa_lhs, _sa_rhs,
            _sa_validate, _sa_sample, default_tol=tol, family=family),
        IdentityDef(
            "GENFUN_CAUCHY", "Generating function of Cauchy polynomials",
            "homogeneous version",
            (S("x"), S("y"), S("t"), S("q")), _cauchy_lhs, _cauchy_rhs,
            _cauchy_validate, _cauchy_sample, default_tol=tol, family=family),
        IdentityDef(
            "QBINOM_THM", "q-binomial theorem",
            "Cauchy identity or the following",
            (S("a"), S("z"), S("q")), _qb_lhs, _qb_rhs,
            _qb_validate, _qb_sample, default_tol=tol, family=family),
        IdentityDef(
            "EULER", "Euler's identity sum z^k/(q)_k = 1/(z)_inf",
            "Euler's identity",
            (S("z"), S("q")), _euler_lhs, _euler_rhs,
            _euler_validate, _z_sample, default_tol=tol, family=family),
        IdentityDef(
            "EULER_INV", "Inverse Euler identity sum (-1)^k q^C(k,2) z^k/(q)_k = (z)_inf",
            "its inverse relation given below",
            (S("z"), S("q")), _euler_inv_lhs, _euler_inv_rhs,
            _euler_inv_validate, _z_sample, default_tol=tol, family=family),
    ]
