"""Jackson q-integral on [c, d] and the Andrews-Askey integrand family.

The integral is the usual two-lattice sum

    int_c^d f(t) d_q t = (1-q) [ d sum_n q^n f(d q^n) - c sum_n q^n f(c q^n) ].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import kernels, scalar
from .config import DEFAULT_POLICY, TruncationPolicy
from .errors import DomainError, ExactModeUnsupported, NoConvergence
from .qcore import (HyperSpec, SeriesResult, effective_tol, phi_rs, pinfs,
                    pochs, product_cutoff, sum_series, validate_q)
from .scalar import DOUBLE, EXACT, tower_of


@dataclass(frozen=True)
class QIntegrand:
    """A function of t on the Jackson lattice.

    ``poly`` optionally gives polynomial coefficients (constant first); the
    lattice sums then have a closed form and work in exact arithmetic.
    ``aa`` marks the bare Andrews-Askey integrand with parameters (a,b,c,d),
    which lets double-precision sums run in the compiled kernel.
    """
    evaluator: Callable
    label: str = "f"
    poly: tuple | None = None
    aa: tuple | None = field(default=None, compare=False)

    def __call__(self, t):
        return self.evaluator(t)

    @classmethod
    def polynomial(cls, coeffs: Sequence, label: str = "poly") -> "QIntegrand":
        coeffs = tuple(coeffs)

        def ev(t):
            acc = 0 * t
            for c in reversed(coeffs):
                acc = acc * t + c
            return acc
        return cls(ev, label, poly=coeffs)


def _lattice_sum(f: QIntegrand, x, q, policy: TruncationPolicy):
    """sum_{n>=0} q^n f(x q^n) as a SeriesResult."""
    if x == 0:
        return SeriesResult(0 * q, 0, 0 * q, True)
    tower = tower_of(x, q)
    if f.poly is not None:
        # sum_n q^n (x q^n)^k = x^k / (1 - q^{k+1})
        total = 0 * q
        for k, a in enumerate(f.poly):
            total += a * x ** k / (1 - q ** (k + 1))
        return SeriesResult(total, len(f.poly), 0 * q, True)
    if f.aa is not None and tower == DOUBLE:
        a, b, c, d = (float(v) for v in f.aa)
        value, used, tail, status = kernels.impl.aa_lattice_sum(
            a, b, c, d, float(q), float(x), effective_tol(policy, DOUBLE),
            policy.n_max, product_cutoff(policy, DOUBLE), policy.patience)
        if status == kernels.POLE:
            raise DomainError("integrand has a pole on the lattice")
        if status != kernels.OK:
            raise NoConvergence("lattice sum did not converge", value, used)
        return SeriesResult(value, used, tail, True)
    if tower == EXACT:
        raise ExactModeUnsupported("lattice sums of non-polynomial integrands need floating point")

    def terms():
        qn = 1 + 0 * q
        while True:
            try:
                v = f(x * qn)
            except ZeroDivisionError as exc:
                raise DomainError(f"integrand has a pole at {x * qn}") from exc
            yield qn * v
            qn = qn * q
    return sum_series(terms(), policy)


def jackson_integral(f: QIntegrand, c, d, q,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """(1-q)[d sum q^n f(d q^n) - c sum q^n f(c q^n)].

    When the two lattice sums nearly cancel, both are re-summed with the
    truncation target scaled down by the cancellation ratio.
    """
    validate_q(q, policy)
    upper = _lattice_sum(f, d, q, policy)
    lower = _lattice_sum(f, c, q, policy)
    value = (1 - q) * (d * upper.value - c * lower.value)
    scale = abs((1 - q) * d * upper.value) + abs((1 - q) * c * lower.value)
    if tower_of(value) != EXACT and value != 0 and scale > 10 * abs(value):
        ratio = scalar.to_float(abs(value) / scale)
        finer = policy.replace(rel_tol=max(policy.rel_tol * ratio, 1e-300))
        upper = _lattice_sum(f, d, q, finer)
        lower = _lattice_sum(f, c, q, finer)
        value = (1 - q) * (d * upper.value - c * lower.value)
    tail = (1 - q) * (abs(d) * upper.tail_estimate + abs(c) * lower.tail_estimate)
    return SeriesResult(value, upper.terms_used + lower.terms_used, tail, True)


# -- the Andrews-Askey family ---------------------------------------------------

def aa_base(t, a, b, c, d, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """(qt/c, qt/d; q)_inf / (at, bt; q)_inf."""
    den = pinfs((a * t, b * t), q, policy)
    if den == 0:
        raise DomainError(f"(at, bt; q)_inf vanishes at t = {t}")
    return pinfs((q * t / c, q * t / d), q, policy) / den


def _weight_prop_a(t, a, b, c, d, q, w, v, N, policy):
    r = q ** (-N)
    return phi_rs(HyperSpec((r, w, c / t, a * b * c * d), (a * c, q * w * r / v), q,
                            q * t / (v * b * c * d), terminating=N), policy).value


def _weight_prop_b(t, a, b, c, d, q, w, v, N, policy):
    r = q ** (-N)
    return phi_rs(HyperSpec((r, w, c / t, q / (a * d)), (q / (a * t), q * r * w / v, 0), q,
                            q, terminating=N), policy).value


def _weight_t_sum(t, a, b, c, d, q, f, g, v, w, M, policy):
    r = q ** (-M)
    total = 0
    z = q * t / (b * c * d)
    for k in range(M + 1):
        qk = q ** k
        coeff = (pochs((r, f, g, c / t, a * b * c * d), q, k) * z ** k
                 / pochs((v, w, a * c, q), q, k))
        inner = phi_rs(HyperSpec((r * qk, f * qk, g * qk), (v * qk, w * qk), q, q,
                                 terminating=M - k), policy).value
        total = total + coeff * inner
    return total


def _weight_e_sum(t, a, b, c, d, q, f, g, v, w, M, policy):
    r = q ** (-M)
    total = 0
    z = v * w / (r * f * g)
    for k in range(M + 1):
        qk = q ** k
        coeff = (pochs((r, f, g, c / t, q / (a * d)), q, k) * z ** k
                 / pochs((v, w, q / (a * t), q), q, k))
        inner = phi_rs(HyperSpec((r * qk, f * qk, g * qk), (v * qk, w * qk, 0), q, z,
                                 terminating=M - k), policy).value
        total = total + coeff * inner
    return total


WEIGHTS = {
    "prop_a": _weight_prop_a,
    "prop_b": _weight_prop_b,
    "t_sum": _weight_t_sum,
    "e_sum": _weight_e_sum,
}


def aa_integrand(t, params: Sequence, q, weight: tuple | None = None,
                 policy: TruncationPolicy = DEFAULT_POLICY):
    """Andrews-Askey integrand at t, optionally times an inner-sum weight.

    ``weight`` is ``(name, extra)`` with name one of

    - ``prop_a``: extra = (w, v, N), the 4Phi2 with argument qt/(vbcd)
    - ``prop_b``: extra = (w, v, N), the balanced 4Phi3 at argument q
    - ``t_sum``:  extra = (f, g, v, w, M), the k-sum with 3Phi2 at q
    - ``e_sum``:  extra = (f, g, v, w, M), the k-sum with 3Phi3 at vw/(rfg)

    In every case r = q^-N (or q^-M), so r = 1 makes the weight identically 1.
    """
    a, b, c, d = params
    base = aa_base(t, a, b, c, d, q, policy)
    if weight is None:
        return base
    name, extra = weight
    try:
        fn = WEIGHTS[name]
    except KeyError:
        raise ValueError(f"unknown weight {name!r}") from None
    try:
        return base * fn(t, a, b, c, d, q, *extra, policy)
    except ZeroDivisionError as exc:
        raise DomainError(f"weight not evaluable at t = {t}: {exc}") from exc


def aa_function(params: Sequence, q, weight: tuple | None = None,
                policy: TruncationPolicy = DEFAULT_POLICY) -> QIntegrand:
    """The integrand as a QIntegrand (compiled fast path when unweighted)."""
    label = "aa" if weight is None else f"aa*{weight[0]}"
    return QIntegrand(lambda t: aa_integrand(t, params, q, weight, policy), label,
                      aa=tuple(params) if weight is None else None)


def aa_rhs(params: Sequence, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """d(1-q)(q, dq/c, c/d, abcd; q)_inf / (ac, ad, bc, bd; q)_inf."""
    a, b, c, d = params
    moduli = [a * c, a * d, b * c, b * d]
    if max(abs(m) for m in moduli) >= 1:
        raise DomainError("Andrews-Askey evaluation needs max{|ac|,|ad|,|bc|,|bd|} < 1")
    if c == 0 or d == 0:
        raise DomainError("endpoints must be nonzero")
    num = pinfs((q, d * q / c, c / d, a * b * c * d), q, policy)
    return d * (1 - q) * num / pinfs(moduli, q, policy)


def aa_check_endpoints(params: Sequence, q, policy: TruncationPolicy = DEFAULT_POLICY):
    """Reject parameter sets whose lattice hits a pole (a t q^n = 1 or b t q^n = 1)."""
    a, b, c, d = params
    for x in (c, d):
        for p in (a, b):
            v = p * x
            if v == 0 or abs(v) < 1:
                continue
            # p x q^n = 1 needs p x = q^-n
            n = 0
            cur = v
            while abs(cur) >= 1 - 1e-12 and n <= 200:
                if abs(cur - 1) <= 1e-9:
                    raise DomainError(f"integrand pole on the lattice at t = {x} q^{n}")
                cur = cur * q
                n += 1
