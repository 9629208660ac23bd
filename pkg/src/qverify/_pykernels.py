"""Pure-Python double-precision kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors every
function here with identical signatures and return conventions.  Status
codes: 0 converged, 1 no convergence, 2 denominator pole, 3 non-finite.
"""
import math

OK = 0
NO_CONVERGENCE = 1
POLE = 2
NON_FINITE = 3

_POLE_EPS = 8.0 * 2.220446049250313e-16


def poch_finite(a, q, n):
    p = 1.0
    qk = 1.0
    for _ in range(n):
        p *= 1.0 - a * qk
        qk *= q
    return p


def poch_infinite(a, q, cutoff, k_max):
    """Return ``(value, factors_used, tail_bound)`` for (a;q)_inf.

    ``tail_bound`` bounds |log| of the omitted factors, so the relative
    error of ``value`` is at most ``expm1(tail_bound)``.
    """
    p = 1.0
    t = a
    k = 0
    aq = abs(a)
    while aq >= cutoff:
        if k >= k_max:
            return p, k, math.inf
        p *= 1.0 - t
        t *= q
        aq *= q
        k += 1
    if aq == 0.0:
        return p, k, 0.0
    return p, k, aq / ((1.0 - q) * (1.0 - aq))


def hyper_sum(num, den, q, z, rel_tol, n_max, patience, terminate):
    """Sum the r-Phi-s series by its term-ratio recurrence.

    Returns ``(value, terms_used, tail_estimate, status)``.  ``terminate``
    >= 0 sums exactly the indices 0..terminate.
    """
    r = len(num)
    s = len(den)
    e = 1 + s - r
    term = 1.0
    total = 1.0
    qn = 1.0
    small = 0
    ratio_max = 0.0
    limit = terminate if terminate >= 0 else n_max
    n = 0
    while n < limit:
        ratio = z / (1.0 - qn * q)
        for b in den:
            f = 1.0 - b * qn
            if abs(f) <= _POLE_EPS:
                return total, n + 1, math.inf, POLE
            ratio /= f
        for a in num:
            ratio *= 1.0 - a * qn
        if e:
            ratio *= (-qn) ** e
        new = term * ratio
        total += new
        n += 1
        if not math.isfinite(total):
            return total, n, math.inf, NON_FINITE
        if terminate >= 0:
            term = new
            qn *= q
            continue
        if term != 0.0:
            ar = abs(new / term)
        else:
            ar = 0.0
        term = new
        qn *= q
        if abs(new) <= rel_tol * abs(total) and ar < 1.0:
            small += 1
            if ar > ratio_max:
                ratio_max = ar
            if small >= patience:
                return total, n + 1, abs(new) * ratio_max / (1.0 - ratio_max), OK
        else:
            small = 0
            ratio_max = 0.0
    if terminate >= 0:
        return total, n + 1, 0.0, OK
    return total, n + 1, math.inf, NO_CONVERGENCE


def _aa_point(t, a, b, c, d, q, cutoff, k_max):
    num1 = poch_infinite(q * t / c, q, cutoff, k_max)[0]
    num2 = poch_infinite(q * t / d, q, cutoff, k_max)[0]
    den1 = poch_infinite(a * t, q, cutoff, k_max)[0]
    den2 = poch_infinite(b * t, q, cutoff, k_max)[0]
    den = den1 * den2
    if abs(den) <= _POLE_EPS:
        return math.nan
    return num1 * num2 / den


def aa_lattice_sum(a, b, c, d, q, x, rel_tol, n_max, cutoff, patience):
    """sum_n q^n f(x q^n) for the Andrews-Askey integrand f.

    Returns ``(value, terms_used, tail_estimate, status)``.
    """
    k_max = 1000000
    total = 0.0
    qn = 1.0
    small = 0
    prev = 0.0
    ratio_max = 0.0
    n = 0
    while n < n_max:
        f = _aa_point(x * qn, a, b, c, d, q, cutoff, k_max)
        if math.isnan(f):
            return total, n, math.inf, POLE
        term = qn * f
        total += term
        n += 1
        qn *= q
        ar = abs(term / prev) if prev != 0.0 else 0.0
        prev = term
        if abs(term) <= rel_tol * abs(total) and ar < 1.0:
            small += 1
            if ar > ratio_max:
                ratio_max = ar
            if small >= patience:
                return total, n, abs(term) * ratio_max / (1.0 - ratio_max), OK
        else:
            small = 0
            ratio_max = 0.0
    return total, n, math.inf, NO_CONVERGENCE


def diff_table_d(values, x, q):
    """Iterated D-differences; ``values[j] = f(x q^j)``.

    Returns ``[D^0 f(x), D^1 f(x), ..., D^N f(x)]`` with N = len(values)-1.
    """
    g = list(values)
    out = [g[0]]
    m = len(g)
    for level in range(1, m):
        xj = x
        for j in range(m - level):
            g[j] = (g[j] - g[j + 1]) / xj
            xj *= q
        out.append(g[0])
    return out


def diff_table_theta(values, x, q):
    """Iterated theta-differences; ``values[j] = f(x q^-j)``."""
    g = list(values)
    out = [g[0]]
    m = len(g)
    for level in range(1, m):
        xj = x / q
        for j in range(m - level):
            g[j] = (g[j + 1] - g[j]) / xj
            xj /= q
        out.append(g[0])
    return out
