# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled double-precision kernels (mirror of ``_pykernels``)."""
from libc.math cimport fabs, isfinite, INFINITY, NAN, isnan

cdef int OK = 0
cdef int NO_CONVERGENCE = 1
cdef int POLE = 2
cdef int NON_FINITE = 3

cdef double _POLE_EPS = 8.0 * 2.220446049250313e-16
cdef enum:
    MAXP = 32


cpdef double poch_finite(double a, double q, long n):
    cdef double p = 1.0, qk = 1.0
    cdef long k
    for k in range(n):
        p *= 1.0 - a * qk
        qk *= q
    return p


cdef inline double _pinf(double a, double q, double cutoff, long k_max,
                         long *used, double *tail) nogil:
    cdef double p = 1.0, t = a, aq = fabs(a)
    cdef long k = 0
    while aq >= cutoff:
        if k >= k_max:
            used[0] = k
            tail[0] = INFINITY
            return p
        p *= 1.0 - t
        t *= q
        aq *= q
        k += 1
    used[0] = k
    if aq == 0.0:
        tail[0] = 0.0
    else:
        tail[0] = aq / ((1.0 - q) * (1.0 - aq))
    return p


def poch_infinite(double a, double q, double cutoff, long k_max):
    cdef long used
    cdef double tail
    cdef double p = _pinf(a, q, cutoff, k_max, &used, &tail)
    return p, used, tail


cdef inline double _ipow(double x, int e) nogil:
    cdef double r = 1.0
    cdef int i
    if e < 0:
        x = 1.0 / x
        e = -e
    for i in range(e):
        r *= x
    return r


def hyper_sum(num, den, double q, double z, double rel_tol, long n_max,
              int patience, long terminate):
    cdef double cn[MAXP]
    cdef double cd[MAXP]
    cdef int r = len(num), s = len(den), i
    if r > MAXP or s > MAXP:
        raise ValueError("too many parameters for the compiled kernel")
    for i in range(r):
        cn[i] = num[i]
    for i in range(s):
        cd[i] = den[i]
    cdef int e = 1 + s - r
    cdef double term = 1.0, total = 1.0, qn = 1.0, ratio, f, new, ar
    cdef double ratio_max = 0.0
    cdef int small = 0
    cdef long n = 0
    cdef long limit = terminate if terminate >= 0 else n_max
    while n < limit:
        ratio = z / (1.0 - qn * q)
        for i in range(s):
            f = 1.0 - cd[i] * qn
            if fabs(f) <= _POLE_EPS:
                return total, n + 1, INFINITY, POLE
            ratio /= f
        for i in range(r):
            ratio *= 1.0 - cn[i] * qn
        if e != 0:
            ratio *= _ipow(-qn, e)
        new = term * ratio
        total += new
        n += 1
        if not isfinite(total):
            return total, n, INFINITY, NON_FINITE
        if terminate >= 0:
            term = new
            qn *= q
            continue
        if term != 0.0:
            ar = fabs(new / term)
        else:
            ar = 0.0
        term = new
        qn *= q
        if fabs(new) <= rel_tol * fabs(total) and ar < 1.0:
            small += 1
            if ar > ratio_max:
                ratio_max = ar
            if small >= patience:
                return total, n + 1, fabs(new) * ratio_max / (1.0 - ratio_max), OK
        else:
            small = 0
            ratio_max = 0.0
    if terminate >= 0:
        return total, n + 1, 0.0, OK
    return total, n + 1, INFINITY, NO_CONVERGENCE


cdef inline double _aa_point(double t, double a, double b, double c, double d,
                             double q, double cutoff) nogil:
    cdef long used
    cdef double tail, den
    cdef long k_max = 1000000
    cdef double n1 = _pinf(q * t / c, q, cutoff, k_max, &used, &tail)
    cdef double n2 = _pinf(q * t / d, q, cutoff, k_max, &used, &tail)
    den = _pinf(a * t, q, cutoff, k_max, &used, &tail) * _pinf(b * t, q, cutoff, k_max, &used, &tail)
    if fabs(den) <= _POLE_EPS:
        return NAN
    return n1 * n2 / den


def aa_lattice_sum(double a, double b, double c, double d, double q, double x,
                   double rel_tol, long n_max, double cutoff, int patience):
    cdef double total = 0.0, qn = 1.0, prev = 0.0, ratio_max = 0.0, f, term, ar
    cdef int small = 0
    cdef long n = 0
    while n < n_max:
        f = _aa_point(x * qn, a, b, c, d, q, cutoff)
        if isnan(f):
            return total, n, INFINITY, POLE
        term = qn * f
        total += term
        n += 1
        qn *= q
        ar = fabs(term / prev) if prev != 0.0 else 0.0
        prev = term
        if fabs(term) <= rel_tol * fabs(total) and ar < 1.0:
            small += 1
            if ar > ratio_max:
                ratio_max = ar
            if small >= patience:
                return total, n, fabs(term) * ratio_max / (1.0 - ratio_max), OK
        else:
            small = 0
            ratio_max = 0.0
    return total, n, INFINITY, NO_CONVERGENCE


def diff_table_d(values, double x, double q):
    cdef list g = [float(v) for v in values]
    cdef int m = len(g), level, j
    cdef double xj
    out = [g[0]]
    for level in range(1, m):
        xj = x
        for j in range(m - level):
            g[j] = (<double>g[j] - <double>g[j + 1]) / xj
            xj *= q
        out.append(g[0])
    return out


def diff_table_theta(values, double x, double q):
    cdef list g = [float(v) for v in values]
    cdef int m = len(g), level, j
    cdef double xj
    out = [g[0]]
    for level in range(1, m):
        xj = x / q
        for j in range(m - level):
            g[j] = (<double>g[j + 1] - <double>g[j]) / xj
            xj /= q
        out.append(g[0])
    return out
