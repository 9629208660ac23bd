"""Independent reference implementations used by the tests.

Nothing here shares code with the library beyond mpmath itself.
"""
from fractions import Fraction

from mpmath import mp


def qpoch(a, q, n):
    p = 1
    for k in range(n):
        p = p * (1 - a * q ** k)
    return p


def qpoch_inf(a, q):
    """(a;q)_inf by direct multiplication down to the working epsilon."""
    p = mp.mpf(1)
    t = mp.mpf(a)
    while abs(t) > mp.eps / 1000:
        p *= 1 - t
        t *= q
    return p


def gauss_binomial(n, k, q):
    """[n k]_q from the q-Pascal recurrence, no closed product."""
    if k < 0 or k > n:
        return 0
    row = [1]
    for m in range(1, n + 1):
        new = [1] * (m + 1)
        for j in range(1, m):
            new[j] = row[j - 1] + q ** j * row[j]
        row = new
    return row[k]


def iterated_d(f, a, q, k):
    """D_a^k f by recursion on the definition D g(a) = (g(a) - g(qa)) / a."""
    if k == 0:
        return f(a)
    g = lambda x: iterated_d(f, x, q, k - 1)
    return (g(a) - g(q * a)) / a


def iterated_theta(f, a, q, k):
    """theta_a^k f by recursion on theta g(a) = (g(a/q) - g(a)) / (a/q)."""
    if k == 0:
        return f(a)
    g = lambda x: iterated_theta(f, x, q, k - 1)
    return (g(a / q) - g(a)) / (a / q)


def iterated(kind, f, a, q, k):
    return iterated_d(f, a, q, k) if kind == "D" else iterated_theta(f, a, q, k)


def rel_err(x, y):
    scale = max(abs(x), abs(y))
    return 0 if scale == 0 else abs(x - y) / scale


def exact_rat(v):
    return v if isinstance(v, Fraction) else Fraction(v)
