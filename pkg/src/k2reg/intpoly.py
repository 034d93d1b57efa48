"""Dense univariate polynomial helpers over Z and Q.

Polynomials are tuples of coefficients in ascending order, (c0, c1, ..., cn).
Everything here is exact: entries are ints or fractions.Fraction. Degrees stay
tiny (<= 8 after resultants), so quadratic-time algorithms are fine.
"""

from __future__ import annotations

from fractions import Fraction


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p):
    p = trim(p)
    return len(p) - 1 if p else -1


def add(p, q):
    n = max(len(p), len(q))
    return trim(tuple((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)))


def neg(p):
    return tuple(-c for c in p)


def sub(p, q):
    return add(p, neg(q))


def mul(p, q):
    p, q = trim(p), trim(q)
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def scale(p, c):
    return trim(tuple(c * a for a in p))


def evaluate(p, x):
    acc = 0
    for c in reversed(trim(p)):
        acc = acc * x + c
    return acc


def derivative(p):
    return trim(tuple(i * c for i, c in enumerate(p))[1:]) if len(p) > 1 else ()


def shift(p, c):
    """p(X + c)."""
    out = ()
    for coeff in reversed(trim(p)):
        out = add(mul(out, (c, 1)), (coeff,))
    return out


def divmod_exact(p, q):
    """Division with rational arithmetic; q need not be monic."""
    p = [Fraction(c) for c in trim(p)]
    q = [Fraction(c) for c in trim(q)]
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(0, len(p) - len(q) + 1)
    while len(p) >= len(q) and p:
        f = p[-1] / q[-1]
        k = len(p) - len(q)
        quot[k] = f
        for i, c in enumerate(q):
            p[k + i] -= f * c
        while p and p[-1] == 0:
            p.pop()
    return trim(quot), trim(p)


def poly_gcd_q(p, q):
    """Monic gcd over Q."""
    p, q = trim(p), trim(q)
    while q:
        _, r = divmod_exact(p, q)
        p, q = q, r
    if not p:
        return ()
    lead = Fraction(p[-1])
    return tuple(Fraction(c) / lead for c in p)


def resultant(p, q):
    """Resultant via the Euclidean remainder sequence, exact over Q."""
    p, q = trim(p), trim(q)
    if not p or not q:
        return 0
    res = Fraction(1)
    p = [Fraction(c) for c in p]
    q = [Fraction(c) for c in q]
    while True:
        dp, dq = len(p) - 1, len(q) - 1
        if dq == 0:
            res *= Fraction(q[0]) ** dp
            break
        _, r = divmod_exact(p, q)
        r = [Fraction(c) for c in r]
        if not r:
            return 0
        dr = len(r) - 1
        res *= (-1) ** (dp * dq) * Fraction(q[-1]) ** (dp - dr)
        p, q = q, r
    return res


def discriminant(p):
    """disc(p) = (-1)^(n(n-1)/2) Res(p, p') / lc(p)."""
    p = trim(p)
    n = len(p) - 1
    if n < 1:
        raise ValueError("discriminant needs degree >= 1")
    r = resultant(p, derivative(p))
    d = Fraction((-1) ** (n * (n - 1) // 2)) * Fraction(r) / Fraction(p[-1])
    return int(d) if d.denominator == 1 else d


def _sign_changes(signs):
    signs = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)


def sturm_sequence(p):
    seq = [trim(p), derivative(p)]
    while seq[-1]:
        _, r = divmod_exact(seq[-2], seq[-1])
        if not r:
            break
        seq.append(neg(r))
    return [s for s in seq if s]


def count_real_roots(p, lo=None, hi=None):
    """Number of distinct real roots in (lo, hi]; whole line when bounds are None."""
    seq = sturm_sequence(p)

    def at(x):
        if x is None:
            return 0
        return [1 if evaluate(s, x) > 0 else (-1 if evaluate(s, x) < 0 else 0) for s in seq]

    def at_inf(sgn):
        return [1 if (s[-1] * sgn ** ((len(s) - 1) % 2)) > 0 else -1 for s in seq]

    lo_signs = at_inf(-1) if lo is None else at(Fraction(lo))
    hi_signs = at_inf(1) if hi is None else at(Fraction(hi))
    return _sign_changes(lo_signs) - _sign_changes(hi_signs)


def root_bound(p):
    """Cauchy bound: all roots have |x| < 1 + max|c_i/c_n|."""
    p = trim(p)
    lead = abs(Fraction(p[-1]))
    m = max((abs(Fraction(c)) / lead for c in p[:-1]), default=Fraction(0))
    return m + 1


def isolate_real_roots(p):
    """Disjoint rational intervals (lo, hi], one distinct real root each."""
    p = trim(p)
    sqfree, _ = divmod_exact(p, poly_gcd_q(p, derivative(p)))
    b = root_bound(sqfree)
    total = count_real_roots(sqfree)
    out = []

    def split(lo, hi, n):
        if n == 0:
            return
        if n == 1:
            out.append((lo, hi))
            return
        mid = (lo + hi) / 2
        nl = count_real_roots(sqfree, lo, mid)
        split(lo, mid, nl)
        split(mid, hi, n - nl)

    split(-b - 1, b + 1, total)
    return sorted(out)
