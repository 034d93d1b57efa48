"""Polynomial arithmetic and factorization over F_p.

Coefficients ascending, reduced mod p. Inputs here have degree <= 8, so we use
schoolbook arithmetic plus Cantor-Zassenhaus; the random splitting is seeded
deterministically from the polynomial so runs are reproducible.
"""

from __future__ import annotations

import random


def trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def pmod(poly, p):
    return trim(tuple(c % p for c in poly))


def mul(a, b, p):
    a, b = trim(a), trim(b)
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return trim(out)


def divmod_(a, b, p):
    a = list(trim(a))
    b = trim(b)
    if not b:
        raise ZeroDivisionError
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b):
        f = (a[-1] * inv) % p
        k = len(a) - len(b)
        q[k] = f
        for i, c in enumerate(b):
            a[k + i] = (a[k + i] - f * c) % p
        while a and a[-1] == 0:
            a.pop()
    return trim(q), trim(a)


def mod(a, b, p):
    return divmod_(a, b, p)[1]


def gcd(a, b, p):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, mod(a, b, p)
    if not a:
        return ()
    inv = pow(a[-1], -1, p)
    return trim(tuple(c * inv % p for c in a))


def powmod(a, e, f, p):
    """a^e mod f over F_p."""
    result = (1,)
    a = mod(a, f, p)
    while e:
        if e & 1:
            result = mod(mul(result, a, p), f, p)
        a = mod(mul(a, a, p), f, p)
        e >>= 1
    return result


def sub(a, b, p):
    n = max(len(a), len(b))
    return trim(tuple(((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)))


def add(a, b, p):
    n = max(len(a), len(b))
    return trim(tuple(((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)))


def monic(a, p):
    a = trim(a)
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return tuple(c * inv % p for c in a)


def derivative(a, p):
    return trim(tuple(i * c % p for i, c in enumerate(a))[1:]) if len(a) > 1 else ()


def _squarefree_parts(f, p):
    """List of (squarefree factor, multiplicity). Handles the char-p pth-power case."""
    out = []
    c = gcd(f, derivative(f, p), p)
    w, _ = divmod_(f, c, p)
    i = 1
    while len(w) > 1:
        y = gcd(w, c, p)
        fac, _ = divmod_(w, y, p)
        if len(fac) > 1:
            out.append((monic(fac, p), i))
        w, c = y, divmod_(c, y, p)[0]
        i += 1
    if len(c) > 1:
        # c is a pth power: c(x) = g(x^p)
        g = trim(tuple(c[j] for j in range(0, len(c), p)))
        for fac, m in _squarefree_parts(g, p):
            out.append((fac, m * p))
    return out


def _distinct_degree(f, p):
    """Partition a monic squarefree f into products of same-degree irreducibles."""
    out = []
    x = (0, 1)
    h = x
    d = 0
    rest = f
    while len(rest) - 1 >= 2 * (d + 1):
        d += 1
        h = powmod(h, p, rest, p)
        g = gcd(sub(h, x, p), rest, p)
        if len(g) > 1:
            out.append((g, d))
            rest, _ = divmod_(rest, g, p)
            h = mod(h, rest, p)
    if len(rest) > 1:
        out.append((rest, len(rest) - 1))
    return out


def _equal_degree_split(f, d, p, rng):
    """Cantor-Zassenhaus split of monic squarefree f = product of irreducibles of degree d."""
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = tuple(rng.randrange(p) for _ in range(n))
        a = trim(a)
        if len(a) < 1:
            continue
        g = gcd(a, f, p)
        if len(g) > 1:
            pieces = [g, divmod_(f, g, p)[0]]
        else:
            if p == 2:
                # trace map over F_{2^d}
                t = a
                acc = a
                for _ in range(d - 1):
                    acc = powmod(acc, 2, f, p)
                    t = add(t, acc, p)
                b = t
            else:
                e = (p ** d - 1) // 2
                b = powmod(a, e, f, p)
                b = sub(b, (1,), p)
            g = gcd(b, f, p)
            if len(g) <= 1 or len(g) == len(f):
                continue
            pieces = [g, divmod_(f, g, p)[0]]
        out = []
        for piece in pieces:
            out.extend(_equal_degree_split(monic(piece, p), d, p, rng))
        return out


def factor(f, p):
    """Factor f over F_p: list of (monic irreducible, multiplicity), sorted."""
    f = pmod(f, p)
    if len(f) <= 1:
        raise ValueError("cannot factor a constant")
    rng = random.Random(hash((tuple(f), p)) & 0xFFFFFFFF)
    out = []
    for sf, m in _squarefree_parts(monic(f, p), p):
        for g, d in _distinct_degree(sf, p):
            for irr in _equal_degree_split(monic(g, p), d, p, rng):
                out.append((irr, m))
    out.sort()
    return out


def roots(f, p):
    """Roots of f in F_p (no multiplicity)."""
    return sorted((-g[0]) % p for g, _ in factor(f, p) if len(g) == 2)


def is_irreducible(f, p):
    f = pmod(f, p)
    if len(f) <= 1:
        return False
    fac = factor(f, p)
    return len(fac) == 1 and fac[0][1] == 1 and len(fac[0][0]) == len(f)
