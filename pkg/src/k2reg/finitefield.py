"""Small finite fields F_q presented by structure constants.

A field is an F_p-algebra on basis e_0..e_{f-1} with a multiplication tensor;
elements are int tuples of length f. This representation is what residue
fields of prime ideals naturally produce (also when p divides the index), and
f <= 4 keeps all the linear algebra trivial.
"""

from __future__ import annotations

import random


class FiniteField:
    def __init__(self, p, mult, one):
        self.p = p
        self.f = len(one)
        self.q = p ** self.f
        self.mult = mult  # mult[i][j] = e_i * e_j as coefficient tuple
        self.one = tuple(one)
        self.zero = (0,) * self.f
        self._frob_matrix = None

    @classmethod
    def from_poly(cls, p, g):
        """F_p[Y]/(g) for monic irreducible g (ascending coefficients)."""
        f = len(g) - 1
        # Y^k reduced mod g for k < 2f-1
        pows = []
        cur = [1] + [0] * (f - 1)
        for _ in range(2 * f - 1):
            pows.append(tuple(cur))
            cur = [0] + cur
            if len(cur) > f:
                lead = cur.pop()
                cur = [(c - lead * g[i]) % p for i, c in enumerate(cur)]
        mult = tuple(tuple(pows[i + j] for j in range(f)) for i in range(f))
        return cls(p, mult, pows[0])

    def mul(self, u, v):
        p, f = self.p, self.f
        out = [0] * f
        for i, a in enumerate(u):
            if a:
                row = self.mult[i]
                for j, b in enumerate(v):
                    if b:
                        ab = a * b
                        comp = row[j]
                        for k in range(f):
                            out[k] += ab * comp[k]
        return tuple(c % p for c in out)

    def add(self, u, v):
        p = self.p
        return tuple((a + b) % p for a, b in zip(u, v))

    def sub(self, u, v):
        p = self.p
        return tuple((a - b) % p for a, b in zip(u, v))

    def neg(self, u):
        p = self.p
        return tuple(-a % p for a in u)

    def smul(self, c, u):
        p = self.p
        return tuple(c * a % p for a in u)

    def from_int(self, c):
        return self.smul(c % self.p, self.one)

    def is_zero(self, u):
        return all(a % self.p == 0 for a in u)

    def mul_matrix(self, u):
        """Columns are u * e_j."""
        cols = [self.mul(u, tuple(1 if i == j else 0 for i in range(self.f))) for j in range(self.f)]
        return [[cols[j][i] for j in range(self.f)] for i in range(self.f)]

    def inv(self, u):
        if self.is_zero(u):
            raise ZeroDivisionError("inverse of 0 in finite field")
        m = self.mul_matrix(u)
        x = _solve_mod_p(m, list(self.one), self.p)
        return tuple(x)

    def div(self, u, v):
        return self.mul(u, self.inv(v))

    def pow(self, u, e):
        e = int(e)
        if e < 0:
            return self.pow(self.inv(u), -e)
        acc = self.one
        base = u
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def frob(self, u):
        return self.pow(u, self.p)

    def elements(self):
        """All q elements, lexicographic. Only call for small q."""
        def rec(i):
            if i == self.f:
                yield ()
                return
            for rest in rec(i + 1):
                for c in range(self.p):
                    yield (c,) + rest
        return rec(0)

    def rand(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.f))

    def is_square(self, u):
        if self.is_zero(u):
            return True
        if self.p == 2:
            return True
        return self.pow(u, (self.q - 1) // 2) == self.one

    def sqrt(self, u):
        """Any square root, or None. q is small where this is called in char 2."""
        if self.is_zero(u):
            return self.zero
        if self.p == 2:
            return self.pow(u, self.q // 2)  # squaring is bijective
        if not self.is_square(u):
            return None
        # Tonelli-Shanks in the cyclic group of order q-1
        q1 = self.q - 1
        s = (q1 & -q1).bit_length() - 1
        t = q1 >> s
        rng = random.Random(q1)
        z = self.rand(rng)
        while self.is_zero(z) or self.is_square(z):
            z = self.rand(rng)
        c = self.pow(z, t)
        x = self.pow(u, (t + 1) // 2)
        r = self.pow(u, t)
        m = s
        while r != self.one:
            i, rr = 1, self.mul(r, r)
            while rr != self.one:
                rr = self.mul(rr, rr)
                i += 1
            b = self.pow(c, 1 << (m - i - 1))
            x = self.mul(x, b)
            c = self.mul(b, b)
            r = self.mul(r, c)
            m = i
        return x


def _solve_mod_p(m, rhs, p):
    """Solve m x = rhs over F_p (m invertible)."""
    n = len(m)
    a = [[m[i][j] % p for j in range(n)] + [rhs[i] % p] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] % p), None)
        if piv is None:
            raise ZeroDivisionError("singular system mod p")
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, p)
        a[col] = [c * inv % p for c in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(c - f * d) % p for c, d in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


# ---- polynomials with FiniteField coefficients (ascending lists) ----

def fp_trim(K, poly):
    poly = list(poly)
    while poly and K.is_zero(poly[-1]):
        poly.pop()
    return poly


def fp_mul(K, a, b):
    a, b = fp_trim(K, a), fp_trim(K, b)
    if not a or not b:
        return []
    out = [K.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = K.add(out[i + j], K.mul(x, y))
    return fp_trim(K, out)


def fp_divmod(K, a, b):
    a = fp_trim(K, a)
    b = fp_trim(K, b)
    if not b:
        raise ZeroDivisionError
    inv = K.inv(b[-1])
    q = [K.zero] * max(0, len(a) - len(b) + 1)
    while len(a) >= len(b):
        f = K.mul(a[-1], inv)
        k = len(a) - len(b)
        q[k] = f
        for i, c in enumerate(b):
            a[k + i] = K.sub(a[k + i], K.mul(f, c))
        a = fp_trim(K, a)
    return fp_trim(K, q), a


def fp_gcd(K, a, b):
    a, b = fp_trim(K, a), fp_trim(K, b)
    while b:
        a, b = b, fp_divmod(K, a, b)[1]
    if not a:
        return []
    inv = K.inv(a[-1])
    return [K.mul(c, inv) for c in a]


def fp_powmod(K, a, e, f):
    acc = [K.one]
    a = fp_divmod(K, a, f)[1]
    while e:
        if e & 1:
            acc = fp_divmod(K, fp_mul(K, acc, a), f)[1]
        a = fp_divmod(K, fp_mul(K, a, a), f)[1]
        e >>= 1
    return acc


def fp_eval(K, poly, x):
    acc = K.zero
    for c in reversed(fp_trim(K, poly)):
        acc = K.add(K.mul(acc, x), c)
    return acc


def fp_derivative(K, poly):
    return fp_trim(K, [K.smul(i, c) for i, c in enumerate(poly)][1:])


def roots_in_field(K, poly, multiplicities=False):
    """Roots of poly in K. Degree <= 4 in practice; deterministic seeding."""
    poly = fp_trim(K, poly)
    if len(poly) <= 1:
        return []
    rng = random.Random(hash((K.p, K.f, tuple(tuple(c) for c in poly))) & 0xFFFFFFFF)
    # isolate the product of distinct linear factors: gcd(X^q - X, poly)
    xq = list(fp_powmod(K, [K.zero, K.one], K.q, poly))
    while len(xq) < 2:
        xq.append(K.zero)
    xq[1] = K.sub(xq[1], K.one)
    lin = fp_gcd(K, xq, poly)
    roots = []

    def split(f):
        f = fp_trim(K, f)
        if len(f) <= 1:
            return
        if len(f) == 2:
            roots.append(K.neg(K.mul(f[0], K.inv(f[1]))))
            return
        while True:
            a, b = K.rand(rng), K.rand(rng)
            probe = [b, a]  # a*X + b
            if K.p == 2:
                # absolute trace to F_2 of (aX+b)
                t = probe
                acc = probe
                e = K.f
                for _ in range(e - 1):
                    acc = fp_divmod(K, fp_mul(K, acc, acc), f)[1]
                    t = fp_trim(K, [K.add(t[i] if i < len(t) else K.zero,
                                          acc[i] if i < len(acc) else K.zero)
                                    for i in range(max(len(t), len(acc)))])
                g = fp_gcd(K, t, f)
            else:
                h = fp_powmod(K, probe, (K.q - 1) // 2, f)
                h = fp_trim(K, [K.sub(h[i] if i < len(h) else K.zero,
                                      K.one if i == 0 else K.zero)
                                for i in range(max(len(h), 1))])
                g = fp_gcd(K, h, f)
            if 1 < len(g) < len(f):
                split(g)
                split(fp_divmod(K, f, g)[0])
                return

    split(lin)
    if not multiplicities:
        return roots
    out = []
    for r in roots:
        mult, rest = 0, poly
        while True:
            q, rem = fp_divmod(K, rest, [K.neg(r), K.one])
            if rem:
                break
            mult += 1
            rest = q
        out.append((r, mult))
    return out
