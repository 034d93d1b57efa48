"""Integer utilities: primality, factoring, primes, square tests."""

from __future__ import annotations

import math
import random


def is_probable_prime(n):
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = (d & -d).bit_length() - 1
    d >>= r
    # deterministic Miller-Rabin bases for n < 3.3e24
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n, rng):
    while True:
        c = rng.randrange(1, n)
        x = y = rng.randrange(n)
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d


def factor_int(n):
    """Prime factorization of |n| as sorted list of (p, e); ignores sign, n != 0."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("factor_int(0)")
    out = {}
    for p in (2, 3, 5, 7, 11, 13):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    rng = random.Random(n & 0xFFFFFFFF)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend([r, r])
            continue
        d = _pollard_rho(m, rng)
        stack.extend([d, m // d])
    return sorted(out.items())


def is_square(n):
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def primes_upto(n):
    """All primes <= n (simple sieve)."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i:: i] = bytearray(len(sieve[i * i:: i]))
    return [i for i in range(2, n + 1) if sieve[i]]


def factored_str(n, sign=1):
    """Pretty form like -2^3 * 43; n may be a Fraction for rationals."""
    from fractions import Fraction
    n = Fraction(n) * sign
    if n == 0:
        return "0"
    s = "-" if n < 0 else ""
    n = abs(n)
    parts = []
    for p, e in factor_int(n.numerator):
        parts.append(f"{p}" if e == 1 else f"{p}^{e}")
    for p, e in factor_int(n.denominator):
        parts.append(f"{p}^-{e}")
    if n.numerator == 1 and not parts:
        parts.append("1")
    elif n.numerator == 1 and n.denominator > 1:
        pass
    return s + (" * ".join(parts) if parts else "1")
