"""Cubic and quartic unit-equation field families and exact arithmetic in them.

Builds the defining polynomials X^3+aX^2-(a+eps+eps'+1)X+eps and
X^4+aX^3+bX^2+cX+eps (40 quartic families), computes maximal orders by the
Dedekind criterion with multiplier-ring enlargement, splits primes, finds and
labels embeddings, and tests the unit conditions that make the K2 elements
integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from . import intpoly, modpoly
from .arith import factor_int, is_square
from .finitefield import FiniteField


class SpecificationError(ValueError):
    pass


class PrecisionError(ArithmeticError):
    """Retry-with-higher-precision signal."""


# ---------------------------------------------------------------- field specs

@dataclass(frozen=True)
class CubicSpec:
    eps: int
    eps_prime: int
    a: int

    def __post_init__(self):
        if self.eps not in (1, -1) or self.eps_prime not in (1, -1):
            raise SpecificationError("eps and eps' must be +-1")

    @property
    def degree(self):
        return 3

    def label(self):
        return f"cubic(eps={self.eps},eps'={self.eps_prime},a={self.a})"


# (b, c_offset, eps, condition) with c = -a + c_offset; condition constrains a.
# Galois column of the table is the test oracle for galois_group().
QUARTIC_FAMILIES = []
for _s in (1, -1):
    QUARTIC_FAMILIES += [(-2 if _s > 0 else 0, off, _s, cond, gal) for off, cond, gal in [
        (1, None, "S4"), (-1, None, "S4"),
        (2, None, "S4"), (-2, None, "S4"),
        (4, None, "S4" if _s > 0 else "D4"), (-4, None, "S4" if _s > 0 else "D4"),
        (8, "2|a", "S4"), (-8, "2|a", "S4"),
        (16, "4|a" if _s > 0 else "a=2mod4", "S4"), (-16, "4|a" if _s > 0 else "a=2mod4", "S4"),
    ]]
QUARTIC_FAMILIES += [
    (-1, 0, 1, None, "D4"), (-3, 0, 1, None, "D4"),
    (0, 0, 1, None, "D4"), (-4, 0, 1, None, "D4"),
    (2, 0, 1, None, "V4"),
    (-6, 0, 1, None, "C4"),
    (6, 0, 1, "2|a", "D4"), (-10, 0, 1, "2|a", "D4"),
    (14, 0, 1, "4|a", "D4"), (-18, 0, 1, "4|a", "D4"),
    (1, 0, -1, None, "S4"), (-1, 0, -1, None, "S4"),
    (2, 0, -1, None, "S4"), (-2, 0, -1, None, "S4"),
    (4, 0, -1, None, "S4"), (-4, 0, -1, None, "S4"),
    (8, 0, -1, "2|a", "S4"), (-8, 0, -1, "2|a", "S4"),
    (16, 0, -1, "a=2mod4", "S4"), (-16, 0, -1, "a=2mod4", "S4"),
]
assert len(QUARTIC_FAMILIES) == 40


def _cond_ok(cond, a):
    if cond is None:
        return True
    if cond == "2|a":
        return a % 2 == 0
    if cond == "4|a":
        return a % 4 == 0
    if cond == "a=2mod4":
        return a % 4 == 2
    raise SpecificationError(f"unknown condition {cond}")


@dataclass(frozen=True)
class QuarticSpec:
    b: int
    c_offset: int  # c = -a + c_offset; 0 means the c = -a column
    eps: int
    a: int

    def __post_init__(self):
        row = self.table_row()
        if row is None:
            raise SpecificationError(
                f"(b={self.b}, c=-a{self.c_offset:+d}, eps={self.eps}) is not one of the 40 table families")
        if not _cond_ok(row[3], self.a):
            raise SpecificationError(f"a={self.a} violates the side condition {row[3]} of the family")

    def table_row(self):
        for row in QUARTIC_FAMILIES:
            if (row[0], row[1], row[2]) == (self.b, self.c_offset, self.eps):
                return row
        return None

    @property
    def degree(self):
        return 4

    @property
    def c(self):
        return -self.a + self.c_offset

    def table_galois(self):
        return self.table_row()[4]

    def label(self):
        return f"quartic(b={self.b},c=-a{self.c_offset:+d},eps={self.eps},a={self.a})"


def build_polynomial(spec):
    """Defining polynomial, ascending coefficients."""
    if isinstance(spec, CubicSpec):
        a, e, ep = spec.a, spec.eps, spec.eps_prime
        return (e, -(a + e + ep + 1), a, 1)
    if isinstance(spec, QuarticSpec):
        return (spec.eps, spec.c, spec.b, spec.a, 1)
    raise SpecificationError(f"not a field spec: {spec!r}")


# ------------------------------------------------------------- irreducibility

# the only quadratics that can divide an in-family quartic (Lemma 4.3(2))
_QUARTIC_TRIAL_QUADRATICS = [
    (1, 0, 1), (-1, 1, 1), (-1, -1, 1), (-1, 2, 1), (-1, -2, 1), (-1, 4, 1), (-1, -4, 1),
]


def is_irreducible(poly):
    """Irreducibility over Q for monic degree-3/4 polynomials with constant +-1."""
    poly = intpoly.trim(poly)
    n = len(poly) - 1
    if n not in (3, 4):
        raise SpecificationError("only degrees 3 and 4 are supported")
    if poly[-1] != 1 or poly[0] not in (1, -1):
        raise SpecificationError("expected a monic polynomial with constant term +-1")
    # only possible rational roots are +-1
    if intpoly.evaluate(poly, 1) == 0 or intpoly.evaluate(poly, -1) == 0:
        return False
    if n == 3:
        return True
    for quad in _QUARTIC_TRIAL_QUADRATICS:
        if not intpoly.divmod_exact(poly, quad)[1]:
            return False
    # fallback for arbitrary inputs: monic quadratic factors have constant +-1
    a3, a2, a1 = poly[3], poly[2], poly[1]
    for b, d in ((1, 1), (-1, -1), (1, -1), (-1, 1)):
        if b * d != poly[0]:
            continue
        # (X^2+aX+b)(X^2+cX+d): a+c=a3, ac=a2-b-d, ad+bc=a1
        s, prod = a3, a2 - b - d
        disc = s * s - 4 * prod
        if not is_square(disc):
            continue
        r = math.isqrt(disc)
        for aa in ((s + r) // 2, (s - r) // 2):
            cc = s - aa
            if aa * cc == prod and aa * d + b * cc == a1:
                return False
    return True


# ------------------------------------------------------------- number field

def _hnf(rows, m):
    """Row HNF of an integer matrix (list of length-m rows), full rank result m x m."""
    rows = [list(r) for r in rows if any(r)]
    mat = []
    for col in range(m - 1, -1, -1):
        pivots = [r for r in rows if r[col] != 0]
        rest = [r for r in rows if r[col] == 0]
        if not pivots:
            raise ValueError("rank deficient in HNF")
        while len(pivots) > 1:
            pivots.sort(key=lambda r: abs(r[col]))
            p0 = pivots[0]
            newp = [p0]
            for r in pivots[1:]:
                q = r[col] // p0[col]
                r2 = [x - q * y for x, y in zip(r, p0)]
                (newp if r2[col] != 0 else rest).append(r2)
            pivots = newp
        piv = pivots[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        mat.append(piv)
        rows = rest
    mat.reverse()  # lower triangular, mat[i] has its pivot in column i
    for i in range(m):
        for j in range(i):
            q = mat[i][j] // mat[j][j]
            if q:
                mat[i] = [x - q * y for x, y in zip(mat[i], mat[j])]
    return mat


def _solve_fraction(mat, rhs):
    """Solve mat^T? No: solve sum_i x_i mat[i] = rhs exactly (mat rows independent)."""
    m = len(mat)
    a = [[Fraction(mat[i][j]) for i in range(m)] + [Fraction(rhs[j])] for j in range(m)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [c * inv for c in a[col]]
        for r in range(m):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [c - f * d for c, d in zip(a[r], a[col])]
    return [a[i][m] for i in range(m)]


class FieldElement:
    """Element of a NumberField, exact coordinates over the power basis of u."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(Fraction(c) for c in coords)
        assert len(self.coords) == field.m

    def __add__(self, other):
        other = self.field.coerce(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self.field.coerce(other))

    def __rsub__(self, other):
        return self.field.coerce(other) - self

    def __mul__(self, other):
        other = self.field.coerce(other)
        f = self.field
        m = f.m
        out = [Fraction(0)] * (2 * m - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        out[i + j] += a * b
        res = list(out[:m])
        for k in range(m, 2 * m - 1):
            c = out[k]
            if c:
                red = f._power_reduction[k - m]
                for j in range(m):
                    res[j] += c * red[j]
        return FieldElement(f, res)

    def __rmul__(self, other):
        return self.__mul__(other)

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        # extended Euclid against the minimal polynomial
        f = tuple(Fraction(c) for c in self.field.min_poly)
        a = intpoly.trim(self.coords)
        r0, r1 = f, a
        s0, s1 = (), (Fraction(1),)
        while r1:
            q, r = intpoly.divmod_exact(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, intpoly.sub(s0, intpoly.mul(q, s1))
        inv_lead = 1 / Fraction(r0[0])
        s0 = intpoly.scale(s0, inv_lead)
        coords = list(s0) + [Fraction(0)] * (self.field.m - len(s0))
        return FieldElement(self.field, coords[: self.field.m])

    def __truediv__(self, other):
        return self * self.field.coerce(other).inverse()

    def __rtruediv__(self, other):
        return self.field.coerce(other) / self

    def __pow__(self, e):
        e = int(e)
        if e < 0:
            return self.inverse() ** (-e)
        acc = self.field.one()
        base = self
        while e:
            if e & 1:
                acc = acc * base
            base = base * base
            e >>= 1
        return acc

    def __eq__(self, other):
        try:
            other = self.field.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self):
        if not self.is_rational():
            raise ValueError("not rational")
        return self.coords[0]

    def mul_matrix(self):
        """Columns are self * u^j, over the power basis."""
        f = self.field
        cols = []
        x = self
        for j in range(f.m):
            cols.append(x.coords)
            if j < f.m - 1:
                x = x * f.gen()
        return [[cols[j][i] for j in range(f.m)] for i in range(f.m)]

    def norm(self):
        return _det_fraction(self.mul_matrix())

    def trace(self):
        m = self.mul_matrix()
        return sum(m[i][i] for i in range(self.field.m))

    def char_poly(self):
        """Characteristic polynomial of multiplication, ascending, monic."""
        return _char_poly_fraction(self.mul_matrix())

    def embed(self, root):
        acc = mp.mpf(0)
        for c in reversed(self.coords):
            acc = acc * root + mp.mpf(c.numerator) / c.denominator
        return acc

    def __repr__(self):
        return f"FieldElement({list(self.coords)})"


def _det_fraction(mat):
    m = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    det = Fraction(1)
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, m):
            if a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def _char_poly_fraction(mat):
    """Faddeev-LeVerrier; returns ascending monic coefficients."""
    m = len(mat)
    ident = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    coeffs = [Fraction(1)]  # leading
    mk = [row[:] for row in ident]
    ak = mat
    for k in range(1, m + 1):
        prod = [[sum(ak[i][t] * mk[t][j] for t in range(m)) for j in range(m)] for i in range(m)]
        ck = -sum(prod[i][i] for i in range(m)) / k
        coeffs.append(ck)
        mk = [[prod[i][j] + (ck if i == j else 0) for j in range(m)] for i in range(m)]
    return tuple(reversed(coeffs))


class Embedding:
    """One complex root of the minimal polynomial, with metadata."""

    __slots__ = ("index", "value", "is_real", "label", "conjugate_of", "prec", "interval")

    def __init__(self, index, value, is_real, label, conjugate_of, prec, interval=None):
        self.index = index
        self.value = value
        self.is_real = is_real
        self.label = label
        self.conjugate_of = conjugate_of  # index of the upper-half partner, or None
        self.prec = prec
        self.interval = interval  # exact isolating (lo, hi) for real roots

    def __repr__(self):
        return f"Embedding({self.index}, {mp.nstr(self.value, 8)}, label={self.label})"


class NumberField:
    def __init__(self, min_poly, spec=None):
        min_poly = intpoly.trim(min_poly)
        if min_poly[-1] != 1:
            raise SpecificationError("minimal polynomial must be monic")
        if len(min_poly) - 1 not in (3, 4):
            raise SpecificationError("only cubic and quartic fields are supported")
        if not is_irreducible(min_poly):
            raise SpecificationError(f"{min_poly} is reducible over Q")
        self.min_poly = tuple(int(c) for c in min_poly)
        self.m = len(min_poly) - 1
        self.spec = spec
        self.poly_disc = int(intpoly.discriminant(min_poly))
        # u^k for k = m .. 2m-2 reduced mod min_poly
        red = []
        cur = [-Fraction(c) for c in self.min_poly[:-1]]
        red.append(tuple(cur))
        for _ in range(self.m - 2):
            cur = [Fraction(0)] + cur
            lead = cur.pop()
            cur = [c + lead * r for c, r in zip(cur, red[0])]
            red.append(tuple(cur))
        self._power_reduction = red
        self._max_order = None
        self._embeddings_cache = {}
        self._splitting_cache = {}

    @classmethod
    def from_spec(cls, spec):
        return cls(build_polynomial(spec), spec=spec)

    # ---- element constructors

    def element(self, coords):
        return FieldElement(self, list(coords) + [0] * (self.m - len(coords)))

    def coerce(self, x):
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise ValueError("element of a different field")
            return x
        if isinstance(x, (int, Fraction)):
            return self.element([Fraction(x)])
        raise TypeError(f"cannot coerce {x!r}")

    def zero(self):
        return self.element([0])

    def one(self):
        return self.element([1])

    def gen(self):
        return self.element([0, 1])

    # ---- maximal order

    def _ensure_max_order(self):
        if self._max_order is None:
            self._max_order = _maximal_order(self.min_poly)
        return self._max_order

    @property
    def integral_basis(self):
        return self._ensure_max_order()[0]

    @property
    def disc(self):
        return self._ensure_max_order()[1]

    @property
    def index_square(self):
        return self._ensure_max_order()[2]

    @property
    def index(self):
        return math.isqrt(self.index_square)

    def to_integral_coords(self, x):
        """Coordinates of x over the integral basis (exact Fractions)."""
        basis = self.integral_basis
        return _solve_fraction([list(b) for b in basis], list(self.coerce(x).coords))

    def is_unit(self, x):
        """x in O_F^x: integral over the maximal order with norm +-1."""
        x = self.coerce(x)
        if x.is_zero():
            return False
        if any(c.denominator != 1 for c in self.to_integral_coords(x)):
            return False
        return abs(x.norm()) == 1

    # ---- signature and embeddings

    def signature(self):
        r1 = intpoly.count_real_roots(self.min_poly)
        return r1, (self.m - r1) // 2

    def embeddings(self, prec=192):
        if prec < 64:
            raise PrecisionError("precision must be at least 64 bits")
        if prec in self._embeddings_cache:
            return self._embeddings_cache[prec]
        embs = _compute_embeddings(self, prec)
        self._embeddings_cache[prec] = embs
        return embs

    def exact_real_sign(self, x, emb):
        """Exact sign of sigma(x) at a real embedding (0 only when x = 0).

        Works by refining the root's exact isolating interval until an exact
        mean-value bound pins the sign; immune to cancellation at any scale.
        """
        x = self.coerce(x)
        if x.is_zero():
            return 0
        if not emb.is_real or emb.interval is None:
            raise ValueError("exact signs are only defined at real embeddings")
        lo, hi = emb.interval
        coords = intpoly.trim(x.coords)
        flo = intpoly.evaluate(self.min_poly, lo)
        for _ in range(100000):
            mid = (lo + hi) / 2
            val = intpoly.evaluate(coords, mid)
            mbound = max(abs(lo), abs(hi))
            deriv_bound = sum(abs(c) * i * mbound ** (i - 1)
                              for i, c in enumerate(coords) if i >= 1)
            if val != 0 and abs(val) > deriv_bound * (hi - lo):
                return 1 if val > 0 else -1
            fm = intpoly.evaluate(self.min_poly, mid)
            if fm == 0:
                raise SpecificationError("rational root of an irreducible polynomial")
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        raise PrecisionError("exact sign refinement did not terminate")

    # ---- primes

    def prime_splitting(self, p):
        if p in self._splitting_cache:
            return self._splitting_cache[p]
        self._ensure_max_order()
        if self.index % p != 0:
            ideals = _split_easy(self, p)
        else:
            ideals = _split_via_algebra(self, p)
        assert sum(P.e * P.f for P in ideals) == self.m
        self._splitting_cache[p] = ideals
        return ideals

    def to_json(self):
        embs = self.embeddings(192)
        d = {
            "family": self.spec.label() if self.spec else "raw",
            "params": _spec_params(self.spec),
            "a": getattr(self.spec, "a", None),
            "minpoly": list(self.min_poly),
            "d_F": self.disc,
            "index2": self.index_square,
            "embeddings": [
                {"re": mp.nstr(mp.re(e.value), 30), "im": mp.nstr(mp.im(e.value), 30), "label": e.label}
                for e in embs
            ],
        }
        return d

    def __repr__(self):
        return f"NumberField({list(self.min_poly)})"


def _spec_params(spec):
    if isinstance(spec, CubicSpec):
        return {"eps": spec.eps, "eps_prime": spec.eps_prime}
    if isinstance(spec, QuarticSpec):
        return {"b": spec.b, "c_offset": spec.c_offset, "eps": spec.eps}
    return {}


# ---- maximal order computation ----------------------------------------------

def _dedekind_maximal_at(poly, p):
    """Dedekind criterion: True if Z[u] is p-maximal."""
    fac = modpoly.factor(poly, p)
    g = (1,)
    h = (1,)
    for gi, e in fac:
        g = modpoly.mul(g, gi, p)
        for _ in range(e - 1):
            h = modpoly.mul(h, gi, p)
    glift = intpoly.trim(tuple(int(c) for c in g))
    hlift = intpoly.trim(tuple(int(c) for c in h))
    prod = intpoly.mul(glift, hlift)
    diff = intpoly.sub(prod, poly)
    t = tuple(int(c) // p for c in diff)
    u = modpoly.gcd(modpoly.gcd(modpoly.pmod(t, p), g, p), h, p)
    return len(u) <= 1


def _maximal_order(poly):
    """(integral_basis rows over power basis, d_F, index^2)."""
    m = len(poly) - 1
    disc = int(intpoly.discriminant(poly))
    basis = [[Fraction(int(i == j)) for j in range(m)] for i in range(m)]
    index = 1
    for p, e in factor_int(disc):
        if e < 2:
            continue
        if _dedekind_maximal_at(poly, p):
            continue
        while True:
            grew, basis = _round2_step(poly, basis, p)
            if not grew:
                break
            index *= grew
    d_f = disc // (index * index)
    return tuple(tuple(row) for row in basis), d_f, index * index


def _order_structure(poly, basis):
    """Multiplication of order basis elements, as integer coords over the basis."""
    m = len(poly) - 1
    field_mul_cache = {}

    def power_mul(a, b):
        # multiply two power-basis coordinate vectors mod poly
        out = [Fraction(0)] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        for k in range(2 * m - 2, m - 1, -1):
            c = out[k]
            if c:
                out[k] = 0
                for j in range(m):
                    out[k - m + j] -= c * poly[j]
        return out[:m]

    table = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(i, m):
            prod = power_mul(basis[i], basis[j])
            coords = _solve_fraction([list(b) for b in basis], prod)
            assert all(c.denominator == 1 for c in coords), "order not closed under multiplication"
            table[i][j] = table[j][i] = tuple(int(c) for c in coords)
    return table


def _round2_step(poly, basis, p):
    """One multiplier-ring enlargement at p. Returns (index growth or 0, new basis)."""
    m = len(poly) - 1
    table = _order_structure(poly, basis)

    def mul_vec(a, b):
        out = [0] * m
        for i, x in enumerate(a):
            if x % p:
                for j, y in enumerate(b):
                    if y % p:
                        t = table[i][j]
                        xy = x * y
                        for k in range(m):
                            out[k] += xy * t[k]
        return [c % p for c in out]

    def pow_vec(v, e):
        res = None
        base = v
        while e:
            if e & 1:
                res = base if res is None else mul_vec(res, base)
            e >>= 1
            if e:
                base = mul_vec(base, base)
        return res

    # radical of O/pO: kernel of x -> x^(p^k) with p^k >= m
    k = 1
    while p ** k < m:
        k += 1
    frob_cols = [pow_vec([int(i == j) for j in range(m)], p ** k) for i in range(m)]
    mat = [[frob_cols[j][i] % p for j in range(m)] for i in range(m)]
    rad = _nullspace_mod_p(mat, p)
    if not rad:
        return 0, basis
    # I = pO + <radical lifts>, HNF basis over the order coords
    rows = [[p * int(i == j) for j in range(m)] for i in range(m)]
    rows += [[int(c) % p for c in v] for v in rad]
    r_hnf = _hnf(rows, m)
    # multiplier ring (I : I): x = c/p with c*gamma_j in p*I for all j;
    # over F_p this is the joint kernel of c -> (c*gamma_j expressed in the I-basis) mod p
    mat2 = []
    for gamma in r_hnf:
        cols = []
        for i in range(m):
            e_i = [int(i == t) for t in range(m)]
            y = _mul_int(table, e_i, gamma)
            w = _solve_fraction([list(r) for r in r_hnf], y)
            assert all(c.denominator == 1 for c in w)
            cols.append([int(c) % p for c in w])
        for row_idx in range(m):
            mat2.append([cols[i][row_idx] for i in range(m)])
    kernel = _nullspace_mod_p(mat2, p)
    if not kernel:
        return 0, basis
    # new order basis: (1/p) * (pO + kernel lifts), expressed over the power basis
    rows = [[p * int(i == j) for j in range(m)] for i in range(m)]
    rows += [[int(c) % p for c in v] for v in kernel]
    s_hnf = _hnf(rows, m)
    new_basis = []
    for row in s_hnf:
        vec = [Fraction(0)] * m
        for i, c in enumerate(row):
            for t in range(m):
                vec[t] += Fraction(c, p) * basis[i][t]
        new_basis.append(vec)
    det_growth = 1
    for i in range(m):
        det_growth *= s_hnf[i][i]
    growth = p ** m // det_growth  # index multiplier
    return growth, new_basis


def _mul_int(table, a, b):
    m = len(table)
    out = [0] * m
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    t = table[i][j]
                    xy = x * y
                    for k in range(m):
                        out[k] += xy * t[k]
    return out


def _nullspace_mod_p(mat, p):
    """Basis of the right nullspace of mat over F_p."""
    if not mat:
        return []
    rows = [list(r) for r in mat]
    ncols = len(rows[0])
    pivots = {}
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots[c] = r
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for c, ri in pivots.items():
            v[c] = (-rows[ri][fc]) % p
        out.append(v)
    return out


# ---- embeddings --------------------------------------------------------------

_LABELS_CUBIC = ("u0", "u1", "uinf")
_LABELS_QUARTIC = ("u-1", "u0", "u1", "uinf")


def _asymptotic_values(spec):
    """Leading-order root locations for |a| >= 5, used for labeling only."""
    a = spec.a
    if isinstance(spec, CubicSpec):
        e, ep = spec.eps, spec.eps_prime
        vals = {
            "u0": Fraction(e, a) - Fraction(e * (ep + 1), a * a),
            "u1": 1 + Fraction(ep, a) + Fraction((e - 2) * ep, a * a),
        }
        vals["uinf"] = -a - vals["u0"] - vals["u1"]
        return vals
    b, eps = spec.b, spec.eps
    cp = spec.c_offset  # c = -a + cp
    vals = {
        "u-1": -1 - Fraction(b - cp + eps + 1, 2 * a),
        "u0": Fraction(eps, a) + Fraction(eps * cp, a * a),
        "u1": 1 - Fraction(b + cp + eps + 1, 2 * a),
    }
    vals["uinf"] = -a - vals["u-1"] - vals["u0"] - vals["u1"]
    return vals


def _newton_polish(poly, x0, prec, complex_ok):
    dpoly = intpoly.derivative(poly)
    with mp.workprec(prec + 32):
        x = mp.mpc(x0) if complex_ok else mp.mpf(x0)
        for _ in range(prec.bit_length() + 20):
            fx = _mp_eval(poly, x)
            dfx = _mp_eval(dpoly, x)
            if dfx == 0:
                raise PrecisionError("Newton derivative vanished")
            step = fx / dfx
            x = x - step
            if abs(step) <= mp.ldexp(1, -(prec + 8)) * (1 + abs(x)):
                break
        return x


def _mp_eval(poly, x):
    acc = mp.mpf(0)
    for c in reversed(poly):
        acc = acc * x + int(c)
    return acc


def _aberth(poly, prec):
    """All complex roots by Aberth iteration with a deterministic start."""
    n = len(poly) - 1
    dpoly = intpoly.derivative(poly)
    with mp.workprec(prec + 48):
        bound = float(intpoly.root_bound(poly))
        zs = [mp.mpc(mp.cos(0.7 + 2 * mp.pi * k / n), mp.sin(0.7 + 2 * mp.pi * k / n)) * bound * 0.7
              for k in range(n)]
        for _ in range(prec + 64):
            moved = mp.mpf(0)
            new = []
            for i, z in enumerate(zs):
                fz = _mp_eval(poly, z)
                dfz = _mp_eval(dpoly, z)
                if dfz == 0:
                    new.append(z + mp.mpf(2) ** (-10))
                    moved = mp.mpf(1)
                    continue
                ratio = fz / dfz
                s = sum(1 / (z - zj) for j, zj in enumerate(zs) if j != i)
                denom = 1 - ratio * s
                step = ratio / denom if denom != 0 else ratio
                new.append(z - step)
                moved = max(moved, abs(step))
            zs = new
            if moved <= mp.ldexp(1, -(prec + 16)) * max(1, bound):
                break
        return zs


def _compute_embeddings(field, prec):
    poly = field.min_poly
    m = field.m
    r1, r2 = field.signature()
    guard = 48
    with mp.workprec(prec + guard):
        # real roots: exact isolation, bisection, Newton
        reals = []
        for lo, hi in intpoly.isolate_real_roots(poly):
            flo = intpoly.evaluate(poly, lo)
            for _ in range(70):
                mid = (lo + hi) / 2
                fmid = intpoly.evaluate(poly, mid)
                if fmid == 0:
                    lo = hi = mid
                    break
                if (fmid > 0) == (flo > 0):
                    lo, flo = mid, fmid
                else:
                    hi = mid
            x = _newton_polish(poly, mp.mpf(lo.numerator) / lo.denominator, prec, complex_ok=False)
            reals.append((x, (lo, hi)))
        assert len(reals) == r1, "Sturm count vs isolation mismatch"
        reals.sort(key=lambda t: t[0])
        real_intervals = [iv for _x, iv in reals]
        reals = [x for x, _iv in reals]
        # complex pairs: deflate real roots then quadratic formula, or Aberth
        pairs = []
        if r2 == 1 and m - r1 == 2:
            coeffs = [mp.mpf(int(c)) for c in poly]
            for r in reals:
                # synthetic division by (x - r)
                new = []
                acc = mp.mpf(0)
                for c in reversed(coeffs):
                    acc = acc * r + c
                    new.append(acc)
                coeffs = list(reversed(new))[1:]
            c0, c1, c2 = coeffs[0], coeffs[1], coeffs[2]
            disc = c1 * c1 - 4 * c2 * c0
            if disc >= 0:
                raise PrecisionError("expected a complex pair after deflation")
            z = mp.mpc(-c1, mp.sqrt(-disc)) / (2 * c2)
            pairs = [_newton_polish(poly, z, prec, complex_ok=True)]
        elif r2 > 0:
            roots = _aberth(poly, prec)
            cand = [z for z in roots if mp.im(z) > 0]
            pairs = [_newton_polish(poly, z, prec, complex_ok=True) for z in cand]
        pairs = [z if mp.im(z) > 0 else mp.conj(z) for z in pairs]
        pairs.sort(key=lambda z: mp.re(z))
        assert len(pairs) == r2, "Aberth did not find the Sturm-predicted pairs"
        # labels
        labels = {}
        spec = field.spec
        if spec is not None and abs(spec.a) >= 5 and r1 == m:
            targets = _asymptotic_values(spec)
            names = _LABELS_CUBIC if m == 3 else _LABELS_QUARTIC
            used = set()
            for i, x in enumerate(reals):
                best = min((abs(x - mp.mpf(v.numerator) / v.denominator), n)
                           for n, v in targets.items() if n not in used)
                labels[i] = best[1]
                used.add(best[1])
        embs = []
        idx = 0
        for i, x in enumerate(reals):
            embs.append(Embedding(idx, x, True, labels.get(i, f"r{i}"), None, prec,
                                  interval=real_intervals[i]))
            idx += 1
        for j, z in enumerate(pairs):
            embs.append(Embedding(idx, z, False, f"c{j}", None, prec))
            upper = idx
            idx += 1
            embs.append(Embedding(idx, mp.conj(z), False, f"c{j}bar", upper, prec))
            idx += 1
        # Vieta sanity: product of roots = (-1)^m * constant term
        prod = mp.mpf(1)
        for e in embs:
            prod = prod * e.value
        target = (-1) ** m * poly[0]
        if abs(prod - target) > mp.ldexp(1, -(prec - 8)) * max(1, abs(target)):
            raise PrecisionError("root product fails Vieta check at this precision")
        return embs


# ---- unit conditions ---------------------------------------------------------

def integrality_conditions(field, n_tors, t):
    """Theorem 4.2 unit pairs: N=7: (t, 1-t); N=8: (1/t-1, 1/t-2); N=10: (1/t-1, 1-2t)."""
    t = field.coerce(t)
    if t.is_zero():
        raise ZeroDivisionError("t must be nonzero")
    if n_tors == 7:
        pair = (t, 1 - t)
    elif n_tors == 8:
        inv = t.inverse()
        pair = (inv - 1, inv - 2)
    elif n_tors == 10:
        inv = t.inverse()
        pair = (inv - 1, 1 - 2 * t)
    else:
        raise SpecificationError("N must be 7, 8 or 10")
    return all(field.is_unit(x) for x in pair)


# ---- quartic Galois groups ---------------------------------------------------

def resolvent_cubic(poly):
    """Resolvent cubic of monic quartic X^4+pX^3+qX^2+rX+s (ascending input)."""
    s0, r0, q0, p0, _ = [int(c) for c in poly]
    return (4 * q0 * s0 - r0 * r0 - p0 * p0 * s0, p0 * r0 - 4 * s0, -q0, 1)


def _rational_roots_monic(poly):
    """Integer roots of a monic integer polynomial (all divisors of the constant)."""
    const = poly[0]
    if const == 0:
        roots = _rational_roots_monic(intpoly.trim(poly[1:]))
        return sorted(set([0] + roots))
    divs = [1]
    for d, e in factor_int(const):
        divs = [x * d ** k for x in divs for k in range(e + 1)]
    cands = sorted(set(divs) | {-x for x in divs})
    return [r for r in cands if intpoly.evaluate(poly, r) == 0]


def galois_group(spec_or_poly):
    """Galois group of an irreducible quartic: 'S4' | 'A4' | 'D4' | 'C4' | 'V4'."""
    if isinstance(spec_or_poly, QuarticSpec):
        poly = build_polynomial(spec_or_poly)
    else:
        poly = intpoly.trim(spec_or_poly)
    if len(poly) - 1 != 4:
        raise SpecificationError("galois_group needs a quartic")
    if not is_irreducible(poly):
        raise SpecificationError("polynomial is reducible")
    disc = int(intpoly.discriminant(poly))
    res = resolvent_cubic(poly)
    roots = _rational_roots_monic(res)
    if not roots:
        return "A4" if is_square(disc) else "S4"
    # count linear factors of the resolvent with multiplicity
    nlin = 0
    rem = res
    for r in roots:
        while True:
            q, rr = intpoly.divmod_exact(rem, (-r, 1))
            if rr:
                break
            rem, nlin = q, nlin + 1
    if nlin >= 2:
        return "V4"
    # exactly one rational root beta: D4 or C4 (Kappe-Warren square refinement)
    beta = roots[0]
    s0, r0, q0, p0, _ = (int(c) for c in poly)
    d1 = p0 * p0 - 4 * (q0 - beta)   # disc of X^2 + pX + (q - beta)
    d2 = beta * beta - 4 * s0        # disc of X^2 - beta*X + s

    def splits_over_q_sqrt_disc(val):
        if val >= 0 and is_square(val):
            return True
        prod = val * disc
        return prod >= 0 and is_square(prod)

    if splits_over_q_sqrt_disc(d1) and splits_over_q_sqrt_disc(d2):
        return "C4"
    return "D4"


def galois_exception_info(spec):
    """Diagnostics when the computed group differs from the table's generic value."""
    poly = build_polynomial(spec)
    res = resolvent_cubic(poly)
    return {
        "disc_is_square": is_square(abs(int(intpoly.discriminant(poly)))) and int(intpoly.discriminant(poly)) > 0,
        "resolvent_integer_roots": _rational_roots_monic(res),
    }


# ---- prime splitting ---------------------------------------------------------

class PrimeIdeal:
    """Prime ideal above p with valuation machinery and residue field."""

    def __init__(self, field, p, e, f, alpha, beta, hnf_basis):
        self.field = field
        self.p = p
        self.e = e
        self.f = f
        self.alpha = alpha          # FieldElement: two-element generator (p, alpha)
        self.beta = beta            # FieldElement in p*P^(-1) \ pO
        self.hnf_basis = hnf_basis  # rows over the integral basis
        self.norm = p ** f
        self._rf = None
        self._uniformizer = None

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f})"

    def valuation(self, x):
        """v_P(x) for x in the field (exact; x != 0)."""
        x = self.field.coerce(x)
        if x.is_zero():
            raise ZeroDivisionError("valuation of 0")
        den = 1
        for c in x.coords:
            den = den * c.denominator // math.gcd(den, c.denominator)
        y = x * den
        v = self._valuation_integral(y)
        vden = 0
        d = den
        while d % self.p == 0:
            vden += 1
            d //= self.p
        return v - vden * self.e

    def _valuation_integral(self, y):
        return _valuation_integral_raw(self.field, self.p, self.beta, y)

    def residue_field(self):
        """(FiniteField, reduce(FieldElement)->elt, lift(elt)->FieldElement)."""
        if self._rf is None:
            self._rf = _build_residue_field(self)
        return self._rf

    def uniformizer(self):
        if self._uniformizer is None:
            if self.e == 1:
                self._uniformizer = self.field.coerce(self.p)
            else:
                cand = [self.alpha]
                for row in self.hnf_basis:
                    cand.append(self.field.element_from_integral_coords(row))
                for x in cand:
                    if not x.is_zero() and self.valuation(x) == 1:
                        self._uniformizer = x
                        break
                else:
                    raise RuntimeError("no uniformizer found in HNF basis")
        return self._uniformizer


def _valuation_integral_raw(field, p, beta, y):
    """Cohen's valuation loop: v_P(y) for integral y, via the valuation element beta."""
    v = 0
    while True:
        y = y * beta
        coords = field.to_integral_coords(y)
        assert all(c.denominator == 1 for c in coords)
        if any(int(c) % p for c in coords):
            return v
        y = field.element_from_integral_coords([int(c) // p for c in coords])
        v += 1


def _attach_integral_coords_helpers():
    def element_from_integral_coords(self, coords):
        basis = self.integral_basis
        vec = [Fraction(0)] * self.m
        for c, row in zip(coords, basis):
            for t in range(self.m):
                vec[t] += Fraction(c) * row[t]
        return FieldElement(self, vec)
    NumberField.element_from_integral_coords = element_from_integral_coords


_attach_integral_coords_helpers()


def _split_easy(field, p):
    """p does not divide the index: factor the minimal polynomial mod p."""
    fac = modpoly.factor(field.min_poly, p)
    u = field.gen()
    ideals = []
    for i, (gi, ei) in enumerate(fac):
        fi = len(gi) - 1
        alpha = _eval_poly_elt(field, gi, u)
        # beta = prod_{j != i} gj^{ej} * gi^{ei - 1} evaluated at u
        bpoly = (1,)
        for j, (gj, ej) in enumerate(fac):
            power = ej if j != i else ei - 1
            for _ in range(power):
                bpoly = modpoly.mul(bpoly, gj, p)
        beta = _eval_poly_elt(field, bpoly, u)
        hnf = _ideal_hnf(field, p, alpha)
        ideals.append(PrimeIdeal(field, p, ei, fi, alpha, beta, hnf))
    return ideals


def _eval_poly_elt(field, poly_mod_p, u):
    acc = field.zero()
    for c in reversed(poly_mod_p):
        acc = acc * u + int(c)
    return acc


def _ideal_hnf(field, p, alpha):
    """HNF rows (over the integral basis) of pO + alpha*O."""
    m = field.m
    rows = [[p * int(i == j) for j in range(m)] for i in range(m)]
    for i in range(m):
        e_i = field.element_from_integral_coords([int(i == j) for j in range(m)])
        prod = alpha * e_i
        coords = field.to_integral_coords(prod)
        assert all(c.denominator == 1 for c in coords)
        rows.append([int(c) for c in coords])
    return _hnf(rows, m)


def _split_via_algebra(field, p):
    """General splitting via the F_p-algebra A = O/pO (used when p divides the index).

    Decomposes the semisimple quotient A/rad(A) into fields by idempotent
    splitting; each field component corresponds to one prime above p.
    """
    import random as _random

    m = field.m
    basis = field.integral_basis
    table = _order_structure(field.min_poly, [list(b) for b in basis])

    def mul_vec(a, b):
        return [c % p for c in _mul_int(table, a, b)]

    def pow_vec(v, e):
        res = None
        base = v
        while e:
            if e & 1:
                res = base if res is None else mul_vec(res, base)
            e >>= 1
            if e:
                base = mul_vec(base, base)
        return res

    one = [int(c) % p for c in field.to_integral_coords(field.one())]
    # radical of A: kernel of x -> x^(p^k), p^k >= m
    k = 1
    while p ** k < m:
        k += 1
    cols = [pow_vec([int(i == j) for j in range(m)], p ** k) for i in range(m)]
    rad = _nullspace_mod_p([[cols[j][i] for j in range(m)] for i in range(m)], p)
    radbasis = _row_space_basis(rad, p)
    # quotient Abar = A/rad on a complement basis, with projection pi
    comp = _complement_basis(radbasis, m, p)
    nbar = len(comp)
    basis_rows = radbasis + comp

    def pi(vec):
        sol = _express(basis_rows, [c % p for c in vec], p)
        return tuple(sol[len(radbasis):])

    def lift_bar(vbar):
        out = [0] * m
        for c, b in zip(vbar, comp):
            out = [(a + c * bb) % p for a, bb in zip(out, b)]
        return out

    def mul_bar(u, v):
        return pi(mul_vec(lift_bar(u), lift_bar(v)))

    one_bar = pi(one)

    def eval_bar(poly, x, ident):
        acc = (0,) * nbar
        for c in reversed(poly):
            acc = mul_bar(acc, x)
            acc = tuple((a + c * o) % p for a, o in zip(acc, ident))
        return acc

    def min_poly_bar(x, ident, sub_basis):
        pows = [ident]
        vecs = [list(ident)]
        cur = ident
        while True:
            cur = mul_bar(cur, x)
            if _rank(vecs + [list(cur)], p) == _rank(vecs, p):
                pows.append(cur)
                break
            vecs.append(list(cur))
            pows.append(cur)
        n = len(pows) - 1
        aug = [[pows[j][i] % p for j in range(n)] for i in range(nbar)]
        rhs = [pows[n][i] % p for i in range(nbar)]
        sol = _solve_underdetermined(aug, rhs, p)
        mu = [(-c) % p for c in sol] + [1]
        return modpoly.trim(tuple(mu))

    rng = _random.Random(p * 1000003 + m)
    # components: (basis vectors in Abar coords, identity in Abar coords)
    full = _row_space_basis([[int(i == j) for j in range(nbar)] for i in range(nbar)], p)
    todo = [(full, one_bar)]
    fields_found = []
    while todo:
        sub, ident = todo.pop()
        dim = len(sub)
        if dim == 1:
            fields_found.append((sub, ident))
            continue
        done = False
        for _try in range(60):
            x = [0] * nbar
            for v in sub:
                c = rng.randrange(p)
                x = [(a + c * b) % p for a, b in zip(x, v)]
            x = tuple(x)
            mu = min_poly_bar(x, ident, sub)
            fac = modpoly.factor(mu, p)
            if len(fac) == 1 and fac[0][1] == 1:
                if len(fac[0][0]) - 1 == dim:
                    fields_found.append((sub, ident))
                    done = True
                    break
                continue  # generates a proper subfield; retry
            # split off the first factor via CRT idempotents
            mu1 = (1,)
            for _ in range(fac[0][1]):
                mu1 = modpoly.mul(mu1, fac[0][0], p)
            mu2 = modpoly.divmod_(mu, mu1, p)[0]
            g, s, _t = _modpoly_xgcd(mu1, mu2, p)
            assert len(g) == 1
            inv = pow(g[0], -1, p)
            s = tuple(c * inv % p for c in s)
            epoly = modpoly.mul(s, mu1, p)  # = 1 mod mu2, 0 mod mu1
            evec = eval_bar(epoly, x, ident)
            c1, c2 = [], []
            for v in sub:
                w = mul_bar(evec, tuple(v))
                c2.append(list(w))
                c1.append([(a - b) % p for a, b in zip(v, w)])
            b1 = _row_space_basis(c1, p)
            b2 = _row_space_basis(c2, p)
            if b1 and b2:
                id2 = evec
                id1 = tuple((a - b) % p for a, b in zip(ident, evec))
                todo.append((b1, id1))
                todo.append((b2, id2))
                done = True
                break
        if not done:
            raise RuntimeError("failed to split O/pO")
    ideals = []
    for sub, ident in fields_found:
        others = [v for sub2, _id in fields_found if sub2 is not sub for v in sub2]
        rows = [[p * int(i == j) for j in range(m)] for i in range(m)]
        rows += [list(v) for v in radbasis]
        rows += [lift_bar(v) for v in others]
        hnf = _hnf(rows, m)
        fdeg = len(sub)
        alpha = next(field.element_from_integral_coords(row) for row in hnf if any(c % p for c in row))
        # beta in (p P^-1) \ pO: joint kernel of c -> c*h mod pO over HNF generators h
        conds = []
        for hrow in hnf:
            tmat = []
            for i in range(m):
                e_i = [int(i == t) for t in range(m)]
                tmat.append(_mul_int(table, e_i, hrow))
            for rr in range(m):
                conds.append([tmat[i][rr] % p for i in range(m)])
        kern = _nullspace_mod_p(conds, p)
        beta_vec = next(v for v in kern if any(c % p for c in v))
        beta = field.element_from_integral_coords([c % p for c in beta_vec])
        e = _valuation_integral_raw(field, p, beta, field.coerce(p))
        ideals.append(PrimeIdeal(field, p, e, fdeg, alpha, beta, hnf))
    return ideals


def _complement_basis(rad, m, p):
    """Basis of a complement of the radical in F_p^m (coordinates of O/pO)."""
    rows = [[c % p for c in v] for v in rad]
    basis = _row_space_basis(rows, p)
    comp = []
    cur = [r[:] for r in basis]
    for i in range(m):
        v = [int(i == j) for j in range(m)]
        if _rank(cur + comp + [v], p) > _rank(cur + comp, p):
            comp.append(v)
    return comp


def _row_space_basis(rows, p):
    rows = [list(r) for r in rows]
    out = []
    for row in rows:
        cur = [c % p for c in row]
        for b in out:
            lead = next((i for i, c in enumerate(b) if c), None)
            if lead is not None and cur[lead]:
                f = cur[lead] * pow(b[lead], -1, p) % p
                cur = [(c - f * d) % p for c, d in zip(cur, b)]
        if any(cur):
            out.append(cur)
    return out


def _rank(rows, p):
    return len(_row_space_basis(rows, p))


def _min_poly_mod_algebra(x, comp, rad, mul_vec, one, p):
    """Minimal polynomial of x acting in the quotient algebra (mod radical)."""
    # build the space spanned by powers of x together with rad
    radbasis = _row_space_basis([[c % p for c in v] for v in rad], p)
    pows = [one]
    vecs = list(radbasis) + [one]
    cur = one
    while True:
        cur = mul_vec(cur, x)
        if _rank(vecs + [cur], p) == _rank(vecs, p):
            pows.append(cur)
            break
        vecs.append(cur)
        pows.append(cur)
    # solve for the dependency: cur = combination of previous powers mod rad
    n = len(pows) - 1
    cols = pows[:n]
    mat = []
    m = len(x)
    aug = [[0] * (n + len(radbasis)) for _ in range(m)]
    for i in range(m):
        for j in range(n):
            aug[i][j] = cols[j][i] % p
        for j, rv in enumerate(radbasis):
            aug[i][n + j] = rv[i] % p
    rhs = [pows[n][i] % p for i in range(m)]
    sol = _solve_underdetermined(aug, rhs, p)
    coeffs = sol[:n]
    mu = [(-c) % p for c in coeffs] + [1]
    return modpoly.trim(tuple(mu))


def _solve_underdetermined(aug, rhs, p):
    rows = [list(r) + [b % p] for r, b in zip(aug, rhs)]
    ncols = len(aug[0])
    pivots = {}
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = pow(rows[r][c], -1, p)
        rows[r] = [x * inv % p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
        pivots[c] = r
        r += 1
    for i in range(r, len(rows)):
        if rows[i][ncols] % p:
            raise ValueError("inconsistent system")
    sol = [0] * ncols
    for c, ri in pivots.items():
        sol[c] = rows[ri][ncols]
    return sol


def _eval_in_algebra(poly, x, mul_vec, one, p):
    acc = [0] * len(x)
    for c in reversed(poly):
        acc = mul_vec(acc, x)
        acc = [(a + c * o) % p for a, o in zip(acc, one)]
    return acc


def _modpoly_xgcd(a, b, p):
    r0, r1 = modpoly.pmod(a, p), modpoly.pmod(b, p)
    s0, s1 = (1,), ()
    t0, t1 = (), (1,)
    while r1:
        q, r = modpoly.divmod_(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, modpoly.sub(s0, modpoly.mul(q, s1, p), p)
        t0, t1 = t1, modpoly.sub(t0, modpoly.mul(q, t1, p), p)
    return r0, s0, t0


def _build_residue_field(ideal):
    """Residue field O/P as a FiniteField plus reduce/lift maps."""
    field = ideal.field
    p, m = ideal.p, field.m
    hnf = ideal.hnf_basis
    # quotient O/P: F_p-space of dim f; choose coordinate representatives
    # basis of P mod p:
    prows = _row_space_basis([[c % p for c in r] for r in hnf], p)
    # complement basis gives coset representatives
    comp = []
    for i in range(m):
        v = [int(i == j) for j in range(m)]
        if _rank(prows + comp + [v], p) > _rank(prows + comp, p):
            comp.append(v)
    f = len(comp)
    assert f == ideal.f
    # projection: integral coords -> coefficients over comp (mod prows)
    basis_rows = prows + comp
    def project(vec):
        sol = _express(basis_rows, [c % p for c in vec], p)
        return tuple(sol[len(prows):])
    table = _order_structure(field.min_poly, [list(b) for b in field.integral_basis])
    mult = []
    for i in range(f):
        row = []
        for j in range(f):
            prod = _mul_int(table, comp[i], comp[j])
            row.append(project(prod))
        mult.append(tuple(row))
    onevec = [int(c) for c in field.to_integral_coords(field.one())]
    K = FiniteField(p, tuple(mult), project(onevec))

    def reduce_elt(x):
        coords = field.to_integral_coords(field.coerce(x))
        vec = []
        for c in coords:
            if c.denominator % p == 0:
                raise ZeroDivisionError("element not integral at p")
            vec.append(c.numerator * pow(c.denominator, -1, p) % p)
        return project(vec)

    def lift_elt(kx):
        vec = [0] * m
        for c, b in zip(kx, comp):
            vec = [(a + c * bb) for a, bb in zip(vec, b)]
        return field.element_from_integral_coords(vec)

    return K, reduce_elt, lift_elt


def _express(basis_rows, vec, p):
    """Write vec as combination of basis_rows over F_p."""
    n = len(basis_rows)
    m = len(vec)
    aug = [[basis_rows[j][i] % p for j in range(n)] for i in range(m)]
    return _solve_underdetermined(aug, vec, p)
