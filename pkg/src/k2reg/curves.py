"""Elliptic curve models over the constructed fields, with exact arithmetic.

Tate normal forms for N = 7, 8, 10 (with the parameter maps t(u)), the
rank-3 family built from a non-torsion point (the y^2 = t x'^3 + (x'+1)^2
model converted to long Weierstrass form), invariants, and the chord-tangent
group law. Everything is exact; floating point only enters downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .fields import FieldElement, NumberField, SpecificationError


class DegenerateParameterError(ValueError):
    """The parameter hits a zero of the family discriminant."""


class CurvePoint:
    """Affine point (x, y) or the point at infinity (x = y = None)."""

    __slots__ = ("x", "y")

    def __init__(self, x=None, y=None):
        self.x = x
        self.y = y

    @classmethod
    def infinity(cls):
        return cls(None, None)

    @property
    def is_infinity(self):
        return self.x is None

    def __eq__(self, other):
        if not isinstance(other, CurvePoint):
            return NotImplemented
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        return self.x == other.x and self.y == other.y

    def __hash__(self):
        if self.is_infinity:
            return hash("oo")
        return hash((self.x.coords, self.y.coords))

    def __repr__(self):
        if self.is_infinity:
            return "CurvePoint(oo)"
        return f"CurvePoint({self.x!r}, {self.y!r})"


class CurveModel:
    """Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    def __init__(self, field, a1, a2, a3, a4, a6, provenance=("raw",)):
        self.field = field
        self.a1 = field.coerce(a1)
        self.a2 = field.coerce(a2)
        self.a3 = field.coerce(a3)
        self.a4 = field.coerce(a4)
        self.a6 = field.coerce(a6)
        self.provenance = provenance
        if self.discriminant().is_zero():
            raise DegenerateParameterError("singular Weierstrass model")

    # ---- invariants

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def c_invariants(self):
        b2, b4, b6, _ = self.b_invariants()
        c4 = b2 * b2 - 24 * b4
        c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6
        return c4, c6

    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def invariants(self):
        """(c4, c6, Delta, j)."""
        c4, c6 = self.c_invariants()
        delta = self.discriminant()
        j = c4 * c4 * c4 / delta
        return c4, c6, delta, j

    def a_invariants(self):
        return self.a1, self.a2, self.a3, self.a4, self.a6

    # ---- points and group law

    def point(self, x, y):
        x = self.field.coerce(x)
        y = self.field.coerce(y)
        pt = CurvePoint(x, y)
        if not self.contains(pt):
            raise ValueError("point is not on the curve")
        return pt

    def contains(self, pt):
        if pt.is_infinity:
            return True
        x, y = pt.x, pt.y
        lhs = y * y + self.a1 * x * y + self.a3 * y
        rhs = x * x * x + self.a2 * x * x + self.a4 * x + self.a6
        return (lhs - rhs).is_zero()

    def negate(self, pt):
        if pt.is_infinity:
            return pt
        return CurvePoint(pt.x, -pt.y - self.a1 * pt.x - self.a3)

    def add(self, p, q):
        if p.is_infinity:
            return q
        if q.is_infinity:
            return p
        a1, a2, a3 = self.a1, self.a2, self.a3
        x1, y1, x2, y2 = p.x, p.y, q.x, q.y
        if x1 == x2:
            if (y1 + y2 + a1 * x2 + a3).is_zero():
                return CurvePoint.infinity()
            lam = (3 * x1 * x1 + 2 * a2 * x1 + self.a4 - a1 * y1) / (2 * y1 + a1 * x1 + a3)
        else:
            lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return CurvePoint(x3, y3)

    def multiply(self, k, pt):
        k = int(k)
        if k < 0:
            return self.multiply(-k, self.negate(pt))
        acc = CurvePoint.infinity()
        base = pt
        while k:
            if k & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            k >>= 1
        return acc

    def point_order(self, pt, bound=16):
        """Order of pt, or None if it exceeds bound."""
        q = pt
        for n in range(1, bound + 1):
            if q.is_infinity:
                return n
            q = self.add(q, pt)
        return None

    def to_json(self):
        return {
            "field_ref": list(self.field.min_poly),
            "a_invariants": [[str(c) for c in a.coords] for a in self.a_invariants()],
            "provenance": list(self.provenance),
            "torsion_order": self.provenance[1] if self.provenance[0] == "tate_normal" else None,
        }

    def __repr__(self):
        return f"CurveModel({self.provenance})"


# ---- Tate normal forms -------------------------------------------------------

def parameter_from_field(n_tors, u):
    """Theorem 4.7 maps: N=7: t=u; N=8: t=1/(u+1); N=10: t=(1-u)/2."""
    field = u.field
    if n_tors == 7:
        return u
    if n_tors == 8:
        if (u + 1).is_zero():
            raise ZeroDivisionError("u = -1 is not allowed for N = 8")
        return (u + 1).inverse()
    if n_tors == 10:
        return (1 - u) / 2
    raise SpecificationError("N must be 7, 8 or 10")


def tate_normal_fg(n_tors, t):
    """(f, g) columns of the Tate-normal-form table."""
    field = t.field
    if n_tors == 7:
        f = t * t * t - t * t
        g = t * t - t
    elif n_tors == 8:
        if t.is_zero():
            raise DegenerateParameterError("t = 0 for N = 8")
        f = 2 * t * t - 3 * t + 1
        g = f / t
    elif n_tors == 10:
        den = t * t - 3 * t + 1
        if den.is_zero():
            raise DegenerateParameterError("t^2 - 3t + 1 = 0 for N = 10")
        f = (2 * t ** 5 - 3 * t ** 4 + t ** 3) / (den * den)
        g = (-2 * t ** 3 + 3 * t * t - t) / den
    else:
        raise SpecificationError("N must be 7, 8 or 10")
    return f, g


def tate_discriminant_formula(n_tors, t):
    """Closed form of Delta from the table (exact cross-check of the model)."""
    one = t.field.one()
    if n_tors == 7:
        return t ** 7 * (t - 1) ** 7 * (t ** 3 - 8 * t * t + 5 * t + 1)
    if n_tors == 8:
        return t ** (-4) * (t - 1) ** 8 * (2 * t - 1) ** 4 * (8 * t * t - 8 * t + 1)
    if n_tors == 10:
        return (t ** 10 * (t - 1) ** 10 * (2 * t - 1) ** 5
                * (t * t - 3 * t + 1) ** (-10) * (4 * t * t - 2 * t - 1))
    raise SpecificationError("N must be 7, 8 or 10")


def tate_normal_form(n_tors, t, check_order=True):
    """Curve y^2 + (1-g)xy - fy = x^3 - fx^2 with P=(0,0) of exact order N."""
    field = t.field
    f, g = tate_normal_fg(n_tors, t)
    try:
        model = CurveModel(field, 1 - g, -f, -f, 0, 0, provenance=("tate_normal", n_tors))
    except DegenerateParameterError:
        raise DegenerateParameterError(
            f"Delta_{n_tors}(t) = 0: t is a degenerate parameter for N = {n_tors}")
    assert model.discriminant() == tate_discriminant_formula(n_tors, t)
    if check_order:
        p0 = model.point(0, 0)
        q = p0
        for k in range(1, n_tors):
            assert not q.is_infinity, f"(0,0) has order {k} < {n_tors}"
            q = model.add(q, p0)
        assert q.is_infinity, "(0,0) does not have order N"
    return model


# ---- the section-6 (non-torsion point) family --------------------------------

C_LAMBDA = {1: 6, 2: 4, 3: 3, 4: 2}


@dataclass
class RankFamilyModel:
    """Long model Y^2 = X^3 + X^2 + 2tX + t^2 of y'^2 = t x'^3 + (x'+1)^2.

    Points carried exactly: the 3-torsion point P=(0, t) (in (X, Y)), and the
    x-coordinates of the three T_q; their Y-coordinates involve
    mu = sqrt(lambda^2 - 4*lambda) and are resolved per embedding.
    """
    model: CurveModel
    lam: int
    p: FieldElement
    t: FieldElement
    point_p: CurvePoint
    tq_x: tuple          # three FieldElements: X-coordinate of T_q
    tq_y_scale: tuple    # three FieldElements s_q with Y(T_q) = s_q * mu
    q_values: tuple      # (p, p+1, p(p+1)) as FieldElements

    @property
    def c_lambda(self):
        return C_LAMBDA[self.lam]


def rank_family_model(lam, p):
    """Build the family curve for lambda in 1..4 and p in F (p != 0, -1; 27t != 4)."""
    if lam not in C_LAMBDA:
        raise SpecificationError("lambda must be 1, 2, 3 or 4")
    field = p.field
    if p.is_zero() or (p + 1).is_zero():
        raise DegenerateParameterError("p must avoid 0 and -1")
    a_val = p * p + p + 1
    b_val = (p * (p + 1)) ** 2
    t = (4 * b_val) / (lam * a_val ** 3)
    if (27 * t - 4).is_zero():
        raise DegenerateParameterError("27t = 4: degenerate member of the family")
    model = CurveModel(field, 0, 1, 0, 2 * t, t * t, provenance=("section6", lam))
    point_p = model.point(0, t)
    qs = (p, p + 1, p * (p + 1))
    tq_x = tuple(t * (-(a_val * q * q) / b_val) for q in qs)
    tq_y_scale = tuple(t * (q ** 3) / (lam * b_val) for q in qs)
    return RankFamilyModel(model, lam, p, t, point_p, tq_x, tq_y_scale, qs)


def rank_family_from_unit(lam, field):
    """p = u - 1 with u the distinguished exceptional unit of the cubic field."""
    return rank_family_model(lam, field.gen() - 1)
