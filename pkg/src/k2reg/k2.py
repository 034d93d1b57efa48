"""Diamond images of the K2 elements in Z[E(C)]^-.

A DivisorClass is an integer-weighted sum of points modulo the relation
[-P] = -[P]. Points are either exact curve points or symbolic P +- T_q pairs
(the T_q y-coordinate may live outside F; it is resolved per embedding by the
analytic layer). These classes are the only thing the regulator pairing needs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .curves import CurvePoint, C_LAMBDA
from .fields import SpecificationError


@dataclass(frozen=True)
class SymbolicPoint:
    """P + sign*T_q on a rank-family curve; q_index in 0..2."""
    q_index: int
    sign: int


def _canonical_term(model, point, weight):
    """Canonical (key, weight) under [-P] = -[P]; None when the term dies."""
    if isinstance(point, SymbolicPoint):
        # -(P + sT) = (-P) + (-s)T; canonical representative has base +P
        return ("sym", point.q_index, point.sign), weight
    if point.is_infinity:
        return None  # [O] = [-O] is 2-torsion in Z[E]^-, and R_tau(O) = 0
    neg = model.negate(point)
    if neg == point:
        # 2-torsion: [P] has order 2, keep weight mod 2
        w = weight % 2
        if w == 0:
            return None
        return ("pt", point), w
    key_p = ("pt", point)
    key_n = ("pt", neg)
    # deterministic orbit representative: lexicographically smaller coordinate tuple
    if (tuple(point.x.coords), tuple(point.y.coords)) <= (tuple(neg.x.coords), tuple(neg.y.coords)):
        return key_p, weight
    return key_n, -weight


class DivisorClass:
    """Normalized element of Z[E(C)]^-; also records the pre-quotient total weight."""

    def __init__(self, model, terms, total_weight=None):
        self.model = model
        acc = {}
        raw_total = 0
        for point, w in terms:
            raw_total += w
            canon = _canonical_term(model, point, w)
            if canon is None:
                continue
            key, ww = canon
            acc[key] = acc.get(key, 0) + ww
        self.terms = {k: v for k, v in acc.items() if v != 0}
        # weight-0 discipline: every in-scope class must have degree 0 before the quotient
        self.total_weight = raw_total if total_weight is None else total_weight

    def __add__(self, other):
        assert self.model is other.model
        out = DivisorClass(self.model, [])
        combined = dict(self.terms)
        for k, v in other.terms.items():
            combined[k] = combined.get(k, 0) + v
        out.terms = {k: v for k, v in combined.items() if v != 0}
        out.total_weight = self.total_weight + other.total_weight
        return out

    def scale(self, c):
        out = DivisorClass(self.model, [])
        if c % 1 == 0:
            c = int(c)
        out.terms = {k: v * c for k, v in self.terms.items() if v * c != 0}
        out.total_weight = self.total_weight * c
        return out

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def items(self):
        """Deterministic iteration order."""
        def sortkey(kv):
            key = kv[0]
            if key[0] == "sym":
                return (1, key[1], key[2])
            pt = key[1]
            return (0, tuple(map(str, pt.x.coords)), tuple(map(str, pt.y.coords)))
        return sorted(self.terms.items(), key=sortkey)

    def to_json(self):
        out = []
        for key, w in self.items():
            if key[0] == "sym":
                out.append({"point": {"symbolic": True, "q_index": key[1], "sign": key[2]},
                            "weight": w})
            else:
                pt = key[1]
                out.append({"point": {"x": [str(c) for c in pt.x.coords],
                                      "y": [str(c) for c in pt.y.coords]},
                            "weight": w})
        return out

    def __repr__(self):
        return f"DivisorClass({self.terms})"


def diamond_general(model, div_f, div_g):
    """(f) diamond (g) = sum m_i n_j (a_i - b_j), normalized in Z[E(C)]^-."""
    if sum(w for _, w in div_f) != 0 or sum(w for _, w in div_g) != 0:
        raise ValueError("diamond needs degree-zero divisors")
    terms = []
    for a, m_w in div_f:
        for b, n_w in div_g:
            diff = model.add(a, model.negate(b))
            terms.append((diff, m_w * n_w))
    return DivisorClass(model, terms)


def diamond_torsion(model, n_tors, s):
    """Diamond image of the torsion-construction element: -N^3 (sP) + N^3 (O)."""
    if not (1 <= s <= (n_tors - 1) // 2):
        raise SpecificationError(f"s must be in 1..{(n_tors - 1) // 2}")
    p0 = model.point(0, 0)
    sp = model.multiply(s, p0)
    n3 = n_tors ** 3
    return DivisorClass(model, [(sp, -n3), (CurvePoint.infinity(), n3)])


def diamond_torsion_by_general(model, n_tors, s):
    """The same class from the raw diamond of the defining divisors (test route)."""
    p0 = model.point(0, 0)
    o = CurvePoint.infinity()
    div_f = [(model.multiply(s, p0), n_tors), (o, -n_tors)]
    div_g = [(model.multiply(t, p0), n_tors) for t in range(n_tors)]
    div_g.append((o, -n_tors * n_tors))
    return diamond_general(model, div_f, div_g)


def diamond_mq(family, q_index):
    """6 C_lambda ((P+T_q) + (P-T_q) - 2(P)) for the rank-family element M_q."""
    if q_index not in (0, 1, 2):
        raise SpecificationError("q_index must be 0, 1 or 2")
    c = 6 * C_LAMBDA[family.lam]
    return DivisorClass(family.model, [
        (SymbolicPoint(q_index, +1), c),
        (SymbolicPoint(q_index, -1), c),
        (family.point_p, -2 * c),
    ])


def diamond_m(family):
    """Diamond image of M: (1/(2 C_lambda)) sum_q M_q = 3 sum_q ((P+T_q)+(P-T_q)-2(P))."""
    terms = []
    for q_index in range(3):
        terms += [
            (SymbolicPoint(q_index, +1), 3),
            (SymbolicPoint(q_index, -1), 3),
            (family.point_p, -6),
        ]
    return DivisorClass(family.model, terms)
