"""Beilinson regulator matrices from diamond images.

Rows follow the embedding types: a real embedding sigma contributes
  <gamma, alpha> = -(c / 2 pi) * D_tau(u),
a conjugate pair contributes the two rows
  (1/(pi y)) J_tau(u)   and   -(1/pi) D_tau(u) + (x/(pi y)) J_tau(u),
with u the diamond image resolved on the embedded torus. detAbs carries a
digits-agreed estimate from a second evaluation at higher precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import mpmath as mp

from . import analytic
from .analytic import LatticeTau, TorusPoint, bernoulli3, frac_part
from .curves import CurveModel, RankFamilyModel, C_LAMBDA
from .fields import PrecisionError
from .k2 import DivisorClass, SymbolicPoint


def embed_element(x, root):
    """Evaluate a FieldElement at an embedding value (mp Horner)."""
    acc = mp.mpf(0)
    for c in reversed(x.coords):
        acc = acc * root + mp.mpf(c.numerator) / c.denominator
    return acc


class EmbeddedCurve:
    """One embedding of a curve: periods, tau, and a point-resolution cache."""

    def __init__(self, model, family, embedding, prec):
        self.embedding = embedding
        self.prec = prec
        self.family = family  # RankFamilyModel or None
        root = embedding.value
        with mp.workprec(prec + 2 * analytic.GUARD):
            a_invs = tuple(embed_element(a, root) for a in model.a_invariants())
            disc_sign = None
            if embedding.is_real:
                disc_sign = model.field.exact_real_sign(model.discriminant(), embedding)
            self.pd = analytic.periods(a_invs, prec, disc_sign=disc_sign)
        self.model = model
        self._cache = {}
        self._sym_cache = {}

    @property
    def tau(self):
        return self.pd.tau

    def resolve_exact(self, point):
        key = point
        if key in self._cache:
            return self._cache[key]
        root = self.embedding.value
        if point.is_infinity:
            tp = TorusPoint(mp.mpf(0), mp.mpf(0))
        else:
            with mp.workprec(self.prec + 2 * analytic.GUARD):
                X = embed_element(point.x, root)
                Y = embed_element(point.y, root)
                tp = analytic.elliptic_log(self.pd, X, Y, self.prec)
        self._cache[key] = tp
        return tp

    def _tq_log(self, q_index):
        if q_index in self._sym_cache:
            return self._sym_cache[q_index]
        fam = self.family
        if fam is None:
            raise ValueError("symbolic points need a rank-family curve")
        root = self.embedding.value
        with mp.workprec(self.prec + 2 * analytic.GUARD):
            lam = fam.lam
            mu = mp.sqrt(mp.mpc(lam * lam - 4 * lam))
            X = embed_element(fam.tq_x[q_index], root)
            Y = embed_element(fam.tq_y_scale[q_index], root) * mu
            tp = analytic.elliptic_log(self.pd, X, Y, self.prec)
        self._sym_cache[q_index] = tp
        return tp

    def resolve(self, key):
        """Resolve a DivisorClass term key to a TorusPoint."""
        if key[0] == "pt":
            return self.resolve_exact(key[1])
        _, q_index, sign = key
        zp = self.resolve_exact(self.family.point_p)
        zt = self._tq_log(q_index)
        return analytic.torus_add(zp, zt, sign)


def _class_points(emb_curve, cls):
    """[(TorusPoint, weight)] with origin terms dropped (R_tau(0) = 0)."""
    if cls.total_weight != 0:
        raise ValueError("divisor class must have total weight zero")
    out = []
    with mp.workprec(emb_curve.prec + 2 * analytic.GUARD):
        tol = mp.mpf(2) ** (-(emb_curve.prec // 2))
        for key, w in cls.items():
            tp = emb_curve.resolve(key)
            if tp.is_origin(tol):
                continue
            out.append((tp, w))
    return out


def pairing_real(emb_curve, cls, prec=None):
    """-(c/2pi) sum w_i D_tau(u_i) for a real-type embedding."""
    prec = prec or emb_curve.prec
    tau = emb_curve.tau
    if tau.c is None:
        raise ValueError("pairing_real needs a real-type lattice")
    with mp.workprec(prec + 2 * analytic.GUARD):
        total = mp.mpf(0)
        for tp, w in _class_points(emb_curve, cls):
            total += w * analytic.elliptic_d(tau, tp, prec)
        return -tau.c / (2 * mp.pi) * total


def pairing_complex_pair(emb_curve, cls, prec=None):
    """The two rows attached to a conjugate pair of embeddings."""
    prec = prec or emb_curve.prec
    tau = emb_curve.tau
    with mp.workprec(prec + 2 * analytic.GUARD):
        sum_d = mp.mpf(0)
        sum_j = mp.mpf(0)
        for tp, w in _class_points(emb_curve, cls):
            sum_d += w * analytic.elliptic_d(tau, tp, prec)
            sum_j += w * analytic.elliptic_j(tau, tp, prec)
        y = tau.y
        row1 = sum_j / (mp.pi * y)
        row2 = -sum_d / mp.pi + tau.x * sum_j / (mp.pi * y)
        return row1, row2


@dataclass
class RegulatorMatrix:
    entries: list
    row_labels: list
    col_labels: list
    det_abs: object
    digits_agreed: int
    prec: int

    def to_json(self, extra=None):
        doc = {
            "entries": [[mp.nstr(x, max(8, self.prec // 4)) for x in row] for row in self.entries],
            "row_labels": self.row_labels,
            "col_labels": self.col_labels,
            "detAbs": mp.nstr(self.det_abs, max(8, self.prec // 4)),
            "digits_agreed": self.digits_agreed,
        }
        if extra:
            doc.update(extra)
        return doc


def _det(matrix):
    n = len(matrix)
    a = [row[:] for row in matrix]
    det = mp.mpf(1)
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0:
            return mp.mpf(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            for c in range(col, n):
                a[r][c] -= f * a[col][c]
    return det


def _matrix_at(model, family, field, classes, prec, labels=None):
    embs = field.embeddings(prec)
    rows = []
    row_labels = []
    done_pairs = set()
    for emb in embs:
        if emb.is_real:
            ec = EmbeddedCurve(model, family, emb, prec)
            rows.append([pairing_real(ec, cls, prec) for cls in classes])
            row_labels.append(f"real:{emb.label}")
        else:
            if emb.conjugate_of is not None:
                continue  # lower-half partner
            ec = EmbeddedCurve(model, family, emb, prec)
            pairs = [pairing_complex_pair(ec, cls, prec) for cls in classes]
            rows.append([p[0] for p in pairs])
            rows.append([p[1] for p in pairs])
            row_labels.append(f"pair:{emb.label}:gamma1")
            row_labels.append(f"pair:{emb.label}:gamma2")
    return rows, row_labels


def regulator(field, model, classes, prec=192, family=None, col_labels=None):
    """RegulatorMatrix for m divisor classes over the m embeddings."""
    if len(classes) != field.m:
        raise ValueError(f"need exactly {field.m} classes, got {len(classes)}")
    rows, row_labels = _matrix_at(model, family, field, classes, prec)
    with mp.workprec(prec + 2 * analytic.GUARD):
        det1 = abs(_det(rows))
    rows2, _ = _matrix_at(model, family, field, classes, prec + 64)
    with mp.workprec(prec + 64 + 2 * analytic.GUARD):
        det2 = abs(_det(rows2))
        if det2 != 0:
            err = abs(det1 - det2) / abs(det2)
            digits = int(mp.floor(-mp.log10(err))) if err > 0 else prec * 3 // 10
        else:
            digits = 0
    return RegulatorMatrix(rows2, row_labels,
                           col_labels or [f"cls{i}" for i in range(len(classes))],
                           det2, digits, prec)


# ------------------------------------------------------------- exact targets

def limit_rhs(kind, n_or_lam):
    """Exact limit constant: torsion families C_N |det (N^4/3) B3({st/N})|, or 16 C_lam^3."""
    if kind == "rank":
        if n_or_lam not in C_LAMBDA:
            raise ValueError("lambda must be 1..4")
        return Fraction(16) * C_LAMBDA[n_or_lam] ** 3
    if kind != "torsion":
        raise ValueError("kind must be 'torsion' or 'rank'")
    n = n_or_lam
    if n not in (7, 8, 10):
        raise ValueError("N must be 7, 8 or 10")
    d = (n - 1) // 2
    c_n = {7: Fraction(1), 8: Fraction(4), 10: Fraction(4)}[n]
    mat = [[Fraction(n ** 4, 3) * bernoulli3(frac_part(Fraction(s * t, n)))
            for t in range(1, d + 1)] for s in range(1, d + 1)]
    det = _det_fraction_rows(mat)
    return c_n * abs(det)


def _det_fraction_rows(mat):
    n = len(mat)
    a = [row[:] for row in mat]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


# ------------------------------------------------------------------ the scans

def scan_regulator_once(kind, n_or_lam, spec_builder, a, prec=192):
    """R(a) for one family member; returns (R, matrix). See limit_scan."""
    from . import curves as curves_mod
    from . import k2 as k2_mod
    from .curves import tate_normal_form, parameter_from_field, rank_family_from_unit
    from .fields import NumberField

    field = NumberField.from_spec(spec_builder(a))
    if kind == "torsion":
        n = n_or_lam
        t = parameter_from_field(n, field.gen())
        model = tate_normal_form(n, t)
        d = (n - 1) // 2
        mult = 1 if n == 7 else 2
        classes = [k2_mod.diamond_torsion(model, n, s).scale(mult) for s in range(1, d + 1)]
        reg = regulator(field, model, classes, prec)
        return reg.det_abs, reg
    fam = rank_family_from_unit(n_or_lam, field)
    classes = [k2_mod.diamond_mq(fam, q) for q in range(3)]
    reg = regulator(field, fam.model, classes, prec, family=fam)
    return reg.det_abs, reg


def limit_scan(kind, n_or_lam, spec_builder, a_values, prec=192):
    """Table of (a, R(a)/log^d|a|, relative deviation from the exact target).

    kind='torsion' uses S_{s} (N=7) / 2S_{s} (N=8,10); kind='rank' uses the
    three M_q classes. Per-a failures are recorded and the scan continues.
    """
    target = limit_rhs(kind, n_or_lam)
    d = 3 if kind == "rank" else (n_or_lam - 1) // 2
    rows = []
    for a in a_values:
        try:
            r, _ = scan_regulator_once(kind, n_or_lam, spec_builder, a, prec)
            with mp.workprec(prec):
                ratio = r / mp.log(abs(a)) ** d
                tgt = mp.mpf(target.numerator) / target.denominator
                dev = abs(ratio - tgt) / tgt
            rows.append({"a": a, "ratio": ratio, "target": tgt, "rel_dev": dev})
        except Exception as exc:  # per-a failures recorded, scan continues
            rows.append({"a": a, "error": repr(exc)})
    return {"kind": kind, "param": n_or_lam, "d": d,
            "target": target, "rows": rows}
