from fractions import Fraction

import pytest

import k2reg.fields as F
from k2reg import curves as C


@pytest.fixture(scope="module")
def cubic_field():
    return F.NumberField.from_spec(F.CubicSpec(1, -1, 0))


def test_parameter_maps(cubic_field):
    u = cubic_field.gen()
    assert C.parameter_from_field(7, u) == u
    assert C.parameter_from_field(8, u) == (u + 1).inverse()
    assert C.parameter_from_field(10, u) == (1 - u) / 2
    with pytest.raises(F.SpecificationError):
        C.parameter_from_field(9, u)


def test_tate_normal_form_rational_n7(cubic_field):
    # t = 2 over Q embedded in F: f=4, g=2, Delta = -1664
    t = cubic_field.coerce(2)
    f, g = C.tate_normal_fg(7, t)
    assert f == cubic_field.coerce(4) and g == cubic_field.coerce(2)
    model = C.tate_normal_form(7, t)
    assert model.discriminant() == cubic_field.coerce(-1664)


def test_tate_normal_form_n8_third(cubic_field):
    t = cubic_field.coerce(Fraction(1, 3))
    model = C.tate_normal_form(8, t)
    expected = (Fraction(81) * Fraction(2, 3) ** 8 * Fraction(-1, 3) ** 4
                * (Fraction(8, 9) - Fraction(8, 3) + 1))
    assert model.discriminant() == cubic_field.coerce(expected)
    assert not model.discriminant().is_zero()


def test_torsion_point_order(cubic_field):
    for n in (7, 8, 10):
        t = C.parameter_from_field(n, cubic_field.gen())
        model = C.tate_normal_form(n, t)
        p0 = model.point(0, 0)
        assert model.point_order(p0, bound=12) == n
        # multiples stay on the curve and N*P = O
        assert model.multiply(n, p0).is_infinity
        for k in range(1, n):
            assert not model.multiply(k, p0).is_infinity


def test_small_multiples_closed_forms(cubic_field):
    # 2P = (t^2(t-1), t^3(t-1)^2), 3P = (t(t-1), t(t-1)^2) for N=7
    t = cubic_field.gen()
    model = C.tate_normal_form(7, t)
    p0 = model.point(0, 0)
    p2 = model.multiply(2, p0)
    p3 = model.multiply(3, p0)
    assert p2 == C.CurvePoint(t * t * (t - 1), t ** 3 * (t - 1) ** 2)
    assert p3 == C.CurvePoint(t * (t - 1), t * (t - 1) ** 2)


def test_group_law_axioms(cubic_field):
    t = cubic_field.gen()
    model = C.tate_normal_form(7, t)
    p0 = model.point(0, 0)
    for k in range(1, 7):
        q = model.multiply(k, p0)
        assert model.add(q, model.negate(q)).is_infinity
    # associativity spot check
    a = model.multiply(2, p0)
    b = model.multiply(3, p0)
    c = model.multiply(5, p0)
    assert model.add(model.add(a, b), c) == model.add(a, model.add(b, c))


def test_invariants_identities(cubic_field):
    t = cubic_field.gen()
    model = C.tate_normal_form(7, t)
    c4, c6, delta, j = model.invariants()
    assert c4 ** 3 - c6 ** 2 == 1728 * delta
    # c4 = (t^2-t+1)(t^6-11t^5+30t^4-15t^3-10t^2+5t+1)
    poly = (t * t - t + 1) * (t ** 6 - 11 * t ** 5 + 30 * t ** 4 - 15 * t ** 3
                              - 10 * t * t + 5 * t + 1)
    assert c4 == poly


def test_delta_against_table_closed_form(cubic_field):
    for n in (7, 8, 10):
        t = C.parameter_from_field(n, cubic_field.gen())
        model = C.tate_normal_form(n, t)
        assert model.discriminant() == C.tate_discriminant_formula(n, t)


def test_degenerate_parameters():
    # roots of X^3 - 8X^2 + 5X + 1 are exceptional for N=7: use the rational t=0
    K = F.NumberField((1, -1, 0, 1))
    with pytest.raises(C.DegenerateParameterError):
        C.tate_normal_form(7, K.coerce(0))
    with pytest.raises(C.DegenerateParameterError):
        C.tate_normal_form(8, K.coerce(0))
    with pytest.raises(C.DegenerateParameterError):
        C.tate_normal_form(8, K.coerce(1))


def test_rank_family_model(cubic_field):
    fam = C.rank_family_from_unit(4, cubic_field)
    model = fam.model
    # P = (0, t) has exact order 3
    assert model.point_order(fam.point_p, bound=5) == 3
    # Delta = 16 t^3 (4 - 27t)
    t = fam.t
    assert model.discriminant() == 16 * t ** 3 * (4 - 27 * t)
    # the identity x^3 + h(x)^2 = prod (x + q^2) as exact polynomials:
    # evaluate both sides at several field points
    p = fam.p
    a_val = p * p + p + 1
    b_val = (p * (p + 1)) ** 2
    field = cubic_field
    for xv in (field.coerce(0), field.coerce(3), field.gen(), field.gen() ** 2 - 1):
        h = a_val * xv + b_val
        lhs = xv ** 3 + h * h
        rhs = field.one()
        for q in fam.q_values:
            rhs = rhs * (xv + q * q)
        assert lhs == rhs


def test_rank_family_lambda4_two_torsion(cubic_field):
    fam = C.rank_family_from_unit(4, cubic_field)
    # mu = 0: T_q = (x_q, 0) are rational 2-torsion, all distinct
    xs = fam.tq_x
    assert len({tuple(x.coords) for x in xs}) == 3
    for xq in xs:
        pt = fam.model.point(xq, 0)
        assert fam.model.point_order(pt, bound=3) == 2


def test_rank_family_p_one():
    # p = 1 (rational): A = 3, B = 4, lambda = 1 -> t = 16/27, 27t = 16 != 4
    K = F.NumberField((1, -1, 0, 1))
    fam = C.rank_family_model(1, K.coerce(1))
    assert fam.t == Fraction(16, 27)
    assert not fam.model.discriminant().is_zero()


def test_rank_family_rejects_bad_p():
    K = F.NumberField((1, -1, 0, 1))
    with pytest.raises(C.DegenerateParameterError):
        C.rank_family_model(2, K.coerce(0))
    with pytest.raises(C.DegenerateParameterError):
        C.rank_family_model(2, K.coerce(-1))
