from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuspcontact.errors import BadInput, DivByZero, FieldMismatch, RationalRadicand
from cuspcontact.quadfield import QuadField, parse_quad, reduce_radicand, sqrt_elem

SQUAREFREE = [2, 3, 5, 6, 7, 10, 13, 14, 21, 93]

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


@st.composite
def elems(draw, D0=None):
    D0 = D0 if D0 is not None else draw(st.sampled_from(SQUAREFREE))
    F = QuadField(D0)
    return F(draw(fractions), draw(fractions))


@st.composite
def same_field_pair(draw):
    D0 = draw(st.sampled_from(SQUAREFREE))
    return draw(elems(D0)), draw(elems(D0)), draw(elems(D0))


def high_precision(x, prec=80) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = prec
        a = Decimal(x.a.numerator) / Decimal(x.a.denominator)
        b = Decimal(x.b.numerator) / Decimal(x.b.denominator)
        return a + b * Decimal(x.field.D0).sqrt()


@pytest.mark.parametrize(
    "D, expected",
    [(12, (3, 2)), (8, (2, 2)), (5, (5, 1)), (72, (2, 6)), (93, (93, 1)), (896, (14, 8))],
)
def test_reduce_radicand(D, expected):
    assert reduce_radicand(D) == expected


@pytest.mark.parametrize("D", [4, 9, 16, 900])
def test_perfect_square_rejected(D):
    with pytest.raises(RationalRadicand):
        reduce_radicand(D)


@pytest.mark.parametrize("D", [1, 0, -3])
def test_small_radicand_rejected(D):
    with pytest.raises(BadInput):
        reduce_radicand(D)


def test_field_requires_squarefree():
    with pytest.raises(BadInput):
        QuadField(12)


def test_sqrt_squares_to_radicand():
    for D in (2, 12, 45, 896):
        r = sqrt_elem(D)
        assert r * r == D


def test_parse_reduces():
    x = parse_quad("1/2 + 3*sqrt(12)")
    assert x.field.D0 == 3 and x.a == Fraction(1, 2) and x.b == 6
    assert parse_quad("5 - 2*sqrt(6)") == QuadField(6)(5, -2)
    with pytest.raises(BadInput):
        parse_quad("sqrt(2)")


def test_str_roundtrip():
    x = QuadField(93)(Fraction(29, 2), Fraction(-3, 2))
    assert str(x) == "29/2 - 3/2*sqrt(93)"
    assert parse_quad(str(x)) == x


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        QuadField(2)(1, 1) + QuadField(3)(1, 1)


def test_division_by_zero():
    F = QuadField(5)
    with pytest.raises(DivByZero):
        F(1, 1) / F(0, 0)
    with pytest.raises(ZeroDivisionError):
        F(0, 0).inverse()


def test_golden_ratio_unit():
    F = QuadField(5)
    phi = F(Fraction(1, 2), Fraction(1, 2))
    assert phi * phi == phi + 1
    assert phi.norm() == -1
    assert (phi ** 2).norm() == 1
    assert phi ** -3 * phi ** 3 == 1


def test_hash_matches_rationals():
    F = QuadField(7)
    assert hash(F(3, 0)) == hash(3)
    assert F(3, 0) == 3 and F(Fraction(1, 2), 0) == Fraction(1, 2)
    assert len({F(1, 2), F(1, 2), F(1, -2)}) == 2


@given(same_field_pair())
def test_ring_axioms(xyz):
    x, y, z = xyz
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0


@given(same_field_pair())
def test_norm_multiplicative(xyz):
    x, y, _ = xyz
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


@given(elems())
def test_inverse(x):
    if x == 0:
        return
    assert x * x.inverse() == 1
    assert x.norm() == x * x.conjugate()


@given(elems())
def test_sign_matches_high_precision(x):
    v = high_precision(x)
    assert x.sign() == (v > 0) - (v < 0)


@given(elems())
def test_floor_ceil_exact(x):
    v = high_precision(x)
    f = x.floor()
    assert Decimal(f) <= v < Decimal(f + 1)
    if x.b != 0:
        assert x.ceil() == f + 1


@given(elems(), st.integers(min_value=1, max_value=40))
@settings(max_examples=200)
def test_to_real_correctly_rounded(x, digits):
    if x == 0:
        assert x.to_real(digits) == 0
        return
    v = high_precision(x, 120)
    got = x.to_real(digits)
    assert len(got.as_tuple().digits) <= digits or got == 0
    # correct rounding: |got - v| <= half an ulp at the requested precision
    e = math.floor(abs(v).log10())
    with localcontext() as ctx:
        ctx.prec = 120
        half_ulp = Decimal(10) ** (e - digits + 1) / 2
        assert abs(got - v) <= half_ulp


@given(same_field_pair())
def test_order_total_and_consistent(xyz):
    x, y, _ = xyz
    assert (x < y) + (x == y) + (x > y) == 1
    assert (x < y) == (high_precision(x) < high_precision(y))


def test_float_conversion():
    assert float(QuadField(2)(0, 1)) == math.sqrt(2)
    assert str(QuadField(5)(Fraction(3, 2), Fraction(1, 2)).to_real(17)) == "2.6180339887498948"
