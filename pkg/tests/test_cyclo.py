from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from pdisk.cyclo import CycNum, cyc_inverse, cyclotomic_poly, euler_phi
from strategies import CYCLO_ORDERS, cycnums


@st.composite
def triples(draw):
    m = draw(st.sampled_from(CYCLO_ORDERS))
    return tuple(draw(cycnums(m)) for _ in range(3))


@given(triples())
def test_ring_axioms(abc):
    a, b, c = abc
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == CycNum(a.m)


@given(cycnums())
def test_nonzero_elements_invert(a):
    if a:
        assert a * a.inverse() == CycNum(a.m, (1,))
        assert cyc_inverse(a) == a.inverse()


@pytest.mark.parametrize("m", CYCLO_ORDERS + (7, 9, 10))
def test_zeta_has_order_m(m):
    z = CycNum.zeta(m)
    assert z ** m == CycNum(m, (1,))
    assert all(z ** k != CycNum(m, (1,)) for k in range(1, m))


@pytest.mark.parametrize("m", range(1, 25))
def test_cyclotomic_poly_matches_sympy(m):
    x = sp.Symbol("x")
    want = sp.Poly(sp.cyclotomic_poly(m, x), x).all_coeffs()[::-1]
    assert [Fraction(c) for c in cyclotomic_poly(m)] == [Fraction(int(c)) for c in want]
    assert euler_phi(m) == sp.totient(m)


def test_inverse_examples():
    assert CycNum.zeta(4).inverse() == -CycNum.zeta(4)
    assert CycNum(1, (2,)).inverse() == CycNum(1, (Fraction(1, 2),))
    one_plus_z = CycNum(3, (1, 1))
    assert one_plus_z.inverse() == -CycNum.zeta(3)


def test_zero_has_no_inverse():
    with pytest.raises(ZeroDivisionError):
        CycNum(5).inverse()


def test_canonical_reduction():
    # zeta_3^2 = -1 - zeta_3
    assert CycNum(3, (0, 0, 1)) == CycNum(3, (-1, -1))
    assert CycNum.zeta(6, 3) == CycNum(6, (-1,))


@given(cycnums())
def test_rational_coordinate_and_floor(a):
    assert a.floor() <= a.rational_part < a.floor() + 1
    assert (a - a.floor()).rational_part >= 0


def test_rendering():
    assert str(CycNum(1, (Fraction(1, 2),))) == "1/2"
    assert str(CycNum(4, (0, 1))) == "z"
