from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from pdisk.cyclo import CycNum
from pdisk.errors import DoesNotSplit, NotInvertible
from pdisk.factor import roots_with_multiplicity
from pdisk.linalg import (berkowitz, identity, k_inverse, k_mul, k_identity, k_nullspace, k_rank,
                          mat_agrees, mat_inverse, mat_mul, poly_eval_matrix, zeros)
from pdisk.series import Series, SeriesParams
from strategies import rationals

Q = lambda q: CycNum(1, (q,))


@st.composite
def rational_matrices(draw, n=None):
    n = draw(st.integers(1, 4)) if n is None else n
    return [[draw(rationals) for _ in range(n)] for _ in range(n)]


def to_series_matrix(M, params):
    return [[Series.const(params, a) for a in r] for r in M]


@given(rational_matrices())
def test_berkowitz_matches_sympy(M):
    p = SeriesParams()
    got = [c.scalar().rational_part for c in berkowitz(to_series_matrix(M, p))]
    T = sp.Symbol("T")
    want = sp.Poly(sp.Matrix(M).charpoly(T).as_expr(), T).all_coeffs()
    assert got == [Fraction(int(c.p), int(c.q)) for c in want]


@given(rational_matrices())
def test_cayley_hamilton(M):
    p = SeriesParams()
    A = to_series_matrix(M, p)
    cp = berkowitz(A)
    assert all(x.is_zero() for r in poly_eval_matrix(cp[::-1], A) for x in r)


@given(rational_matrices(), st.integers(0, 2))
def test_series_matrix_inverse(M, shift):
    p = SeriesParams(L=1, prec=8)
    A = [[Series.const(p, a) + Series.monomial(p, a, 1) + Series.monomial(p, 1, 0, 1)
          for a in r] for r in M]
    for i in range(len(A)):
        A[i][i] = A[i][i] + Series.monomial(p, 1, -shift)
    try:
        Ai = mat_inverse(A)
    except NotInvertible:
        return
    assert mat_agrees(mat_mul(A, Ai), identity(p, len(A)))


def test_singular_matrix_rejected():
    p = SeriesParams(L=1)
    with pytest.raises(NotInvertible):
        mat_inverse([[Series.t(p), Series.zero(p)], [Series.zero(p), Series.one(p)]])
    with pytest.raises(NotInvertible):
        mat_inverse(zeros(p, 2))


@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), min_size=1, max_size=4))
def test_nullspace_rank_nullity(rows):
    M = [[Q(a) for a in r] for r in rows]
    ker = k_nullspace(M, 4, 1)
    assert len(ker) + k_rank(M) == 4
    for v in ker:
        assert all(sum((a * b for a, b in zip(r, v)), Q(0)) == Q(0) for r in M)


@given(rational_matrices(3))
def test_k_inverse(M):
    K = [[Q(a) for a in r] for r in M]
    if sp.Matrix(M).det() == 0:
        with pytest.raises(NotInvertible):
            k_inverse(K, 1)
        return
    assert k_mul(K, k_inverse(K, 1), 1) == k_identity(3, 1)


# -- factoring ------------------------------------------------------------------

def test_roots_over_q():
    roots = roots_with_multiplicity([Q(1), Q(0), Q(-1)], 1)
    assert roots == [(Q(-1), 1), (Q(1), 1)]
    assert roots_with_multiplicity([Q(1), Q(-1), Q(Fraction(1, 4))], 1) == [(Q(Fraction(1, 2)), 2)]


def test_roots_over_gaussian_field():
    z = CycNum.zeta(4)
    got = roots_with_multiplicity([CycNum(4, (1,)), CycNum(4), CycNum(4, (1,))], 4)
    assert sorted(str(r) for r, _ in got) == sorted([str(z), str(-z)])


def test_irreducible_factor_reported():
    with pytest.raises(DoesNotSplit):
        roots_with_multiplicity([Q(1), Q(0), Q(1)], 1)
    with pytest.raises(DoesNotSplit):
        roots_with_multiplicity([Q(1), Q(0), Q(-2)], 1)
