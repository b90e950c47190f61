from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from conftest import Gen
from pdisk.conn import Connection, apply, gauge
from pdisk.errors import CharPolyMismatch, DuplicateCharacter, NotInvertible
from pdisk.linalg import (diag, identity, is_zero_matrix, mat_add, mat_agrees, mat_inverse, mat_mul,
                          mat_pow, mat_scale, mat_sub, zeros)
from pdisk.parse import parse_series
from pdisk.series import Series, SeriesParams, series_invert, solve_homogeneous_gauge
from pdisk.tlj import (TLJBlock, TLJForm, assemble, canonical_order, check_distinct,
                       chinese_splitting, hermite_polynomial, irregular_values, is_normalized,
                       jordan_levelt, normalize_block, normalize_form, same_class, turrittin_index)

P = SeriesParams(prec=10)


def S(text, params=P):
    return parse_series(text, params)


def M(rows, params=P):
    return [[S(a, params) for a in r] for r in rows]


# -- assembly -------------------------------------------------------------------

def test_assemble_examples():
    form = TLJForm(P, (TLJBlock.jordan(S("1/x"), 2),))
    assert assemble(form).mat == M([["1/x", "0"], ["1", "1/x"]])
    p = SeriesParams(L=2)
    two = TLJForm(p, (TLJBlock(S("1", p), 1), TLJBlock(S("t + 1/2", p), 1)))
    assert assemble(two).mat == diag([S("1", p), S("t + 1/2", p)])
    assert assemble(TLJForm(P, (TLJBlock(S("3/x"), 1),))).mat == [[S("3/x")]]


def test_pattern_validation():
    with pytest.raises(ValueError):
        TLJBlock(S("1"), 2, (1, 1))
    with pytest.raises(ValueError):
        TLJBlock(S("1"), 0)
    assert TLJBlock(S("1"), 3).pattern == (0, 0)


def test_character_classes():
    assert same_class(S("1/x + 1/2"), S("1/x - 1/2"))
    assert not same_class(S("1/x + 1/2"), S("1/x"))
    assert not same_class(S("1/x"), S("2/x"))
    p2 = SeriesParams(s=2)
    assert same_class(S("x^-1 + 1/2", p2), S("x^-1", p2))
    with pytest.raises(DuplicateCharacter):
        check_distinct([TLJBlock(S("1/x + 1"), 1), TLJBlock(S("1/x - 2"), 1)])


# -- normalization --------------------------------------------------------------

def test_normalize_example():
    b, g = normalize_block(TLJBlock(S("1/x + 2 + x"), 1))
    assert b.f == S("1/x")
    want = S("x^-2") * solve_homogeneous_gauge(S("-x"))
    assert g.agrees(want)
    out = gauge(Connection([[S("1/x + 2 + x")]]), [[g]])
    assert out.mat[0][0].agrees(S("1/x"))


def test_normalize_fixed_points():
    b = TLJBlock(S("1/x"), 1)
    nb, g = normalize_block(b)
    assert nb == b and g == Series.one(P)
    c = TLJBlock(S("1/3"), 2, (1,))
    assert normalize_block(c)[0] == c


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_normalize_is_a_gauge(seed):
    g = Gen(seed)
    p = SeriesParams(L=g.rng.randint(0, 2), prec=10)
    f = g.series(p, -3, 3, 0.5)
    b, u = normalize_block(TLJBlock(f, 1))
    assert is_normalized(b)
    assert gauge(Connection([[f]]), [[u]]).mat[0][0].agrees(b.f)


# -- invariants -----------------------------------------------------------------

def test_jordan_levelt_examples():
    S_, N = jordan_levelt(TLJForm(P, (TLJBlock.jordan(S("1/x"), 2),)))
    assert S_ == diag([S("1/x")] * 2) and N == M([["0", "0"], ["1", "0"]])
    form = TLJForm(P, (TLJBlock(S("1/x"), 2), TLJBlock(S("1/2"), 1)))
    S_, N = jordan_levelt(form)
    assert is_zero_matrix(N) and S_ == assemble(form).mat


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_jordan_levelt_properties(seed):
    g = Gen(seed)
    p = SeriesParams(L=g.rng.randint(0, 2), prec=8)
    form = g.form(p, 4, 2, with_constant=True)
    S_, N = jordan_levelt(form)
    A = assemble(form).mat
    assert mat_agrees(mat_add(S_, N), A)
    assert is_zero_matrix(mat_pow(N, max(b.r for b in form.blocks)))
    # (theta + S) and N commute as operators
    v = [g.series(p, -2, 3, 0.5) for _ in range(form.rank)]
    conn_S = Connection(S_, p)
    lhs = apply(conn_S, [sum((N[i][j] * v[j] for j in range(len(v))), Series.zero(p)) for i in range(len(v))])
    w = apply(conn_S, v)
    rhs = [sum((N[i][j] * w[j] for j in range(len(v))), Series.zero(p)) for i in range(len(v))]
    assert all(a.agrees(b) for a, b in zip(lhs, rhs))


def test_irregular_values_examples():
    form = TLJForm(P, (TLJBlock(S("1/x"), 1), TLJBlock(S("-1/x"), 1)))
    assert sorted(map(str, irregular_values(form))) == sorted(["x^-1", "-x^-1"])
    assert irregular_values(TLJForm(P, (TLJBlock(S("1/2"), 2),))) == [Series.zero(P)]
    p = SeriesParams(L=1)
    assert irregular_values(TLJForm(p, (TLJBlock(S("t/x", p), 1),))) == [S("t/x", p)]


def test_turrittin_index_examples():
    form = TLJForm(P, (TLJBlock(S("1/x^2 + 1/x"), 1),))
    assert turrittin_index(form) == 1
    p2 = SeriesParams(s=2)
    assert turrittin_index(TLJForm(p2, (TLJBlock(S("x^(-1/2)", p2), 1),))) == 2
    p6 = SeriesParams(s=6)
    form6 = TLJForm(p6, (TLJBlock(S("x^(-1/2)", p6), 1), TLJBlock(S("x^(-1/3)", p6), 1)))
    assert turrittin_index(form6) == 6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_invariants_stable_under_normalization_and_permutation(seed):
    g = Gen(seed)
    s = g.rng.choice((1, 2, 3))
    p = SeriesParams(s=s, L=g.rng.randint(0, 2), prec=8)
    form = g.form(p, 3, 2, with_constant=True)
    blocks = list(form.blocks)
    g.rng.shuffle(blocks)
    shuffled = TLJForm(p, tuple(blocks))
    for other in (normalize_form(form), shuffled):
        assert irregular_values(other) == irregular_values(form)
        assert turrittin_index(other) == turrittin_index(form)
    assert canonical_order(shuffled).blocks == canonical_order(form).blocks


# -- Chinese remainder splitting ------------------------------------------------

def test_chinese_splitting_examples():
    p = SeriesParams(L=2, prec=4)
    A = M([["1", "1"], ["0", "1"]], p)
    As, An, poly = chinese_splitting(A, [(S("1", p), 2)])
    assert As == identity(p, 2) and An == M([["0", "1"], ["0", "0"]], p)
    assert poly[:3] == [Series.zero(p), S("2", p), S("-1", p)]
    D = diag([S("1", p), S("t + 1/2", p)])
    As, An, _ = chinese_splitting(D, [(S("1", p), 1), (S("t + 1/2", p), 1)])
    assert As == D and is_zero_matrix(An)


def test_chinese_splitting_errors():
    p = SeriesParams(L=2, prec=4)
    with pytest.raises(CharPolyMismatch):
        chinese_splitting(diag([S("1", p), S("2", p)]), [(S("1", p), 2)])
    with pytest.raises(NotInvertible):
        chinese_splitting(diag([S("1 + t", p), S("1 - t", p)]), [(S("1 + t", p), 1), (S("1 - t", p), 1)])
    with pytest.raises(NotInvertible):
        chinese_splitting(diag([S("t", p), S("1", p)]), [(S("t", p), 1), (S("1", p), 1)])


def random_unit_spectrum(g, p, n):
    """Distinct unit constant terms plus random higher t-terms."""
    base = g.rng.sample([-3, -2, -1, 1, 2, 3], n)
    return [Series.const(p, b) + sum((Series.monomial(p, g.frac(), 0, j) for j in range(1, p.L + 1)),
                                     Series.zero(p)) for b in base]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_partition_of_unity_on_semisimple_matrices(seed):
    g = Gen(seed)
    p = SeriesParams(L=3, prec=4)
    lams = random_unit_spectrum(g, p, 3)
    Q = [[Series.const(p, a.coeff(0, 0)) for a in r] for r in g.unit_matrix(p, 3, kmax=0)]
    A = mat_mul(mat_inverse(Q), mat_mul(diag(lams), Q))
    As, An, _ = chinese_splitting(A, [(lam, 1) for lam in lams])
    assert mat_agrees(As, A) and is_zero_matrix(An)
    total = zeros(p, 3)
    for i, li in enumerate(lams):
        term = identity(p, 3)
        for j, lj in enumerate(lams):
            if i != j:
                fac = mat_scale(mat_sub(A, mat_scale(identity(p, 3), lj)), series_invert(li - lj))
                term = mat_mul(term, fac)
        total = mat_add(total, term)
    assert mat_agrees(total, identity(p, 3))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_hermite_interpolation_conditions(seed):
    g = Gen(seed)
    p = SeriesParams(L=2, prec=4)
    lams = random_unit_spectrum(g, p, 2)
    qs = [g.rng.randint(1, 3) for _ in lams]
    nodes = [(lam, q, [g.series(p, 0, 0, 0.7) for _ in range(q)]) for lam, q in zip(lams, qs)]
    poly = hermite_polynomial(nodes, p)
    for lam, q, values in nodes:
        # k-th Taylor coefficient at lam
        for k in range(q):
            acc = Series.zero(p)
            for d, c in enumerate(poly):
                if d >= k:
                    acc = acc + c * comb(d, k) * lam ** (d - k)
            assert acc.agrees(values[k])
