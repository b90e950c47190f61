"""Acceptance gate: criteria 1-6 at their stated tolerances and time limits."""

import time
from collections import Counter
from fractions import Fraction
from math import factorial

from sympy import QQ, Symbol
from sympy.polys.rings import ring

from conftest import Gen, record
from pdisk.conn import Connection, block_toeplitz, gauge, reduce_conn
from pdisk.deform import index_invariance_check, limit_compare
from pdisk.errors import NoTLJForm, TurningPoint
from pdisk.generic import split_generic
from pdisk.linalg import diag, is_zero_matrix, mat_add, mat_agrees, mat_mul, mat_pow, mat_vec, zeros
from pdisk.logdecomp import deligne_manin_lattice, log_decompose, verify_decomposition
from pdisk.parse import parse_series
from pdisk.series import Series, SeriesParams, galois_sigma, principal_part, ramify, reduce_t, theta
from pdisk.split import split
from pdisk.tlj import assemble, chinese_splitting, jordan_levelt

T = Symbol("t")


def mat(rows, params):
    return [[parse_series(a, params) for a in r] for r in rows]


def gate(n, limit, body):
    start = time.perf_counter()
    failures = body()
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < limit
    record(n, ok, f"({elapsed:.2f} s, limit {limit} s, failures: {len(failures)})")
    assert not failures, failures[:5]
    assert elapsed < limit, f"took {elapsed:.2f} s"


# -- 1 -------------------------------------------------------------------------

def test_criterion_1_golden_2x2():
    def body():
        p = SeriesParams(m=1, s=1, L=0, prec=16)
        conn = Connection(mat([["1/x", "0"], ["1", "-1/x"]], p), p)
        form = split(conn, [(parse_series("1/x", p), 1), (parse_series("-1/x", p), 1)])
        dec = log_decompose(form)
        fails = []
        if not is_zero_matrix(dec.rs_matrix()):
            fails.append("rs matrix is not zero")
        want_P = [[Series.monomial(p, 1, -1), Series.zero(p)], [Series.zero(p), Series.monomial(p, -1, -1)]]
        if dec.P != want_P:
            fails.append("P differs from diag(1/x, -1/x)")
        alt = Connection(mat([["0", "0"], ["1", "0"]], p), p)
        v = verify_decomposition(conn, alt, want_P)
        if (v.conditions["i"], v.conditions["ii"], v.conditions["iii"]) != ("pass", "pass", "fail"):
            fails.append(f"alternative candidate verdicts {v.conditions}")
        return fails
    gate(1, 1.0, body)


# -- 2 -------------------------------------------------------------------------

def eigen_coefficient_oracle(L):
    """t/(t - 1/2) = -2t / (1 - 2t) as exact coefficients in t^0..t^L."""
    return [Fraction(0)] + [Fraction(-(2 ** k)) for k in range(1, L + 1)]


def test_criterion_2_t_examples():
    def body():
        fails = []
        for L in range(1, 7):
            p = SeriesParams(L=L, prec=8)
            a = Connection(mat([["0", "t"], ["0", "0"]], p), p)
            try:
                split(a, [(Series.zero(p), 2)])
                fails.append(f"(a) split succeeded at L={L}")
            except NoTLJForm:
                pass
            if [r for _, r in split_generic(a).blocks] != [2]:
                fails.append("(a) generic form is not one Jordan block")

            b = Connection(mat([["0", "t^2"], ["1", "0"]], p), p)
            try:
                split(b, [(parse_series("t", p), 1), (parse_series("-t", p), 1)])
                fails.append(f"(b) split succeeded at L={L}")
            except TurningPoint:
                pass
            gb = split_generic(b)
            # t^2 vanishes at L = 1, leaving a nilpotent matrix
            want = [(0, 2)] if L == 1 else [(T, 1), (-T, 1)]
            if Counter(gb.blocks) != Counter(want):
                fails.append(f"(b) generic form {gb.blocks}")

            c = Connection(mat([["1", "t"], ["0", "t + 1/2"]], p), p)
            form = split(c, [(Series.one(p), 1), (parse_series("t + 1/2", p), 1)])
            Q = form.total_gauge()
            v = [Q[0][1], Q[1][1]]
            lam = parse_series("t + 1/2", p)
            resid = [x - lam * y for x, y in zip(mat_vec(c.mat, v), v)]
            resid = [r + theta(y) for r, y in zip(resid, v)]
            if any(not r.is_zero() for r in resid):
                fails.append(f"(c) eigenvector residual nonzero at L={L}")
            coeff = Q[0][1] * Q[1][1] ** -1
            got = [coeff.coeff(0, j).rational_part for j in range(L + 1)]
            if got != eigen_coefficient_oracle(L):
                fails.append(f"(c) c = {got} at L={L}")
        return fails
    gate(2, 5.0, body)


# -- 3 -------------------------------------------------------------------------

def exp_shift_oracle(level, params):
    """exp(x^-1 S) on (e, te, ..., t^l e): entry (i, j) = x^-(i-j) / (i-j)!."""
    G = zeros(params, level + 1)
    for i in range(level + 1):
        for j in range(i + 1):
            G[i][j] = Series.monomial(params, Fraction(1, factorial(i - j)), -(i - j))
    return G


def test_criterion_3_counterexample():
    def body():
        p = SeriesParams(L=4, prec=12)
        conn = Connection([[parse_series("t/x", p)]], p)
        form = split(conn, [(parse_series("t/x", p), 1)])
        rep = limit_compare(form, 4, conn)
        fails = []
        if not all(lev.rs_normal_zero for lev in rep.levels):
            fails.append("a levelwise rs part is nonzero")
        if not rep.limit_trivial:
            fails.append("limit not trivial")
        if rep.decomposition.P != [[parse_series("t/x", p)]]:
            fails.append("P differs from t/x")
        if not rep.doesnt_exist:
            fails.append("doesn't exist flag clear")
        if rep.ord_trace != [0, -1, -2, -3, -4]:
            fails.append(f"ord_x trace {rep.ord_trace}")
        if not rep.divergent:
            fails.append("divergence flag clear")
        p0 = p.with_(L=0)
        for lev in rep.levels:
            G = lev.blocks[0].chain.composite
            if not mat_agrees(G, exp_shift_oracle(lev.level, p0)):
                fails.append(f"level {lev.level} gauge differs from exp(x^-1 S)")
        return fails
    gate(3, 2.0, body)


# -- 4 -------------------------------------------------------------------------

def test_criterion_4_gauge_chain():
    def body():
        g = Gen(4)
        fails = []
        for i in range(50):
            p = SeriesParams(L=g.rng.randint(0, 3), prec=12)
            form = g.form(p, 3, 3)
            rep = limit_compare(form)
            if not rep.chains_ok:
                fails.append(f"form {i}: gauge chain")
            if not (rep.glue_ok and rep.limit_matches_rs):
                fails.append(f"form {i}: glued limit differs from rs part")
        return fails
    gate(4, 60.0, body)


# -- 5 -------------------------------------------------------------------------

def suite_5a(g):
    fails = []
    for i in range(100):
        p = SeriesParams(L=g.rng.randint(0, 2), prec=10)
        fs = [g.polar(p, 2) + Series.const(p, g.frac()) for _ in range(3)]
        if i % 2 == 0:
            fs = [fs[0]] * 3
        us = [Series.one(p) + g.series(p, 1, 3, 0.5) for _ in fs]
        ks = [g.rng.randint(-2, 2) for _ in fs]
        perm = list(range(3))
        g.rng.shuffle(perm)
        Q = zeros(p, 3)
        for col, row in enumerate(perm):
            Q[row][col] = us[col] * Series.monomial(p, 1, ks[col])
        out = gauge(Connection(diag(fs), p), Q)
        got = [principal_part(out.mat[k][k]) for k in range(3)]
        want = [principal_part(fs[r]) for r in perm]
        offdiag = [out.mat[a][b] for a in range(3) for b in range(3) if a != b]
        if Counter(map(str, got)) != Counter(map(str, want)) or any(not x.is_zero() for x in offdiag):
            fails.append(f"5a instance {i}")
    return fails


def suite_5b(g):
    fails = []
    for i in range(100):
        p = SeriesParams(L=g.rng.randint(0, 2), prec=10)
        form = g.form(p, 4, 2, with_constant=True)
        S, N = jordan_levelt(form)
        A = assemble(form, distinct=False).mat
        if not (mat_agrees(mat_add(S, N), A) and mat_agrees(mat_mul(S, N), mat_mul(N, S))
                and is_zero_matrix(mat_pow(N, len(A)))):
            fails.append(f"5b instance {i}")
    return fails


QT, TT = ring("t", QQ)


def to_ring(f):
    return sum((QT(c.rational_part) * TT ** j for (_, j), c in f.terms()), QT(0))


def from_ring(e, params):
    return Series(params, {(0, j): params.num(Fraction(int(c.numerator), int(c.denominator)))
                           for (j,), c in e.terms()})


def rtrunc(e, L):
    return QT({mon: c for mon, c in e.terms() if mon[0] <= L})


def rmul(A, B, L):
    n = len(A)
    return [[rtrunc(sum((A[i][k] * B[k][j] for k in range(n)), QT(0)), L) for j in range(n)]
            for i in range(n)]


def rinv_unit(u, L):
    """1/u in QQ[t]/t^(L+1) for u with nonzero constant term, by the geometric series."""
    c0 = u.coeff(1)
    v = 1 - u * QQ(1) / c0
    out, term = QT(1), QT(1)
    for _ in range(L):
        term = rtrunc(term * v, L)
        out += term
    return rtrunc(out * (QQ(1) / c0), L)


def suite_5c(g):
    """Compare with conjugation of the constructed Jordan data and, when semisimple,
    with the Lagrange partition of unity sum_i lam_i prod_{j != i} (A - lam_j)/(lam_i - lam_j)."""
    L, n = 4, 3
    p = SeriesParams(L=L, prec=4)
    eye = [[QT(int(a == b)) for b in range(n)] for a in range(n)]
    fails = []
    for i in range(50):
        base = g.rng.sample([-4, -3, -2, -1, 1, 2, 3, 4], n)
        lams = [QT(b) + sum((QT(g.frac()) * TT ** j for j in range(1, L + 1)), QT(0)) for b in base]
        jordan = i % 2 == 1
        if jordan:
            lams[1] = lams[0]
        D = [[lams[a] if a == b else QT(0) for b in range(n)] for a in range(n)]
        Nj = [[QT(int(jordan and (a, b) == (1, 0))) for b in range(n)] for a in range(n)]
        U = [[QT(int(a == b)) if a <= b
              else sum((QT(g.rng.randint(-2, 2)) * TT ** j for j in range(L + 1)), QT(0))
              for b in range(n)] for a in range(n)]
        # U is unipotent: U^-1 = I - V + V^2 with V = U - I
        V = [[U[a][b] - eye[a][b] for b in range(n)] for a in range(n)]
        V2 = rmul(V, V, L)
        Ui = [[eye[a][b] - V[a][b] + V2[a][b] for b in range(n)] for a in range(n)]
        perm = list(range(n))
        g.rng.shuffle(perm)
        Q = [U[k] for k in perm]
        Qi = [[Ui[a][perm[b]] for b in range(n)] for a in range(n)]
        JD = [[D[a][b] + Nj[a][b] for b in range(n)] for a in range(n)]
        A = rmul(rmul(Q, JD, L), Qi, L)
        As_want = rmul(rmul(Q, D, L), Qi, L)
        An_want = rmul(rmul(Q, Nj, L), Qi, L)
        A_p = [[from_ring(A[a][b], p) for b in range(n)] for a in range(n)]
        lam_p = [from_ring(x, p) for x in lams]
        eigen = [(lam_p[0], 2), (lam_p[2], 1)] if jordan else [(x, 1) for x in lam_p]
        As, An, _ = chinese_splitting(A_p, eigen)
        got_s = [[to_ring(x) for x in r] for r in As]
        got_n = [[to_ring(x) for x in r] for r in An]
        if got_s != As_want or got_n != An_want:
            fails.append(f"5c instance {i}: conjugation oracle")
        if not jordan:
            lag = [[QT(0)] * n for _ in range(n)]
            for a in range(n):
                term = [[lams[a] * eye[x][y] for y in range(n)] for x in range(n)]
                for b in range(n):
                    if b != a:
                        inv = rinv_unit(lams[a] - lams[b], L)
                        fac = [[(A[x][y] - lams[b] * eye[x][y]) * inv for y in range(n)] for x in range(n)]
                        term = rmul(term, fac, L)
                lag = [[lag[x][y] + term[x][y] for y in range(n)] for x in range(n)]
            if lag != got_s:
                fails.append(f"5c instance {i}: partition-of-unity oracle")
    return fails


def suite_5d(g):
    fails = []
    for i in range(50):
        s = g.rng.choice((1, 2))
        p = SeriesParams(m=s, s=s, L=g.rng.randint(0, 2), prec=10)
        form = g.form(p, 3, 2, with_constant=True)
        lat = deligne_manin_lattice(log_decompose(form))
        for c in lat.exponents:
            if not c.is_rational() or not (0 <= c.rational_part < 1):
                fails.append(f"5d instance {i}: exponent {c}")
    return fails


def test_criterion_5_uniqueness_invariance():
    def body():
        g = Gen(5)
        return suite_5a(g) + suite_5b(g) + suite_5c(g) + suite_5d(g)
    gate(5, 60.0, body)


# -- 6 -------------------------------------------------------------------------

def suite_6a(g):
    fails = []
    for i in range(50):
        p = SeriesParams(L=g.rng.randint(1, 2), prec=8)
        n = g.rng.randint(1, 2)
        conn = Connection([[g.series(p, -2, 2, 0.4) for _ in range(n)] for _ in range(n)], p)
        Q = g.unit_matrix(p, n)
        level = g.rng.randint(0, p.L)
        lhs = reduce_conn(gauge(conn, Q), level).conn.mat
        red = reduce_conn(conn, level)
        rhs = gauge(red.conn, block_toeplitz(Q, level, red.conn.params)).mat
        if not mat_agrees(lhs, rhs):
            fails.append(f"6a instance {i}")
    return fails


def suite_6b(g):
    fails = []
    for i in range(200):
        s = g.rng.choice((2, 3, 4))
        p = SeriesParams(m=s * g.rng.choice((1, 2)) if s != 4 else 4, s=s, L=g.rng.randint(0, 2), prec=12)
        f = g.series(p, -6, 6, 0.3)
        k = g.rng.randint(1, s - 1)
        if galois_sigma(theta(f), k) != theta(galois_sigma(f, k)):
            fails.append(f"6b sigma instance {i}")
        if ramify(theta(f), 2) != theta(ramify(f, 2)):
            fails.append(f"6b ramify instance {i}")
    return fails


def suite_6c(g):
    fails, flagged = [], []
    for i in range(50):
        p = SeriesParams(L=g.rng.randint(1, 2), prec=10)
        form = g.form(p, 3, 2)
        v = index_invariance_check(form)
        changed = [k for k, b in enumerate(form.blocks)
                   if principal_part(b.f).exponents() != principal_part(reduce_t(b.f, 0)).exponents()]
        if changed:
            if v.status != "flagged" or v.changed_blocks != changed:
                fails.append(f"6c instance {i}: support change not flagged")
            flagged.append(i)
        elif v.status != "pass":
            fails.append(f"6c instance {i}: status {v.status}")
    print(f"index check flagged instances: {flagged}")
    return fails


def test_criterion_6_functoriality():
    def body():
        g = Gen(6)
        return suite_6a(g) + suite_6b(g) + suite_6c(g)
    gate(6, 30.0, body)
