"""Splitting a connection into TLJ form from supplied characters.

Works by recursion on the leading x-order: distinct leading eigenvalues are
separated with a constant spectral gauge followed by order-by-order block
Sylvester solves; a logarithmic block is reduced to a constant matrix and
then brought to Jordan form over R_L.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Sequence, Tuple

from .conn import Connection
from .cyclo import CycNum
from .errors import (DuplicateCharacter, NeedsShearing, NoTLJForm, NotInvertible, SeedMismatch,
                     TurningPoint)
from .factor import roots_with_multiplicity
from .linalg import (Matrix, berkowitz, block_diag, const_matrix_to_k, identity, k_inverse,
                     k_mul, k_rank, k_nullspace, mat_add, mat_inverse, mat_mul,
                     mat_pow, mat_scale, mat_sub, poly_eval_matrix, reduce_mod_t, rl_from_coeffs,
                     rl_vector_to_k, k_to_rl_vector, scalar_matrix, submatrix, zeros)
from .series import Series, SeriesParams, min_prec, principal_part
from .tlj import (TLJBlock, TLJForm, charpoly_of_product, constant_term, hermite_polynomial,
                  normalize_block, same_class)


def split(conn: Connection, seeds: Sequence[Tuple[Series, int]]) -> TLJForm:
    """TLJ form of ``conn`` whose characters are the classes of the seeds.

    Blocks follow the seed order.  The gauge log holds one matrix Q with
    ``gauge(conn, Q) == assemble(form)`` on the certified window.
    """
    params = conn.params
    seeds = [(f, int(r)) for f, r in seeds]
    if sum(r for _, r in seeds) != conn.rank:
        raise SeedMismatch(f"seed multiplicities sum to {sum(r for _, r in seeds)}, rank is {conn.rank}")
    for i in range(len(seeds)):
        for j in range(i + 1, len(seeds)):
            if same_class(seeds[i][0], seeds[j][0]):
                raise DuplicateCharacter(f"seeds {i} and {j} represent the same character")
    seeds = [(principal_part(f) + constant_term(f), r) for f, r in seeds]
    target = conn.prec if conn.prec is not None else params.prec
    Q, blocks = _split(conn.mat, list(range(len(seeds))), seeds, target)
    # blocks come back as (seed index, f, r, pattern); restore seed order
    order = sorted(range(len(blocks)), key=lambda i: blocks[i][0])
    perm_cols = []
    offsets = []
    off = 0
    for b in blocks:
        offsets.append(off)
        off += b[2]
    for i in order:
        perm_cols.extend(range(offsets[i], offsets[i] + blocks[i][2]))
    Q = [[row[c] for c in perm_cols] for row in Q]
    out_blocks = []
    gauges = []
    for i in order:
        _, f, r, pat = blocks[i]
        nb, g = normalize_block(TLJBlock(f, r, pat))
        out_blocks.append(nb)
        gauges.extend([g] * r)
    Q = [[a * g for a, g in zip(row, gauges)] for row in Q]
    return TLJForm(params, tuple(out_blocks), (("split", Q),))


# -- recursion ----------------------------------------------------------------

def _split(A: Matrix, idx: List[int], seeds, target):
    """Returns (Q, [(seed index, f, r, pattern)]) with Q^-1 A Q + Q^-1 theta(Q) block diagonal."""
    vals = [a.valuation() for r in A for a in r if not a.is_zero()]
    v = min(vals + [0])
    if v < 0:
        return _split_irregular(A, idx, seeds, target, v)
    return _split_log(A, idx, seeds, target)


def _x_coeff_matrix(A: Matrix, k: int) -> Matrix:
    return [[a.x_coeff(k) for a in r] for r in A]


def _split_irregular(A, idx, seeds, target, v):
    params = A[0][0].params
    n = len(A)
    Av = _x_coeff_matrix(A, v)
    groups = []  # (lam, [positions in idx])
    for p, i in enumerate(idx):
        lam = seeds[i][0].x_coeff(v)
        for g in groups:
            if (g[0] - lam).is_zero():
                g[1].append(p)
                break
        else:
            groups.append((lam, [p]))
    sizes = [sum(seeds[idx[p]][1] for p in g[1]) for g in groups]
    expected = charpoly_of_product([(g[0], q) for g, q in zip(groups, sizes)], params)
    cp = list(reversed(berkowitz(Av)))
    if any(not (a - b).is_zero() for a, b in zip(cp, expected)):
        raise SeedMismatch(f"leading matrix at x-order {v} does not have the seeded eigenvalues")
    if len(groups) == 1:
        lam = groups[0][0]
        if any(not (Av[i][j] - (lam if i == j else 0)).is_zero() for i in range(n) for j in range(n)):
            raise NeedsShearing(
                f"leading matrix at x-order {v} is not scalar on a single character; "
                "shearing or ramification would be needed")
        shift = Series.monomial(params, 1, v, 0) * lam
        A2 = mat_sub(A, scalar_matrix(params, shift, n))
        sub = {i: (seeds[i][0] - shift, seeds[i][1]) for i in idx}
        seeds2 = [sub.get(i, s) for i, s in enumerate(seeds)]
        Q, blocks = _split(A2, idx, seeds2, target)
        return Q, [(i, f + shift, r, pat) for i, f, r, pat in blocks]
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            if not (groups[a][0] - groups[b][0]).is_unit():
                raise TurningPoint(
                    f"leading coefficients at x-order {v} differ by the non-unit "
                    f"{groups[a][0] - groups[b][0]}", order=v)
    # spectral projectors of the leading matrix
    zero = Series.zero(params)
    P0_cols = []
    sizes_out = []
    for g, q in zip(groups, sizes):
        nodes = [(h[0], qh, ([Series.one(params)] if h is g else [zero]) + [zero] * (qh - 1))
                 for h, qh in zip(groups, sizes)]
        pi = poly_eval_matrix(hermite_polynomial(nodes, params), Av)
        P0_cols.extend(_image_basis(pi, q))
        sizes_out.append(q)
    P0 = [[P0_cols[j][i] for j in range(n)] for i in range(n)]
    P0inv = mat_inverse(P0)
    # constant gauge: theta(P0) = 0
    A1 = mat_mul(P0inv, mat_mul(A, P0))
    offs = [sum(sizes_out[:i]) for i in range(len(sizes_out))]
    spans = [list(range(o, o + q)) for o, q in zip(offs, sizes_out)]
    W, B = _sylvester_split(A1, spans, v, target)
    Q1 = mat_mul(P0, W)
    # recurse on the diagonal blocks; positions of seeds follow group order
    Qs, blocks = [], []
    for g, span in zip(groups, spans):
        Bg = submatrix(B, span, span)
        sub_idx = [idx[p] for p in g[1]]
        Qg, bl = _split(Bg, sub_idx, seeds, target)
        Qs.append(Qg)
        blocks.extend(bl)
    return mat_mul(Q1, block_diag(Qs)), blocks


def _image_basis(pi: Matrix, q: int):
    """q columns of an idempotent, normalized so that q pivot rows form the identity."""
    n = len(pi)
    cols = [[pi[i][j] for i in range(n)] for j in range(n)]
    bar = [[c.coeff(0, 0) for c in col] for col in cols]
    chosen = []
    for j in range(n):
        if k_rank([bar[c] for c in chosen + [j]]) > len(chosen):
            chosen.append(j)
        if len(chosen) == q:
            break
    if len(chosen) != q:
        raise SeedMismatch("spectral projector has the wrong rank")
    Cm = [[cols[j][i] for j in chosen] for i in range(n)]  # n x q
    # pivot rows: first q rows that are independent mod t
    rows = []
    for i in range(n):
        if k_rank([[Cm[r][c].coeff(0, 0) for c in range(q)] for r in rows + [i]]) > len(rows):
            rows.append(i)
        if len(rows) == q:
            break
    Sq = [[Cm[r][c] for c in range(q)] for r in rows]
    Cm = mat_mul(Cm, mat_inverse(Sq))
    return [[Cm[i][c] for i in range(n)] for c in range(q)]


def _sylvester_operator(Ag: Matrix, Ah: Matrix, mu, params):
    """K-matrix of X -> Ag X - X Ah + mu X on q_g x q_h matrices over R_L."""
    qg, qh = len(Ag), len(Ah)
    N = qg * qh
    M = zeros(params, N)
    for a in range(qg):
        for b in range(qh):
            row = a * qh + b
            for c in range(qg):
                M[row][c * qh + b] = M[row][c * qh + b] + Ag[a][c]
            for d in range(qh):
                M[row][a * qh + d] = M[row][a * qh + d] - Ah[d][b]
            if mu:
                M[row][row] = M[row][row] + mu
    return const_matrix_to_k(M, params.L)


def _solve_sylvester(Kinv, R: Matrix, params) -> Matrix:
    qg, qh = len(R), len(R[0])
    vec = [R[a][b] for a in range(qg) for b in range(qh)]
    rhs = rl_vector_to_k(vec, params.L)
    sol = [row[0] for row in k_mul(Kinv, [[c] for c in rhs], params.m)]
    flat = k_to_rl_vector(params, sol, qg * qh)
    return [[flat[a * qh + b] for b in range(qh)] for a in range(qg)]


def _sylvester_split(A: Matrix, spans, v: int, target):
    """Q = I + sum_k W_k x^k off-block-diagonal and block-diagonal B with AQ + theta(Q) = QB."""
    params = A[0][0].params
    n = len(A)
    s = params.s
    prec_A = min_prec(*(a.prec for r in A for a in r))
    top = prec_A if prec_A is not None else target
    K = top - v  # orders k = 1..K-1 give B up to exponent top
    Acoef = {e: _x_coeff_matrix(A, e) for e in range(v, top)}
    block_of = [0] * n
    for bi, sp in enumerate(spans):
        for i in sp:
            block_of[i] = bi
    Av = Acoef[v]
    inv_ops = {}
    for g, sg in enumerate(spans):
        for h, sh in enumerate(spans):
            if g != h:
                op = _sylvester_operator(submatrix(Av, sg, sg), submatrix(Av, sh, sh), 0, params)
                try:
                    inv_ops[g, h] = k_inverse(op, params.m)
                except NotInvertible:
                    raise TurningPoint(f"Sylvester operator at x-order {v} is singular", order=v)
    zero_m = lambda: zeros(params, n)
    Qk = {0: identity(params, n)}
    Bk = {v: [[Av[i][j] if block_of[i] == block_of[j] else Series.zero(params)
               for j in range(n)] for i in range(n)]}
    for k in range(1, K):
        R = zero_m()
        for j in range(1, k):
            if v + k - j in Bk and j in Qk:
                R = mat_add(R, mat_mul(Qk[j], Bk[v + k - j]))
        for i in range(1, k + 1):
            if v + i in Acoef and k - i in Qk:
                R = mat_sub(R, mat_mul(Acoef[v + i], Qk[k - i]))
        e = v + k
        if e >= 1 and e in Qk:
            R = mat_sub(R, [[a * _frac(e, s) for a in r] for r in Qk[e]])
        Wk = zero_m()
        Bn = zero_m()
        for g, sg in enumerate(spans):
            for h, sh in enumerate(spans):
                Rgh = submatrix(R, sg, sh)
                if g == h:
                    for a, i in enumerate(sg):
                        for b, j in enumerate(sh):
                            Bn[i][j] = -Rgh[a][b]
                else:
                    Wgh = _solve_sylvester(inv_ops[g, h], Rgh, params)
                    for a, i in enumerate(sg):
                        for b, j in enumerate(sh):
                            Wk[i][j] = Wgh[a][b]
        Qk[k] = Wk
        Bk[v + k] = Bn
    Q = _assemble_series(Qk, n, params, K)
    B = _assemble_series(Bk, n, params, top)
    return Q, B


def _frac(a, b):
    return Fraction(a, b)


def _assemble_series(coefs, n, params, prec):
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            terms = {}
            for e, M in coefs.items():
                for (k, jt), c in M[i][j].terms():
                    terms[(e + k, jt)] = c
            row.append(Series(params, terms, prec))
        out.append(row)
    return out


# -- logarithmic blocks -------------------------------------------------------

def reduce_to_constant(A: Matrix, target):
    """Gauge Q = I + O(x) with gauge(A, Q) = A_0, the x^0 coefficient matrix.

    Requires A without negative exponents and no resonance: for each k >= 1 the
    map W -> A_0 W - W A_0 + (k/s) W must be invertible mod t.
    """
    params = A[0][0].params
    n = len(A)
    prec_A = min_prec(*(a.prec for r in A for a in r))
    top = prec_A if prec_A is not None else target
    A0 = _x_coeff_matrix(A, 0)
    if all(a.is_x_constant() for r in A for a in r):
        return identity(params, n), A0
    Acoef = {e: _x_coeff_matrix(A, e) for e in range(1, top)}
    Qk = {0: identity(params, n)}
    for k in range(1, top):
        R = zeros(params, n)
        for i in range(1, k + 1):
            R = mat_sub(R, mat_mul(Acoef[i], Qk[k - i]))
        op = _sylvester_operator(A0, A0, Series.const(params, _frac(k, params.s)), params)
        try:
            inv = k_inverse(op, params.m)
        except NotInvertible:
            raise NeedsShearing(
                f"resonant residue: exponents differ by {_frac(k, params.s)}; shearing would be needed")
        Qk[k] = _solve_sylvester(inv, R, params)
    return _assemble_series(Qk, n, params, top), A0


def _split_log(A, idx, seeds, target):
    params = A[0][0].params
    n = len(A)
    Q1, A0 = reduce_to_constant(A, target)
    A0bar = reduce_mod_t(A0)
    cp = [c.coeff(0, 0) for c in berkowitz([[Series.const(params, c) for c in r] for r in A0bar])]
    roots = roots_with_multiplicity(cp, params.m)
    # assign eigenvalues mod t to seed classes
    assign = {i: [] for i in idx}
    for rho, mult in roots:
        owners = [i for i in idx if _congruent(rho, seeds[i][0].coeff(0, 0), params.s)]
        if not owners:
            raise SeedMismatch(f"eigenvalue {rho} of the residue matches no seed")
        if len(owners) > 1:
            raise TurningPoint(
                f"seeds {owners} coincide modulo t (eigenvalue {rho}); their difference is not a unit",
                order=0)
        assign[owners[0]].append((rho, mult))
    for i in idx:
        if sum(m for _, m in assign[i]) != seeds[i][1]:
            raise SeedMismatch(f"seed {i} expects multiplicity {seeds[i][1]}")
    # mod-t spectral idempotents, lifted
    Kp = SeriesParams(params.m, params.s, 0, params.prec)
    cols = []
    for i in idx:
        if len(idx) == 1:
            cols.extend(_unit_columns(params, n, 0, n))
            break
        nodes = []
        for j in idx:
            for rho, mult in assign[j]:
                val = [Series.one(Kp) if j == i else Series.zero(Kp)] + [Series.zero(Kp)] * (mult - 1)
                nodes.append((Series.const(Kp, rho), mult, val))
        pbar = hermite_polynomial(nodes, Kp)
        p = [Series.const(params, c.coeff(0, 0)) for c in pbar]
        pi = _lift_idempotent(poly_eval_matrix(p, A0))
        cols.extend(_image_basis(pi, seeds[i][1]))
    P0 = [[cols[j][r] for j in range(n)] for r in range(n)]
    A1 = mat_mul(mat_inverse(P0), mat_mul(A0, P0))
    Qs, blocks = [], []
    off = 0
    for i in idx:
        r = seeds[i][1]
        span = list(range(off, off + r))
        off += r
        B = submatrix(A1, span, span)
        Pj, c, pattern = _jordan_lift(B, seeds[i][0], r)
        Qs.append(Pj)
        blocks.append((i, c, r, pattern))
    return mat_mul(mat_mul(Q1, P0), block_diag(Qs)), blocks


def _unit_columns(params, n, lo, hi):
    return [[Series.one(params) if r == j else Series.zero(params) for r in range(n)]
            for j in range(lo, hi)]


def _congruent(a: CycNum, b: CycNum, s: int) -> bool:
    d = a - b
    return d.is_rational() and (d.rational_part * s).denominator == 1


def _lift_idempotent(pi: Matrix) -> Matrix:
    params = pi[0][0].params
    for _ in range(params.L.bit_length() + 2):
        sq = mat_mul(pi, pi)
        if all((a - b).is_zero() for ra, rb in zip(sq, pi) for a, b in zip(ra, rb)):
            return pi
        cube = mat_mul(sq, pi)
        pi = mat_sub(mat_scale(sq, 3), mat_scale(cube, 2))
    return pi


def jordan_type(Nbar, m: int) -> List[int]:
    """Jordan block sizes (descending) of a nilpotent K-matrix."""
    r = len(Nbar)
    ranks = [r]
    P = [row[:] for row in Nbar]
    while ranks[-1] > 0:
        ranks.append(k_rank(P))
        if ranks[-1] == ranks[-2]:
            raise SeedMismatch("matrix is not nilpotent modulo t")
        P = k_mul(P, Nbar, m)
    count_ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k in range(len(count_ge), 0, -1):
        exact = count_ge[k - 1] - (count_ge[k] if k < len(count_ge) else 0)
        sizes.extend([k] * exact)
    return sizes


def _jordan_lift(B: Matrix, seed_f: Series, r: int):
    """Basis P with P^-1 B P = c I + Jflat(pattern); returns (P, c, pattern)."""
    params = B[0][0].params
    tr = Series.zero(params)
    for i in range(r):
        tr = tr + B[i][i]
    c = tr * CycNum.rational(params.m, 1) / r
    N = mat_sub(B, scalar_matrix(params, c, r))
    if not all(a.is_zero() for row in mat_pow(N, r) for a in row):
        raise SeedMismatch("block carries more than one character (trace-free part is not nilpotent)")
    d = c - constant_term(seed_f)
    if not (d.is_scalar() and _congruent(d.scalar(), CycNum.rational(params.m, 0), params.s)):
        raise SeedMismatch(f"block constant {c} is not in the class of the seed {seed_f}")
    sizes = jordan_type(reduce_mod_t(N), params.m)
    pattern = []
    for k, sz in enumerate(sizes):
        pattern.extend([1] * (sz - 1))
        if k < len(sizes) - 1:
            pattern.append(0)
    J = zeros(params, r)
    for i, b in enumerate(pattern):
        if b:
            J[i + 1][i] = Series.one(params)
    if all((a - b).is_zero() for ra, rb in zip(N, J) for a, b in zip(ra, rb)):
        return identity(params, r), c, tuple(pattern)
    P = _intertwiner(N, J, params)
    return P, c, tuple(pattern)


def _intertwiner(N: Matrix, J: Matrix, params: SeriesParams) -> Matrix:
    """Invertible P over R_L with N P = P J, or NoTLJForm."""
    r = len(N)
    L = params.L
    m = params.m
    unknowns = r * r * (L + 1)
    # columns of the K-matrix: images of the basis matrices E_ab t^j
    cols = []
    for j in range(L + 1):
        for a in range(r):
            for b in range(r):
                E = zeros(params, r)
                E[a][b] = Series.monomial(params, 1, 0, j)
                D = mat_sub(mat_mul(N, E), mat_mul(E, J))
                cols.append(rl_vector_to_k([x for row in D for x in row], L))
    M = [[cols[c][rw] for c in range(unknowns)] for rw in range(len(cols[0]))]
    basis = k_nullspace(M, unknowns, m)
    if not basis:
        raise NoTLJForm("no intertwiner between the block and its Jordan form")
    rng = random.Random(len(basis) * 7919 + r)
    for attempt in range(40):
        coeffs = [1] * len(basis) if attempt == 0 else [rng.randint(-9, 9) for _ in basis]
        w = [sum((v[u] * cf for v, cf in zip(basis, coeffs)), CycNum.rational(m, 0))
             for u in range(unknowns)]
        P = zeros(params, r)
        for a in range(r):
            for b in range(r):
                P[a][b] = rl_from_coeffs(params, [w[j * r * r + a * r + b] for j in range(L + 1)])
        if k_rank(reduce_mod_t(P)) == r:
            return P
    raise NoTLJForm("nilpotent part does not deform flatly in t; no Jordan basis over R_L")
