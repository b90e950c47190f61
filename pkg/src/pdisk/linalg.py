"""Matrices over Series and K-linear algebra over Q(zeta_m).

Matrices are plain lists of rows.  Series matrices carry a shared
``SeriesParams``; K-matrices hold ``CycNum`` entries.
"""

from __future__ import annotations

from typing import List, Optional, Sequence

from .cyclo import CycNum
from .errors import IncompatibleParams, NotInvertible
from .series import Series, SeriesParams, series_invert, theta

Matrix = List[List[Series]]


# -- Series matrices -----------------------------------------------------------

def zeros(params: SeriesParams, n: int, m: Optional[int] = None) -> Matrix:
    m = n if m is None else m
    return [[Series.zero(params) for _ in range(m)] for _ in range(n)]


def identity(params: SeriesParams, n: int) -> Matrix:
    return [[Series.one(params) if i == j else Series.zero(params) for j in range(n)]
            for i in range(n)]


def diag(entries: Sequence[Series]) -> Matrix:
    params = entries[0].params
    n = len(entries)
    return [[entries[i] if i == j else Series.zero(params) for j in range(n)] for i in range(n)]


def scalar_matrix(params: SeriesParams, c, n: int) -> Matrix:
    c = c if isinstance(c, Series) else Series.const(params, c)
    return diag([c] * n)


def shape(A: Matrix):
    return len(A), len(A[0]) if A else 0


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise ValueError(f"shape mismatch {shape(A)} vs {shape(B)}")
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    if shape(A) != shape(B):
        raise ValueError(f"shape mismatch {shape(A)} vs {shape(B)}")
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(A: Matrix) -> Matrix:
    return [[-a for a in r] for r in A]


def mat_scale(A: Matrix, c) -> Matrix:
    return [[a * c for a in r] for r in A]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"shape mismatch {shape(A)} x {shape(B)}")
    params = A[0][0].params
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Series.zero(params)
            for l in range(k):
                a, b = A[i][l], B[l][j]
                if (a.is_zero() and a.prec is None) or (b.is_zero() and b.prec is None):
                    continue
                acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def mat_vec(A: Matrix, v: Sequence[Series]) -> List[Series]:
    return [row[0] for row in mat_mul(A, [[x] for x in v])]


def mat_theta(A: Matrix) -> Matrix:
    return [[theta(a) for a in r] for r in A]


def mat_map(A: Matrix, fn) -> Matrix:
    return [[fn(a) for a in r] for r in A]


def transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)]


def commutator(A: Matrix, B: Matrix) -> Matrix:
    return mat_sub(mat_mul(A, B), mat_mul(B, A))


def mat_pow(A: Matrix, e: int) -> Matrix:
    out = identity(A[0][0].params, len(A))
    for _ in range(e):
        out = mat_mul(out, A)
    return out


def is_zero_matrix(A: Matrix) -> bool:
    return all(a.is_zero() for r in A for a in r)


def mat_truncate(A: Matrix, prec) -> Matrix:
    return [[a.truncate(prec) for a in r] for r in A]


def mat_agrees(A: Matrix, B: Matrix, window=None) -> bool:
    return shape(A) == shape(B) and all(
        a.agrees(b, window) for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def mat_prec(A: Matrix):
    ps = [a.prec for r in A for a in r if a.prec is not None]
    return min(ps) if ps else None


def block_diag(blocks: Sequence[Matrix]) -> Matrix:
    params = blocks[0][0][0].params
    n = sum(len(b) for b in blocks)
    out = zeros(params, n)
    off = 0
    for b in blocks:
        for i, r in enumerate(b):
            for j, a in enumerate(r):
                out[off + i][off + j] = a
        off += len(b)
    return out


def submatrix(A: Matrix, rows: Sequence[int], cols: Sequence[int]) -> Matrix:
    return [[A[i][j] for j in cols] for i in rows]


def check_params(A: Matrix, params: SeriesParams):
    for r in A:
        for a in r:
            if a.params.ring() != params.ring():
                raise IncompatibleParams(
                    f"entry parameters {a.params.ring()} differ from {params.ring()}")


def mat_inverse(A: Matrix) -> Matrix:
    """Inverse over R_L((x_s)) by Gauss-Jordan elimination with unit pivots.

    A matrix is invertible iff its reduction mod t is, so a column without a
    unit candidate certifies non-invertibility.
    """
    n = len(A)
    params = A[0][0].params
    M = [list(r) + identity(params, n)[i] for i, r in enumerate(A)]
    for col in range(n):
        best = None
        for r in range(col, n):
            a = M[r][col]
            if a.is_unit():
                v = a.t0_part().valuation()
                key = (v, len(a.t0_part().exponents()))
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            raise NotInvertible(f"matrix is singular modulo t (column {col})")
        r = best[1]
        M[col], M[r] = M[r], M[col]
        inv = series_invert(M[col][col])
        M[col] = [inv * a for a in M[col]]
        for r2 in range(n):
            if r2 != col and not M[r2][col].is_zero():
                f = M[r2][col]
                M[r2] = [a - f * b for a, b in zip(M[r2], M[col])]
    return [r[n:] for r in M]


def berkowitz(A: Matrix) -> List[Series]:
    """Characteristic polynomial det(T I - A), coefficients highest degree first.

    Division-free, so valid over any commutative ring.
    """
    n = len(A)
    params = A[0][0].params
    one = Series.one(params)
    vect = [one, -A[0][0]]
    for r in range(1, n):
        R = [A[r][j] for j in range(r)]
        C = [A[i][r] for i in range(r)]
        Asub = [A[i][:r] for i in range(r)]
        a = A[r][r]
        # Toeplitz column: 1, -a, -R C, -R A C, ...
        col = [one, -a]
        vec = C
        for _ in range(r):
            acc = Series.zero(params)
            for x, y in zip(R, vec):
                acc = acc + x * y
            col.append(-acc)
            vec = [sum((Asub[i][j] * vec[j] for j in range(r)), Series.zero(params))
                   for i in range(r)]
        new = []
        for i in range(r + 2):
            acc = Series.zero(params)
            for j in range(len(vect)):
                if 0 <= i - j < len(col):
                    acc = acc + col[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def poly_eval_matrix(coeffs_low_first: Sequence[Series], A: Matrix) -> Matrix:
    """p(A) for p given lowest degree first, by Horner."""
    n = len(A)
    params = A[0][0].params
    out = zeros(params, n)
    for c in reversed(coeffs_low_first):
        out = mat_add(mat_mul(out, A), scalar_matrix(params, c, n))
    return out


# -- R_L polynomial helpers (coefficients are x-constant Series) --------------

def rpoly_mul(p, q, params):
    if not p or not q:
        return []
    out = [Series.zero(params) for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def rpoly_pow(p, e, params):
    out = [Series.one(params)]
    for _ in range(e):
        out = rpoly_mul(out, p, params)
    return out


# -- K-linear algebra ---------------------------------------------------------

def k_rref(M: List[List[CycNum]]):
    """Reduced row echelon form; returns (R, pivot columns)."""
    R = [list(r) for r in M]
    rows = len(R)
    cols = len(R[0]) if R else 0
    piv = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [a * inv for a in R[r]]
        for i in range(rows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return R, piv


def k_rank(M) -> int:
    if not M or not M[0]:
        return 0
    return len(k_rref(M)[1])


def k_nullspace(M, ncols: int, m: int) -> List[List[CycNum]]:
    """Basis of {v : M v = 0}."""
    zero = CycNum.rational(m, 0)
    one = CycNum.rational(m, 1)
    if not M:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    R, piv = k_rref(M)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def k_solve(M, b, m: int):
    """One solution of M v = b, or None when inconsistent."""
    ncols = len(M[0]) if M else 0
    aug = [list(r) + [bi] for r, bi in zip(M, b)]
    R, piv = k_rref(aug)
    if ncols in piv:
        return None
    v = [CycNum.rational(m, 0)] * ncols
    for i, p in enumerate(piv):
        v[p] = R[i][ncols]
    return v


def k_identity(n: int, m: int):
    return [[CycNum.rational(m, 1 if i == j else 0) for j in range(n)] for i in range(n)]


def k_mul(A, B, m: int):
    zero = CycNum.rational(m, 0)
    out = []
    for r in A:
        row = []
        for j in range(len(B[0])):
            acc = zero
            for a, rb in zip(r, B):
                if a and rb[j]:
                    acc = acc + a * rb[j]
            row.append(acc)
        out.append(row)
    return out


def k_inverse(A, m: int):
    n = len(A)
    aug = [list(r) + e for r, e in zip(A, k_identity(n, m))]
    R, piv = k_rref(aug)
    if piv[:n] != list(range(n)):
        raise NotInvertible("constant matrix is singular")
    return [r[n:] for r in R]


# -- bridging: R_L-linear maps as K-matrices ----------------------------------

def rl_coeffs(a: Series, L: int) -> List[CycNum]:
    """t-coefficients of an x-constant series (entries of R_L)."""
    return [a.coeff(0, j) for j in range(L + 1)]


def rl_from_coeffs(params: SeriesParams, cs) -> Series:
    return Series(params, {(0, j): c for j, c in enumerate(cs)})


def reduce_mod_t(A: Matrix) -> List[List[CycNum]]:
    """Constant matrix over R_L reduced to K."""
    return [[a.coeff(0, 0) for a in r] for r in A]


def const_matrix_to_k(A: Matrix, L: int):
    """Block lower-Toeplitz K-matrix of multiplication by an R_L-matrix.

    Coordinates are ordered (t-degree j, index i) with j major.
    """
    n = len(A)
    m_ = len(A[0])
    M = [[None] * (m_ * (L + 1)) for _ in range(n * (L + 1))]
    zero = CycNum.rational(A[0][0].params.m, 0)
    for jo in range(L + 1):
        for ji in range(L + 1):
            d = jo - ji
            for i in range(n):
                for k in range(m_):
                    M[jo * n + i][ji * m_ + k] = A[i][k].coeff(0, d) if d >= 0 else zero
    return M


def rl_vector_to_k(v: Sequence[Series], L: int) -> List[CycNum]:
    n = len(v)
    return [v[i].coeff(0, j) for j in range(L + 1) for i in range(n)]


def k_to_rl_vector(params: SeriesParams, w, n: int) -> List[Series]:
    L = params.L
    return [rl_from_coeffs(params, [w[j * n + i] for j in range(L + 1)]) for i in range(n)]


def rl_matrix_from_k_const(params: SeriesParams, K) -> Matrix:
    return [[Series.const(params, c) for c in r] for r in K]
