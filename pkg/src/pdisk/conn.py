"""Connections over R_L((x_s)) in an explicit basis.

Columns hold images of basis vectors: ``nabla e_j = sum_i mat[i][j] e_i``.
Gauges and morphisms are linear over the full coefficient ring R_L((x_s)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

from .cyclo import CycNum
from .errors import BadSupport, InsufficientPrecision
from .factor import roots_with_multiplicity
from .linalg import (Matrix, berkowitz, check_params, k_nullspace, k_rref, mat_add,
                     mat_inverse, mat_mul, mat_prec, mat_theta, shape, zeros)
from .series import Series, SeriesParams, reduce_t, theta


class Connection:
    """Matrix of a connection on a free module of rank n."""

    __slots__ = ("params", "mat", "basis_label")

    def __init__(self, mat: Matrix, params: Optional[SeriesParams] = None, basis_label: str = "e"):
        if not mat or any(len(r) != len(mat) for r in mat):
            raise ValueError("connection matrix must be square and non-empty")
        self.params = params or mat[0][0].params
        check_params(mat, self.params)
        self.mat = [list(r) for r in mat]
        self.basis_label = basis_label

    @property
    def rank(self) -> int:
        return len(self.mat)

    @property
    def prec(self):
        return mat_prec(self.mat)

    def is_logarithmic(self) -> bool:
        return all(k >= 0 for r in self.mat for a in r for k in a.exponents())

    def valuation(self) -> Optional[int]:
        vs = [a.valuation() for r in self.mat for a in r if not a.is_zero()]
        return min(vs) if vs else None

    def relabel(self, label: str) -> "Connection":
        return Connection(self.mat, self.params, label)

    def __eq__(self, other):
        return isinstance(other, Connection) and self.mat == other.mat

    def __repr__(self):
        return f"Connection(rank={self.rank}, basis={self.basis_label!r})"


class LogWitness:
    """A connection whose matrix has no negative x_s-exponents."""

    __slots__ = ("conn",)

    def __init__(self, conn: Connection):
        if not conn.is_logarithmic():
            raise BadSupport("matrix has negative x-exponents; not logarithmic")
        self.conn = conn


def apply(conn: Connection, v: Sequence[Series]) -> List[Series]:
    """nabla(sum v_j e_j) = sum_i (theta(v_i) + sum_j mat[i][j] v_j) e_i."""
    if len(v) != conn.rank:
        raise ValueError(f"vector of length {len(v)} for rank {conn.rank}")
    out = []
    for i in range(conn.rank):
        acc = theta(v[i])
        for j in range(conn.rank):
            acc = acc + conn.mat[i][j] * v[j]
        out.append(acc)
    return out


def gauge(conn: Connection, Q: Matrix, Qinv: Optional[Matrix] = None, label: Optional[str] = None) -> Connection:
    """Matrix in the basis given by the columns of Q: Q^-1 A Q + Q^-1 theta(Q)."""
    if shape(Q) != (conn.rank, conn.rank):
        raise ValueError("gauge matrix has the wrong size")
    check_params(Q, conn.params)
    if Qinv is None:
        Qinv = mat_inverse(Q)
    new = mat_mul(Qinv, mat_add(mat_mul(conn.mat, Q), mat_theta(Q)))
    return Connection(new, conn.params, label or conn.basis_label + "'")


def euler(A: Matrix) -> LogWitness:
    """Euler connection theta + A for a matrix A constant in x."""
    if any(not a.is_x_constant() for r in A for a in r):
        raise BadSupport("euler needs an x-constant matrix")
    return LogWitness(Connection([[a.with_prec(None) for a in r] for r in A]))


def residue(w: LogWitness) -> Matrix:
    """x_s^0 coefficient matrix, as constants in R_L."""
    return [[a.x_coeff(0) for a in r] for r in w.conn.mat]


def exponents(w: LogWitness) -> List[CycNum]:
    """Eigenvalues of the residue reduced mod t, with multiplicity, sorted."""
    res = [[reduce_t(a, 0) for a in r] for r in residue(w)]
    cp = [c.scalar() for c in berkowitz(res)]
    out = []
    for root, mult in roots_with_multiplicity(cp, w.conn.params.m):
        out.extend([root] * mult)
    return out


def truncate_t(conn: Connection, level: int) -> Connection:
    """Reduction mod t^(level+1), keeping the rank."""
    mat = [[reduce_t(a, level) for a in r] for r in conn.mat]
    return Connection(mat, conn.params.with_(L=level), conn.basis_label)


@dataclass(frozen=True)
class Reduced:
    """Connection over K((x_s)) in the basis (e, t e, ..., t^l e) with its t-shift."""

    conn: Connection
    shift: Matrix
    level: int


def block_toeplitz(M: Matrix, level: int, params: SeriesParams) -> Matrix:
    """Multiplication by M = sum_j M_j t^j on (e, te, ..., t^l e): block (i, i-j) = M_j."""
    n = len(M)
    out = zeros(params, n * (level + 1), len(M[0]) * (level + 1))
    m_ = len(M[0])
    for i in range(level + 1):
        for j in range(i + 1):
            for a in range(n):
                for b in range(m_):
                    out[i * n + a][(i - j) * m_ + b] = _t_layer(M[a][b], j, params)
    return out


def _t_layer(f: Series, j: int, params: SeriesParams) -> Series:
    rows = {k: {0: r[j]} for k, r in f.rows().items() if j in r}
    return Series._from_rows(params, rows, f.prec)


def shift_matrix(params: SeriesParams, n: int, level: int) -> Matrix:
    """The t-action S: t^i e_k -> t^(i+1) e_k (zero on the top layer)."""
    N = n * (level + 1)
    S = zeros(params, N)
    for i in range(level):
        for k in range(n):
            S[(i + 1) * n + k][i * n + k] = Series.one(params)
    return S


def reduce_conn(conn: Connection, level: int) -> Reduced:
    if level < 0 or level > conn.params.L:
        raise ValueError(f"level {level} outside 0..{conn.params.L}")
    params = conn.params.with_(L=0)
    mat = block_toeplitz(conn.mat, level, params)
    return Reduced(Connection(mat, params, f"{conn.basis_label}|{level}"),
                   shift_matrix(params, conn.rank, level), level)


def kernel_power(conn: Connection, f: Series, q: int, low: Optional[int] = None,
                 width: Optional[int] = None) -> List[List[Series]]:
    """K-basis of solutions of (nabla - f)^q v = 0, certified on a window.

    Unknown coefficients live in x_s-exponents ``[low, low + width)``.  The
    solution space is computed on two nested windows and accepted only when
    both agree on the certified coordinates.
    """
    params = conn.params
    if q < 1:
        raise ValueError("q must be positive")
    if low is None:
        low = -params.prec // 2
    if width is None:
        width = params.prec
    first = _kernel_window(conn, f, q, low, width)
    second = _kernel_window(conn, f, q, low, width + max(2, width // 2))
    cert = first[1]
    if cert <= low:
        raise InsufficientPrecision("window too small to certify any kernel coordinate")
    p1 = _project(first[0], first[2], cert)
    p2 = _project(second[0], second[2], cert)
    if len(p1) != len(p2) or k_rref_rank(p1 + p2) != len(p1):
        raise InsufficientPrecision(
            f"kernel of (nabla - f)^{q} is not stable between windows; raise prec")
    return [_to_vector(v, first[2], params, cert) for v in p1]


def k_rref_rank(rows) -> int:
    if not rows:
        return 0
    return len(k_rref(rows)[1])


def _kernel_window(conn, f, q, low, width):
    params = conn.params
    n, L = conn.rank, params.L
    index = [(i, k, j) for k in range(low, low + width) for j in range(L + 1) for i in range(n)]
    images = []
    cert = low + width
    vmin = min(0, conn.valuation() if conn.valuation() is not None else 0,
               f.valuation() if f.valuation() is not None else 0)
    cert = cert + q * vmin
    for (i, k, j) in index:
        v = [Series.zero(params) for _ in range(n)]
        v[i] = Series.monomial(params, 1, k, j)
        for _ in range(q):
            w = apply(conn, v)
            v = [a - f * b for a, b in zip(w, v)]
        for a in v:
            if a.prec is not None:
                cert = min(cert, a.prec)
        images.append(v)
    lowest = low + q * vmin
    rows_index = [(i, k, j) for k in range(lowest, cert) for j in range(L + 1) for i in range(n)]
    M = [[img[i].coeff(k, j) for img in images] for (i, k, j) in rows_index]
    basis = k_nullspace(M, len(index), params.m)
    return basis, cert, index


def _project(basis, index, cert):
    keep = [p for p, (_, k, _) in enumerate(index) if k < cert]
    rows = [[v[p] for p in keep] for v in basis]
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    R, piv = k_rref(rows)
    return [R[i] for i in range(len(piv))]


def _to_vector(coords, index, params, cert):
    n = max(i for i, _, _ in index) + 1
    terms = [dict() for _ in range(n)]
    keep = [t for t in index if t[1] < cert]
    for (i, k, j), c in zip(keep, coords):
        if c:
            terms[i][(k, j)] = c
    return [Series(params, terms[i], cert) for i in range(n)]
