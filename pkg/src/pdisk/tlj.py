"""Turrittin-Levelt-Jordan block forms.

A form is a list of blocks ``(f, r, pattern)`` standing for the matrix
``diag(Jflat_r(f), ...)``: ``f`` on the diagonal and the 0/1 ``pattern`` on
the subdiagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, gcd
from typing import List, Optional, Sequence, Tuple

from .conn import Connection
from .cyclo import CycNum
from .errors import CharPolyMismatch, DuplicateCharacter, NotInvertible
from .linalg import (Matrix, berkowitz, diag, mat_inverse, mat_sub, poly_eval_matrix, rpoly_mul,
                     rpoly_pow, zeros)
from .series import (Series, SeriesParams, exponent_denominator, principal_part, regular_part,
                     solve_homogeneous_gauge)


@dataclass(frozen=True)
class TLJBlock:
    f: Series
    r: int
    pattern: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("block size must be positive")
        pat = tuple(int(b) for b in self.pattern) if self.pattern else (0,) * (self.r - 1)
        if len(pat) != self.r - 1 or any(b not in (0, 1) for b in pat):
            raise ValueError(f"pattern {self.pattern} does not fit a block of size {self.r}")
        object.__setattr__(self, "pattern", pat)

    @classmethod
    def jordan(cls, f: Series, r: int) -> "TLJBlock":
        """Single Jordan chain: pattern of ones."""
        return cls(f, r, (1,) * (r - 1))


@dataclass(frozen=True)
class TLJForm:
    params: SeriesParams
    blocks: Tuple[TLJBlock, ...]
    gauge_log: Tuple[Tuple[str, Matrix], ...] = field(default=(), compare=False)

    @property
    def rank(self) -> int:
        return sum(b.r for b in self.blocks)

    def total_gauge(self) -> Optional[Matrix]:
        """Product of the logged gauges (applied left to right), or None."""
        from .linalg import mat_mul
        if not self.gauge_log:
            return None
        Q = self.gauge_log[0][1]
        for _, G in self.gauge_log[1:]:
            Q = mat_mul(Q, G)
        return Q


# -- characters ---------------------------------------------------------------

def constant_term(f: Series) -> Series:
    return f.x_coeff(0)


def same_class(f: Series, g: Series) -> bool:
    """Equal principal parts and constant terms differing by an element of s^-1 Z."""
    if principal_part(f) != principal_part(g):
        return False
    d = constant_term(f) - constant_term(g)
    if not d.is_scalar():
        return False
    c = d.scalar()
    if not c.is_rational():
        return False
    return (c.rational_part * f.params.s).denominator == 1


def check_distinct(blocks: Sequence[TLJBlock]):
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if same_class(blocks[i].f, blocks[j].f):
                raise DuplicateCharacter(
                    f"blocks {i} and {j} share the character class of {blocks[i].f}")


def jflat(f: Series, r: int, pattern: Sequence[int]) -> Matrix:
    params = f.params
    M = zeros(params, r)
    for i in range(r):
        M[i][i] = f
    for i, b in enumerate(pattern):
        if b:
            M[i + 1][i] = Series.one(params)
    return M


def assemble_matrix(blocks: Sequence[TLJBlock], params: SeriesParams) -> Matrix:
    n = sum(b.r for b in blocks)
    M = zeros(params, n)
    off = 0
    for b in blocks:
        J = jflat(b.f, b.r, b.pattern)
        for i in range(b.r):
            for j in range(b.r):
                M[off + i][off + j] = J[i][j]
        off += b.r
    return M


def assemble(form: TLJForm, distinct: bool = True) -> Connection:
    """Block-diagonal connection of a form; ``distinct`` enforces distinct classes."""
    if distinct:
        check_distinct(form.blocks)
    return Connection(assemble_matrix(form.blocks, form.params), form.params, "tlj")


# -- normalization ------------------------------------------------------------

def tau_shift(c: CycNum) -> int:
    """Integer k with c - k in the transversal (rational coordinate in [0, 1))."""
    return c.floor()


def normalize_block(b: TLJBlock) -> Tuple[TLJBlock, Series]:
    """Drop the positive part of f and move its constant term into the transversal.

    Returns the new block and the scalar gauge ``u * x^-k`` realizing it.
    """
    f = b.f
    params = f.params
    pos = regular_part(f) - constant_term(f)
    if pos.is_zero():
        u = Series.one(params)
    else:
        u = solve_homogeneous_gauge(-pos)
    c = constant_term(f)
    k = tau_shift(c.coeff(0, 0))
    shift = Series.x(params, -k * params.s)
    newf = principal_part(f) + c - k
    return TLJBlock(newf.with_prec(None), b.r, b.pattern), u * shift


def normalize_form(form: TLJForm) -> TLJForm:
    blocks = []
    gauges = []
    for b in form.blocks:
        nb, g = normalize_block(b)
        blocks.append(nb)
        gauges.extend([g] * b.r)
    log = form.gauge_log
    if any(not (g == Series.one(form.params)) for g in gauges):
        log = log + (("normalize", diag(gauges)),)
    return TLJForm(form.params, tuple(blocks), log)


def is_normalized(b: TLJBlock) -> bool:
    f = b.f
    if not f.is_exact() or any(k > 0 for k in f.exponents()):
        return False
    c = f.coeff(0, 0).rational_part
    return 0 <= c < 1


def canonical_order(form: TLJForm) -> TLJForm:
    """Blocks sorted by (order of p(f), coefficients of f, r)."""
    def key(b):
        v = principal_part(b.f).valuation()
        return (v if v is not None else 0, b.f.sort_key(), b.r, b.pattern)
    return TLJForm(form.params, tuple(sorted(form.blocks, key=key)), form.gauge_log)


# -- invariants ---------------------------------------------------------------

def jordan_levelt(form: TLJForm) -> Tuple[Matrix, Matrix]:
    """Semisimple part diag(f I_r) and nilpotent part (the subdiagonal patterns)."""
    params = form.params
    S_blocks = [TLJBlock(b.f, b.r) for b in form.blocks]
    zero = Series.zero(params)
    N_blocks = [TLJBlock(zero, b.r, b.pattern) for b in form.blocks]
    return assemble_matrix(S_blocks, params), assemble_matrix(N_blocks, params)


def irregular_values(form: TLJForm) -> List[Series]:
    """Distinct principal parts, in canonical order."""
    seen = []
    for b in form.blocks:
        p = principal_part(b.f)
        if p not in seen:
            seen.append(p)
    return sorted(seen, key=lambda p: p.sort_key())


def turrittin_index(form: TLJForm) -> int:
    s = form.params.s
    out = 1
    for b in form.blocks:
        for k in b.f.exponents():
            d = exponent_denominator(k, s)
            out = out * d // gcd(out, d)
    return out


# -- Chinese remainder splitting ----------------------------------------------

def hermite_polynomial(nodes, params: SeriesParams) -> List[Series]:
    """p over R_L, deg < sum q, with p^(k)(lam)/k! = values[k] at every node.

    ``nodes`` holds ``(lam, q, values)`` with lam and values in R_L.  The
    confluent Vandermonde system is invertible iff all node differences are
    units.
    """
    D = sum(q for _, q, _ in nodes)
    rows = []
    rhs = []
    for lam, q, values in nodes:
        for k in range(q):
            row = []
            for d in range(D):
                row.append(lam ** (d - k) * comb(d, k) if d >= k else Series.zero(params))
            rows.append(row)
            rhs.append(values[k])
    try:
        inv = mat_inverse(rows)
    except NotInvertible as e:
        raise NotInvertible("interpolation nodes are not pairwise separated by units") from e
    out = []
    for i in range(D):
        acc = Series.zero(params)
        for j in range(D):
            acc = acc + inv[i][j] * rhs[j]
        out.append(acc)
    return out


def charpoly_of_product(eigen, params: SeriesParams) -> List[Series]:
    """Coefficients (lowest first) of prod (T - lam)^q."""
    p = [Series.one(params)]
    for lam, q in eigen:
        p = rpoly_mul(p, rpoly_pow([-lam, Series.one(params)], q, params), params)
    return p


def chinese_splitting(A: Matrix, eigen: Sequence[Tuple[Series, int]]):
    """Semisimple/nilpotent splitting A = A_s + A_n with A_s = p(A).

    Returns ``(A_s, A_n, p)`` with p lowest degree first.
    """
    params = A[0][0].params
    n = len(A)
    if sum(q for _, q in eigen) != n:
        raise CharPolyMismatch("multiplicities do not add up to the size")
    cp = list(reversed(berkowitz(A)))
    expected = charpoly_of_product(eigen, params)
    if any(not (a - b).is_zero() for a, b in zip(cp, expected)):
        raise CharPolyMismatch("characteristic polynomial differs from prod (T - lam)^q")
    for i, (lam, _) in enumerate(eigen):
        if not lam.is_unit():
            raise NotInvertible(f"eigenvalue {lam} is not a unit")
        for mu, _ in eigen[i + 1:]:
            if not (lam - mu).is_unit():
                raise NotInvertible(f"eigenvalue difference {lam - mu} is not a unit")
    zero = Series.zero(params)
    nodes = [(lam, q, [lam] + [zero] * (q - 1)) for lam, q in eigen]
    nodes.append((zero, 1, [zero]))
    p = hermite_polynomial(nodes, params)
    A_s = poly_eval_matrix(p, A)
    return A_s, mat_sub(A, A_s), p
