"""Truncation towers, levelwise decompositions and limit reconstruction.

Level l of a connection over R_L((x)) is the connection over K((x)) on the
basis (e, te, ..., t^l e).  For a TLJ block with character
``f = c + sum_i b_i t^i`` (constants c, principal parts b_i) the level matrix
is ``A + B`` with A the Toeplitz matrix of the constant part and B that of
the principal parts.  The gauge ``exp(sum_d b'_d S^d)`` with
``theta(b'_d) = -b_d`` removes ``B - b_0 I``, leaving the regular-singular
matrix A; the x-orders of these gauges decide whether the levels glue to a
connection over R((x)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import List, Optional, Sequence, Tuple

from .conn import Connection, Reduced, block_toeplitz, gauge, reduce_conn, shift_matrix
from .errors import LambdaViolation
from .linalg import (Matrix, commutator, diag, identity, is_zero_matrix, mat_add, mat_mul,
                     mat_scale, mat_sub, zeros)
from .logdecomp import LogDecomposition, log_decompose
from .series import Series, SeriesParams, principal_part, reduce_t, solve_antiderivative
from .tlj import TLJBlock, TLJForm, jflat, turrittin_index


def _mat_eq(A: Matrix, B: Matrix) -> bool:
    return all((a - b).is_zero() for ra, rb in zip(A, B) for a, b in zip(ra, rb))


# -- families -----------------------------------------------------------------

@dataclass
class TruncationFamily:
    L: int
    levels: List[Reduced]
    transitions: List[Matrix]
    coherent: bool = True

    def matrix(self, level: int) -> Matrix:
        return self.levels[level].conn.mat


def transition_matrix(params: SeriesParams, n: int, level: int) -> Matrix:
    """Projection from level+1 to level: keeps (e, ..., t^level e)."""
    rows = n * (level + 1)
    M = zeros(params, rows, n * (level + 2))
    for i in range(rows):
        M[i][i] = Series.one(params)
    return M


def reduce_family(conn: Connection, L: Optional[int] = None) -> TruncationFamily:
    L = conn.params.L if L is None else L
    levels = [reduce_conn(conn, l) for l in range(L + 1)]
    n = conn.rank
    transitions = [transition_matrix(levels[0].conn.params, n, l) for l in range(L)]
    coherent = all(_transition_ok(levels[l], levels[l + 1], transitions[l]) for l in range(L))
    return TruncationFamily(L, levels, transitions, coherent)


def _transition_ok(lo: Reduced, hi: Reduced, T: Matrix) -> bool:
    """T is horizontal (T M_hi = M_lo T, theta(T) = 0) and commutes with the t-action."""
    horizontal = _mat_eq(mat_mul(T, hi.conn.mat), mat_mul(lo.conn.mat, T))
    equivariant = _mat_eq(mat_mul(T, hi.shift), mat_mul(lo.shift, T))
    return horizontal and equivariant


# -- gauge chains -------------------------------------------------------------

@dataclass
class GaugeChain:
    level: int
    b_prime: List[Series]
    gauges: List[Tuple[Matrix, Matrix]] = field(repr=False)
    composite: Matrix = field(repr=False)
    composite_inv: Matrix = field(repr=False)
    ord_x_floor: Optional[int]
    composite_ord: int


def _mat_exp_nilpotent(M: Matrix, nilpotency: int) -> Matrix:
    params = M[0][0].params
    out = identity(params, len(M))
    power = identity(params, len(M))
    for k in range(1, nilpotency + 1):
        power = mat_mul(power, M)
        if is_zero_matrix(power):
            break
        out = mat_add(out, mat_scale(power, Fraction(1, factorial(k))))
    return out


def _min_ord(M: Matrix) -> int:
    vs = [a.valuation() for r in M for a in r if not a.is_zero()]
    return min(vs) if vs else 0


def limit_gauge_chain(b: Sequence[Series], level: int, r: int = 1) -> GaugeChain:
    """Chain of gauges exp(b'_d S^d), d = 1..level, with theta(b'_d) = -b_d.

    ``b`` lists the t-coefficients b_0, b_1, ... of a principal part, as
    series over K((x_s)).  ``r`` is the block size, so S shifts by r.
    """
    params = b[0].params if b else None
    bp = []
    gauges = []
    N = r * (level + 1)
    if params is None:
        raise ValueError("empty principal-part data")
    S = shift_matrix(params, r, level)
    total = zeros(params, N)
    Sd = identity(params, N)
    for d in range(1, level + 1):
        Sd = mat_mul(Sd, S)
        bd = b[d] if d < len(b) else Series.zero(params)
        bpd = solve_antiderivative(bd)
        bp.append(bpd)
        if bpd.is_zero():
            continue
        term = mat_scale(Sd, bpd)
        gauges.append((_mat_exp_nilpotent(term, level),
                       _mat_exp_nilpotent(mat_scale(term, -1), level)))
        total = mat_add(total, term)
    composite = _mat_exp_nilpotent(total, level)
    composite_inv = _mat_exp_nilpotent(mat_scale(total, -1), level)
    used = [x.valuation() for x in bp if not x.is_zero()]
    return GaugeChain(level, bp, gauges, composite, composite_inv,
                      min(used) if used else None, _min_ord(composite))


def replay_chain(chain: GaugeChain, M: Matrix) -> Matrix:
    out = M
    for G, Ginv in chain.gauges:
        out = gauge(Connection(out), G, Ginv).mat
    return out


# -- levelwise decomposition --------------------------------------------------

@dataclass
class LevelBlock:
    """One TLJ block at one level, in its basis (t^i e_phi)."""

    block_index: int
    A: Matrix = field(repr=False)
    B: Matrix = field(repr=False)
    P: Matrix = field(repr=False)
    rs: Matrix = field(repr=False)
    chain: GaugeChain = field(repr=False)
    chain_ok: bool = False


@dataclass
class LevelDecomposition:
    level: int
    blocks: List[LevelBlock]

    @property
    def rs_normal_zero(self) -> bool:
        return all(is_zero_matrix(b.A) for b in self.blocks)

    @property
    def P_zero(self) -> bool:
        return all(is_zero_matrix(b.P) for b in self.blocks)


def _t_coeffs(f: Series, params0: SeriesParams, L: int) -> List[Series]:
    out = []
    for j in range(L + 1):
        rows = {k: {0: r[j]} for k, r in f.rows().items() if j in r}
        out.append(Series._from_rows(params0, rows, f.prec))
    return out


def level_block(block: TLJBlock, index: int, level: int) -> LevelBlock:
    f = block.f
    params0 = f.params.with_(L=0)
    p = principal_part(f)
    c = f - p
    A = block_toeplitz(jflat(c, block.r, block.pattern), level, params0)
    B = block_toeplitz(diag([p] * block.r), level, params0)
    b = _t_coeffs(p, params0, f.params.L)
    P = diag([b[0]] * (block.r * (level + 1)))
    rs = mat_sub(mat_add(A, B), P)
    chain = limit_gauge_chain(b, level, block.r)
    ok = (_mat_eq(gauge(Connection(rs), chain.composite, chain.composite_inv).mat, A)
          and _mat_eq(replay_chain(chain, rs), A))
    return LevelBlock(index, A, B, P, rs, chain, ok)


def levelwise_decompose(form: TLJForm, L: Optional[int] = None) -> List[LevelDecomposition]:
    """Decomposition of every level: P = b_0 I and nabla_rs = A + (B - b_0 I) per block.

    Raises LambdaViolation if a level part fails to commute with the t-shift.
    """
    L = form.params.L if L is None else L
    out = []
    for l in range(L + 1):
        blocks = [level_block(b, i, l) for i, b in enumerate(form.blocks)]
        for lb, b in zip(blocks, form.blocks):
            S = shift_matrix(lb.A[0][0].params, b.r, l)
            if not (is_zero_matrix(commutator(S, lb.rs)) and is_zero_matrix(commutator(S, lb.P))):
                raise LambdaViolation(f"level {l} block {lb.block_index} does not commute with t")
        out.append(LevelDecomposition(l, blocks))
    return out


# -- limits -------------------------------------------------------------------

@dataclass
class LimitReport:
    L: int
    form: TLJForm
    decomposition: LogDecomposition
    levels: List[LevelDecomposition]
    chains_ok: bool
    glue_ok: bool
    limit_matches_rs: bool
    P_nonzero: bool
    doesnt_exist: bool
    ord_trace: List[int]
    floor_trace: List[Optional[int]]
    divergent: bool
    family_coherent: bool

    @property
    def limit_trivial(self) -> bool:
        return all(is_zero_matrix(lb.A) for lb in self.levels[-1].blocks)


def glue_levels(levels: List[LevelDecomposition], form: TLJForm) -> Tuple[bool, bool]:
    """Check transitions on the normal forms and read off the limit matrix."""
    glue = True
    for lo, hi in zip(levels, levels[1:]):
        for a, b in zip(lo.blocks, hi.blocks):
            k = len(a.A)
            top = [row[:k] for row in b.A[:k]]
            if not _mat_eq(top, a.A) or any(not x.is_zero() for row in b.A[:k] for x in row[k:]):
                glue = False
    # limit: block (j, 0) of the top-level A is the t^j coefficient
    top = levels[-1]
    matches = True
    for lb, blk in zip(top.blocks, form.blocks):
        r = blk.r
        params = blk.f.params
        c = blk.f - principal_part(blk.f)
        expected = jflat(c, r, blk.pattern)
        for a in range(r):
            for bcol in range(r):
                terms = {}
                for j in range(top.level + 1):
                    e = lb.A[j * r + a][bcol]
                    for (k, _), v in e.terms():
                        terms[(k, j)] = v
                got = Series(params, terms)
                want = reduce_t(expected[a][bcol], top.level) if top.level < params.L else expected[a][bcol]
                if not (got - _lift(want, params)).is_zero():
                    matches = False
    return glue, matches


def _lift(f: Series, params: SeriesParams) -> Series:
    return Series._from_rows(params, f.rows(), f.prec)


def limit_compare(form: TLJForm, L: Optional[int] = None, conn: Optional[Connection] = None) -> LimitReport:
    """Levelwise decomposition, gluing and divergence diagnosis for a TLJ form.

    When ``conn`` is given its truncation family is also checked for coherence.
    """
    L = form.params.L if L is None else L
    form_n = TLJForm(form.params, tuple(_normalized_blocks(form)), form.gauge_log)
    dec = log_decompose(form_n)
    levels = levelwise_decompose(form_n, L)
    chains_ok = all(lb.chain_ok for lev in levels for lb in lev.blocks)
    glue, matches = glue_levels(levels, form_n)
    P_nonzero = not is_zero_matrix(dec.P)
    ords = [min([lb.chain.composite_ord for lb in lev.blocks] + [0]) for lev in levels]
    floors = []
    for lev in levels:
        fl = [lb.chain.ord_x_floor for lb in lev.blocks if lb.chain.ord_x_floor is not None]
        floors.append(min(fl) if fl else None)
    divergent = L > 0 and ords[-1] <= ords[0] - L
    coherent = reduce_family(conn, L).coherent if conn is not None else True
    return LimitReport(L, form_n, dec, levels, chains_ok, glue, matches, P_nonzero, P_nonzero,
                       ords, floors, divergent, coherent)


def _normalized_blocks(form: TLJForm):
    from .tlj import is_normalized, normalize_form
    if all(is_normalized(b) for b in form.blocks):
        return form.blocks
    return normalize_form(form).blocks


# -- Turrittin index under reduction ------------------------------------------

@dataclass
class IndexVerdict:
    status: str  # pass, fail or flagged
    index: int
    reduced_index: int
    changed_blocks: List[int]


def index_invariance_check(form: TLJForm) -> IndexVerdict:
    params0 = form.params.with_(L=0)
    reduced = TLJForm(params0, tuple(TLJBlock(reduce_t(b.f, 0), b.r, b.pattern) for b in form.blocks))
    i1, i0 = turrittin_index(form), turrittin_index(reduced)
    changed = [k for k, (b, rb) in enumerate(zip(form.blocks, reduced.blocks))
               if principal_part(b.f).exponents() != principal_part(rb.f).exponents()]
    if changed:
        status = "flagged"
    else:
        status = "pass" if i1 == i0 else "fail"
    return IndexVerdict(status, i1, i0, changed)
