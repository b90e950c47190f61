"""TLJ forms on the generic fiber, where t is inverted.

Only x-constant matrices over Q[t] are handled: the connection is then an
Euler connection over Q(t) and its TLJ form is the Jordan form of the matrix,
with each Jordan chain written in the lower (flat) convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import sympy as sp

from .conn import Connection
from .errors import BadSupport, DoesNotSplit, IncompatibleCyclotomy

T_SYMBOL = sp.Symbol("t")


@dataclass(frozen=True)
class GenericForm:
    """Blocks (eigenvalue in Q(t), size) with gauge P: P^-1 A P = diag(Jflat)."""

    blocks: Tuple[Tuple[sp.Expr, int], ...]
    gauge: sp.Matrix
    matrix: sp.Matrix

    def render_blocks(self) -> List[str]:
        return [f"{sp.sstr(c)} ; {r}" for c, r in self.blocks]


def to_sympy_matrix(conn: Connection) -> sp.Matrix:
    if conn.params.m != 1:
        raise IncompatibleCyclotomy("fraction-field mode works over Q(t) only (m = 1)")
    rows = []
    for r in conn.mat:
        row = []
        for a in r:
            if not a.is_x_constant():
                raise BadSupport("fraction-field mode needs an x-constant matrix")
            row.append(sum((sp.Rational(c.rational_part.numerator, c.rational_part.denominator)
                            * T_SYMBOL ** j for (_, j), c in a.terms()), sp.Integer(0)))
        rows.append(row)
    return sp.Matrix(rows)


def split_generic(conn: Connection) -> GenericForm:
    A = to_sympy_matrix(conn)
    T = sp.Symbol("T")
    cp = sp.factor_list((T * sp.eye(A.shape[0]) - A).det(), T)
    for fac, _ in cp[1]:
        if sp.degree(fac, T) > 1:
            raise DoesNotSplit("characteristic polynomial does not split over Q(t)", str(fac))
    P, J = A.jordan_form()
    # sympy puts ones on the superdiagonal; reversing each chain moves them below
    n = A.shape[0]
    perm = []
    blocks = []
    i = 0
    while i < n:
        j = i
        while j + 1 < n and J[j, j + 1] == 1:
            j += 1
        perm.extend(range(j, i - 1, -1))
        blocks.append((sp.simplify(J[i, i]), j - i + 1))
        i = j + 1
    R = sp.zeros(n)
    for new, old in enumerate(perm):
        R[old, new] = 1
    P2 = P * R
    Jflat = sp.simplify(P2.inv() * A * P2)
    for a in range(n):
        for b in range(n):
            expected = blocks_value(blocks, a, b)
            if sp.simplify(Jflat[a, b] - expected) != 0:
                raise AssertionError("generic Jordan form failed verification")
    return GenericForm(tuple(blocks), P2, Jflat)


def blocks_value(blocks, a, b):
    off = 0
    for c, r in blocks:
        if off <= a < off + r and off <= b < off + r:
            if a == b:
                return c
            return 1 if a == b + 1 else 0
        off += r
    return 0
