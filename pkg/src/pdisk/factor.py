"""Polynomial factorization over Q(zeta_m), delegated to sympy."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple

import sympy as sp

from .cyclo import CycNum, euler_phi
from .errors import DoesNotSplit

_T = sp.Symbol("T")


@lru_cache(maxsize=None)
def _field(m: int):
    if m <= 2:
        return sp.QQ
    return sp.QQ.algebraic_field(sp.exp(2 * sp.pi * sp.I / m))


def _to_sympy(a: CycNum):
    K = _field(a.m)
    if K is sp.QQ:
        return K(a.c[0].numerator, a.c[0].denominator)
    coeffs = [sp.QQ(c.numerator, c.denominator) for c in reversed(a.c)]
    return K(coeffs)


def _from_sympy(e, m: int) -> CycNum:
    if _field(m) is sp.QQ:
        return CycNum.rational(m, Fraction(int(e.numerator), int(e.denominator)))
    high_first = [Fraction(int(c.numerator), int(c.denominator)) for c in e.to_list()]
    c = list(reversed(high_first))
    return CycNum(m, c + [0] * (euler_phi(m) - len(c)))


def _render_factor(f, m: int) -> str:
    parts = []
    deg = f.degree()
    for i, c in enumerate(f.rep.to_list()):
        cn = _from_sympy(c, m)
        if cn:
            parts.append(f"({cn})*T^{deg - i}")
    return " + ".join(parts)


def roots_with_multiplicity(coeffs_high_first: Sequence[CycNum], m: int) -> List[Tuple[CycNum, int]]:
    """Roots of a polynomial over Q(zeta_m), which must split into linear factors.

    Roots are returned in a deterministic order (by coordinate tuple).
    """
    K = _field(m)
    p = sp.Poly.from_list([_to_sympy(c) for c in coeffs_high_first], _T, domain=K)
    _, factors = p.factor_list()
    out = []
    for f, e in factors:
        if f.degree() != 1:
            raise DoesNotSplit(
                f"characteristic polynomial does not split over Q(zeta_{m})",
                _render_factor(f, m))
        a, b = f.rep.to_list()
        out.append((_from_sympy(K.quo(-b, a) if K is not sp.QQ else -b / a, m), e))
    out.sort(key=lambda re: re[0].sort_key())
    return out
