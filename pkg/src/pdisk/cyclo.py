"""Exact arithmetic in the cyclotomic field Q(zeta_m).

Elements are stored as their canonical residue modulo the m-th cyclotomic
polynomial: a tuple of ``Fraction`` of length phi(m), lowest power first.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import floor


# -- polynomial helpers over Q (lists, lowest degree first) ------------------

def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _psub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim([Fraction(c) for c in out])


def _pdivmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        d = len(a) - len(b)
        q[d] = c
        for i, y in enumerate(b):
            a[i + d] -= c * y
        _trim(a)
    return _trim(q), a


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple:
    """Integer coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise ValueError("cyclotomic order must be positive")
    num = [Fraction(-1)] + [Fraction(0)] * (m - 1) + [Fraction(1)]  # T^m - 1
    for d in range(1, m):
        if m % d == 0:
            num, rem = _pdivmod(num, list(cyclotomic_poly(d)))
            assert not rem
    return tuple(int(c) for c in num)


@lru_cache(maxsize=None)
def euler_phi(m: int) -> int:
    return len(cyclotomic_poly(m)) - 1


def _reduce(coeffs, m):
    phi = cyclotomic_poly(m)
    n = len(phi) - 1
    c = list(coeffs)
    # Phi_m is monic with integer coefficients
    for top in range(len(c) - 1, n - 1, -1):
        lead = c[top]
        if lead:
            d = top - n
            for i in range(n):
                if phi[i]:
                    c[d + i] -= lead * phi[i]
        c[top] = Fraction(0)
    c = c[:n] + [Fraction(0)] * (n - len(c))
    return tuple(c)


class CycNum:
    """Element of Q(zeta_m) in the power basis 1, zeta, ..., zeta^(phi(m)-1)."""

    __slots__ = ("m", "c")

    def __init__(self, m: int, coeffs=(0,)):
        self.m = m
        coeffs = [Fraction(x) for x in coeffs]
        n = euler_phi(m)
        if len(coeffs) > n:
            self.c = _reduce(coeffs, m)
        else:
            self.c = tuple(coeffs) + (Fraction(0),) * (n - len(coeffs))

    @classmethod
    def _raw(cls, m, c):
        obj = object.__new__(cls)
        obj.m = m
        obj.c = c
        return obj

    @classmethod
    def rational(cls, m: int, q) -> "CycNum":
        return cls(m, (q,))

    @classmethod
    def zeta(cls, m: int, k: int = 1) -> "CycNum":
        """zeta_m^k; k may be negative."""
        k %= m
        return cls(m, [0] * k + [1])

    # -- predicates ----------------------------------------------------------
    def __bool__(self):
        return any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    @property
    def rational_part(self) -> Fraction:
        """Coefficient of zeta^0 (the coordinate tau-normalization acts on)."""
        return self.c[0]

    def floor(self) -> int:
        return floor(self.c[0])

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CycNum):
            if other.m != self.m:
                raise ValueError(f"cyclotomic orders differ: {self.m} vs {other.m}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNum(self.m, (other,))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycNum._raw(self.m, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return CycNum._raw(self.m, tuple(-a for a in self.c))

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return CycNum._raw(self.m, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycNum._raw(self.m, tuple(a * other for a in self.c))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if len(self.c) == 1:
            return CycNum._raw(self.m, (self.c[0] * o.c[0],))
        return CycNum._raw(self.m, _reduce(_pmul(list(self.c), list(o.c)) or [0], self.m))

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        return cyc_inverse(self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(zeta)")
            return CycNum._raw(self.m, tuple(a / other for a in self.c))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * cyc_inverse(o)

    def __rtruediv__(self, other):
        return cyc_inverse(self) * other

    def __pow__(self, e: int):
        if e < 0:
            return cyc_inverse(self) ** (-e)
        out = CycNum(self.m, (1,))
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self.m == other.m and self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c[0] == other and not any(self.c[1:])
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash((self.m, self.c))

    def sort_key(self):
        return self.c

    def __repr__(self):
        return f"CycNum({self.m}, {self})"

    def __str__(self):
        parts = []
        for i, a in enumerate(self.c):
            if not a:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            if not mono:
                parts.append(str(a))
            elif a == 1:
                parts.append(mono)
            elif a == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{a}*{mono}")
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


def cyc_inverse(a: CycNum) -> CycNum:
    """Inverse in Q(zeta_m) by the extended Euclidean algorithm modulo Phi_m."""
    if not a:
        raise ZeroDivisionError("zero has no inverse in Q(zeta_m)")
    if len(a.c) == 1:
        return CycNum._raw(a.m, (1 / a.c[0],))
    # invariant: r_i = s_i * a  (mod Phi_m)
    r0 = [Fraction(c) for c in cyclotomic_poly(a.m)]
    r1 = _trim(list(a.c))
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
    inv = [c / r1[0] for c in s1]
    return CycNum(a.m, _reduce(inv, a.m) if len(inv) > euler_phi(a.m) else inv)
