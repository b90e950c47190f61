"""Truncated Laurent/Puiseux series over R_L = Q(zeta_m)[t]/t^(L+1).

A :class:`Series` is a finite sum of monomials ``c * t^j * x_s^k`` together
with a precision bound: every monomial with x_s-exponent ``>= prec`` is
unknown.  ``prec=None`` marks an exact Laurent polynomial.  The derivation is
theta = x d/dx = s^-1 x_s d/dx_s.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd
from typing import Dict, Iterator, Optional, Tuple

from .cyclo import CycNum
from .errors import BadSupport, IncompatibleCyclotomy, IncompatibleParams, NotAUnit

Prec = Optional[int]


def min_prec(*ps: Prec) -> Prec:
    finite = [p for p in ps if p is not None]
    return min(finite) if finite else None


def add_prec(p: Prec, shift: Optional[int]) -> Prec:
    if p is None or shift is None:
        return None if p is None else p
    return p + shift


@dataclass(frozen=True)
class SeriesParams:
    """m: cyclotomic order, s: ramification, L: t-truncation, prec: working x_s window."""

    m: int = 1
    s: int = 1
    L: int = 0
    prec: int = 16

    def __post_init__(self):
        if self.m < 1 or self.s < 1 or self.L < 0:
            raise ValueError(f"invalid series parameters {self}")

    def ring(self) -> Tuple[int, int, int]:
        return (self.m, self.s, self.L)

    def with_(self, **kw) -> "SeriesParams":
        return replace(self, **kw)

    def num(self, q) -> CycNum:
        if isinstance(q, CycNum):
            return q
        return CycNum.rational(self.m, q)


class Series:
    """Element of R_L((x_s)) known below a precision bound.

    Values are immutable; all operations return new series.
    """

    __slots__ = ("params", "_c", "prec")

    def __init__(self, params: SeriesParams, terms=None, prec: Prec = None):
        self.params = params
        self.prec = prec
        c: Dict[int, Dict[int, CycNum]] = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            L = params.L
            for (k, j), v in items:
                if j > L or j < 0 or (prec is not None and k >= prec):
                    continue
                v = params.num(v) if not isinstance(v, CycNum) else v
                if not v:
                    continue
                row = c.setdefault(k, {})
                if j in row:
                    v = row[j] + v
                    if not v:
                        del row[j]
                        if not row:
                            del c[k]
                        continue
                row[j] = v
        self._c = c

    @classmethod
    def _from_rows(cls, params, rows, prec):
        obj = object.__new__(cls)
        obj.params = params
        obj.prec = prec
        obj._c = {k: r for k, r in rows.items() if r and (prec is None or k < prec)}
        return obj

    # -- constructors --------------------------------------------------------
    @classmethod
    def zero(cls, params: SeriesParams, prec: Prec = None) -> "Series":
        return cls._from_rows(params, {}, prec)

    @classmethod
    def one(cls, params: SeriesParams) -> "Series":
        return cls.const(params, 1)

    @classmethod
    def const(cls, params: SeriesParams, c) -> "Series":
        return cls.monomial(params, c, 0, 0)

    @classmethod
    def monomial(cls, params: SeriesParams, c, k: int = 0, j: int = 0) -> "Series":
        return cls(params, {(k, j): c})

    @classmethod
    def x(cls, params: SeriesParams, k: int = 1) -> "Series":
        """x_s^k."""
        return cls.monomial(params, 1, k, 0)

    @classmethod
    def t(cls, params: SeriesParams, j: int = 1) -> "Series":
        return cls.monomial(params, 1, 0, j)

    # -- inspection ----------------------------------------------------------
    def terms(self) -> Iterator[Tuple[Tuple[int, int], CycNum]]:
        for k in sorted(self._c):
            row = self._c[k]
            for j in sorted(row):
                yield (k, j), row[j]

    def term_dict(self) -> Dict[Tuple[int, int], CycNum]:
        return dict(self.terms())

    def rows(self) -> Dict[int, Dict[int, CycNum]]:
        return {k: dict(r) for k, r in self._c.items()}

    def coeff(self, k: int, j: int = 0) -> CycNum:
        if self.prec is not None and k >= self.prec:
            raise BadSupport(f"coefficient x^{k} lies outside the window (prec {self.prec})")
        return self._c.get(k, {}).get(j, CycNum.rational(self.params.m, 0))

    def x_coeff(self, k: int) -> "Series":
        """Coefficient of x_s^k as an exact element of R_L (an x-constant series)."""
        if self.prec is not None and k >= self.prec:
            raise BadSupport(f"coefficient x^{k} lies outside the window (prec {self.prec})")
        row = self._c.get(k)
        return Series._from_rows(self.params, {0: dict(row)} if row else {}, None)

    def t_coeff(self, j: int) -> "Series":
        rows = {k: {0: r[j]} for k, r in self._c.items() if j in r}
        return Series._from_rows(self.params, rows, self.prec)

    def exponents(self):
        return sorted(self._c)

    def valuation(self) -> Optional[int]:
        return min(self._c) if self._c else None

    def order_bound(self) -> Optional[int]:
        """Lower bound for the x_s-order: valuation, or prec for a zero on its window."""
        v = self.valuation()
        return v if v is not None else self.prec

    def max_exponent(self) -> Optional[int]:
        return max(self._c) if self._c else None

    def t_degree(self) -> int:
        return max((j for r in self._c.values() for j in r), default=-1)

    def is_zero(self) -> bool:
        return not self._c

    def is_exact(self) -> bool:
        return self.prec is None

    def is_x_constant(self) -> bool:
        return all(k == 0 for k in self._c)

    def is_scalar(self) -> bool:
        """Element of K = Q(zeta_m): x- and t-constant."""
        return self.is_x_constant() and all(j == 0 for r in self._c.values() for j in r)

    def scalar(self) -> CycNum:
        if not self.is_scalar():
            raise BadSupport(f"{self} is not a scalar")
        return self._c.get(0, {}).get(0, CycNum.rational(self.params.m, 0))

    def t0_part(self) -> "Series":
        """The t^0 layer, keeping the ring parameters."""
        return self.t_coeff(0)

    def is_unit(self) -> bool:
        return any(0 in r for r in self._c.values())

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: "Series"):
        if self.params.ring() != other.params.ring():
            raise IncompatibleParams(
                f"series parameters differ: {self.params.ring()} vs {other.params.ring()}")

    def _lift(self, other):
        if isinstance(other, Series):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, CycNum)):
            return Series.const(self.params, other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        prec = min_prec(self.prec, o.prec)
        rows = {k: dict(r) for k, r in self._c.items()}
        for k, r in o._c.items():
            if prec is not None and k >= prec:
                continue
            dst = rows.setdefault(k, {})
            for j, v in r.items():
                w = dst[j] + v if j in dst else v
                if w:
                    dst[j] = w
                else:
                    dst.pop(j, None)
        return Series._from_rows(self.params, rows, prec)

    __radd__ = __add__

    def __neg__(self):
        return Series._from_rows(
            self.params, {k: {j: -v for j, v in r.items()} for k, r in self._c.items()}, self.prec)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Series":
        c = self.params.num(c)
        if not c:
            return Series.zero(self.params, self.prec)
        return Series._from_rows(
            self.params, {k: {j: v * c for j, v in r.items()} for k, r in self._c.items()}, self.prec)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(other)
        if not isinstance(other, Series):
            return NotImplemented
        self._check(other)
        va, vb = self.order_bound(), other.order_bound()
        if (va is None and not self._c) or (vb is None and not other._c):
            return Series.zero(self.params)
        prec = min_prec(add_prec(self.prec, vb) if self.prec is not None else None,
                        add_prec(other.prec, va) if other.prec is not None else None)
        L = self.params.L
        rows: Dict[int, Dict[int, CycNum]] = {}
        for k1, r1 in self._c.items():
            for k2, r2 in other._c.items():
                k = k1 + k2
                if prec is not None and k >= prec:
                    continue
                dst = rows.setdefault(k, {})
                for j1, a in r1.items():
                    for j2, b in r2.items():
                        j = j1 + j2
                        if j > L:
                            continue
                        p = a * b
                        dst[j] = dst[j] + p if j in dst else p
        for k in list(rows):
            r = {j: v for j, v in rows[k].items() if v}
            rows[k] = r
        return Series._from_rows(self.params, rows, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return series_invert(self) ** (-e)
        out = Series.one(self.params)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            return self.scale(1 / self.params.num(other))
        if isinstance(other, Series):
            return self * series_invert(other)
        return NotImplemented

    def truncate(self, prec: Prec) -> "Series":
        return Series._from_rows(self.params, self._c, min_prec(self.prec, prec))

    def with_prec(self, prec: Prec) -> "Series":
        """Same terms, re-declared window (caller certifies correctness)."""
        return Series._from_rows(self.params, self._c, prec)

    def with_params(self, params: SeriesParams) -> "Series":
        if params.ring() != self.params.ring():
            raise IncompatibleParams("with_params may only change the working window")
        return Series._from_rows(params, self._c, self.prec)

    # -- comparison ----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycNum)):
            other = Series.const(self.params, other)
        if not isinstance(other, Series):
            return NotImplemented
        return (self.params.ring() == other.params.ring() and self.prec == other.prec
                and self._c == other._c)

    def __hash__(self):
        return hash((self.params.ring(), self.prec, tuple(self.terms())))

    def agrees(self, other, window: Prec = None) -> bool:
        """Equality on the common window (optionally further restricted)."""
        if not isinstance(other, Series):
            other = Series.const(self.params, other)
        return (self - other).truncate(window).is_zero()

    def sort_key(self):
        return tuple((k, j, v.sort_key()) for (k, j), v in self.terms())

    # -- rendering -----------------------------------------------------------
    def __repr__(self):
        return f"Series({self})"

    def __str__(self):
        return render_series(self)


def _fmt_exp(k: int, s: int) -> str:
    q = Fraction(k, s)
    if q.denominator == 1:
        return f"x^{q.numerator}" if q != 1 else "x"
    return f"x^({q.numerator}/{q.denominator})"


def render_series(f: Series, with_prec: bool = True) -> str:
    """Monomial-sum syntax, t-degree major and x-exponent minor."""
    s = f.params.s
    parts = []
    for (k, j), c in sorted(f.terms(), key=lambda kv: (kv[0][1], kv[0][0])):
        mono = []
        if j:
            mono.append("t" if j == 1 else f"t^{j}")
        if k:
            mono.append(_fmt_exp(k, s))
        cs = str(c)
        if not mono:
            parts.append(cs)
            continue
        body = " * ".join(mono)
        if c == 1:
            parts.append(body)
        elif c == -1:
            parts.append("-" + body)
        elif c.is_rational():
            parts.append(f"{cs} * {body}")
        else:
            parts.append(f"({cs}) * {body}")
    out = parts[0] if parts else "0"
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    if with_prec and f.prec is not None:
        out += f" + O({_fmt_exp(f.prec, s)})"
    return out


# -- operations --------------------------------------------------------------

def theta(f: Series) -> Series:
    """x d/dx; on x_s^k it multiplies by k/s."""
    s = f.params.s
    rows = {}
    for k, r in f._c.items():
        if k:
            q = Fraction(k, s)
            rows[k] = {j: v * q for j, v in r.items()}
    return Series._from_rows(f.params, rows, f.prec)


def principal_part(f: Series) -> Series:
    """Negative-exponent part; an exact Laurent polynomial in x_s^-1."""
    return Series._from_rows(f.params, {k: dict(r) for k, r in f._c.items() if k < 0}, None)


def regular_part(f: Series) -> Series:
    return Series._from_rows(f.params, {k: dict(r) for k, r in f._c.items() if k >= 0}, f.prec)


def _invert_t0(a: Series, target: int) -> Series:
    """Inverse of a nonzero series with coefficients in K (no t)."""
    params = a.params
    v = a.valuation()
    lead = a._c[v][0]
    linv = 1 / lead
    # a = lead x^v (1 + h), h in x K[[x]] known to relative order w
    if a.prec is None:
        w = target + v
        absolute = None if len(a._c) == 1 else target
    else:
        w = a.prec - v
        absolute = a.prec - 2 * v
    if len(a._c) == 1:
        return Series._from_rows(params, {-v: {0: linv}}, absolute)
    h = {k - v: r[0] * linv for k, r in a._c.items() if k != v and 0 in r}
    u = [CycNum.rational(params.m, 1)]
    for n in range(1, max(w, 1)):
        acc = CycNum.rational(params.m, 0)
        for i, hi in h.items():
            if i <= n:
                acc = acc - hi * u[n - i]
        u.append(acc)
    rows = {n - v: {0: c * linv} for n, c in enumerate(u[:max(w, 0)]) if c}
    return Series._from_rows(params, rows, -v + w)


def series_invert(f: Series, prec: Prec = None) -> Series:
    """Multiplicative inverse in R_L((x_s)).

    ``f`` is a unit iff its t^0 layer is nonzero on the window.  Exact
    non-monomial inputs are expanded up to ``prec`` (default: params.prec).
    """
    a = f.t0_part()
    if a.is_zero():
        raise NotAUnit(f"{f} is not a unit: its t^0 part vanishes on the window")
    target = f.params.prec if prec is None else prec
    ainv = _invert_t0(a, target)
    n = f - a
    if n.is_zero():
        return ainv if n.prec is None else ainv * Series.one(f.params).truncate(n.prec)
    # f^-1 = a^-1 * sum_i (-n a^-1)^i, finite since n is divisible by t
    q = -(n * ainv)
    out = Series.one(f.params)
    power = Series.one(f.params)
    for _ in range(f.params.L):
        power = power * q
        if power.is_zero() and power.prec is None:
            break
        out = out + power
    return ainv * out


def solve_homogeneous_gauge(g: Series) -> Series:
    """Unit u = 1 + O(x_s) with theta(u) = g*u, for g in x_s R_L[[x_s]]."""
    params = g.params
    if any(k <= 0 for k in g._c):
        raise BadSupport("solve_homogeneous_gauge needs only positive x_s-exponents")
    if g.is_zero() and g.prec is None:
        return Series.one(params)
    w = params.prec if g.prec is None else g.prec
    s, L = params.s, params.L
    u: Dict[int, Dict[int, CycNum]] = {0: {0: CycNum.rational(params.m, 1)}}
    for k in range(1, w):
        acc: Dict[int, CycNum] = {}
        for a, ga in g._c.items():
            if a > k or (k - a) not in u:
                continue
            for j1, c1 in ga.items():
                for j2, c2 in u[k - a].items():
                    j = j1 + j2
                    if j <= L:
                        acc[j] = acc[j] + c1 * c2 if j in acc else c1 * c2
        q = Fraction(s, k)
        row = {j: v * q for j, v in acc.items() if v}
        if row:
            u[k] = row
    return Series._from_rows(params, u, w)


def solve_antiderivative(b: Series) -> Series:
    """b' with theta(b') = -b, for b in x_s^-1 R_L[x_s^-1]."""
    if any(k >= 0 for k in b._c):
        raise BadSupport("solve_antiderivative needs only negative x_s-exponents")
    s = b.params.s
    rows = {k: {j: -v * Fraction(s, k) for j, v in r.items()} for k, r in b._c.items()}
    return Series._from_rows(b.params, rows, b.prec)


def ramify(f: Series, d: int) -> Series:
    """Base change x_s -> x_{sd}^d."""
    if d < 1:
        raise ValueError("ramification factor must be positive")
    p = f.params
    params = p.with_(s=p.s * d, prec=p.prec * d)
    return Series._from_rows(params, {k * d: dict(r) for k, r in f._c.items()},
                             None if f.prec is None else f.prec * d)


def galois_sigma(f: Series, power: int = 1) -> Series:
    """Automorphism x_s -> zeta_s^power x_s."""
    p = f.params
    if p.m % p.s:
        raise IncompatibleCyclotomy(f"zeta_{p.s} is not in Q(zeta_{p.m})")
    power %= p.s
    if power == 0:
        return f
    step = p.m // p.s
    rows = {}
    for k, r in f._c.items():
        z = CycNum.zeta(p.m, step * ((k * power) % p.s))
        rows[k] = {j: v * z for j, v in r.items()}
    return Series._from_rows(p, rows, f.prec)


def reduce_t(f: Series, level: int) -> Series:
    """Reduction modulo t^(level+1)."""
    if level < 0 or level > f.params.L:
        raise ValueError(f"level {level} outside 0..{f.params.L}")
    params = f.params.with_(L=level)
    rows = {k: {j: v for j, v in r.items() if j <= level} for k, r in f._c.items()}
    return Series._from_rows(params, rows, f.prec)


def lift_t(f: Series, params: SeriesParams) -> Series:
    """Embed a series into a ring with larger (or equal) t-truncation."""
    if params.m != f.params.m or params.s != f.params.s or params.L < f.params.L:
        raise IncompatibleParams("lift_t needs the same field and ramification, L not smaller")
    return Series._from_rows(params, f.rows(), f.prec)


def exponent_denominator(k: int, s: int) -> int:
    """Denominator of k/s in lowest terms."""
    return s // gcd(k, s)
