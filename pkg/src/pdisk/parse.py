"""Spec files and series literals.

A spec file is a list of ``key = value`` header lines and ``tag: payload``
data lines; ``#`` starts a comment.  Series literals are sums of monomials
such as ``1/2 + 3*z - t^2 * x^(-1/2)``; see the README for the grammar.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .cyclo import CycNum
from .errors import NotAUnit, ParamError, ParseError
from .series import Series, SeriesParams, render_series, series_invert

_TOKEN = re.compile(r"\s*(?:(\d+)|([ztxO])|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text: str, params: SeriesParams, line: Optional[int], col0: int):
        self.text = text
        self.params = params
        self.line = line
        self.col0 = col0
        self.toks = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                bad = len(text) - len(text[pos:].lstrip())
                self.fail(f"unexpected character {text[bad]!r}", bad)
            start = m.start(m.lastindex)
            kind = ("num", "var", "op")[m.lastindex - 1]
            val = m.group(m.lastindex)
            if val == "**":
                val = "^"
            self.toks.append((kind, val, start))
            pos = m.end()
        self.i = 0

    def fail(self, msg, pos=None):
        col = None if pos is None else self.col0 + pos + 1
        raise ParseError(msg, self.line, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            self.fail(f"expected {val!r}", t[2])

    def parse(self) -> Series:
        if not self.toks:
            self.fail("empty expression", 0)
        out = self.expr()
        if self.i < len(self.toks):
            self.fail(f"unexpected {self.peek()[1]!r}", self.peek()[2])
        return out

    def expr(self):
        out = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                out = out * rhs
            else:
                try:
                    out = out * series_invert(rhs)
                except NotAUnit:
                    self.fail("division by a non-unit", pos)
        return out

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        kind, val, pos = self.peek()
        base = self.atom()
        if self.peek()[1] != "^":
            return base
        self.take()
        e, epos = self.exponent()
        if kind == "var" and val == "x":
            k = e * self.params.s
            if k.denominator != 1:
                raise ParamError(
                    f"line {self.line}: exponent {e} of x is not a multiple of 1/{self.params.s}")
            return Series.x(self.params, int(k))
        if e.denominator != 1:
            self.fail("fractional exponents are allowed on x only", epos)
        e = int(e)
        if kind == "var" and val == "t":
            if e < 0:
                self.fail("t has no inverse", epos)
            return Series.t(self.params, e)
        if kind == "var" and val == "z":
            return Series.const(self.params, CycNum.zeta(self.params.m, e))
        try:
            return base ** e
        except NotAUnit:
            self.fail("negative power of a non-unit", epos)

    def exponent(self):
        kind, val, pos = self.peek()
        if val == "(":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            num = self._int()
            den = 1
            if self.peek()[1] == "/":
                self.take()
                den = self._int()
                if den == 0:
                    self.fail("zero denominator", pos)
            self.expect(")")
            return Fraction(sign * num, den), pos
        sign = 1
        if val == "-":
            self.take()
            sign = -1
        return Fraction(sign * self._int()), pos

    def _int(self):
        kind, val, pos = self.take()
        if kind != "num":
            self.fail("expected an integer", pos)
        return int(val)

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Series.const(self.params, int(val))
        if kind == "var" and val == "O":
            return self.big_o(pos)
        if kind == "var":
            if val == "x":
                return Series.x(self.params, self.params.s)
            if val == "t":
                if self.params.L < 1:
                    return Series.zero(self.params)
                return Series.t(self.params)
            return Series.const(self.params, CycNum.zeta(self.params.m, 1))
        if val == "(":
            out = self.expr()
            self.expect(")")
            return out
        self.fail("expected a number, z, t, x, O or '('", pos)

    def big_o(self, pos):
        """O(x^e): unknown terms from x^e on."""
        self.expect("(")
        kind, val, xpos = self.take()
        if val != "x":
            self.fail("O(...) takes a power of x", xpos)
        e = Fraction(1)
        if self.peek()[1] == "^":
            self.take()
            e, _ = self.exponent()
        self.expect(")")
        k = e * self.params.s
        if k.denominator != 1:
            raise ParamError(f"line {self.line}: exponent {e} of x is not a multiple of 1/{self.params.s}")
        return Series.zero(self.params, int(k))


def parse_series(text: str, params: SeriesParams, line: Optional[int] = None, col0: int = 0) -> Series:
    """Parse a series literal; ``x`` means x itself, so x_s is ``x^(1/s)``."""
    return _Parser(text, params, line, col0).parse()


# -- spec files ---------------------------------------------------------------

KINDS = ("matrix", "tlj")
HEADER_KEYS = ("m", "s", "L", "prec", "kind", "rank")


@dataclass
class SpecFile:
    params: SeriesParams
    kind: str
    rank: int
    rows: List[List[Series]] = field(default_factory=list)
    seeds: List[Tuple[Series, int]] = field(default_factory=list)
    blocks: List[Tuple[Series, int, Tuple[int, ...]]] = field(default_factory=list)
    rs_rows: List[List[Series]] = field(default_factory=list)
    P_rows: List[List[Series]] = field(default_factory=list)
    options: Dict[str, str] = field(default_factory=dict)
    text: str = ""

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def option(self, key: str, default=False) -> bool:
        v = self.options.get(key)
        if v is None:
            return default
        return v.lower() in ("1", "true", "yes", "on")


def _header_int(key, val, line):
    try:
        return int(val)
    except ValueError:
        raise ParamError(f"line {line}: header {key} must be an integer, got {val!r}")


def parse_spec(text: str, prec_override: Optional[int] = None) -> SpecFile:
    header: Dict[str, str] = {}
    data: List[Tuple[int, str, str, int]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        if ":" in body and (body.index(":") < body.index("=") if "=" in body else True):
            tag, payload = body.split(":", 1)
            data.append((ln, tag.strip(), payload, len(tag) + 1))
        elif "=" in body:
            key, val = (p.strip() for p in body.split("=", 1))
            if key not in HEADER_KEYS:
                raise ParseError(f"unknown header {key!r}", ln, 1)
            if key in header:
                raise ParseError(f"duplicate header {key!r}", ln, 1)
            header[key] = val
        else:
            raise ParseError("expected 'key = value' or 'tag: payload'", ln, 1)
    m = _header_int("m", header.get("m", "1"), 0)
    s = _header_int("s", header.get("s", "1"), 0)
    L = _header_int("L", header.get("L", "0"), 0)
    prec = _header_int("prec", header.get("prec", "16"), 0)
    if prec_override is not None:
        prec = prec_override
    if m < 1 or s < 1 or L < 0 or prec < 1:
        raise ParamError(f"invalid header values m={m} s={s} L={L} prec={prec}")
    params = SeriesParams(m, s, L, prec)
    kind = header.get("kind", "matrix")
    if kind not in KINDS:
        raise ParamError(f"kind must be one of {KINDS}, got {kind!r}")
    spec = SpecFile(params, kind, 0, text=text)
    for ln, tag, payload, col0 in data:
        if tag in ("row", "rs_row", "P_row"):
            entries = _split_top(payload, ",")
            row = []
            off = col0
            for e in entries:
                row.append(parse_series(e, params, ln, off))
                off += len(e) + 1
            {"row": spec.rows, "rs_row": spec.rs_rows, "P_row": spec.P_rows}[tag].append(row)
        elif tag == "seed":
            parts = payload.split(";")
            if len(parts) != 2:
                raise ParseError("seed needs 'f ; r'", ln, col0 + 1)
            spec.seeds.append((parse_series(parts[0], params, ln, col0), _pos_int(parts[1], ln)))
        elif tag == "block":
            parts = payload.split(";")
            if len(parts) not in (2, 3):
                raise ParseError("block needs 'f ; r ; pattern'", ln, col0 + 1)
            r = _pos_int(parts[1], ln)
            bits = tuple(int(b) for b in parts[2].split()) if len(parts) == 3 else (0,) * (r - 1)
            if len(bits) != r - 1 or any(b not in (0, 1) for b in bits):
                raise ParseError(f"pattern must have {r - 1} bits in {{0, 1}}", ln, col0 + 1)
            spec.blocks.append((parse_series(parts[0], params, ln, col0), r, bits))
        elif tag == "option":
            if "=" not in payload:
                raise ParseError("option needs 'key = value'", ln, col0 + 1)
            k, v = (p.strip() for p in payload.split("=", 1))
            spec.options[k] = v
        else:
            raise ParseError(f"unknown tag {tag!r}", ln, 1)
    _check_shapes(spec, header)
    return spec


def _split_top(payload: str, sep: str) -> List[str]:
    out, depth, cur = [], 0, ""
    for ch in payload:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def _pos_int(text: str, ln: int) -> int:
    try:
        v = int(text.strip())
    except ValueError:
        raise ParseError(f"expected a positive integer, got {text.strip()!r}", ln)
    if v < 1:
        raise ParseError("multiplicities and block sizes must be positive", ln)
    return v


def _check_shapes(spec: SpecFile, header):
    if spec.kind == "matrix":
        n = len(spec.rows)
        if n == 0:
            raise ParseError("matrix spec without rows")
        for name, rows in (("row", spec.rows), ("rs_row", spec.rs_rows), ("P_row", spec.P_rows)):
            if rows and (len(rows) != n or any(len(r) != n for r in rows)):
                raise ParseError(f"{name} entries do not form a {n}x{n} matrix")
        spec.rank = n
    else:
        if not spec.blocks:
            raise ParseError("tlj spec without blocks")
        spec.rank = sum(b[1] for b in spec.blocks)
    if "rank" in header and int(header["rank"]) != spec.rank:
        raise ParamError(f"rank header {header['rank']} disagrees with the data ({spec.rank})")


def render_literal(f: Series) -> str:
    """Series literal that parses back to the same series, precision included."""
    return render_series(f, with_prec=True)


def echo_spec(spec: SpecFile) -> str:
    p = spec.params
    lines = [f"m = {p.m}", f"s = {p.s}", f"L = {p.L}", f"prec = {p.prec}",
             f"kind = {spec.kind}", f"rank = {spec.rank}"]
    for tag, rows in (("row", spec.rows), ("rs_row", spec.rs_rows), ("P_row", spec.P_rows)):
        for r in rows:
            lines.append(f"{tag}: " + ", ".join(render_literal(a) for a in r))
    for f, r in spec.seeds:
        lines.append(f"seed: {render_literal(f)} ; {r}")
    for f, r, bits in spec.blocks:
        lines.append(f"block: {render_literal(f)} ; {r} ; {' '.join(map(str, bits))}".rstrip(" ;"))
    for k in sorted(spec.options):
        lines.append(f"option: {k} = {spec.options[k]}")
    return "\n".join(lines) + "\n"
