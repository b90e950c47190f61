"""Golden-example suite behind ``pdisk selftest``."""

from __future__ import annotations

import random
from typing import Callable, List, Tuple

from .conn import Connection, gauge
from .deform import limit_compare
from .errors import NoTLJForm, PdiskError, TurningPoint
from .generic import split_generic
from .linalg import diag, is_zero_matrix, mat_add, mat_agrees, mat_mul, mat_pow
from .logdecomp import log_decompose, verify_decomposition
from .parse import parse_series
from .series import SeriesParams
from .split import split
from .tlj import TLJBlock, TLJForm, assemble, jordan_levelt

Result = Tuple[str, bool, str]


def _mat(rows, params):
    return [[parse_series(a, params) for a in r] for r in rows]


def golden_2x2() -> Result:
    p = SeriesParams(m=1, s=1, L=0, prec=16)
    conn = Connection(_mat([["1/x", "0"], ["1", "-1/x"]], p), p)
    seeds = [(parse_series("1/x", p), 1), (parse_series("-1/x", p), 1)]
    dec = log_decompose(split(conn, seeds))
    rs_zero = is_zero_matrix(dec.rs_matrix())
    P_ok = dec.P == diag([parse_series("1/x", p), parse_series("-1/x", p)])
    v = verify_decomposition(conn, Connection(_mat([["0", "0"], ["1", "0"]], p), p), dec.P)
    alt = (v.conditions["i"], v.conditions["ii"], v.conditions["iii"]) == ("pass", "pass", "fail")
    return "golden_2x2", rs_zero and P_ok and alt, f"rs zero {rs_zero}, P {P_ok}, alternative {alt}"


def example_a() -> Result:
    p = SeriesParams(L=2, prec=8)
    conn = Connection(_mat([["0", "t"], ["0", "0"]], p), p)
    try:
        split(conn, [(parse_series("0", p), 2)])
        errs = False
    except NoTLJForm:
        errs = True
    g = split_generic(conn)
    ok = errs and [r for _, r in g.blocks] == [2]
    return "example_a", ok, "no form over R, Jordan block of size 2 over Q(t)"


def example_b() -> Result:
    p = SeriesParams(L=2, prec=8)
    conn = Connection(_mat([["0", "t^2"], ["1", "0"]], p), p)
    seeds = [(parse_series("t", p), 1), (parse_series("-t", p), 1)]
    try:
        split(conn, seeds)
        errs = False
    except TurningPoint:
        errs = True
    g = split_generic(conn)
    eig = sorted(str(c) for c, _ in g.blocks)
    ok = errs and eig == ["-t", "t"]
    return "example_b", ok, f"turning point at t = 0, generic eigenvalues {eig}"


def example_c(L: int = 6) -> Result:
    p = SeriesParams(L=L, prec=8)
    conn = Connection(_mat([["1", "t"], ["0", "t + 1/2"]], p), p)
    seeds = [(parse_series("1", p), 1), (parse_series("t + 1/2", p), 1)]
    form = split(conn, seeds)
    Q = form.total_gauge()
    # eigen-coefficient of the second basis vector c e1 + e2
    c = Q[0][1] * Q[1][1] ** -1
    want = parse_series("t", p) * (parse_series("t - 1/2", p) ** -1)
    replay = mat_agrees(gauge(conn, Q).mat, assemble(form).mat)
    return "example_c", (c - want).is_zero() and replay, f"c = t/(t - 1/2) mod t^{L + 1}"


def counterexample() -> Result:
    p = SeriesParams(L=4, prec=12)
    conn = Connection([[parse_series("t/x", p)]], p)
    form = split(conn, [(parse_series("t/x", p), 1)])
    rep = limit_compare(form, 4, conn)
    ok = (all(lev.rs_normal_zero for lev in rep.levels) and rep.limit_trivial and rep.doesnt_exist
          and rep.ord_trace == [0, -1, -2, -3, -4] and rep.divergent and rep.chains_ok)
    return "counterexample", ok, f"ord_x trace {rep.ord_trace}"


def random_levelt(seed: int, count: int = 10) -> Result:
    rng = random.Random(seed)
    p = SeriesParams(L=2, prec=8)
    for _ in range(count):
        blocks = []
        for _ in range(rng.randint(1, 2)):
            f = parse_series(f"{rng.randint(-3, 3)}/x + {rng.randint(-3, 3)}*t", p)
            r = rng.randint(1, 3)
            blocks.append(TLJBlock(f, r, tuple(rng.randint(0, 1) for _ in range(r - 1))))
        form = TLJForm(p, tuple(blocks))
        S, N = jordan_levelt(form)
        A = assemble(form, distinct=False).mat
        ok = (mat_agrees(mat_add(S, N), A) and mat_agrees(mat_mul(S, N), mat_mul(N, S))
              and is_zero_matrix(mat_pow(N, len(A))))
        if not ok:
            return "random_levelt", False, f"failed on {blocks}"
    return "random_levelt", True, f"{count} forms, seed {seed}"


SUITE: List[Callable[[], Result]] = [golden_2x2, example_a, example_b, example_c, counterexample]


def run_selftest(seed: int = 0) -> List[Result]:
    cases = [(c.__name__, c) for c in SUITE] + [("random_levelt", lambda: random_levelt(seed))]
    out = []
    for name, case in cases:
        try:
            out.append(case())
        except PdiskError as e:
            out.append((name, False, f"{type(e).__name__}: {e}"))
    return out
