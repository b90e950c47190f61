import random
from fractions import Fraction

import pytest

from pdisk.cyclo import CycNum
from pdisk.series import Series, SeriesParams
from pdisk.tlj import TLJBlock, TLJForm, same_class

ACCEPTANCE = {}


def record(criterion: int, ok: bool, detail: str):
    ACCEPTANCE[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")


class Gen:
    """Deterministic random objects for property suites."""

    def __init__(self, seed: int):
        self.rng = random.Random(seed)

    def frac(self, lo=-3, hi=3, dens=(1, 2)):
        return Fraction(self.rng.randint(lo, hi), self.rng.choice(dens))

    def num(self, params, lo=-3, hi=3):
        m = params.m
        if m == 1:
            return CycNum(1, (self.frac(lo, hi),))
        from pdisk.cyclo import euler_phi
        return CycNum(m, tuple(self.frac(lo, hi) for _ in range(euler_phi(m))))

    def series(self, params, kmin=-3, kmax=3, density=0.5, prec=None):
        terms = {}
        for k in range(kmin, kmax + 1):
            for j in range(params.L + 1):
                if self.rng.random() < density:
                    terms[(k, j)] = self.num(params)
        return Series(params, terms, prec)

    def polar(self, params, order=3):
        """Character with zero constant term and x-order at least -order."""
        terms = {}
        for k in range(1, self.rng.randint(1, order) + 1):
            for j in range(min(params.L, 2) + 1):
                if self.rng.random() < 0.6:
                    terms[(-k * params.s, j)] = self.num(params)
        return Series(params, terms)

    def unit_matrix(self, params, n, kmax=2):
        """Invertible matrix over R_L[[x]]: unit lower-triangular times a permutation."""
        M = [[Series.zero(params) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i == j:
                    M[i][j] = Series.one(params) + self.series(params, 1, kmax, 0.4)
                elif i > j:
                    M[i][j] = self.series(params, 0, kmax, 0.4)
        perm = list(range(n))
        self.rng.shuffle(perm)
        return [M[p] for p in perm]

    def pattern(self, r):
        return tuple(self.rng.randint(0, 1) for _ in range(r - 1))

    def form(self, params, max_rank=3, polar_order=3, with_constant=False):
        sizes = []
        while sum(sizes) < max_rank and (not sizes or self.rng.random() < 0.6):
            sizes.append(self.rng.randint(1, max_rank - sum(sizes)))
        blocks = []
        for r in sizes:
            for _ in range(20):
                f = self.polar(params, polar_order)
                if with_constant:
                    f = f + Series.const(params, self.frac(-2, 2, (1, 2, 3)))
                if all(not same_class(f, b.f) for b in blocks):
                    break
            else:
                continue
            blocks.append(TLJBlock(f, r, self.pattern(r)))
        return TLJForm(params, tuple(blocks))


@pytest.fixture
def gen():
    return Gen(20221308)


@pytest.fixture
def p0():
    return SeriesParams(m=1, s=1, L=0, prec=16)
