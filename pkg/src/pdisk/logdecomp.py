"""Logarithmic decomposition nabla = nabla_rs + P of a TLJ form.

``P`` is the diagonal matrix of principal parts, ``nabla_rs`` keeps the
constant parts of the characters together with the Jordan patterns.  The
module also verifies arbitrary candidate decompositions, extracts the
Deligne-Manin lattice and checks Galois descent for ramified forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .conn import Connection, gauge
from .cyclo import CycNum
from .errors import IncompatibleCyclotomy, NeedsShearing, NotInvertible, UndecidableAtPrecision
from .factor import roots_with_multiplicity
from .linalg import (Matrix, berkowitz, commutator, diag, identity, is_zero_matrix, mat_inverse,
                     mat_mul, mat_pow, mat_sub, mat_add, poly_eval_matrix, reduce_mod_t, scalar_matrix,
                     zeros)
from .series import Series, SeriesParams, galois_sigma, principal_part, reduce_t
from .tlj import (TLJBlock, TLJForm, assemble_matrix, hermite_polynomial, is_normalized,
                  normalize_form, same_class)


@dataclass(frozen=True)
class LogDecomposition:
    rs: TLJForm
    P: Matrix = field(compare=False)
    classes: Tuple[Tuple[int, ...], ...] = ()
    gauge_log: Tuple = field(default=(), compare=False)

    def rs_matrix(self) -> Matrix:
        return assemble_matrix(self.rs.blocks, self.rs.params)


@dataclass(frozen=True)
class Lattice:
    basis: Tuple[str, ...]
    residue_matrix: Matrix = field(compare=False)
    exponents: Tuple[CycNum, ...] = ()
    components: Tuple[Tuple[int, ...], ...] = ()


def _class_key(c: CycNum):
    """Representative of c + Z: rational coordinate reduced into [0, 1)."""
    return (c - c.floor()).sort_key()


def log_decompose(form: TLJForm) -> LogDecomposition:
    if not all(is_normalized(b) for b in form.blocks):
        form = normalize_form(form)
    params = form.params
    rs_blocks = []
    P_entries = []
    for b in form.blocks:
        p = principal_part(b.f)
        rs_blocks.append(TLJBlock(b.f - p, b.r, b.pattern))
        P_entries.extend([p] * b.r)
    groups: Dict[tuple, List[int]] = {}
    for i, b in enumerate(rs_blocks):
        groups.setdefault(_class_key(b.f.coeff(0, 0)) + _t_key(b.f), []).append(i)
    classes = tuple(tuple(v) for v in groups.values())
    rs = TLJForm(params, tuple(rs_blocks), ())
    return LogDecomposition(rs, diag(P_entries), classes, form.gauge_log)


def _t_key(f: Series):
    return tuple((j, c.sort_key()) for (k, j), c in f.terms() if j > 0)


def reconstruct(dec: LogDecomposition) -> Matrix:
    return mat_add(dec.rs_matrix(), dec.P)


# -- verification -------------------------------------------------------------

PASS, FAIL, UNDECIDED = "pass", "fail", "undecided"


@dataclass
class Verdict:
    conditions: Dict[str, str]
    details: Dict[str, str]

    @property
    def ok(self) -> bool:
        return all(v == PASS for v in self.conditions.values())

    def lines(self) -> List[str]:
        out = [f"({k}) {v}: {self.details.get(k, '')}".rstrip(": ") for k, v in self.conditions.items()]
        out.append(f"overall {'pass' if self.ok else 'fail'}")
        return out


def shearing_exponents(A: Matrix) -> Optional[List[int]]:
    """Integers k with diag(x_s^k) shearing A into a logarithmic matrix, if any.

    The conditions k_i - k_j <= val(A_ij) form a difference-constraint system,
    solved by Bellman-Ford; a negative cycle means no diagonal shearing works.
    """
    n = len(A)
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j and not A[i][j].is_zero():
                # k_i <= k_j + val(A_ij)
                edges.append((j, i, A[i][j].valuation()))
    for i in range(n):
        v = A[i][i].valuation()
        if v is not None and v < 0:
            return None
    dist = [0] * n
    for _ in range(n):
        changed = False
        for u, w, c in edges:
            if dist[u] + c < dist[w]:
                dist[w] = dist[u] + c
                changed = True
        if not changed:
            return dist
    return None


def shear(A: Matrix, ks: Sequence[int]) -> Tuple[Matrix, Matrix]:
    params = A[0][0].params
    S = diag([Series.x(params, k) for k in ks])
    return S, gauge(Connection(A, params), S).mat


def _irregular_certificate(A: Matrix) -> Optional[str]:
    """Reason why A mod t cannot be regular singular, or None."""
    Abar = [[reduce_t(a, 0) for a in r] for r in A]
    n = len(A)
    tr = Abar[0][0]
    for i in range(1, n):
        tr = tr + Abar[i][i]
    if not principal_part(tr).is_zero():
        return f"trace has principal part {principal_part(tr)} modulo t"
    lower = all(Abar[i][j].is_zero() for i in range(n) for j in range(i + 1, n))
    upper = all(Abar[i][j].is_zero() for i in range(n) for j in range(i))
    if lower or upper:
        for i in range(n):
            p = principal_part(Abar[i][i])
            if not p.is_zero():
                return f"triangular modulo t with irregular diagonal entry {p}"
    return None


def _log_gauge(A: Matrix):
    """Gauge Q and constant matrix A0 with gauge(A, Q) = A0, or a failure reason."""
    from .split import reduce_to_constant
    ks = shearing_exponents(A)
    if ks is None:
        return None, None, "no diagonal shearing makes the matrix logarithmic"
    S, B = shear(A, ks)
    params = A[0][0].params
    try:
        Q2, A0 = reduce_to_constant(B, params.prec)
    except NeedsShearing as e:
        return S, None, str(e)
    return mat_mul(S, Q2), A0, None


def _is_pure_polar(e: Series) -> bool:
    return all(k < 0 for k in e.exponents())


def verify_decomposition(conn: Connection, cand_rs: Connection, cand_P: Matrix,
                         eigen: Optional[Tuple[Matrix, Sequence[Series]]] = None) -> Verdict:
    """Check conditions (i) regular singular, (ii) semisimple polar P, (iii) compatibility.

    ``eigen`` optionally supplies (V, D) with P V = V diag(D).
    """
    params = conn.params
    n = conn.rank
    total = mat_add(cand_rs.mat, cand_P)
    if not all(a.agrees(b) for ra, rb in zip(total, conn.mat) for a, b in zip(ra, rb)):
        raise ValueError("candidate parts do not add up to the connection matrix")
    cond, det = {}, {}

    # (i)
    Q, A0, why = _log_gauge(cand_rs.mat)
    if A0 is not None:
        ks = shearing_exponents(cand_rs.mat)
        how = "logarithmic as given" if not any(ks) else f"logarithmic after shearing diag(x^k), k = {ks}"
        cond["i"], det["i"] = PASS, how
    else:
        cert = _irregular_certificate(cand_rs.mat)
        if cert is not None:
            cond["i"], det["i"] = FAIL, cert
        else:
            raise UndecidableAtPrecision(f"condition (i) undecided: {why}")

    # (ii)
    P = cand_P
    is_diag = all(P[i][j].is_zero() for i in range(n) for j in range(n) if i != j)
    if is_diag:
        V, D = identity(params, n), [P[i][i] for i in range(n)]
    elif eigen is not None:
        V, D = eigen
    else:
        V = None
    if V is None:
        cond["ii"], det["ii"] = UNDECIDED, "no eigendata supplied for a non-diagonal P"
    else:
        ok_eq = all(a.agrees(b) for ra, rb in zip(mat_mul(P, V), mat_mul(V, diag(list(D))))
                    for a, b in zip(ra, rb))
        try:
            mat_inverse(V)
            inv_ok = True
        except NotInvertible:
            inv_ok = False
        polar = all(_is_pure_polar(d) for d in D)
        if ok_eq and inv_ok and polar:
            cond["ii"], det["ii"] = PASS, "eigenvalues " + ", ".join(str(d) for d in D)
        else:
            why = [w for w, ok in (("P V != V D", ok_eq), ("V singular", inv_ok),
                                   ("eigenvalue with a non-polar term", polar)) if not ok]
            cond["ii"], det["ii"] = FAIL, "; ".join(why)

    # (iii)
    if A0 is None:
        cond["iii"], det["iii"] = FAIL, "no regular-singular model to split"
    else:
        cond["iii"], det["iii"] = _check_compatibility(A0, Q, P)
    return Verdict(cond, det)


def _check_compatibility(A0: Matrix, Q: Matrix, P: Matrix):
    """P must preserve the isotypical parts of A0 and commute with its nilpotent part."""
    params = A0[0][0].params
    n = len(A0)
    Pq = mat_mul(mat_inverse(Q), mat_mul(P, Q))
    cp = [c.coeff(0, 0) for c in berkowitz([[Series.const(params, c) for c in r]
                                             for r in reduce_mod_t(A0)])]
    roots = roots_with_multiplicity(cp, params.m)
    classes: Dict[tuple, List[Tuple[CycNum, int]]] = {}
    for rho, mult in roots:
        classes.setdefault(_class_key(rho), []).append((rho, mult))
    Kp = SeriesParams(params.m, params.s, 0, params.prec)
    N0 = zeros(params, n)
    projectors = []
    for key, members in classes.items():
        nodes = []
        for k2, mem2 in classes.items():
            for rho, mult in mem2:
                val = [Series.one(Kp) if k2 == key else Series.zero(Kp)] + [Series.zero(Kp)] * (mult - 1)
                nodes.append((Series.const(Kp, rho), mult, val))
        pbar = hermite_polynomial(nodes, Kp)
        p = [Series.const(params, c.coeff(0, 0)) for c in pbar]
        from .split import _lift_idempotent
        pi = _lift_idempotent(poly_eval_matrix(p, A0))
        q = sum(m for _, m in members)
        Api = mat_mul(A0, pi)
        tr = Api[0][0]
        for i in range(1, n):
            tr = tr + Api[i][i]
        c = tr / q
        N0 = mat_add(N0, mat_sub(Api, mat_mul(scalar_matrix(params, c, n), pi)))
        projectors.append(pi)
    if not is_zero_matrix(mat_pow(N0, n)):
        return FAIL, "an isotypical part of nabla_rs is not c + nilpotent"
    for pi in projectors:
        if not is_zero_matrix(commutator(Pq, pi)):
            return FAIL, "P does not preserve an isotypical component"
    if not is_zero_matrix(commutator(Pq, N0)):
        return FAIL, "P does not commute with the nilpotent part of nabla_rs (no common Jordan basis)"
    return PASS, f"{len(projectors)} isotypical component(s) preserved"


# -- lattice and descent ------------------------------------------------------

def deligne_manin_lattice(dec: LogDecomposition) -> Lattice:
    basis = []
    exps = []
    for bi, b in enumerate(dec.rs.blocks):
        for i in range(b.r):
            basis.append(f"e[{bi},{i}]")
        exps.extend([b.f.coeff(0, 0)] * b.r)
    exps.sort(key=lambda c: c.sort_key())
    return Lattice(tuple(basis), dec.rs_matrix(), tuple(exps), dec.classes)


def in_tau(c: CycNum) -> bool:
    return 0 <= c.rational_part < 1


@dataclass
class DescentVerdict:
    violations: List[str]
    descended: List[Matrix]

    @property
    def ok(self) -> bool:
        return not self.violations


def descent_check(form: TLJForm, dec: Optional[LogDecomposition] = None) -> DescentVerdict:
    """Galois stability of the characters and descent of P to C((x)) (x = x_s^s)."""
    params = form.params
    s = params.s
    if s == 1:
        return DescentVerdict([], [])
    if params.m % s:
        raise IncompatibleCyclotomy(f"zeta_{s} is not in Q(zeta_{params.m})")
    blocks = form.blocks
    violations = []
    seen = set()
    descended = []
    for i, b in enumerate(blocks):
        if i in seen:
            continue
        orbit = [i]
        broken = False
        for k in range(1, s):
            g = galois_sigma(b.f, k)
            if same_class(g, b.f):
                break
            match = [j for j, c in enumerate(blocks)
                     if same_class(c.f, g) and c.r == b.r and c.pattern == b.pattern]
            if not match:
                violations.append(f"sigma^{k} of block {i} (character {g}) has no matching block")
                broken = True
                break
            orbit.append(match[0])
        seen.update(orbit)
        if broken:
            continue
        if len(orbit) > 1 and s % len(orbit) == 0:
            M = _descended_P(principal_part(b.f), len(orbit), s)
            descended.append(M)
            bad = [(r, c) for r, row in enumerate(M) for c, a in enumerate(row)
                   if any(k % s for k in a.exponents())]
            if bad:
                violations.append(f"descended P for the orbit of block {i} is not defined over C((x))")
        elif len(orbit) == 1 and any(k % s for k in principal_part(b.f).exponents()):
            violations.append(f"block {i} is ramified but fixed by sigma")
    return DescentVerdict(violations, descended)


def _descended_P(p: Series, d: int, s: int) -> Matrix:
    """Matrix of P on the invariant basis w_j = sum_k sigma^k(y^j e), y = x_s^(s/d)."""
    params = p.params
    W = [[galois_sigma(Series.x(params, j * (s // d)), k) for j in range(d)] for k in range(d)]
    D = diag([galois_sigma(p, k) for k in range(d)])
    return mat_mul(mat_inverse(W), mat_mul(D, W))
