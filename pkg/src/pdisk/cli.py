"""Command-line front end: ``pdisk <command> <specfile> [options]``."""

from __future__ import annotations

import argparse
import os
import sys
from typing import List, Optional

from .conn import Connection, LogWitness, exponents, gauge, reduce_conn, residue
from .deform import index_invariance_check, limit_compare
from .errors import ParamError, ParseError, PdiskError
from .generic import split_generic
from .linalg import commutator, is_zero_matrix, mat_agrees
from .logdecomp import deligne_manin_lattice, in_tau, log_decompose, verify_decomposition
from .parse import SpecFile, echo_spec, parse_spec
from .report import Report, matrix_lines, render
from .series import render_series
from .split import split
from .tlj import TLJBlock, TLJForm, assemble

COMMANDS = ("split", "decompose", "residue", "exponents", "lattice", "reduce", "limit",
            "verify", "selftest")
GAUGE_ELIDE = 8


def spec_connection(spec: SpecFile) -> Connection:
    if spec.kind == "matrix":
        return Connection(spec.rows, spec.params, "e")
    return assemble(spec_form(spec))


def spec_form(spec: SpecFile, report: Optional[Report] = None) -> TLJForm:
    if spec.kind == "tlj":
        return TLJForm(spec.params, tuple(TLJBlock(f, r, p) for f, r, p in spec.blocks))
    if not spec.seeds:
        raise ParamError("a matrix spec needs 'seed:' lines to be split")
    form = split(Connection(spec.rows, spec.params), spec.seeds)
    if report is not None:
        report.gauges.extend(form.gauge_log)
    return form


def _form_section(report: Report, form: TLJForm, key: str = "block"):
    lines = []
    for i, b in enumerate(form.blocks):
        pat = " ".join(map(str, b.pattern))
        lines.append(f"block {i + 1}: f = {render_series(b.f)} ; r = {b.r} ; pattern = {pat or '-'}")
        report.series(f"{key}.{i + 1}.f", b.f)
        report.kv(f"{key}.{i + 1}.r", b.r)
        report.kv(f"{key}.{i + 1}.pattern", pat or "-")
    report.section("tlj form", lines)


# -- commands -----------------------------------------------------------------

def cmd_split(spec: SpecFile, report: Report, level: Optional[int]):
    conn = Connection(spec.rows, spec.params) if spec.kind == "matrix" else spec_connection(spec)
    if spec.option("t_unit"):
        g = split_generic(conn)
        report.section("generic fiber form (t inverted)",
                       [f"block {i + 1}: f = {b}" for i, b in enumerate(g.render_blocks())])
        for i, (c, r) in enumerate(g.blocks):
            report.kv(f"generic.block.{i + 1}", f"{c} ; {r}")
        report.verdict("generic_jordan", True, "P^-1 A P checked symbolically")
        return
    form = spec_form(spec, report)
    _form_section(report, form)
    Q = form.total_gauge()
    if Q is None:
        return
    replay = gauge(conn, Q)
    ok = mat_agrees(replay.mat, assemble(form).mat)
    report.verdict("replay", ok, "gauge(input, Q) agrees with the form on the window")


def cmd_decompose(spec: SpecFile, report: Report, level: Optional[int]):
    form = spec_form(spec, report)
    dec = log_decompose(form)
    rs = dec.rs_matrix()
    report.section("nabla_rs", matrix_lines(rs))
    report.section("P", matrix_lines(dec.P))
    report.section("isotypical classes", [" ".join(str(i + 1) for i in c) for c in dec.classes])
    report.matrix("rs", rs)
    report.matrix("P", dec.P)
    conn = assemble(TLJForm(form.params, tuple(
        TLJBlock(r.f + p, r.r, r.pattern) for r, p in zip(dec.rs.blocks, _block_polar(dec)))))
    lat = deligne_manin_lattice(dec)
    report.section("lattice exponents", [str(c) for c in lat.exponents])
    for i, c in enumerate(lat.exponents):
        report.kv(f"exponent.{i + 1}", c)
    v = verify_decomposition(conn, Connection(rs, form.params), dec.P)
    for k in ("i", "ii", "iii"):
        report.verdict(f"condition_{k}", v.conditions[k] == "pass", v.details.get(k, ""))


def _block_polar(dec):
    out, off = [], 0
    for b in dec.rs.blocks:
        out.append(dec.P[off][off])
        off += b.r
    return out


def cmd_residue(spec: SpecFile, report: Report, level: Optional[int]):
    w = LogWitness(spec_connection(spec))
    R = residue(w)
    report.section("residue", matrix_lines(R))
    report.matrix("residue", R)


def cmd_exponents(spec: SpecFile, report: Report, level: Optional[int]):
    ex = exponents(LogWitness(spec_connection(spec)))
    report.section("exponents", [str(c) for c in ex])
    for i, c in enumerate(ex):
        report.kv(f"exponent.{i + 1}", c)


def cmd_lattice(spec: SpecFile, report: Report, level: Optional[int]):
    lat = deligne_manin_lattice(log_decompose(spec_form(spec, report)))
    report.section("lattice basis", [" ".join(lat.basis)])
    report.section("residue", matrix_lines(lat.residue_matrix))
    report.section("exponents", [str(c) for c in lat.exponents])
    report.matrix("residue", lat.residue_matrix)
    for i, c in enumerate(lat.exponents):
        report.kv(f"exponent.{i + 1}", c)
    report.verdict("exponents_in_tau", all(in_tau(c) for c in lat.exponents))


def cmd_reduce(spec: SpecFile, report: Report, level: Optional[int]):
    conn = spec_connection(spec)
    lv = spec.params.L if level is None else level
    red = reduce_conn(conn, lv)
    report.section(f"level {lv} matrix (basis t^i e_k, i = 0..{lv})", matrix_lines(red.conn.mat))
    report.section("t-action", matrix_lines(red.shift))
    report.matrix("level", red.conn.mat)
    report.verdict("lambda_equivariant", is_zero_matrix(commutator(red.shift, red.conn.mat)))


def cmd_limit(spec: SpecFile, report: Report, level: Optional[int]):
    conn = spec_connection(spec)
    form = spec_form(spec, report)
    L = spec.params.L if level is None else level
    rep = limit_compare(form, L, conn if spec.kind == "matrix" and not report.gauges else None)
    lines = []
    for lev, o, fl in zip(rep.levels, rep.ord_trace, rep.floor_trace):
        lines.append(f"level {lev.level}: rs normal form {'zero' if lev.rs_normal_zero else 'nonzero'}, "
                     f"P {'zero' if lev.P_zero else 'nonzero'}, trivializing gauge ord_x = {o}, "
                     f"b' floor = {'-' if fl is None else fl}")
        report.kv(f"level.{lev.level}.rs_zero", str(lev.rs_normal_zero).lower())
        report.kv(f"level.{lev.level}.ord_x", o)
    report.section("levels", lines)
    if rep.P_nonzero:
        glines = []
        for lev in rep.levels:
            for lb in lev.blocks:
                G = lb.chain.composite
                if len(G) > GAUGE_ELIDE:
                    glines.append(f"level {lev.level} block {lb.block_index + 1}: {len(G)}x{len(G)} (elided)")
                    continue
                glines.append(f"level {lev.level} block {lb.block_index + 1}:")
                glines += ["  " + line for line in matrix_lines(G)]
        report.section("trivializing gauges", glines)
    report.section("limit", [
        f"limit of the rs parts is {'trivial' if rep.limit_trivial else 'nontrivial'}",
        "P_nabla = " + "; ".join(render_series(rep.decomposition.P[i][i])
                                 for i in range(len(rep.decomposition.P))),
        f"doesn't exist flag: {'set' if rep.doesnt_exist else 'clear'} "
        "(the connection is the limit of its levels iff P_nabla = 0)",
        f"divergence flag: {'set' if rep.divergent else 'clear'}",
    ])
    report.kv("limit.trivial", str(rep.limit_trivial).lower())
    report.kv("flag.doesnt_exist", str(rep.doesnt_exist).lower())
    report.kv("flag.divergent", str(rep.divergent).lower())
    report.kv("ord_x.trace", " ".join(map(str, rep.ord_trace)))
    for i in range(len(rep.decomposition.P)):
        report.series(f"P[{i + 1},{i + 1}]", rep.decomposition.P[i][i])
    report.verdict("gauge_chains", rep.chains_ok, "A + (B - b0 I) mapped to A at every level")
    report.verdict("levels_glue", rep.glue_ok)
    report.verdict("limit_equals_rs", rep.limit_matches_rs)
    report.verdict("family_coherent", rep.family_coherent)
    iv = index_invariance_check(form)
    report.kv("turrittin_index", f"{iv.index} reduced {iv.reduced_index} status {iv.status}")


def cmd_verify(spec: SpecFile, report: Report, level: Optional[int]):
    if spec.kind != "matrix" or not spec.rs_rows or not spec.P_rows:
        raise ParamError("verify needs row, rs_row and P_row lines")
    conn = Connection(spec.rows, spec.params)
    v = verify_decomposition(conn, Connection(spec.rs_rows, spec.params), spec.P_rows)
    report.section("conditions", v.lines())
    for k in ("i", "ii", "iii"):
        report.verdict(f"condition_{k}", v.conditions[k] == "pass", v.details.get(k, ""))


def cmd_selftest(spec: Optional[SpecFile], report: Report, level: Optional[int]):
    from .selftest import run_selftest
    seed = int(os.environ.get("PDISK_SEED", "0"))
    report.kv("seed", seed)
    for name, ok, detail in run_selftest(seed):
        report.verdict(name, ok, detail)


HANDLERS = {
    "split": cmd_split, "decompose": cmd_decompose, "residue": cmd_residue,
    "exponents": cmd_exponents, "lattice": cmd_lattice, "reduce": cmd_reduce,
    "limit": cmd_limit, "verify": cmd_verify, "selftest": cmd_selftest,
}


def run(command: str, spec: Optional[SpecFile], level: Optional[int] = None) -> Report:
    report = Report(command)
    if spec is not None:
        report.input_sha256 = spec.sha256
        report.echo = echo_spec(spec)
    try:
        HANDLERS[command](spec, report, level)
    except PdiskError as e:
        report.errors.append(f"{type(e).__name__}: {e}")
        report.bad_input = isinstance(e, ParamError)
    for label, Q in report.gauges:
        report.matrix(f"gauge.{label}", Q)
    return report


def main(argv: Optional[List[str]] = None) -> int:
    ap = argparse.ArgumentParser(prog="pdisk", description="Formal connections over truncated series.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("specfile", nargs="?")
    ap.add_argument("--prec", type=int)
    ap.add_argument("--level", type=int)
    ap.add_argument("--report")
    args = ap.parse_intermixed_args(argv)
    spec = None
    if args.command != "selftest" or args.specfile:
        if not args.specfile:
            ap.error("a spec file is required")
        try:
            with open(args.specfile, encoding="utf-8") as fh:
                spec = parse_spec(fh.read(), args.prec)
        except (ParseError, ParamError) as e:
            print(f"pdisk: {args.specfile}: {type(e).__name__}: {e}", file=sys.stderr)
            return 2
        except OSError as e:
            print(f"pdisk: {e}", file=sys.stderr)
            return 2
    report = run(args.command, spec, args.level)
    text = render(report)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report.bad_input:
        return 2
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
