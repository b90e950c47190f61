"""Deterministic text reports: human sections plus key=value lines."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

from .linalg import Matrix
from .series import Series, _fmt_exp, render_series


def prec_certificate(f: Series) -> str:
    if f.prec is None:
        return "exact"
    return f"O({_fmt_exp(f.prec, f.params.s)})"


@dataclass
class Report:
    command: str
    input_sha256: str = ""
    echo: str = ""
    sections: List[Tuple[str, List[str]]] = field(default_factory=list)
    verdicts: List[Tuple[str, bool, str]] = field(default_factory=list)
    gauges: List[Tuple[str, Matrix]] = field(default_factory=list)
    structured: List[Tuple[str, str]] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    bad_input: bool = False

    @property
    def ok(self) -> bool:
        return not self.errors and all(v for _, v, _ in self.verdicts)

    def section(self, title: str, lines: List[str]):
        self.sections.append((title, list(lines)))

    def verdict(self, name: str, passed: bool, detail: str = ""):
        self.verdicts.append((name, bool(passed), detail))

    def kv(self, key: str, value):
        self.structured.append((key, str(value)))

    def series(self, key: str, f: Series):
        self.kv(key, render_series(f))
        self.kv(key + ".prec", prec_certificate(f))

    def matrix(self, key: str, M: Matrix):
        for i, row in enumerate(M):
            for j, a in enumerate(row):
                self.series(f"{key}[{i + 1},{j + 1}]", a)


def matrix_lines(M: Matrix, tag: str = "row") -> List[str]:
    return [f"{tag}: " + ", ".join(render_series(a) for a in r) for r in M]


def render(report: Report) -> str:
    out = ["# pdisk report", f"command: {report.command}"]
    if report.input_sha256:
        out.append(f"input_sha256: {report.input_sha256}")
    if report.echo:
        out += ["", "== job =="] + report.echo.rstrip("\n").splitlines()
    for title, lines in report.sections:
        out += ["", f"== {title} =="] + lines
    if report.errors:
        out += ["", "== errors =="] + report.errors
    if report.verdicts:
        out += ["", "== verdicts =="]
        out += [f"{name}: {'pass' if ok else 'fail'}" + (f" ({d})" if d else "")
                for name, ok, d in report.verdicts]
    if report.gauges:
        out += ["", "== gauge_log =="]
        for label, Q in report.gauges:
            out.append(f"gauge {label}:")
            out += ["  " + line for line in matrix_lines(Q)]
    out += ["", "== structured =="]
    out += [f"{k}={v}" for k, v in report.structured]
    out.append(f"status={'ok' if report.ok else 'fail'}")
    return "\n".join(out) + "\n"
