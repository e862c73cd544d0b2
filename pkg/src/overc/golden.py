"""Golden-corpus harness.

A case is ``<name>.mini`` plus optional ``<name>.in`` (stdin feed), and
exactly one primary expectation: ``<name>.out`` (program output) or
``<name>.err`` (ERROR lines from checking). ``<name>.trace`` optionally
pins the RESOLVE lines.
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .driver import compile_source
from .errors import CheckError, OvercError
from .interp import run_program


@dataclass
class GoldenCase:
    name: str
    program: Path
    input: Optional[Path] = None
    expected_out: Optional[Path] = None
    expected_trace: Optional[Path] = None
    expected_err: Optional[Path] = None

    @classmethod
    def from_program(cls, program: Path) -> GoldenCase:
        def sibling(ext):
            p = program.with_suffix(ext)
            return p if p.exists() else None

        return cls(
            program.stem, program, sibling(".in"), sibling(".out"),
            sibling(".trace"), sibling(".err"),
        )


@dataclass
class CaseResult:
    case: GoldenCase
    passed: bool
    diffs: list[str]


def discover(corpus: Path) -> list[GoldenCase]:
    return [GoldenCase.from_program(p) for p in sorted(corpus.glob("*.mini"))]


def produce(case: GoldenCase) -> dict[str, str]:
    """Actual artifacts for a case, keyed by expectation suffix."""
    source = case.program.read_text(encoding="utf-8")
    feed = case.input.read_text(encoding="utf-8") if case.input else ""
    try:
        tp = compile_source(source, case.program.name)
    except CheckError as exc:
        return {".err": "".join(d.render() + "\n" for d in exc.diagnostics)}
    except OvercError as exc:
        return {".err": exc.diagnostic().render() + "\n"}
    result = run_program(tp, feed)
    out = result.output
    if result.error is not None:
        out += f"<exit 2: {result.error.message}>\n"
    return {
        ".out": out,
        ".trace": "".join(line + "\n" for line in tp.trace_lines()),
        ".err": "",
    }


def run_case(case: GoldenCase) -> CaseResult:
    if (case.expected_out is None) == (case.expected_err is None):
        return CaseResult(case, False, ["case needs exactly one of .out and .err\n"])
    actual = produce(case)
    diffs = []
    expectations = {
        ".out": case.expected_out,
        ".err": case.expected_err,
        ".trace": case.expected_trace,
    }
    for suffix, path in expectations.items():
        if path is None:
            continue
        expected = path.read_text(encoding="utf-8")
        got = actual.get(suffix, "")
        if got != expected:
            diffs.append(
                "".join(
                    difflib.unified_diff(
                        expected.splitlines(keepends=True),
                        got.splitlines(keepends=True),
                        fromfile=str(path),
                        tofile=f"{case.name}{suffix} (actual)",
                    )
                )
            )
    return CaseResult(case, not diffs, diffs)


def run_corpus(corpus: Path) -> list[CaseResult]:
    return [run_case(c) for c in discover(corpus)]


def freeze(case: GoldenCase):
    """Write the current artifacts as the case's expectations."""
    actual = produce(case)
    if ".out" in actual:
        case.program.with_suffix(".out").write_text(actual[".out"], encoding="utf-8")
        case.program.with_suffix(".trace").write_text(actual[".trace"], encoding="utf-8")
    else:
        case.program.with_suffix(".err").write_text(actual[".err"], encoding="utf-8")
