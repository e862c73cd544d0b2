"""``overc`` command-line entry point.

Exit codes: 0 success, 1 compile diagnostics or golden mismatch, 2 runtime
error, 3 usage or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import golden
from .driver import compile_source
from .errors import CheckError, OvercError
from .interp import run_program

EXIT_OK = 0
EXIT_COMPILE = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _compile(path: str, err):
    """Compile ``path``; on failure print ERROR lines and return None."""
    source = _read(path)
    try:
        return compile_source(source, path)
    except CheckError as exc:
        for d in exc.diagnostics:
            print(d.render(), file=err)
    except OvercError as exc:
        print(exc.diagnostic().render(), file=err)
    return None


def cmd_check(path: str, out=None, err=None) -> int:
    err = err or sys.stderr
    return EXIT_OK if _compile(path, err) is not None else EXIT_COMPILE


def cmd_run(path: str, input_path: str | None = None, trace: bool = False, out=None, err=None, stdin=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    tp = _compile(path, err)
    if tp is None:
        return EXIT_COMPILE
    if trace:
        for line in tp.trace_lines():
            print(line, file=err)
        err.flush()
    feed = _read(input_path) if input_path is not None else (stdin or sys.stdin)
    result = run_program(tp, feed, echo=out.write)
    out.flush()
    if result.error is not None:
        print(result.error.render(), file=err)
        return EXIT_RUNTIME
    return max(0, min(125, result.status))


def cmd_trace(path: str, out=None, err=None) -> int:
    err = err or sys.stderr
    tp = _compile(path, err)
    if tp is None:
        return EXIT_COMPILE
    for line in tp.trace_lines():
        print(line, file=err)
    return EXIT_OK


def _color(text: str, code: str, stream) -> str:
    if os.environ.get("NO_COLOR") is not None or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def cmd_golden(corpus: str, out=None, err=None) -> int:
    out = out or sys.stdout
    root = Path(corpus)
    if not root.is_dir():
        raise UsageError(f"{corpus} is not a directory")
    results = golden.run_corpus(root)
    if not results:
        print("0 cases", file=out)
        return EXIT_OK
    failed = 0
    for r in results:
        if r.passed:
            print(f"{_color('PASS', '32', out)} {r.case.name}", file=out)
        else:
            failed += 1
            print(f"{_color('FAIL', '31', out)} {r.case.name}", file=out)
            for diff in r.diffs:
                out.write(diff if diff.endswith("\n") else diff + "\n")
    print(f"{len(results)} cases, {len(results) - failed} passed, {failed} failed", file=out)
    return EXIT_OK if failed == 0 else EXIT_COMPILE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="overc", description="MiniOver checker and interpreter")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("check", help="report diagnostics")
    p.add_argument("file")
    p = sub.add_parser("run", help="check and run a program")
    p.add_argument("file")
    p.add_argument("--input", metavar="FILE", help="read program input from FILE instead of stdin")
    p.add_argument("--trace-resolution", action="store_true", help="print RESOLVE lines to stderr first")
    p = sub.add_parser("trace", help="print one RESOLVE line per call site")
    p.add_argument("file")
    p = sub.add_parser("golden", help="run a golden corpus")
    p.add_argument("dir")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return cmd_check(args.file)
        if args.command == "run":
            return cmd_run(args.file, args.input, args.trace_resolution)
        if args.command == "trace":
            return cmd_trace(args.file)
        return cmd_golden(args.dir)
    except UsageError as exc:
        print(f"overc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
