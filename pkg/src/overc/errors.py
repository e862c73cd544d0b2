from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __post_init__(self):
        if self.line < 1 or self.column < 1:
            raise ValueError(f"invalid span {self.line}:{self.column}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"

    @property
    def key(self) -> tuple[int, int]:
        return (self.line, self.column)


NO_SPAN = SourceSpan("<none>", 1, 1)

# diagnostic codes
DUPLICATE_SIGNATURE = "E001"
NO_VIABLE_CANDIDATE = "E002"
AMBIGUOUS_CALL = "E003"
UNKNOWN_NAME = "E004"
TYPE_MISMATCH = "E005"
ACCESS_VIOLATION = "E006"
PARSE_ERROR = "E007"


@dataclass(frozen=True)
class Diagnostic:
    code: str
    span: SourceSpan
    message: str

    def render(self) -> str:
        return f"ERROR {self.span} {self.code} {self.message}"


class OvercError(Exception):
    """Base class for errors carrying a source location."""

    code = PARSE_ERROR

    def __init__(self, message: str, span: SourceSpan):
        super().__init__(message)
        self.message = message
        self.span = span

    def diagnostic(self) -> Diagnostic:
        return Diagnostic(self.code, self.span, self.message)


class LexError(OvercError):
    pass


class SemanticError(OvercError):
    """A declaration or resolution error reported with one of E001-E006."""

    def __init__(self, code: str, message: str, span: SourceSpan):
        super().__init__(message, span)
        self.code = code


class ParseError(OvercError):
    pass


class CheckError(Exception):
    """Raised by ``check_program`` with every diagnostic found, in source order."""

    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("\n".join(d.render() for d in diagnostics))
        self.diagnostics = diagnostics


class EvalError(Exception):
    """A runtime error raised while evaluating a checked program."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def render(self) -> str:
        where = f" {self.span}" if self.span is not None else ""
        return f"RUNTIME{where} {self.message}"
