from __future__ import annotations

from .checker import TypedProgram, check_program
from .parser import parse_source


def compile_source(source: str, file: str = "<input>") -> TypedProgram:
    """Lex, parse and check ``source``.

    Raises ``LexError``/``ParseError`` for malformed text and ``CheckError``
    for semantic diagnostics.
    """
    return check_program(parse_source(source, file))
