"""MiniOver: a small class-based language with static overload resolution."""

from .checker import TypedProgram, check_program
from .driver import compile_source
from .interp import run_program
from .lexer import tokenize
from .parser import parse, parse_source
from .resolver import better_than, resolve_call
from .types import deduce_template, rank_conversion, signatures_collide

__all__ = [
    "TypedProgram",
    "better_than",
    "check_program",
    "compile_source",
    "deduce_template",
    "parse",
    "parse_source",
    "rank_conversion",
    "resolve_call",
    "run_program",
    "signatures_collide",
    "tokenize",
]
