"""Tokenizer for MiniOver source text."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import LexError, SourceSpan


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    INT = "int-literal"
    FLOAT = "float-literal"
    CHAR = "char-literal"
    STRING = "string-literal"
    PUNCT = "punctuation"
    SHL = "shift-left"
    SHR = "shift-right"
    SCOPE = "scope-qualifier"
    EOF = "end-of-input"


KEYWORDS = frozenset(
    ["int", "float", "char", "void", "class", "public", "private", "return", "template"]
)

PUNCTUATION = "(){};,:.=+-*/&<>"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan

    def is_(self, kind: TokenKind, text: str | None = None) -> bool:
        return self.kind is kind and (text is None or self.text == text)

    def __repr__(self) -> str:
        return f"Token({self.kind.value}, {self.text!r}, {self.span.line}:{self.span.column})"


_PREAMBLE = re.compile(r"[ \t]*(#[^\n]*|using[ \t]+namespace[ \t]+[A-Za-z_]\w*[ \t]*;)[ \t]*(?=\n|$|//)")
_NUMBER = re.compile(r"[0-9]+(\.[0-9]+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_STRING = re.compile(r'"(?:[^"\\\n]|\\.)*"')
_CHAR = re.compile(r"'(?:[^'\\\n]|\\.)'")


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    return Lexer(source, file).tokens()


class Lexer:
    def __init__(self, source: str, file: str = "<input>"):
        self.source = source
        self.file = file
        self.preamble: list[str] = []
        self._tokens: list[Token] | None = None

    def tokens(self) -> list[Token]:
        if self._tokens is None:
            self._tokens = list(self._scan())
        return self._tokens

    def _scan(self):
        src = self.source
        pos = 0
        line = 1
        line_start = 0
        at_line_start = True
        n = len(src)
        while pos < n:
            if at_line_start:
                m = _PREAMBLE.match(src, pos)
                if m:
                    self.preamble.append(m.group(1).strip())
                    pos = m.end()
                    at_line_start = False
                    continue
                at_line_start = False
            ch = src[pos]
            if ch == "\n":
                pos += 1
                line += 1
                line_start = pos
                at_line_start = True
                continue
            if ch in " \t\r":
                pos += 1
                continue
            if src.startswith("//", pos):
                end = src.find("\n", pos)
                pos = n if end < 0 else end
                continue
            span = SourceSpan(self.file, line, pos - line_start + 1)
            if ch.isdigit():
                m = _NUMBER.match(src, pos)
                kind = TokenKind.FLOAT if m.group(1) else TokenKind.INT
                yield Token(kind, m.group(0), span)
                pos = m.end()
            elif ch.isalpha() or ch == "_":
                m = _IDENT.match(src, pos)
                word = m.group(0)
                kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENT
                yield Token(kind, word, span)
                pos = m.end()
            elif ch == '"':
                m = _STRING.match(src, pos)
                if not m:
                    raise LexError("unterminated string literal", span)
                yield Token(TokenKind.STRING, m.group(0), span)
                pos = m.end()
            elif ch == "'":
                m = _CHAR.match(src, pos)
                if not m:
                    raise LexError("malformed character literal", span)
                yield Token(TokenKind.CHAR, m.group(0), span)
                pos = m.end()
            elif src.startswith("<<", pos):
                yield Token(TokenKind.SHL, "<<", span)
                pos += 2
            elif src.startswith(">>", pos):
                yield Token(TokenKind.SHR, ">>", span)
                pos += 2
            elif src.startswith("::", pos):
                yield Token(TokenKind.SCOPE, "::", span)
                pos += 2
            elif ch in PUNCTUATION:
                yield Token(TokenKind.PUNCT, ch, span)
                pos += 1
            else:
                raise LexError(f"unexpected character {ch!r}", span)
        col = pos - line_start + 1
        yield Token(TokenKind.EOF, "", SourceSpan(self.file, line, col))


_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"', "'": "'", "0": "\0"}


def unescape(body: str, span: SourceSpan) -> str:
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise LexError(f"unknown escape \\{nxt}", span)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def escape(text: str, quote: str) -> str:
    rev = {v: k for k, v in _ESCAPES.items() if k != "0"}
    out = []
    for c in text:
        if c == "\\" or c == quote or c in "\n\t":
            out.append("\\" + rev[c])
        elif c == "\0":
            out.append("\\0")
        else:
            out.append(c)
    return "".join(out)
