"""Recursive-descent parser producing :mod:`overc.ast` trees."""

from __future__ import annotations

from . import ast
from .errors import ParseError
from .lexer import Lexer, Token, TokenKind, unescape
from .types import CHAR, FLOAT, INT, VOID, ClassRef, Type, TypeVar

K = TokenKind

INT64_MAX = 2**63 - 1
TYPE_KEYWORDS = {"int": INT, "float": FLOAT, "char": CHAR, "void": VOID}


def parse(tokens: list[Token], preamble: list[str] | None = None) -> ast.Program:
    return Parser(tokens).program(preamble or [])


def parse_source(source: str, file: str = "<input>") -> ast.Program:
    lexer = Lexer(source, file)
    tokens = lexer.tokens()
    return parse(tokens, lexer.preamble)


class Parser:
    def __init__(self, tokens: list[Token]):
        if not tokens or tokens[-1].kind is not K.EOF:
            raise ValueError("token stream must end with end-of-input")
        self.tokens = tokens
        self.pos = 0
        self.type_vars: set[str] = set()

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind is not K.EOF:
            self.pos += 1
        return t

    def at(self, kind: TokenKind, text: str | None = None) -> bool:
        return self.tok.is_(kind, text)

    def at_punct(self, text: str) -> bool:
        return self.tok.is_(K.PUNCT, text)

    def accept(self, kind: TokenKind, text: str | None = None) -> Token | None:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, text: str | None = None, what: str | None = None) -> Token:
        if self.at(kind, text):
            return self.advance()
        if what is None:
            what = repr(text) if text is not None else kind.value
        self.error(f"expected {what}")

    def expect_punct(self, text: str) -> Token:
        return self.expect(K.PUNCT, text)

    def error(self, message: str, token: Token | None = None):
        token = token or self.tok
        found = "end of input" if token.kind is K.EOF else repr(token.text)
        raise ParseError(f"{message}, found {found}", token.span)

    # declarations

    def program(self, preamble: list[str]) -> ast.Program:
        start = self.tok.span
        decls: list[ast.TopDecl] = []
        while not self.at(K.EOF):
            decls.append(self.top_decl())
        return ast.Program(decls, preamble=list(preamble), span=start)

    def top_decl(self) -> ast.TopDecl:
        if self.at(K.KEYWORD, "class"):
            return self.class_decl()
        if self.at(K.KEYWORD, "template"):
            return self.template_decl()
        if (
            self.at(K.IDENT)
            and self.peek().kind is K.SCOPE
            and self.peek(2).is_(K.IDENT, self.tok.text)
            and self.peek(3).is_(K.PUNCT, "(")
        ):
            return self.out_of_line_ctor()
        return self.function_decl()

    def class_decl(self) -> ast.ClassDecl:
        start = self.expect(K.KEYWORD, "class")
        name = self.expect(K.IDENT, what="class name").text
        base = None
        if self.accept(K.PUNCT, ":"):
            self.expect(K.KEYWORD, "public", what="'public' (only public inheritance is supported)")
            base = self.expect(K.IDENT, what="base class name").text
        self.expect_punct("{")
        fields: list[ast.FieldDecl] = []
        methods: list[ast.FunctionDecl] = []
        ctors: list[ast.FunctionDecl] = []
        access = "private"
        while not self.at_punct("}"):
            if self.at(K.KEYWORD, "public") or self.at(K.KEYWORD, "private"):
                access = self.advance().text
                self.expect_punct(":")
                continue
            if self.at(K.IDENT, name) and self.peek().is_(K.PUNCT, "("):
                tok = self.advance()
                params = self.param_list()
                body = self.body_or_semicolon()
                ctors.append(
                    ast.FunctionDecl(
                        name, params, VOID, body, owner=name, is_ctor=True,
                        access=access, span=tok.span,
                    )
                )
                continue
            type_tok = self.tok
            ty = self.parse_type()
            name_tok = self.expect(K.IDENT, what="member name")
            if self.at_punct("("):
                params = self.param_list()
                body = self.body_or_semicolon()
                methods.append(
                    ast.FunctionDecl(
                        name_tok.text, params, ty, body, owner=name,
                        access=access, span=type_tok.span,
                    )
                )
                continue
            fields.append(ast.FieldDecl(name_tok.text, ty, access, span=name_tok.span))
            while self.accept(K.PUNCT, ","):
                t = self.expect(K.IDENT, what="field name")
                fields.append(ast.FieldDecl(t.text, ty, access, span=t.span))
            self.expect_punct(";")
        self.expect_punct("}")
        self.expect_punct(";")
        return ast.ClassDecl(name, base, fields, methods, ctors, span=start.span)

    def template_decl(self) -> ast.TemplateDecl:
        start = self.expect(K.KEYWORD, "template")
        self.expect_punct("<")
        params = []
        while True:
            self.expect(K.KEYWORD, "class")
            t = self.expect(K.IDENT, what="type parameter name")
            if t.text in params:
                self.error(f"duplicate type parameter {t.text!r}", t)
            params.append(t.text)
            if not self.accept(K.PUNCT, ","):
                break
        self.expect_punct(">")
        self.type_vars = set(params)
        try:
            decl = self.function_decl()
        finally:
            self.type_vars = set()
        if decl.owner is not None:
            self.error("member function templates are not supported")
        used = {p.type.name for p in decl.params if p.type.is_var}
        for p in params:
            if p not in used:
                raise ParseError(
                    f"type parameter {p!r} does not appear in any parameter", start.span
                )
        return ast.TemplateDecl(params, decl, span=start.span)

    def out_of_line_ctor(self) -> ast.FunctionDecl:
        owner_tok = self.advance()
        self.expect(K.SCOPE)
        self.advance()
        params = self.param_list()
        body = self.block()
        return ast.FunctionDecl(
            owner_tok.text, params, VOID, body, owner=owner_tok.text, is_ctor=True,
            span=owner_tok.span,
        )

    def function_decl(self) -> ast.FunctionDecl:
        start = self.tok
        ret = self.parse_type()
        owner = None
        name_tok = self.expect(K.IDENT, what="function name")
        if self.accept(K.SCOPE):
            owner = name_tok.text
            name_tok = self.expect(K.IDENT, what="member function name")
        if not self.at_punct("("):
            self.error("expected '(' (global variables are not supported)")
        params = self.param_list()
        body = self.body_or_semicolon()
        if owner is not None and body is None:
            self.error("out-of-line member definition needs a body", start)
        return ast.FunctionDecl(name_tok.text, params, ret, body, owner=owner, span=start.span)

    def param_list(self) -> list[ast.Param]:
        self.expect_punct("(")
        params: list[ast.Param] = []
        if self.accept(K.PUNCT, ")"):
            return params
        while True:
            start = self.tok
            ty = self.parse_type()
            by_ref = self.accept(K.PUNCT, "&") is not None
            name = ""
            if self.at(K.IDENT):
                name = self.advance().text
            params.append(ast.Param(name, ty, by_ref, span=start.span))
            if not self.accept(K.PUNCT, ","):
                break
        self.expect_punct(")")
        return params

    def parse_type(self) -> Type:
        t = self.tok
        if t.kind is K.KEYWORD and t.text in TYPE_KEYWORDS:
            self.advance()
            return TYPE_KEYWORDS[t.text]
        if t.kind is K.IDENT:
            self.advance()
            if t.text in self.type_vars:
                return TypeVar(t.text)
            return ClassRef(t.text)
        self.error("expected a type")

    def body_or_semicolon(self) -> list[ast.Stmt] | None:
        if self.accept(K.PUNCT, ";"):
            return None
        return self.block()

    # statements

    def block(self) -> list[ast.Stmt]:
        self.expect_punct("{")
        stmts = []
        while not self.at_punct("}"):
            if self.at(K.EOF):
                self.error("expected '}'")
            stmts.append(self.statement())
        self.advance()
        return stmts

    def statement(self) -> ast.Stmt:
        t = self.tok
        if t.is_(K.KEYWORD, "return"):
            self.advance()
            value = None if self.at_punct(";") else self.expression()
            self.expect_punct(";")
            return ast.Return(value, span=t.span)
        if t.is_(K.IDENT, "cin") and self.peek().kind is K.SHR:
            return self.read_stmt()
        if t.is_(K.IDENT, "cout") and self.peek().kind is K.SHL:
            return self.print_stmt()
        if (t.kind is K.KEYWORD and t.text in TYPE_KEYWORDS) or (
            t.kind is K.IDENT and self.peek().kind is K.IDENT
        ):
            return self.var_decl()
        expr = self.expression()
        self.expect_punct(";")
        return ast.ExprStmt(expr, span=t.span)

    def read_stmt(self) -> ast.Read:
        start = self.advance()
        targets = []
        while self.accept(K.SHR):
            e = self.postfix()
            if not isinstance(e, (ast.Var, ast.FieldAccess)):
                raise ParseError("'>>' operand must be a variable or field", e.span)
            targets.append(e)
        self.expect_punct(";")
        return ast.Read(targets, span=start.span)

    def print_stmt(self) -> ast.Print:
        start = self.advance()
        items: list[ast.Expr] = []
        while self.accept(K.SHL):
            t = self.tok
            if t.kind is K.STRING:
                self.advance()
                items.append(ast.StringLit(unescape(t.text[1:-1], t.span), span=t.span))
            elif t.is_(K.IDENT, "endl") and not self.peek().is_(K.PUNCT, "("):
                self.advance()
                items.append(ast.Endl(span=t.span))
            else:
                items.append(self.expression())
        self.expect_punct(";")
        return ast.Print(items, span=start.span)

    def var_decl(self) -> ast.VarDecl:
        start = self.tok
        ty = self.parse_type()
        if ty == VOID:
            self.error("variables cannot have type void", start)
        decls = []
        while True:
            name_tok = self.expect(K.IDENT, what="variable name")
            d = ast.Declarator(name_tok.text, span=name_tok.span)
            if self.at_punct("("):
                d.args = self.arg_list()
            elif self.accept(K.PUNCT, "="):
                d.init = self.assignment()
            decls.append(d)
            if not self.accept(K.PUNCT, ","):
                break
        self.expect_punct(";")
        return ast.VarDecl(ty, decls, span=start.span)

    # expressions

    def expression(self) -> ast.Expr:
        return self.assignment()

    def assignment(self) -> ast.Expr:
        left = self.additive()
        if self.at_punct("="):
            eq = self.advance()
            if not isinstance(left, (ast.Var, ast.FieldAccess)):
                raise ParseError("assignment target must be a variable or field", eq.span)
            value = self.assignment()
            return ast.Assign(left, value, span=left.span)
        return left

    def additive(self) -> ast.Expr:
        left = self.multiplicative()
        while self.at_punct("+") or self.at_punct("-"):
            op = self.advance().text
            right = self.multiplicative()
            left = ast.Binary(op, left, right, span=left.span)
        return left

    def multiplicative(self) -> ast.Expr:
        left = self.unary()
        while self.at_punct("*") or self.at_punct("/"):
            op = self.advance().text
            right = self.unary()
            left = ast.Binary(op, left, right, span=left.span)
        return left

    def unary(self) -> ast.Expr:
        if self.at_punct("-"):
            t = self.advance()
            return ast.Unary("-", self.unary(), span=t.span)
        return self.postfix()

    def postfix(self) -> ast.Expr:
        expr = self.primary()
        while self.accept(K.PUNCT, "."):
            name_tok = self.expect(K.IDENT, what="member name")
            qualifier = None
            if self.accept(K.SCOPE):
                qualifier = name_tok.text
                name_tok = self.expect(K.IDENT, what="member function name")
                if not self.at_punct("("):
                    self.error("expected '(' after qualified member name")
            if self.at_punct("("):
                args = self.arg_list()
                expr = ast.MethodCall(
                    expr, name_tok.text, args, qualifier,
                    span=expr.span, name_span=name_tok.span,
                )
            else:
                expr = ast.FieldAccess(expr, name_tok.text, span=expr.span)
        return expr

    def primary(self) -> ast.Expr:
        t = self.tok
        if t.kind is K.INT:
            self.advance()
            value = int(t.text)
            if value > INT64_MAX:
                raise ParseError("integer literal out of range", t.span)
            return ast.IntLit(value, span=t.span)
        if t.kind is K.FLOAT:
            self.advance()
            return ast.FloatLit(t.text, span=t.span)
        if t.kind is K.CHAR:
            self.advance()
            return ast.CharLit(unescape(t.text[1:-1], t.span), span=t.span)
        if t.kind is K.STRING:
            raise ParseError("string literals may only appear in output statements", t.span)
        if t.is_(K.PUNCT, "("):
            self.advance()
            e = self.expression()
            self.expect_punct(")")
            return e
        if t.kind is K.IDENT:
            self.advance()
            if self.at(K.SCOPE):
                self.advance()
                name_tok = self.expect(K.IDENT, what="member function name")
                args = self.arg_list()
                return ast.MethodCall(
                    None, name_tok.text, args, t.text, span=t.span, name_span=name_tok.span
                )
            if self.at_punct("("):
                return ast.Call(t.text, self.arg_list(), span=t.span)
            return ast.Var(t.text, span=t.span)
        self.error("expected an expression")

    def arg_list(self) -> list[ast.Expr]:
        self.expect_punct("(")
        args: list[ast.Expr] = []
        if self.accept(K.PUNCT, ")"):
            return args
        while True:
            args.append(self.expression())
            if not self.accept(K.PUNCT, ","):
                break
        self.expect_punct(")")
        return args
