"""Whole-program static checking.

``check_program`` registers every declaration, then walks each function body,
typing expressions and binding every call, method call and object
construction to exactly one target. The result is an annotated copy of the
program that the evaluator can run without consulting any type information.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

from . import ast
from .errors import (
    ACCESS_VIOLATION,
    DUPLICATE_SIGNATURE,
    NO_VIABLE_CANDIDATE,
    TYPE_MISMATCH,
    UNKNOWN_NAME,
    CheckError,
    Diagnostic,
    SemanticError,
)
from .resolver import (
    Candidate,
    ClassInfo,
    ResolutionTrace,
    SymbolTable,
    resolve_call,
)
from .types import (
    CHAR,
    FLOAT,
    INT,
    VOID,
    ConversionRank,
    Type,
    rank_conversion,
    substitute,
)


@dataclass
class TypedProgram:
    program: ast.Program
    symbols: SymbolTable
    main: ast.FunctionDecl
    traces: list[ResolutionTrace]
    instances: dict = field(default_factory=dict)

    def trace_lines(self) -> list[str]:
        return [t.render() for t in self.traces]


@dataclass
class _Context:
    function: ast.FunctionDecl
    cls: Optional[ClassInfo]
    locals: dict[str, Type] = field(default_factory=dict)


def check_program(program: ast.Program) -> TypedProgram:
    """Check ``program`` and return an annotated copy.

    Raises :class:`CheckError` carrying every diagnostic in source order.
    """
    return Checker(copy.deepcopy(program)).run()


def _fail(code: str, message: str, span) -> SemanticError:
    return SemanticError(code, message, span)


class Checker:
    def __init__(self, program: ast.Program):
        self.program = program
        self.symbols = SymbolTable()
        self.diagnostics: list[Diagnostic] = []
        self.traces: list[ResolutionTrace] = []
        self.instances: dict[tuple, ast.FunctionDecl] = {}
        self.bad_classes: set[str] = set()

    def report(self, exc: SemanticError):
        self.diagnostics.append(exc.diagnostic())

    def run(self) -> TypedProgram:
        decls = self.program.declarations
        classes = [d for d in decls if isinstance(d, ast.ClassDecl)]
        for decl in classes:
            try:
                info = self.symbols.register_class(decl)
            except SemanticError as exc:
                self.report(exc)
                self.bad_classes.add(decl.name)
                continue
            for f in decl.fields:
                self.guard(self.validate_type, f.type, f.span, value=True)
                if f.type.is_class and f.type.name == decl.name:
                    self.report(_fail(TYPE_MISMATCH, f"field {f.name} has incomplete type {decl.name}", f.span))
                elif f.type.is_class and f.type.name in self.symbols.classes:
                    inner = self.symbols.classes[f.type.name]
                    if not any(not c.param_types for c in inner.ctors):
                        self.report(
                            _fail(NO_VIABLE_CANDIDATE, f"field {f.name}: {inner.name} has no default constructor", f.span)
                        )
            for fn in decl.ctors + decl.methods:
                self.validate_signature(fn)
            for exc in self.symbols.add_members(info):
                self.report(exc)

        for decl in decls:
            if isinstance(decl, ast.ClassDecl):
                continue
            fn = decl.decl if isinstance(decl, ast.TemplateDecl) else decl
            if fn.owner is not None and fn.owner in self.bad_classes:
                continue
            if not isinstance(decl, ast.TemplateDecl):
                self.validate_signature(fn)
            try:
                if fn.owner is not None:
                    self.symbols.define_member(fn)
                else:
                    self.symbols.register_function(decl)
            except SemanticError as exc:
                self.report(exc)

        main = self.program.entry
        self.check_main(main)

        for decl in decls:
            if isinstance(decl, ast.ClassDecl):
                info = self.symbols.classes.get(decl.name)
                if info is None or info.decl is not decl:
                    continue
                for fn in decl.ctors + decl.methods:
                    if fn.body is not None:
                        self.check_body(fn, info)
            elif isinstance(decl, ast.FunctionDecl) and decl.body is not None:
                info = None
                if decl.owner is not None:
                    info = self.symbols.classes.get(decl.owner)
                    if info is None or decl.owner in self.bad_classes:
                        continue
                self.check_body(decl, info)

        if self.diagnostics:
            unique = list(dict.fromkeys(self.diagnostics))
            unique.sort(key=lambda d: d.span.key)
            raise CheckError(unique)
        self.traces.sort(key=lambda t: t.call_span.key)
        return TypedProgram(self.program, self.symbols, main, self.traces, self.instances)

    def guard(self, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SemanticError as exc:
            self.report(exc)
            return None

    # declarations

    def validate_type(self, t: Type, span, value: bool = False):
        if t.is_class and t.name not in self.symbols.classes:
            raise _fail(UNKNOWN_NAME, f"unknown type {t.name}", span)
        if value and t == VOID:
            raise _fail(TYPE_MISMATCH, "void is not a value type", span)

    def validate_signature(self, fn: ast.FunctionDecl):
        for p in fn.params:
            if p.type.is_var:
                continue
            self.guard(self.validate_type, p.type, p.span, value=True)
            if p.by_ref and not p.type.is_class:
                self.report(
                    _fail(TYPE_MISMATCH, f"by-reference parameter {p.name} must have class type", p.span)
                )
        if not fn.return_type.is_var:
            self.guard(self.validate_type, fn.return_type, fn.span)

    def check_main(self, main: Optional[ast.FunctionDecl]):
        if main is None:
            # only worth reporting when it is the sole problem
            if not self.diagnostics:
                self.report(_fail(UNKNOWN_NAME, "program has no function main", self.program.span))
            return
        if main.params or main.return_type != INT:
            self.report(_fail(TYPE_MISMATCH, "main must be declared as int main()", main.span))

    # bodies

    def check_body(self, fn: ast.FunctionDecl, cls: Optional[ClassInfo]):
        ctx = _Context(fn, cls)
        for p in fn.params:
            if p.name:
                if p.name in ctx.locals:
                    self.report(_fail(DUPLICATE_SIGNATURE, f"duplicate parameter {p.name}", p.span))
                ctx.locals[p.name] = p.type
        for stmt in fn.body:
            self.guard(self.check_stmt, stmt, ctx)

    def check_stmt(self, stmt: ast.Stmt, ctx: _Context):
        if isinstance(stmt, ast.VarDecl):
            self.check_var_decl(stmt, ctx)
        elif isinstance(stmt, ast.ExprStmt):
            self.expr(stmt.expr, ctx, allow_void=True)
        elif isinstance(stmt, ast.Read):
            for target in stmt.targets:
                t = self.expr(target, ctx)
                if not t.is_scalar:
                    raise _fail(TYPE_MISMATCH, f"cannot read a value of type {t}", target.span)
        elif isinstance(stmt, ast.Print):
            for item in stmt.items:
                if isinstance(item, (ast.StringLit, ast.Endl)):
                    continue
                t = self.expr(item, ctx)
                if not t.is_scalar:
                    raise _fail(TYPE_MISMATCH, f"cannot print a value of type {t}", item.span)
        elif isinstance(stmt, ast.Return):
            self.check_return(stmt, ctx)
        else:
            raise TypeError(f"unknown statement {stmt!r}")

    def check_return(self, stmt: ast.Return, ctx: _Context):
        expected = VOID if ctx.function.is_ctor else ctx.function.return_type
        if stmt.value is None:
            if expected != VOID:
                raise _fail(TYPE_MISMATCH, f"return without a value in function returning {expected}", stmt.span)
            return
        if expected == VOID:
            raise _fail(TYPE_MISMATCH, "return with a value in a void function", stmt.span)
        actual = self.expr(stmt.value, ctx)
        stmt.conversion = self.conversion(actual, expected, stmt.value.span)

    def conversion(self, actual: Type, expected: Type, span) -> Optional[Type]:
        """Check ``actual`` can bind to ``expected``; return the conversion target, if any."""
        rank = rank_conversion(actual, expected)
        if rank == ConversionRank.NONVIABLE:
            raise _fail(TYPE_MISMATCH, f"cannot convert {actual} to {expected}", span)
        if rank == ConversionRank.CONVERSION:
            return expected
        return None

    def check_var_decl(self, stmt: ast.VarDecl, ctx: _Context):
        ty = stmt.type
        self.validate_type(ty, stmt.span, value=True)
        for d in stmt.declarators:
            if d.name in ctx.locals:
                raise _fail(DUPLICATE_SIGNATURE, f"redeclaration of {d.name}", d.span)
            ctx.locals[d.name] = ty
            if ty.is_class:
                if d.init is not None:
                    raise _fail(
                        TYPE_MISMATCH, f"initialize {d.name} with constructor arguments", d.span
                    )
                self.check_construction(d, self.symbols.classes[ty.name], ctx)
            else:
                values = list(d.args)
                if d.init is not None:
                    values.append(d.init)
                if len(values) > 1:
                    raise _fail(TYPE_MISMATCH, f"too many initializers for {d.name}", d.span)
                if values:
                    actual = self.expr(values[0], ctx)
                    d.conversion = self.conversion(actual, ty, values[0].span)

    def check_construction(self, d: ast.Declarator, cls: ClassInfo, ctx: _Context):
        arg_types = self.arg_types(d.args, ctx)
        cands = self.symbols.constructor_candidates(cls)
        cand, trace = self.resolve(cls.name, arg_types, cands, d.span)
        self.check_access(cand, ctx, d.span)
        d.site = self.call_site(cand, trace, d.args)

    def resolve(self, name, arg_types, cands, span):
        cand, trace = resolve_call(name, arg_types, cands, span)
        self.traces.append(trace)
        return cand, trace

    def arg_types(self, args: list[ast.Expr], ctx: _Context) -> list[Type]:
        return [self.expr(a, ctx) for a in args]

    def call_site(self, cand: Candidate, trace, args, implicit=False) -> ast.CallSite:
        conversions = []
        for arg, param in zip(args, cand.param_types):
            if param.kind == "ref" and not isinstance(arg, (ast.Var, ast.FieldAccess)):
                raise _fail(TYPE_MISMATCH, f"cannot bind a temporary to {param}", arg.span)
            conversions.append(param if rank_conversion(arg.ty, param) == ConversionRank.CONVERSION else None)
        if cand.origin.kind == "instantiation":
            function = self.instantiate(cand)
        elif cand.decl is None:
            function = None
        else:
            if not cand.defined:
                raise _fail(UNKNOWN_NAME, f"{cand.label()} is declared but never defined", trace.call_span)
            function = cand.decl
        return ast.CallSite(cand, function, trace, conversions, implicit)

    def check_access(self, cand: Candidate, ctx: _Context, span):
        if cand.access == "private" and (ctx.cls is None or ctx.cls.name != cand.owner):
            raise _fail(ACCESS_VIOLATION, f"{cand.label()} is private", span)

    def instantiate(self, cand: Candidate) -> ast.FunctionDecl:
        tmpl: ast.TemplateDecl = cand.decl
        key = (id(tmpl), cand.origin.bindings)
        fn = self.instances.get(key)
        if fn is not None:
            return fn
        bindings = dict(cand.origin.bindings)
        fn = copy.deepcopy(tmpl.decl)
        for p in fn.params:
            p.type = substitute(p.type, bindings)
        fn.return_type = substitute(fn.return_type, bindings)
        for node in ast.walk(fn):
            if isinstance(node, ast.VarDecl):
                node.type = substitute(node.type, bindings)
        self.instances[key] = fn
        self.check_body(fn, None)
        return fn

    # expressions

    def expr(self, e: ast.Expr, ctx: _Context, allow_void: bool = False) -> Type:
        t = self._expr(e, ctx)
        e.ty = t
        if t == VOID and not allow_void:
            raise _fail(TYPE_MISMATCH, "void value used in an expression", e.span)
        return t

    def _expr(self, e: ast.Expr, ctx: _Context) -> Type:
        if isinstance(e, ast.IntLit):
            return INT
        if isinstance(e, ast.FloatLit):
            return FLOAT
        if isinstance(e, ast.CharLit):
            return CHAR
        if isinstance(e, (ast.StringLit, ast.Endl)):
            raise _fail(TYPE_MISMATCH, "string literals and endl may only be printed", e.span)
        if isinstance(e, ast.Var):
            return self.var(e, ctx)
        if isinstance(e, ast.FieldAccess):
            return self.field_access(e, ctx)
        if isinstance(e, ast.Assign):
            target = self.expr(e.target, ctx)
            value = self.expr(e.value, ctx)
            e.conversion = self.conversion(value, target, e.value.span)
            return target
        if isinstance(e, ast.Binary):
            left = self.expr(e.left, ctx)
            right = self.expr(e.right, ctx)
            for side, t in ((e.left, left), (e.right, right)):
                if not t.is_scalar:
                    raise _fail(TYPE_MISMATCH, f"operator {e.op} needs numbers, not {t}", side.span)
            return FLOAT if FLOAT in (left, right) else INT
        if isinstance(e, ast.Unary):
            t = self.expr(e.operand, ctx)
            if not t.is_scalar:
                raise _fail(TYPE_MISMATCH, f"cannot negate a value of type {t}", e.span)
            return FLOAT if t == FLOAT else INT
        if isinstance(e, ast.Call):
            return self.call(e, ctx)
        if isinstance(e, ast.MethodCall):
            return self.method_call(e, ctx)
        raise TypeError(f"unknown expression {e!r}")

    def var(self, e: ast.Var, ctx: _Context) -> Type:
        t = ctx.locals.get(e.name)
        if t is not None:
            e.binding = "local"
            return t
        if ctx.cls is not None:
            f = ctx.cls.find_field(e.name)
            if f is not None:
                if f.access == "private" and f.owner != ctx.cls.name:
                    raise _fail(ACCESS_VIOLATION, f"field {f.owner}::{f.name} is private", e.span)
                e.binding = "field"
                return f.type
        raise _fail(UNKNOWN_NAME, f"unknown name {e.name}", e.span)

    def class_of(self, t: Type, span) -> ClassInfo:
        if not t.is_class:
            raise _fail(TYPE_MISMATCH, f"a value of type {t} has no members", span)
        return self.symbols.classes[t.name]

    def field_access(self, e: ast.FieldAccess, ctx: _Context) -> Type:
        cls = self.class_of(self.expr(e.obj, ctx), e.obj.span)
        f = cls.find_field(e.field_name)
        if f is None:
            raise _fail(UNKNOWN_NAME, f"class {cls.name} has no field {e.field_name}", e.span)
        if f.access == "private" and (ctx.cls is None or ctx.cls.name != f.owner):
            raise _fail(ACCESS_VIOLATION, f"field {f.owner}::{f.name} is private", e.span)
        return f.type

    def call(self, e: ast.Call, ctx: _Context) -> Type:
        arg_types = self.arg_types(e.args, ctx)
        implicit = ctx.cls is not None and ctx.cls.has_member(e.name)
        if implicit:
            cands = self.symbols.collect_candidates(e.name, receiver=ctx.cls, span=e.span)
        else:
            cands = self.symbols.collect_candidates(e.name, span=e.span)
        cand, trace = self.resolve(e.name, arg_types, cands, e.span)
        self.check_access(cand, ctx, e.span)
        e.site = self.call_site(cand, trace, e.args, implicit)
        return cand.return_type

    def method_call(self, e: ast.MethodCall, ctx: _Context) -> Type:
        if e.receiver is None:
            if ctx.cls is None:
                raise _fail(UNKNOWN_NAME, f"{e.qualifier}::{e.name} called outside a member function", e.span)
            cls = ctx.cls
        else:
            cls = self.class_of(self.expr(e.receiver, ctx), e.receiver.span)
        arg_types = self.arg_types(e.args, ctx)
        qualifier = None
        if e.qualifier is not None:
            if not cls.derives_from(e.qualifier):
                raise _fail(
                    UNKNOWN_NAME, f"{e.qualifier} is not {cls.name} or one of its bases", e.name_span
                )
            qualifier = self.symbols.classes[e.qualifier]
        if qualifier is not None:
            cands = self.symbols.collect_candidates(e.name, qualifier=qualifier, span=e.name_span)
        else:
            cands = self.symbols.collect_candidates(e.name, receiver=cls, span=e.name_span)
        cand, trace = self.resolve(e.name, arg_types, cands, e.name_span)
        self.check_access(cand, ctx, e.name_span)
        e.site = self.call_site(cand, trace, e.args, implicit=e.receiver is None)
        return cand.return_type
