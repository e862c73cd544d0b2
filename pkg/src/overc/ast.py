"""Span-annotated syntax tree.

Spans and checker annotations are excluded from equality, so two trees
compare equal exactly when they are structurally identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .errors import NO_SPAN, SourceSpan
from .types import Type


def _span():
    return field(default=NO_SPAN, compare=False, repr=False, kw_only=True)


def _note(default=None):
    return field(default=default, compare=False, repr=False, kw_only=True)


@dataclass
class Node:
    span: SourceSpan = _span()


# expressions


@dataclass
class Expr(Node):
    # static type, filled in by the checker
    ty: Optional[Type] = _note()


@dataclass
class IntLit(Expr):
    value: int


@dataclass
class FloatLit(Expr):
    text: str

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass
class CharLit(Expr):
    value: str


@dataclass
class StringLit(Expr):
    value: str


@dataclass
class Endl(Expr):
    pass


@dataclass
class Var(Expr):
    name: str
    # "local" or "field" once checked
    binding: Optional[str] = _note()


@dataclass
class FieldAccess(Expr):
    obj: Expr
    field_name: str


@dataclass
class Assign(Expr):
    target: Expr
    value: Expr
    conversion: Optional[Type] = _note()


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Unary(Expr):
    op: str
    operand: Expr


@dataclass
class CallSite:
    """Resolution results attached to a call, method call or construction."""

    candidate: Any  # resolver.Candidate
    # body to execute; None for a synthesized default constructor
    function: Optional["FunctionDecl"]
    trace: Any  # resolver.ResolutionTrace
    # per argument: the type to convert to, or None when no conversion applies
    conversions: list[Optional[Type]]
    # member call on the enclosing method's receiver
    implicit_receiver: bool = False


@dataclass
class Call(Expr):
    name: str
    args: list[Expr]
    site: Optional[CallSite] = _note()


@dataclass
class MethodCall(Expr):
    # receiver is None for an unqualified call to a member from a member body
    receiver: Optional[Expr]
    name: str
    args: list[Expr]
    qualifier: Optional[str] = None
    site: Optional[CallSite] = _note()
    name_span: SourceSpan = _span()


# statements


@dataclass
class Stmt(Node):
    pass


@dataclass
class Declarator(Node):
    name: str
    args: list[Expr] = field(default_factory=list)
    init: Optional[Expr] = None
    site: Optional[CallSite] = _note()
    conversion: Optional[Type] = _note()


@dataclass
class VarDecl(Stmt):
    type: Type
    declarators: list[Declarator]


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class Read(Stmt):
    targets: list[Expr]


@dataclass
class Print(Stmt):
    items: list[Expr]


@dataclass
class Return(Stmt):
    value: Optional[Expr]
    conversion: Optional[Type] = _note()


# declarations


@dataclass
class Param(Node):
    name: str
    type: Type
    by_ref: bool = False

    @property
    def param_type(self) -> Type:
        """Parameter type as seen by overload resolution."""
        if self.by_ref and self.type.kind == "class":
            return Type("ref", self.type.name)
        return self.type


@dataclass
class FunctionDecl(Node):
    name: str
    params: list[Param]
    return_type: Type
    body: Optional[list[Stmt]] = None
    # class name for out-of-line member definitions ``C::f``
    owner: Optional[str] = None
    is_ctor: bool = False
    access: Optional[str] = None

    @property
    def param_types(self) -> tuple[Type, ...]:
        return tuple(p.param_type for p in self.params)


@dataclass
class TemplateDecl(Node):
    type_params: list[str]
    decl: FunctionDecl

    @property
    def name(self) -> str:
        return self.decl.name

    @property
    def param_types(self) -> tuple[Type, ...]:
        return self.decl.param_types


@dataclass
class FieldDecl(Node):
    name: str
    type: Type
    access: str


@dataclass
class ClassDecl(Node):
    name: str
    base: Optional[str]
    fields: list[FieldDecl]
    methods: list[FunctionDecl]
    ctors: list[FunctionDecl]


TopDecl = Union[FunctionDecl, TemplateDecl, ClassDecl]


@dataclass
class Program(Node):
    declarations: list[TopDecl]
    preamble: list[str] = field(default_factory=list, compare=False)

    @property
    def entry(self) -> Optional[FunctionDecl]:
        for d in self.declarations:
            if (
                isinstance(d, FunctionDecl)
                and d.name == "main"
                and d.owner is None
                and d.body is not None
            ):
                return d
        return None


def walk(node):
    """Yield ``node`` and every node below it, depth first, in field order."""
    yield node
    for value in vars(node).values():
        if isinstance(value, Node):
            yield from walk(value)
        elif isinstance(value, list):
            for item in value:
                if isinstance(item, Node):
                    yield from walk(item)
