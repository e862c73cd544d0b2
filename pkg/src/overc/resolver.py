"""Symbol tables, candidate collection and static overload resolution.

Resolution runs in three tiers, tried in order:

1. ``ordinary-exact``: a non-template candidate whose every argument is an
   exact match.
2. ``template-exact``: a function template whose type parameters can be
   deduced so that every argument matches exactly.
3. ``conversion-rank``: among viable non-template candidates, the unique one
   that dominates every other by per-argument conversion rank.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from . import ast
from .errors import (
    AMBIGUOUS_CALL,
    DUPLICATE_SIGNATURE,
    NO_SPAN,
    NO_VIABLE_CANDIDATE,
    UNKNOWN_NAME,
    SemanticError,
    SourceSpan,
)
from .types import (
    VOID,
    ConversionRank,
    DeductionFailure,
    Signature,
    Type,
    deduce_template,
    rank_conversion,
    signatures_collide,
    substitute,
)


class Tier(Enum):
    ORDINARY_EXACT = "ordinary-exact"
    TEMPLATE_EXACT = "template-exact"
    CONVERSION_RANK = "conversion-rank"


@dataclass(frozen=True)
class Origin:
    """Where a candidate comes from.

    ``kind`` is ``ordinary``, ``member``, ``constructor``, ``template`` (an
    uninstantiated function template) or ``instantiation``.
    """

    kind: str
    owner: Optional[str] = None
    bindings: tuple[tuple[str, Type], ...] = ()

    def __str__(self) -> str:
        if self.kind == "member":
            return f"member of {self.owner}"
        if self.kind == "constructor":
            return f"constructor of {self.owner}"
        if self.kind == "instantiation":
            b = ", ".join(f"{k}={v}" for k, v in self.bindings)
            return f"template instantiation [{b}]"
        return self.kind


@dataclass(eq=False)
class Candidate:
    signature: Signature
    origin: Origin
    decl_span: SourceSpan = NO_SPAN
    # FunctionDecl, TemplateDecl for templates, None for a synthesized constructor
    decl: object = None
    access: str = "public"
    template: Optional[Candidate] = None

    @property
    def name(self) -> str:
        return self.signature.name

    @property
    def param_types(self) -> tuple[Type, ...]:
        return self.signature.param_types

    @property
    def return_type(self) -> Type:
        return self.signature.return_type

    @property
    def is_template(self) -> bool:
        return self.origin.kind == "template"

    @property
    def owner(self) -> Optional[str]:
        return self.origin.owner

    @property
    def defined(self) -> bool:
        if self.decl is None:
            return self.origin.kind == "constructor"
        if isinstance(self.decl, ast.TemplateDecl):
            return self.decl.decl.body is not None
        return self.decl.body is not None

    def label(self) -> str:
        prefix = f"{self.owner}::" if self.owner and self.origin.kind in ("member", "constructor") else ""
        return f"{prefix}{self.signature}"

    def instantiate(self, bindings: dict[str, Type]) -> Candidate:
        tmpl: ast.TemplateDecl = self.decl
        sig = Signature(
            self.name,
            tuple(substitute(t, bindings) for t in self.param_types),
            substitute(self.return_type, bindings),
        )
        key = tuple((p, bindings[p]) for p in tmpl.type_params)
        return Candidate(sig, Origin("instantiation", None, key), self.decl_span, tmpl, template=self)

    def __repr__(self) -> str:
        return f"<Candidate {self.label()} ({self.origin})>"


def template_pattern(types: Iterable[Type]) -> tuple:
    """Parameter list with type variables renamed by first occurrence."""
    seen: dict[str, int] = {}
    out = []
    for t in types:
        if t.is_var:
            out.append(("var", seen.setdefault(t.name, len(seen))))
        else:
            out.append(t)
    return tuple(out)


# resolution


def better_than(r1: Sequence[ConversionRank], r2: Sequence[ConversionRank]) -> bool:
    """Strict dominance: no worse anywhere and better somewhere."""
    if len(r1) != len(r2):
        raise ValueError("rank lists differ in length")
    return all(a <= b for a, b in zip(r1, r2)) and any(a < b for a, b in zip(r1, r2))


@dataclass
class TraceEntry:
    candidate: Candidate
    # None when the arity differs or template deduction failed
    ranks: Optional[tuple[ConversionRank, ...]]
    note: str = ""

    @property
    def viable(self) -> bool:
        return self.ranks is not None and ConversionRank.NONVIABLE not in self.ranks


@dataclass
class ResolutionTrace:
    call_span: SourceSpan
    callee_name: str
    arg_types: tuple[Type, ...]
    candidates: list[TraceEntry] = field(default_factory=list)
    tier: Optional[Tier] = None
    outcome: Optional[Candidate] = None
    error: Optional[str] = None

    @property
    def selected_ranks(self) -> tuple[ConversionRank, ...]:
        for entry in self.candidates:
            if entry.candidate is self.outcome:
                return entry.ranks
        raise LookupError("trace has no selected candidate")

    def render(self) -> str:
        args = ",".join(str(t) for t in self.arg_types)
        if self.outcome is None:
            return f"RESOLVE {self.call_span} {self.callee_name}({args}) => {self.error}"
        target = self.outcome
        ranks = ",".join(str(int(r)) for r in self.selected_ranks)
        return (
            f"RESOLVE {self.call_span} {self.callee_name}({args}) => "
            f"{target.label()} -> {target.return_type} "
            f"tier={self.tier.value} ranks=({ranks})"
        )


class ResolutionError(SemanticError):
    def __init__(self, code: str, message: str, trace: ResolutionTrace):
        super().__init__(code, message, trace.call_span)
        self.trace = trace


def resolve_call(
    name: str,
    arg_types: Sequence[Type],
    candidates: Sequence[Candidate],
    call_span: SourceSpan = NO_SPAN,
) -> tuple[Candidate, ResolutionTrace]:
    """Select the function called as ``name(arg_types)`` among ``candidates``.

    Raises :class:`ResolutionError` with code E002 when nothing is viable and
    E003 when the choice is ambiguous; the trace is attached in both cases.
    """
    arg_types = tuple(arg_types)
    trace = ResolutionTrace(call_span, name, arg_types)
    ordinary: list[TraceEntry] = []
    instances: list[Candidate] = []
    for cand in candidates:
        if cand.is_template:
            try:
                bindings = deduce_template(cand.decl, arg_types)
            except DeductionFailure as exc:
                trace.candidates.append(TraceEntry(cand, None, f"deduction failed: {exc}"))
                continue
            inst = cand.instantiate(bindings)
            exact = (ConversionRank.EXACT,) * len(arg_types)
            trace.candidates.append(TraceEntry(inst, exact, "deduced"))
            instances.append(inst)
        elif len(cand.param_types) != len(arg_types):
            trace.candidates.append(TraceEntry(cand, None, "arity mismatch"))
        else:
            ranks = tuple(rank_conversion(a, p) for a, p in zip(arg_types, cand.param_types))
            entry = TraceEntry(cand, ranks)
            trace.candidates.append(entry)
            ordinary.append(entry)

    call_text = f"{name}({', '.join(str(t) for t in arg_types)})"

    def fail(code: str, tier: Optional[Tier], why: str):
        trace.tier = tier
        trace.error = code
        raise ResolutionError(code, f"{why} for call {call_text}", trace)

    def select(cand: Candidate, tier: Tier):
        trace.tier = tier
        trace.outcome = cand
        return cand, trace

    exact = [e.candidate for e in ordinary if all(r == ConversionRank.EXACT for r in e.ranks)]
    if len(exact) == 1:
        return select(exact[0], Tier.ORDINARY_EXACT)
    if len(exact) > 1:
        fail(AMBIGUOUS_CALL, Tier.ORDINARY_EXACT, _ambiguity(exact))

    if len(instances) == 1:
        return select(instances[0], Tier.TEMPLATE_EXACT)
    if len(instances) > 1:
        fail(AMBIGUOUS_CALL, Tier.TEMPLATE_EXACT, _ambiguity(instances))

    viable = [e for e in ordinary if e.viable]
    if not viable:
        fail(NO_VIABLE_CANDIDATE, None, f"no viable candidate among {len(candidates)}")
    winners = [
        e.candidate
        for e in viable
        if all(better_than(e.ranks, o.ranks) for o in viable if o is not e)
    ]
    if len(winners) == 1:
        return select(winners[0], Tier.CONVERSION_RANK)
    fail(AMBIGUOUS_CALL, Tier.CONVERSION_RANK, _ambiguity([e.candidate for e in viable]))


def _ambiguity(cands: list[Candidate]) -> str:
    return "ambiguous between " + ", ".join(c.label() for c in cands)


# symbol tables


@dataclass
class FieldInfo:
    name: str
    type: Type
    access: str
    owner: str


@dataclass(eq=False)
class ClassInfo:
    name: str
    base: Optional[ClassInfo]
    decl: Optional[ast.ClassDecl]
    own_fields: list[FieldInfo] = field(default_factory=list)
    methods: dict[str, list[Candidate]] = field(default_factory=dict)
    ctors: list[Candidate] = field(default_factory=list)

    def chain(self) -> list[ClassInfo]:
        """This class followed by its ancestors, most derived first."""
        out = []
        c = self
        while c is not None:
            out.append(c)
            c = c.base
        return out

    def derives_from(self, other: str) -> bool:
        return any(c.name == other for c in self.chain())

    @property
    def layout(self) -> list[FieldInfo]:
        """All fields, base class fields first."""
        out: list[FieldInfo] = []
        for c in reversed(self.chain()):
            out.extend(c.own_fields)
        return out

    def find_field(self, name: str) -> Optional[FieldInfo]:
        for c in self.chain():
            for f in c.own_fields:
                if f.name == name:
                    return f
        return None

    def has_member(self, name: str) -> bool:
        return any(name in c.methods for c in self.chain())


class SymbolTable:
    def __init__(self):
        self.classes: dict[str, ClassInfo] = {}
        self.functions: dict[str, list[Candidate]] = {}

    # registration

    def register_class(self, decl: ast.ClassDecl) -> ClassInfo:
        if decl.name in self.classes:
            raise SemanticError(DUPLICATE_SIGNATURE, f"class {decl.name} is already defined", decl.span)
        base = None
        if decl.base is not None:
            base = self.classes.get(decl.base)
            if base is None:
                raise SemanticError(UNKNOWN_NAME, f"unknown base class {decl.base}", decl.span)
        info = ClassInfo(decl.name, base, decl)
        self.classes[decl.name] = info
        seen = set()
        for f in decl.fields:
            if base is not None and base.find_field(f.name) is not None:
                raise SemanticError(
                    DUPLICATE_SIGNATURE, f"field {f.name} hides an inherited field", f.span
                )
            if f.name in seen:
                raise SemanticError(
                    DUPLICATE_SIGNATURE, f"duplicate field {f.name} in class {decl.name}", f.span
                )
            seen.add(f.name)
            info.own_fields.append(FieldInfo(f.name, f.type, f.access, decl.name))
        return info

    def add_members(self, info: ClassInfo) -> list[SemanticError]:
        """Register the methods and constructors declared inside a class body."""
        errors = []
        decl = info.decl
        for fn in decl.ctors:
            try:
                self.register_function(fn, info, in_class=True)
            except SemanticError as exc:
                errors.append(exc)
        for fn in decl.methods:
            try:
                self.register_function(fn, info, in_class=True)
            except SemanticError as exc:
                errors.append(exc)
        if not decl.ctors:
            sig = Signature(info.name, (), VOID)
            info.ctors.append(Candidate(sig, Origin("constructor", info.name), decl.span))
        return errors

    def register_function(self, decl, scope: Optional[ClassInfo] = None, in_class: bool = False) -> Candidate:
        """Add ``decl`` to the overload set of ``scope`` (global when ``None``).

        A definition following a matching prototype completes that prototype's
        candidate rather than adding a new one.
        """
        if isinstance(decl, ast.TemplateDecl):
            return self._register_template(decl)
        fn: ast.FunctionDecl = decl
        if fn.is_ctor:
            sig = Signature(fn.name, fn.param_types, VOID)
            pool = scope.ctors
            origin = Origin("constructor", scope.name)
        elif scope is not None:
            sig = Signature(fn.name, fn.param_types, fn.return_type)
            pool = scope.methods.setdefault(fn.name, [])
            origin = Origin("member", scope.name)
        else:
            sig = Signature(fn.name, fn.param_types, fn.return_type)
            pool = self.functions.setdefault(fn.name, [])
            origin = Origin("ordinary")
        for existing in pool:
            if existing.is_template or not signatures_collide(existing.signature, sig):
                continue
            if existing.return_type != sig.return_type:
                raise SemanticError(
                    DUPLICATE_SIGNATURE,
                    f"{_scoped(scope, sig)} differs from an earlier declaration only in return type",
                    fn.span,
                )
            if in_class or (existing.defined and fn.body is not None):
                raise SemanticError(
                    DUPLICATE_SIGNATURE, f"redefinition of {_scoped(scope, sig)}", fn.span
                )
            if fn.body is not None:
                existing.decl = fn
            return existing
        access = fn.access or "public"
        cand = Candidate(sig, origin, fn.span, fn, access)
        pool.append(cand)
        return cand

    def _register_template(self, tmpl: ast.TemplateDecl) -> Candidate:
        fn = tmpl.decl
        sig = Signature(fn.name, fn.param_types, fn.return_type)
        pool = self.functions.setdefault(fn.name, [])
        pattern = template_pattern(sig.param_types)
        for existing in pool:
            if not existing.is_template or template_pattern(existing.param_types) != pattern:
                continue
            if existing.decl.decl.body is not None and fn.body is not None:
                raise SemanticError(
                    DUPLICATE_SIGNATURE, f"redefinition of template {fn.name}", tmpl.span
                )
            if fn.body is not None:
                existing.decl = tmpl
            return existing
        cand = Candidate(sig, Origin("template"), tmpl.span, tmpl)
        pool.append(cand)
        return cand

    def define_member(self, fn: ast.FunctionDecl) -> Candidate:
        """Attach an out-of-line ``C::f`` definition to its in-class declaration."""
        info = self.classes.get(fn.owner)
        if info is None:
            raise SemanticError(UNKNOWN_NAME, f"unknown class {fn.owner}", fn.span)
        pool = info.ctors if fn.is_ctor else info.methods.get(fn.name, [])
        for existing in pool:
            if existing.decl is None or existing.param_types != fn.param_types:
                continue
            if not fn.is_ctor and existing.return_type != fn.return_type:
                raise SemanticError(
                    DUPLICATE_SIGNATURE,
                    f"{fn.owner}::{fn.name} differs from its declaration only in return type",
                    fn.span,
                )
            if existing.defined:
                raise SemanticError(
                    DUPLICATE_SIGNATURE, f"redefinition of {existing.label()}", fn.span
                )
            fn.access = existing.decl.access
            existing.decl = fn
            return existing
        sig = Signature(fn.name, fn.param_types, fn.return_type)
        raise SemanticError(
            UNKNOWN_NAME, f"no member {sig} declared in class {fn.owner}", fn.span
        )

    # lookup

    def collect_candidates(
        self,
        name: str,
        *,
        receiver: Optional[ClassInfo] = None,
        qualifier: Optional[ClassInfo] = None,
        span: SourceSpan = NO_SPAN,
    ) -> list[Candidate]:
        """Candidates for a call of ``name`` in the given lookup context.

        With ``qualifier`` only that class's own members are considered. With
        ``receiver`` the members of its class are merged with inherited ones,
        except that an inherited member is hidden by a more derived member with
        an identical parameter list. Otherwise the global overload set is used.
        """
        if qualifier is not None:
            found = list(qualifier.methods.get(name, []))
            where = f"class {qualifier.name}"
        elif receiver is not None:
            found = []
            hidden: set[tuple[Type, ...]] = set()
            for cls in receiver.chain():
                own = cls.methods.get(name, [])
                found.extend(c for c in own if c.param_types not in hidden)
                hidden.update(c.param_types for c in own)
            where = f"class {receiver.name}"
        else:
            found = list(self.functions.get(name, []))
            where = "global scope"
        if not found:
            raise SemanticError(UNKNOWN_NAME, f"no function named {name} in {where}", span)
        return found

    def constructor_candidates(self, cls: ClassInfo) -> list[Candidate]:
        return list(cls.ctors)


def _scoped(scope: Optional[ClassInfo], sig: Signature) -> str:
    return f"{scope.name}::{sig}" if scope is not None else str(sig)
