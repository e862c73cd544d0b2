"""Type lattice, conversion ranking, signature collision and template deduction."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Mapping, Sequence


@dataclass(frozen=True)
class Type:
    """A semantic type.

    ``kind`` is one of ``int``, ``float``, ``char``, ``void``, ``class``
    (a class value), ``ref`` (a by-reference class parameter) or ``var``
    (a template type variable, only seen before instantiation).
    """

    kind: str
    name: str | None = None

    def __str__(self) -> str:
        if self.kind == "class" or self.kind == "var":
            return self.name
        if self.kind == "ref":
            return f"{self.name}&"
        return self.kind

    @property
    def is_scalar(self) -> bool:
        return self.kind in SCALAR_KINDS

    @property
    def is_class(self) -> bool:
        return self.kind in ("class", "ref")

    @property
    def is_var(self) -> bool:
        return self.kind == "var"

    def value_type(self) -> Type:
        """The type of a value bound to a parameter of this type."""
        if self.kind == "ref":
            return ClassRef(self.name)
        return self


SCALAR_KINDS = ("int", "float", "char")

INT = Type("int")
FLOAT = Type("float")
CHAR = Type("char")
VOID = Type("void")
SCALARS = (INT, FLOAT, CHAR)


def ClassRef(name: str) -> Type:
    return Type("class", name)


def RefTo(name: str) -> Type:
    return Type("ref", name)


def TypeVar(name: str) -> Type:
    return Type("var", name)


class ConversionRank(IntEnum):
    EXACT = 0
    CONVERSION = 1
    NONVIABLE = 2


def rank_conversion(source: Type, target: Type) -> ConversionRank:
    """Rank binding a value of type ``source`` to a slot of type ``target``."""
    if source == target:
        return ConversionRank.EXACT
    if target.kind == "ref" and source.kind == "class" and source.name == target.name:
        return ConversionRank.EXACT
    if source.is_scalar and target.is_scalar:
        return ConversionRank.CONVERSION
    return ConversionRank.NONVIABLE


@dataclass(frozen=True)
class Signature:
    name: str
    param_types: tuple[Type, ...]
    return_type: Type = VOID

    def __str__(self) -> str:
        params = ",".join(str(t) for t in self.param_types)
        return f"{self.name}({params})"


def signatures_collide(s1: Signature, s2: Signature) -> bool:
    # return types deliberately ignored
    return s1.name == s2.name and tuple(s1.param_types) == tuple(s2.param_types)


class DeductionFailure(Exception):
    pass


def deduce_template(tmpl, args: Sequence[Type]) -> dict[str, Type]:
    """Bind every type variable of ``tmpl`` so its parameters match ``args``.

    ``tmpl`` needs ``type_params`` (names) and ``param_types`` (declared
    parameter types, possibly type variables).

    No conversions are allowed during deduction. Raises
    :class:`DeductionFailure` on arity mismatch, an inconsistent binding for a
    repeated variable, or a non-exact concrete position.
    """
    type_params, param_types = tmpl.type_params, tmpl.param_types
    if len(param_types) != len(args):
        raise DeductionFailure(
            f"expected {len(param_types)} arguments, got {len(args)}"
        )
    bindings: dict[str, Type] = {}
    for param, arg in zip(param_types, args):
        if param.is_var:
            bound = bindings.get(param.name)
            if bound is None:
                bindings[param.name] = arg
            elif bound != arg:
                raise DeductionFailure(
                    f"conflicting deductions for {param.name}: {bound} and {arg}"
                )
        elif rank_conversion(arg, param) != ConversionRank.EXACT:
            raise DeductionFailure(f"cannot bind {arg} to {param} exactly")
    missing = [p for p in type_params if p not in bindings]
    if missing:
        raise DeductionFailure(f"cannot deduce {', '.join(missing)}")
    return bindings


def substitute(t: Type, bindings: Mapping[str, Type]) -> Type:
    if t.is_var:
        return bindings[t.name]
    return t
