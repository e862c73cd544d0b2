"""Tree-walking evaluator for checked programs.

Runtime values are plain Python objects: ``int`` for int, ``float`` for
float (stored as binary64), a one-character ``str`` for char and
:class:`Obj` for class instances. Every call site was bound by the checker,
so evaluation never inspects overload sets.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Optional

from . import ast
from .checker import TypedProgram
from .errors import EvalError
from .types import Type

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1
MAX_CALL_DEPTH = 400


class _Uninitialized:
    def __repr__(self) -> str:
        return "<uninitialized>"


UNINIT = _Uninitialized()


@dataclass(eq=False)
class Obj:
    class_name: str
    fields: dict[str, object]

    def copy(self) -> Obj:
        return Obj(
            self.class_name,
            {k: v.copy() if isinstance(v, Obj) else v for k, v in self.fields.items()},
        )

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.fields.items())
        return f"{self.class_name}{{{inner}}}"


def wrap_int(n: int) -> int:
    """Reduce to the signed 64-bit range with two's complement wraparound."""
    return (n - INT_MIN) % 2**64 + INT_MIN


def apply_conversion(value, target: Type):
    """Convert a scalar runtime value to ``target``; identity for same-type values."""
    kind = target.kind
    if kind == "int":
        if isinstance(value, float):
            if not math.isfinite(value):
                raise EvalError(f"cannot convert {value} to int")
            n = math.trunc(value)
            if not INT_MIN <= n <= INT_MAX:
                raise EvalError(f"{format_value(value)} is out of range for int")
            return n
        if isinstance(value, str):
            return ord(value)
        return value
    if kind == "float":
        if isinstance(value, str):
            return float(ord(value))
        return float(value)
    if kind == "char":
        if isinstance(value, str):
            return value
        code = apply_conversion(value, Type("int"))
        if not 32 <= code <= 126:
            raise EvalError(f"{code} is not a printable character code")
        return chr(code)
    return value


def format_value(value) -> str:
    """Render a scalar the way the output stream shows it.

    Floats keep at most 6 significant digits in positional notation with
    trailing zeros (and a trailing point) removed.
    """
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = format(Decimal("%.5e" % value), "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


_INT_TOKEN = re.compile(r"[+-]?[0-9]+")
_FLOAT_TOKEN = re.compile(r"[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?")


def parse_input(token: str, target: Type):
    if target.kind == "int":
        if not _INT_TOKEN.fullmatch(token):
            raise EvalError(f"expected an integer, got {token!r}")
        n = int(token)
        if not INT_MIN <= n <= INT_MAX:
            raise EvalError(f"integer {token} out of range")
        return n
    if target.kind == "float":
        if not _FLOAT_TOKEN.fullmatch(token):
            raise EvalError(f"expected a number, got {token!r}")
        return float(token)
    return token[0]


class IoStreams:
    """Whitespace-delimited input tokens and an append-only output buffer.

    ``source`` is either the input text or a readable stream; a stream is
    only read when the program first consumes input.
    """

    def __init__(self, source="", echo=None):
        self._source = source
        self._tokens: list[str] | None = None
        self._next = 0
        self.output: list[str] = []
        self.echo = echo

    def read_token(self) -> str:
        if self._tokens is None:
            text = self._source if isinstance(self._source, str) else self._source.read()
            self._tokens = text.split()
        if self._next >= len(self._tokens):
            raise EvalError("input exhausted")
        tok = self._tokens[self._next]
        self._next += 1
        return tok

    def write(self, text: str):
        self.output.append(text)
        if self.echo is not None:
            self.echo(text)

    def getvalue(self) -> str:
        return "".join(self.output)


def read_values(targets, io: IoStreams) -> list:
    """Consume one input token per ``(name, type)`` target, in order."""
    return [parse_input(io.read_token(), t) for _, t in targets]


@dataclass
class _Frame:
    locals: dict[str, object] = field(default_factory=dict)
    receiver: Optional[Obj] = None


class _Return(Exception):
    def __init__(self, value):
        self.value = value


@dataclass
class RunResult:
    output: str
    status: int
    error: Optional[EvalError] = None


def run_program(tp: TypedProgram, input_text="", echo=None) -> RunResult:
    """Run ``main``. A runtime error yields status 2 and keeps the output so far.

    ``input_text`` may also be a readable stream. ``echo``, when given, is
    called with each piece of output as it is produced.
    """
    io = IoStreams(input_text, echo)
    interp = Interpreter(tp, io)
    limit = sys.getrecursionlimit()
    # each interpreted call costs a handful of Python frames
    sys.setrecursionlimit(max(limit, MAX_CALL_DEPTH * 40))
    try:
        status = interp.call(tp.main, [], None)
    except EvalError as exc:
        return RunResult(io.getvalue(), 2, exc)
    except RecursionError:
        return RunResult(io.getvalue(), 2, EvalError("evaluation nested too deeply"))
    finally:
        sys.setrecursionlimit(limit)
    return RunResult(io.getvalue(), 0 if status is None else status)


def construct_object(tp: TypedProgram, class_name: str, ctor: Optional[ast.FunctionDecl], args, io=None) -> Obj:
    """Create an instance of ``class_name`` and run ``ctor`` on it, if given."""
    return Interpreter(tp, io or IoStreams()).construct(class_name, ctor, args)


class Interpreter:
    def __init__(self, tp: TypedProgram, io: IoStreams):
        self.tp = tp
        self.io = io
        self.depth = 0

    # calls

    def call(self, fn: ast.FunctionDecl, args: list, receiver: Optional[Obj]):
        if self.depth >= MAX_CALL_DEPTH:
            raise EvalError("call depth exceeded", fn.span)
        frame = _Frame(receiver=receiver)
        for p, v in zip(fn.params, args):
            frame.locals[p.name] = v
        self.depth += 1
        try:
            for stmt in fn.body:
                self.exec(stmt, frame)
        except _Return as r:
            return r.value
        finally:
            self.depth -= 1
        if fn.return_type.kind != "void" and not fn.is_ctor:
            if fn is self.tp.main:
                return 0
            raise EvalError(f"{fn.name} finished without returning a value", fn.span)
        return None

    def construct(self, class_name: str, ctor: Optional[ast.FunctionDecl], args: list) -> Obj:
        info = self.tp.symbols.classes[class_name]
        obj = Obj(class_name, {f.name: UNINIT for f in info.layout})
        for f in info.layout:
            if f.type.is_class:
                # member objects are default-constructed
                inner = self.tp.symbols.classes[f.type.name]
                default = next((c for c in inner.ctors if not c.param_types), None)
                fn = default.decl if default is not None else None
                obj.fields[f.name] = self.construct(f.type.name, fn, [])
        if ctor is not None:
            self.call(ctor, args, obj)
        return obj

    def call_args(self, site: ast.CallSite, args: list[ast.Expr], frame: _Frame) -> list:
        values = []
        for arg, param, conv in zip(args, site.candidate.param_types, site.conversions):
            v = self.eval(arg, frame)
            if conv is not None:
                v = apply_conversion(v, conv)
            elif isinstance(v, Obj) and param.kind != "ref":
                v = v.copy()
            values.append(v)
        return values

    # statements

    def exec(self, stmt: ast.Stmt, frame: _Frame):
        if isinstance(stmt, ast.ExprStmt):
            self.eval(stmt.expr, frame)
        elif isinstance(stmt, ast.Print):
            for item in stmt.items:
                if isinstance(item, ast.StringLit):
                    self.io.write(item.value)
                elif isinstance(item, ast.Endl):
                    self.io.write("\n")
                else:
                    self.io.write(format_value(self.eval(item, frame)))
        elif isinstance(stmt, ast.Read):
            for target in stmt.targets:
                value = parse_input(self.io.read_token(), target.ty)
                self.store(target, value, frame)
        elif isinstance(stmt, ast.VarDecl):
            for d in stmt.declarators:
                frame.locals[d.name] = self.declare(stmt.type, d, frame)
        elif isinstance(stmt, ast.Return):
            value = None
            if stmt.value is not None:
                value = self.eval(stmt.value, frame)
                if stmt.conversion is not None:
                    value = apply_conversion(value, stmt.conversion)
                elif isinstance(value, Obj):
                    value = value.copy()
            raise _Return(value)
        else:
            raise TypeError(f"unknown statement {stmt!r}")

    def declare(self, ty: Type, d: ast.Declarator, frame: _Frame):
        if d.site is not None:
            args = self.call_args(d.site, d.args, frame)
            return self.construct(ty.name, d.site.function, args)
        init = d.init if d.init is not None else (d.args[0] if d.args else None)
        if init is None:
            return UNINIT
        value = self.eval(init, frame)
        if d.conversion is not None:
            value = apply_conversion(value, d.conversion)
        return value

    def store(self, target: ast.Expr, value, frame: _Frame):
        if isinstance(target, ast.Var):
            if target.binding == "local":
                frame.locals[target.name] = value
            else:
                frame.receiver.fields[target.name] = value
        else:
            obj = self.eval(target.obj, frame)
            obj.fields[target.field_name] = value

    # expressions

    def eval(self, e: ast.Expr, frame: _Frame):
        if isinstance(e, ast.IntLit):
            return e.value
        if isinstance(e, ast.FloatLit):
            return e.value
        if isinstance(e, ast.CharLit):
            return e.value
        if isinstance(e, ast.Var):
            if e.binding == "local":
                value = frame.locals[e.name]
            else:
                value = frame.receiver.fields[e.name]
            if value is UNINIT:
                raise EvalError(f"read of uninitialized {e.name}", e.span)
            return value
        if isinstance(e, ast.FieldAccess):
            obj = self.eval(e.obj, frame)
            value = obj.fields[e.field_name]
            if value is UNINIT:
                raise EvalError(f"read of uninitialized field {e.field_name}", e.span)
            return value
        if isinstance(e, ast.Assign):
            value = self.eval(e.value, frame)
            if e.conversion is not None:
                value = apply_conversion(value, e.conversion)
            elif isinstance(value, Obj):
                value = value.copy()
            self.store(e.target, value, frame)
            return value
        if isinstance(e, ast.Binary):
            return self.binary(e, self.eval(e.left, frame), self.eval(e.right, frame))
        if isinstance(e, ast.Unary):
            v = self.eval(e.operand, frame)
            if isinstance(v, str):
                v = ord(v)
            return -v if isinstance(v, float) else wrap_int(-v)
        if isinstance(e, (ast.Call, ast.MethodCall)):
            site = e.site
            receiver = None
            if site.implicit_receiver:
                receiver = frame.receiver
            elif isinstance(e, ast.MethodCall):
                receiver = self.eval(e.receiver, frame)
            args = self.call_args(site, e.args, frame)
            return self.call(site.function, args, receiver)
        raise TypeError(f"unknown expression {e!r}")

    def binary(self, e: ast.Binary, left, right):
        if isinstance(left, str):
            left = ord(left)
        if isinstance(right, str):
            right = ord(right)
        op = e.op
        if isinstance(left, float) or isinstance(right, float):
            left, right = float(left), float(right)
            if op == "+":
                return left + right
            if op == "-":
                return left - right
            if op == "*":
                return left * right
            if right == 0.0:
                if left == 0.0 or math.isnan(left):
                    return math.nan
                return math.copysign(math.inf, left) * math.copysign(1.0, right)
            return left / right
        if op == "+":
            return wrap_int(left + right)
        if op == "-":
            return wrap_int(left - right)
        if op == "*":
            return wrap_int(left * right)
        if right == 0:
            raise EvalError("integer division by zero", e.span)
        q = abs(left) // abs(right)
        return wrap_int(q if (left < 0) == (right < 0) else -q)
