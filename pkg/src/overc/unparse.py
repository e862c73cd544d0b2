"""Render a syntax tree back to MiniOver source."""

from __future__ import annotations

from . import ast
from .lexer import escape


def unparse(program: ast.Program) -> str:
    lines: list[str] = list(program.preamble)
    for decl in program.declarations:
        if isinstance(decl, ast.ClassDecl):
            lines.extend(_class(decl))
        elif isinstance(decl, ast.TemplateDecl):
            params = ", ".join(f"class {p}" for p in decl.type_params)
            lines.append(f"template <{params}>")
            lines.extend(_function(decl.decl))
        else:
            lines.extend(_function(decl))
    return "\n".join(lines) + "\n"


def _class(decl: ast.ClassDecl) -> list[str]:
    head = f"class {decl.name}"
    if decl.base:
        head += f" : public {decl.base}"
    out = [head, "{"]
    members = [(f.access, [f"{f.type} {f.name};"]) for f in decl.fields]
    for fn in decl.ctors + decl.methods:
        members.append((fn.access, _function(fn, in_class=True)))
    current = None
    for access, text in members:
        if access != current:
            out.append(f"{access}:")
            current = access
        out.extend("    " + line for line in text)
    out.append("};")
    return out


def _params(params: list[ast.Param]) -> str:
    parts = []
    for p in params:
        s = str(p.type)
        if p.by_ref:
            s += " &"
        if p.name:
            s += " " + p.name if not p.by_ref else p.name
        parts.append(s)
    return ", ".join(parts)


def _function(fn: ast.FunctionDecl, in_class: bool = False) -> list[str]:
    if fn.is_ctor:
        name = fn.name if in_class else f"{fn.owner}::{fn.name}"
        head = f"{name}({_params(fn.params)})"
    else:
        name = fn.name if in_class or fn.owner is None else f"{fn.owner}::{fn.name}"
        head = f"{fn.return_type} {name}({_params(fn.params)})"
    if fn.body is None:
        return [head + ";"]
    return [head, "{"] + ["    " + _stmt(s) for s in fn.body] + ["}"]


def _stmt(s: ast.Stmt) -> str:
    if isinstance(s, ast.Return):
        return "return;" if s.value is None else f"return {_top(s.value)};"
    if isinstance(s, ast.Read):
        return "cin" + "".join(f" >> {expr(t)}" for t in s.targets) + ";"
    if isinstance(s, ast.Print):
        return "cout" + "".join(f" << {expr(i)}" for i in s.items) + ";"
    if isinstance(s, ast.VarDecl):
        parts = []
        for d in s.declarators:
            text = d.name
            if d.args:
                text += f"({_args(d.args)})"
            elif d.init is not None:
                text += f" = {_top(d.init)}"
            parts.append(text)
        return f"{s.type} {', '.join(parts)};"
    if isinstance(s, ast.ExprStmt):
        return _top(s.expr) + ";"
    raise TypeError(f"unknown statement {s!r}")


def _top(e: ast.Expr) -> str:
    # assignment chains need no parentheses at statement level
    if isinstance(e, ast.Assign):
        return f"{expr(e.target)} = {_top(e.value)}"
    return expr(e)


def _args(args: list[ast.Expr]) -> str:
    return ", ".join(expr(a) for a in args)


def expr(e: ast.Expr) -> str:
    if isinstance(e, ast.IntLit):
        return str(e.value)
    if isinstance(e, ast.FloatLit):
        return e.text
    if isinstance(e, ast.CharLit):
        return "'" + escape(e.value, "'") + "'"
    if isinstance(e, ast.StringLit):
        return '"' + escape(e.value, '"') + '"'
    if isinstance(e, ast.Endl):
        return "endl"
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.FieldAccess):
        return f"{expr(e.obj)}.{e.field_name}"
    if isinstance(e, ast.Assign):
        return f"({expr(e.target)} = {expr(e.value)})"
    if isinstance(e, ast.Binary):
        return f"({expr(e.left)} {e.op} {expr(e.right)})"
    if isinstance(e, ast.Unary):
        return f"-{expr(e.operand)}"
    if isinstance(e, ast.Call):
        return f"{e.name}({_args(e.args)})"
    if isinstance(e, ast.MethodCall):
        name = f"{e.qualifier}::{e.name}" if e.qualifier else e.name
        if e.receiver is None:
            return f"{name}({_args(e.args)})"
        return f"{expr(e.receiver)}.{name}({_args(e.args)})"
    raise TypeError(f"unknown expression {e!r}")
