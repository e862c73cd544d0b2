import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overc import ast
from overc.errors import LexError, ParseError
from overc.lexer import Lexer, TokenKind, tokenize
from overc.parser import parse, parse_source
from overc.types import FLOAT, INT, ClassRef, TypeVar
from overc.unparse import unparse

from conftest import CORPUS_PROGRAMS, wrap_main

K = TokenKind


def kinds_and_text(source):
    return [(t.kind, t.text) for t in tokenize(source)]


def test_empty_input_is_just_eof():
    toks = tokenize("")
    assert [t.kind for t in toks] == [K.EOF]


def test_prototype_tokens():
    assert kinds_and_text("int sum (int a, int b);") == [
        (K.KEYWORD, "int"), (K.IDENT, "sum"), (K.PUNCT, "("),
        (K.KEYWORD, "int"), (K.IDENT, "a"), (K.PUNCT, ","),
        (K.KEYWORD, "int"), (K.IDENT, "b"), (K.PUNCT, ")"), (K.PUNCT, ";"),
        (K.EOF, ""),
    ]


def test_stream_extract_tokens():
    assert kinds_and_text("cin>>x;") == [
        (K.IDENT, "cin"), (K.SHR, ">>"), (K.IDENT, "x"), (K.PUNCT, ";"), (K.EOF, ""),
    ]


def test_shift_and_scope_tokens():
    assert kinds_and_text("cout<<b1.A::get()") == [
        (K.IDENT, "cout"), (K.SHL, "<<"), (K.IDENT, "b1"), (K.PUNCT, "."),
        (K.IDENT, "A"), (K.SCOPE, "::"), (K.IDENT, "get"),
        (K.PUNCT, "("), (K.PUNCT, ")"), (K.EOF, ""),
    ]


def test_literals():
    toks = tokenize("12 2.6 'P' \"it's\"")
    assert [t.kind for t in toks[:-1]] == [K.INT, K.FLOAT, K.CHAR, K.STRING]
    assert toks[1].text == "2.6"


def test_cin_cout_endl_are_identifiers():
    toks = tokenize("cin cout endl template")
    assert [t.kind for t in toks[:-1]] == [K.IDENT, K.IDENT, K.IDENT, K.KEYWORD]


def test_lex_error_on_foreign_character():
    with pytest.raises(LexError) as info:
        tokenize("int x;\n  x @ 3;", "f.mini")
    assert (info.value.span.line, info.value.span.column) == (2, 5)


def test_unterminated_string():
    with pytest.raises(LexError):
        tokenize('cout << "abc')


def test_preamble_lines_are_collected_and_skipped():
    lexer = Lexer("#include<iostream>\nusing namespace std;\nint x;")
    assert [t.text for t in lexer.tokens()] == ["int", "x", ";", ""]
    assert lexer.preamble == ["#include<iostream>", "using namespace std;"]


def test_spans_are_exact():
    toks = tokenize("int\n  main( )", "a.mini")
    assert [(t.span.line, t.span.column) for t in toks] == [(1, 1), (2, 3), (2, 7), (2, 9), (2, 10)]
    assert toks[0].span.file == "a.mini"


@pytest.mark.parametrize("path", CORPUS_PROGRAMS, ids=lambda p: p.stem)
def test_token_text_covers_significant_source(path):
    source = path.read_text()
    joined = "".join(t.text for t in tokenize(source))
    assert re.sub(r"\s+", "", joined) == re.sub(r"\s+", "", _strip_comments(source))


def _strip_comments(source):
    out = []
    for line in source.split("\n"):
        if re.match(r"\s*(#|using\s+namespace\b)", line):
            continue
        # corpus comments never share a line with a string containing //
        out.append(line.split("//")[0])
    return "\n".join(out)


@pytest.mark.parametrize("path", CORPUS_PROGRAMS, ids=lambda p: p.stem)
def test_span_monotonicity(path):
    toks = tokenize(path.read_text())
    keys = [(t.span.line, t.span.column) for t in toks]
    assert all(a < b for a, b in zip(keys, keys[1:]))


# parser


def test_minimal_program():
    prog = parse(tokenize("int main( ){ return 0; }"))
    assert prog.entry is not None
    assert prog.entry.body == [ast.Return(ast.IntLit(0))]


def test_object_declarations_with_constructor_arguments():
    prog = parse_source(wrap_main("A b1, b2(20), b3(250,80), b4(b3);", "class A{};"))
    stmt = prog.entry.body[0]
    assert isinstance(stmt, ast.VarDecl)
    assert stmt.type == ClassRef("A")
    assert [d.name for d in stmt.declarators] == ["b1", "b2", "b3", "b4"]
    assert [d.args for d in stmt.declarators] == [
        [], [ast.IntLit(20)], [ast.IntLit(250), ast.IntLit(80)], [ast.Var("b3")],
    ]


def test_template_declaration():
    prog = parse_source("template <class S> void display(S a){ cout<<a; }")
    (tmpl,) = prog.declarations
    assert isinstance(tmpl, ast.TemplateDecl)
    assert tmpl.type_params == ["S"]
    assert [p.type for p in tmpl.decl.params] == [TypeVar("S")]


def test_class_with_sections_and_copy_constructor():
    prog = parse_source(
        "class A { private: int a, b; public: A(); A(A &p); void get(); };"
    )
    (cls,) = prog.declarations
    assert [(f.name, f.access) for f in cls.fields] == [("a", "private"), ("b", "private")]
    assert [c.params for c in cls.ctors] == [[], [ast.Param("p", ClassRef("A"), True)]]
    assert cls.ctors[1].param_types[0].kind == "ref"
    assert [m.name for m in cls.methods] == ["get"]


def test_out_of_line_definitions():
    prog = parse_source("A::A(int x){ a=x; }\nvoid A:: get ( ){ cin>>a; }")
    ctor, get = prog.declarations
    assert ctor.is_ctor and ctor.owner == "A"
    assert get.owner == "A" and get.name == "get" and not get.is_ctor


def test_qualified_method_call():
    prog = parse_source(wrap_main("b1.A::get( );"))
    call = prog.entry.body[0].expr
    assert call == ast.MethodCall(ast.Var("b1"), "get", [], "A")


def test_assignment_is_right_associative():
    prog = parse_source(wrap_main("a=b=0;"))
    e = prog.entry.body[0].expr
    assert e == ast.Assign(ast.Var("a"), ast.Assign(ast.Var("b"), ast.IntLit(0)))


def test_precedence_and_unary_minus():
    prog = parse_source(wrap_main("x = 1 + 2 * -3 - 4 / 2;"))
    e = prog.entry.body[0].expr.value
    mul = ast.Binary("*", ast.IntLit(2), ast.Unary("-", ast.IntLit(3)))
    assert e == ast.Binary(
        "-", ast.Binary("+", ast.IntLit(1), mul), ast.Binary("/", ast.IntLit(4), ast.IntLit(2))
    )


def test_print_chain():
    prog = parse_source(wrap_main('cout<<"Result: "<< sum (x, y)<< endl;'))
    items = prog.entry.body[0].items
    assert items == [
        ast.StringLit("Result: "),
        ast.Call("sum", [ast.Var("x"), ast.Var("y")]),
        ast.Endl(),
    ]


def test_float_literal():
    prog = parse_source(wrap_main("display ( 2.6);"))
    assert prog.entry.body[0].expr.args == [ast.FloatLit("2.6")]


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("x = ;", "expected an expression"),
        ("1 = x;", "assignment target"),
        ('x = "s";', "string literals"),
        ("cin >> 3;", "'>>' operand"),
        ("int x", "expected ';'"),
    ],
)
def test_parse_errors(body, fragment):
    with pytest.raises(ParseError) as info:
        parse_source(wrap_main(body))
    assert fragment in info.value.message
    assert info.value.code == "E007"


def test_parse_error_reports_expected_token_and_span():
    with pytest.raises(ParseError) as info:
        parse_source("class A { int a; }", "f.mini")
    assert "expected ';'" in info.value.message
    assert info.value.span.line == 1


def test_template_parameter_must_be_used():
    with pytest.raises(ParseError):
        parse_source("template <class S, class T> void f(S a){ }")


@pytest.mark.parametrize("path", CORPUS_PROGRAMS, ids=lambda p: p.stem)
def test_round_trip_corpus(path):
    prog = parse_source(path.read_text())
    again = parse_source(unparse(prog))
    assert again == prog
    # unparse is a fixed point after one round
    assert unparse(again) == unparse(prog)


def test_preamble_tolerance():
    body = "int main(){ return 0; }"
    with_preamble = "#include<iostream>\nusing namespace std;\n// note\n" + body
    assert parse_source(with_preamble) == parse_source(body)


# generated expressions for the round-trip property

_names = st.sampled_from(["a", "b", "x"])


def _exprs():
    leaves = st.one_of(
        st.integers(0, 10**6).map(ast.IntLit),
        st.sampled_from(["0.5", "2.6", "10.25"]).map(ast.FloatLit),
        st.sampled_from(["P", "x", "'", "\\"]).map(ast.CharLit),
        _names.map(ast.Var),
    )

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: ast.Binary(*t)),
            children.map(lambda c: ast.Unary("-", c)),
            st.tuples(_names, st.lists(children, max_size=3)).map(lambda t: ast.Call(*t)),
            st.tuples(_names, children).map(lambda t: ast.Assign(ast.Var(t[0]), t[1])),
            st.tuples(_names, _names).map(lambda t: ast.FieldAccess(ast.Var(t[0]), t[1])),
            st.tuples(_names, _names, st.lists(children, max_size=2), st.sampled_from([None, "A"])).map(
                lambda t: ast.MethodCall(ast.Var(t[0]), t[1], t[2], t[3])
            ),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(st.lists(_exprs(), min_size=1, max_size=4))
def test_round_trip_generated(exprs):
    body = [ast.ExprStmt(e) for e in exprs] + [ast.Print([ast.StringLit('a "q"\n'), exprs[0], ast.Endl()])]
    prog = ast.Program([ast.FunctionDecl("main", [], INT, body + [ast.Return(ast.IntLit(0))])])
    assert parse_source(unparse(prog)) == prog


def test_type_variables_only_inside_template():
    prog = parse_source("template <class T> T twice(T a){ T b; b = a + a; return b; }\nvoid f(T a){}")
    tmpl, fn = prog.declarations
    assert tmpl.decl.body[0].type == TypeVar("T")
    assert fn.params[0].type == ClassRef("T")


def test_scalar_declarations():
    prog = parse_source(wrap_main("int x, y; float p = 2.5;"))
    s1, s2 = prog.entry.body[:2]
    assert s1.type == INT and [d.name for d in s1.declarators] == ["x", "y"]
    assert s2.type == FLOAT and s2.declarators[0].init == ast.FloatLit("2.5")
