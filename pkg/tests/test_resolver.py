import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overc.errors import SemanticError
from overc.parser import parse_source
from overc.resolver import (
    Candidate,
    Origin,
    ResolutionError,
    SymbolTable,
    Tier,
    better_than,
    resolve_call,
)
from overc.types import CHAR, FLOAT, INT, ClassRef, ConversionRank, RefTo, Signature, Type

from conftest import corpus_source
from oracle import oracle_resolve

E, C, N = ConversionRank.EXACT, ConversionRank.CONVERSION, ConversionRank.NONVIABLE
BY_NAME = {"int": INT, "float": FLOAT, "char": CHAR}


def fn(name, *params, ret=INT):
    return Candidate(Signature(name, tuple(params), ret), Origin("ordinary"))


def symbols_for(source):
    """Register every declaration of ``source`` the way the checker does."""
    prog = parse_source(source)
    table = SymbolTable()
    for d in prog.declarations:
        if hasattr(d, "ctors"):
            table.add_members(table.register_class(d))
    for d in prog.declarations:
        if hasattr(d, "ctors"):
            continue
        owner = getattr(d, "owner", None)
        if owner:
            table.define_member(d)
        else:
            table.register_function(d)
    return table


# registration


def test_register_differently_typed_overloads():
    table = symbols_for("int sum (int a, int b);\nint sum (int a, float b);")
    assert [str(c.signature) for c in table.functions["sum"]] == ["sum(int,int)", "sum(int,float)"]


def test_return_type_only_difference_is_rejected():
    with pytest.raises(SemanticError) as info:
        symbols_for("int sum (int a, int b);\nfloat sum (int a, int b);")
    assert info.value.code == "E001"
    assert info.value.span.line == 2


def test_prototype_and_definition_unify():
    table = symbols_for("int f(int a);\nint main(){return 0;}\nint f(int a){ return a; }")
    (cand,) = table.functions["f"]
    assert cand.defined
    assert cand.decl_span.line == 1


def test_two_definitions_collide():
    with pytest.raises(SemanticError) as info:
        symbols_for("int f(int a){return a;}\nint f(int b){return b;}")
    assert info.value.code == "E001"


def test_same_signature_in_different_classes_is_fine():
    table = symbols_for(corpus_source("fig08_inheritance"))
    assert [str(c.signature) for c in table.classes["integer"].methods["sum"]] == ["sum(int,int)"]
    assert [str(c.signature) for c in table.classes["real"].methods["sum"]] == ["sum(float,float)"]


def test_constructor_overload_set():
    table = symbols_for(corpus_source("fig04_constructor"))
    ctors = table.classes["A"].ctors
    assert [c.param_types for c in ctors] == [(), (INT,), (INT, INT), (RefTo("A"),)]
    assert all(c.defined for c in ctors)


def test_derived_class_records_its_base():
    table = symbols_for(corpus_source("fig05_overriding"))
    b = table.classes["B"]
    assert [c.name for c in b.chain()] == ["B", "A"]
    assert sorted(b.methods) == ["display", "get"]
    assert [f.name for f in b.layout] == ["a", "b", "c", "d", "e"]


def test_colliding_constructors():
    table = SymbolTable()
    prog = parse_source("class A { public: A(int x); A(int y); };")
    errors = table.add_members(table.register_class(prog.declarations[0]))
    assert [e.code for e in errors] == ["E001"]


def test_unknown_base_class():
    with pytest.raises(SemanticError) as info:
        symbols_for("class B : public A { };")
    assert info.value.code == "E004"


def test_default_constructor_is_synthesized_only_without_declared_ones():
    table = symbols_for("class P { };\nclass Q { public: Q(int x); };")
    assert [c.param_types for c in table.classes["P"].ctors] == [()]
    assert [c.param_types for c in table.classes["Q"].ctors] == [(INT,)]


def test_out_of_line_definition_without_declaration():
    with pytest.raises(SemanticError) as info:
        symbols_for("class A { public: void f(); };\nvoid A::f(int x){ }")
    assert info.value.code == "E004"


def test_template_redefinition_up_to_renaming():
    with pytest.raises(SemanticError) as info:
        symbols_for("template <class S> void f(S a){}\ntemplate <class T> void f(T b){}")
    assert info.value.code == "E001"


def test_templates_with_different_shapes_coexist():
    table = symbols_for("template <class S> void f(S a, S b){}\ntemplate <class S, class T> void f(S a, T b){}")
    assert len(table.functions["f"]) == 2


# lookup


def test_qualified_lookup_sees_only_the_named_class():
    table = symbols_for(corpus_source("fig05_overriding"))
    cands = table.collect_candidates("get", qualifier=table.classes["A"])
    assert [c.label() for c in cands] == ["A::get()"]


def test_identical_parameter_list_overrides():
    table = symbols_for(corpus_source("fig05_overriding"))
    cands = table.collect_candidates("get", receiver=table.classes["B"])
    assert [c.label() for c in cands] == ["B::get()"]


def test_inherited_overloads_merge():
    table = symbols_for(corpus_source("fig08_inheritance"))
    cands = table.collect_candidates("sum", receiver=table.classes["real"])
    assert [c.label() for c in cands] == ["real::sum(float,float)", "integer::sum(int,int)"]


def test_free_call_sees_functions_and_templates():
    table = symbols_for(corpus_source("fig09_template"))
    cands = table.collect_candidates("display")
    assert [c.origin.kind for c in cands] == ["template", "template", "ordinary"]


def test_unknown_name():
    table = symbols_for("int f(int a);")
    with pytest.raises(SemanticError) as info:
        table.collect_candidates("g")
    assert info.value.code == "E004"


# dominance


@pytest.mark.parametrize(
    "r1, r2, expected",
    [
        ((E, E), (E, C), True),
        ((E, C), (C, E), False),
        ((C, E), (E, C), False),
        ((E, E), (C, E), True),
        ((E, E), (E, E), False),
        ((), (), False),
    ],
)
def test_better_than(r1, r2, expected):
    assert better_than(r1, r2) is expected


ranks = st.integers(0, 3).flatmap(
    lambda n: st.tuples(st.lists(st.sampled_from([E, C]), min_size=n, max_size=n),
                        st.lists(st.sampled_from([E, C]), min_size=n, max_size=n))
)


@given(ranks)
def test_dominance_is_asymmetric(pair):
    r1, r2 = pair
    assert not (better_than(r1, r2) and better_than(r2, r1))


# resolution


def test_display_int_is_ordinary_exact():
    table = symbols_for(corpus_source("fig09_template"))
    cand, trace = resolve_call("display", [INT], table.collect_candidates("display"))
    assert cand.origin.kind == "ordinary"
    assert trace.tier is Tier.ORDINARY_EXACT


def test_display_char_goes_to_template():
    table = symbols_for(corpus_source("fig09_template"))
    cand, trace = resolve_call("display", [CHAR], table.collect_candidates("display"))
    assert cand.origin.kind == "instantiation"
    assert cand.origin.bindings == (("S", CHAR),)
    assert trace.tier is Tier.TEMPLATE_EXACT
    ordinary = [e for e in trace.candidates if e.candidate.origin.kind == "ordinary"]
    assert ordinary[0].ranks == (C,)


def test_sum_exact_overload():
    table = symbols_for(corpus_source("fig02_simple"))
    cand, trace = resolve_call("sum", [INT, FLOAT], table.collect_candidates("sum"))
    assert str(cand.signature) == "sum(int,float)"
    assert trace.tier is Tier.ORDINARY_EXACT
    assert trace.selected_ranks == (E, E)


def test_sum_float_int_beats_int_int():
    table = symbols_for(corpus_source("fig02_simple"))
    by_sig = {str(c.signature): c for c in table.collect_candidates("sum")}
    entries = {
        str(e.candidate.signature): e.ranks
        for e in resolve_call("sum", [FLOAT, INT], list(by_sig.values()))[1].candidates
    }
    assert better_than(entries["sum(float,int)"], entries["sum(int,int)"])


def test_conversion_tier_picks_dominating_candidate():
    cands = [fn("f", INT, INT), fn("f", FLOAT, FLOAT)]
    cand, trace = resolve_call("f", [INT, CHAR], cands)
    assert cand is cands[0]
    assert trace.tier is Tier.CONVERSION_RANK
    assert trace.selected_ranks == (E, C)


def test_conversion_tier_ambiguity():
    cands = [fn("f", INT, FLOAT), fn("f", FLOAT, INT)]
    with pytest.raises(ResolutionError) as info:
        resolve_call("f", [CHAR, CHAR], cands)
    assert info.value.code == "E003"
    assert info.value.trace.tier is Tier.CONVERSION_RANK


def test_no_viable_candidate():
    cands = [fn("f", INT), fn("f", ClassRef("A"))]
    with pytest.raises(ResolutionError) as info:
        resolve_call("f", [INT, INT], cands)
    assert info.value.code == "E002"


def test_two_exact_candidates_across_scopes_are_ambiguous():
    a = Candidate(Signature("f", (INT,), INT), Origin("member", "Base"))
    b = Candidate(Signature("f", (INT,), FLOAT), Origin("member", "Derived"))
    with pytest.raises(ResolutionError) as info:
        resolve_call("f", [INT], [a, b])
    assert info.value.code == "E003"
    assert info.value.trace.tier is Tier.ORDINARY_EXACT


def test_two_deducible_templates_are_ambiguous():
    table = symbols_for("template <class S> void f(S a, S b){}\ntemplate <class S, class T> void f(S a, T b){}")
    with pytest.raises(ResolutionError) as info:
        resolve_call("f", [INT, INT], table.collect_candidates("f"))
    assert info.value.code == "E003"
    assert info.value.trace.tier is Tier.TEMPLATE_EXACT
    # only the two-variable template deduces for mixed arguments
    cand, trace = resolve_call("f", [INT, FLOAT], table.collect_candidates("f"))
    assert trace.tier is Tier.TEMPLATE_EXACT


def test_templates_are_ignored_by_the_conversion_tier():
    table = symbols_for("template <class S> void f(S a, S b){}\nvoid f(float a, float b){}")
    cand, trace = resolve_call("f", [INT, CHAR], table.collect_candidates("f"))
    assert cand.origin.kind == "ordinary"
    assert trace.tier is Tier.CONVERSION_RANK


def test_trace_render():
    cands = [fn("sum", INT, FLOAT)]
    from overc.errors import SourceSpan

    _, trace = resolve_call("sum", [INT, INT], cands, SourceSpan("x.mini", 3, 9))
    assert trace.render() == (
        "RESOLVE x.mini:3:9 sum(int,int) => sum(int,float) -> int tier=conversion-rank ranks=(0,1)"
    )


# properties

scalar = st.sampled_from(["int", "float", "char"])
param_lists = st.lists(scalar, max_size=3).map(tuple)


def outcome(names_list, args):
    cands = [fn("f", *[BY_NAME[n] for n in params]) for params in names_list]
    try:
        cand, trace = resolve_call("f", [BY_NAME[a] for a in args], cands)
    except ResolutionError as exc:
        return (exc.code, None, None)
    return ("ok", cands.index(cand), trace.tier)


@settings(max_examples=500)
@given(st.lists(param_lists, min_size=1, max_size=4), param_lists)
def test_resolution_matches_oracle(candidates, args):
    code, index, _ = outcome(candidates, args)
    assert (code, index) == oracle_resolve(candidates, args)


@settings(max_examples=300)
@given(st.lists(param_lists, min_size=1, max_size=4, unique=True), param_lists, st.randoms())
def test_declaration_order_independence(candidates, args, rnd):
    shuffled = list(candidates)
    rnd.shuffle(shuffled)
    code, index, tier = outcome(candidates, args)
    code2, index2, tier2 = outcome(shuffled, args)
    assert (code, tier) == (code2, tier2)
    if index is not None:
        assert candidates[index] == shuffled[index2]


@settings(max_examples=300)
@given(st.lists(param_lists, min_size=1, max_size=4), param_lists, st.booleans())
def test_irrelevant_candidates_change_nothing(candidates, args, by_arity):
    cands = [fn("f", *[BY_NAME[n] for n in params]) for params in candidates]
    if by_arity:
        extra = fn("f", *([INT] * (len(args) + 1)))
    else:
        extra = fn("f", *([ClassRef("Z")] * max(1, len(args))))
        if not args:
            extra = fn("f", INT)

    def run(cs):
        try:
            cand, trace = resolve_call("f", [BY_NAME[a] for a in args], cs)
            return cand, trace.tier
        except ResolutionError as exc:
            return exc.code, exc.trace.tier

    assert run(cands) == run(cands + [extra])


def test_tier_ordering_holds_in_traces():
    table = symbols_for(corpus_source("fig09_template"))
    rnd = random.Random(7)
    for _ in range(200):
        args = [rnd.choice([INT, FLOAT, CHAR]) for _ in range(rnd.randint(0, 3))]
        try:
            _, trace = resolve_call("display", args, table.collect_candidates("display"))
        except ResolutionError:
            continue
        ordinary_exact = [
            e for e in trace.candidates
            if e.candidate.origin.kind == "ordinary" and e.ranks and all(r == E for r in e.ranks)
        ]
        if trace.tier is Tier.TEMPLATE_EXACT:
            assert not ordinary_exact
        if trace.tier is Tier.CONVERSION_RANK:
            assert not ordinary_exact
            assert not any(e.candidate.origin.kind == "instantiation" for e in trace.candidates)
