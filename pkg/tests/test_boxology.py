import random

import pytest
from hypothesis import given, strategies as st

from oracles import ast_depth, random_ast
from swemls.boxology import Artifact, Flow, Group, NotationError, PatternAst, Processor, parse_pattern, render_notation

T3 = "[{sym -> ML -> data / data} -> ML -> sym]"
sym, data, ML, KR = Artifact("sym"), Artifact("data"), Processor("ML"), Processor("KR")


def test_t3_structure():
    ast = parse_pattern(T3)
    expected = PatternAst(Flow((Group((Flow((sym, ML, data)), Flow((data,)))), ML, sym)))
    assert ast == expected


def test_minimal_chain():
    assert parse_pattern("[sym -> ML -> sym]") == PatternAst(Flow((sym, ML, sym)))


def test_whitespace_insignificant():
    assert parse_pattern("  [ {sym->ML->data/data}\n->ML ->sym ]  ") == parse_pattern(T3)


def test_unbalanced_brace_offset():
    with pytest.raises(NotationError) as info:
        parse_pattern("[{sym / data]")
    assert info.value.offset == 12
    assert "unbalanced" in str(info.value)


@pytest.mark.parametrize("text,offset", [
    ("[sym -> NN]", 8),
    ("[sym -> ]", 8),
    ("[{sym / }]", 8),
    ("[{sym}]", 1),  # points at the group that lacks a second branch
    ("sym -> ML", 0),
    ("[sym -> ML", 10),
    ("[sym] extra", 6),
    ("", 0),
])
def test_errors_carry_offsets(text, offset):
    with pytest.raises(NotationError) as info:
        parse_pattern(text)
    assert info.value.offset == offset


def test_render_canonical():
    assert render_notation(parse_pattern(T3)) == T3
    assert render_notation(PatternAst(Flow((sym,)))) == "[sym]"


def test_ast_invariants_enforced():
    with pytest.raises(ValueError):
        Group((Flow((sym,)),))
    with pytest.raises(ValueError):
        Flow(())
    with pytest.raises(ValueError):
        Artifact("text")
    with pytest.raises(ValueError):
        Processor("DL")


def test_nested_groups_allowed():
    text = "[{{sym / data} -> ML -> data / KR -> sym} -> ML -> sym]"
    ast = parse_pattern(text)
    assert ast_depth(ast) == 3
    assert render_notation(ast) == text


def test_round_trip_random_asts():
    rng = random.Random(7)
    for _ in range(200):
        ast = random_ast(rng, depth=3)
        assert ast_depth(ast) <= 3
        assert parse_pattern(render_notation(ast)) == ast


@given(st.integers(min_value=0, max_value=2**32))
def test_render_of_parse_is_idempotent(seed):
    text = render_notation(random_ast(random.Random(seed)))
    messy = text.replace(" ", "").replace("->", " ->\n ")
    once = render_notation(parse_pattern(messy))
    assert once == text
    assert render_notation(parse_pattern(once)) == once


@given(st.text(alphabet="[]{}/->symdatMLKR \tx", max_size=30))
def test_fuzz_never_crashes(text):
    try:
        ast = parse_pattern(text)
    except NotationError as exc:
        assert 0 <= exc.offset <= len(text)
    else:
        assert parse_pattern(render_notation(ast)) == ast


@given(st.text(max_size=30))
def test_fuzz_arbitrary_text(text):
    try:
        parse_pattern(text)
    except NotationError as exc:
        assert 0 <= exc.offset <= len(text)
