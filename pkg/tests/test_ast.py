import random

import pytest
from hypothesis import given, settings, strategies as st

from treequery.ast import (
    BadRepetition, MalformedAst, NodeCore, NodePattern, PathCore, Repetition,
    WILDCARD, ast_decode, ast_encode, ast_equal, renumber, validate,
)
from treequery.fixtures import PAPER_EXPRESSIONS, random_target
from treequery.model import AttributeSchema
from treequery.parser import parse

NUMERIC_SCHEMA = {
    "year": AttributeSchema(kind="numeric"),
    "citation": AttributeSchema(kind="numeric"),
    "authors": AttributeSchema(kind="categorical"),
    "topics": AttributeSchema(kind="categorical"),
}

TEST_SCHEMA = {
    "v": AttributeSchema(kind="numeric"),
    "tag": AttributeSchema(kind="categorical"),
    "kw": AttributeSchema(kind="categorical"),
}


def test_validate_wildcard_clean():
    target = parse(".")
    assert validate(target, {}) == []


def test_validate_kind_mismatch():
    target = parse('(topics in ["graph"])')
    schema = {"topics": AttributeSchema(kind="numeric")}
    diags = validate(target, schema)
    assert len(diags) == 1
    assert "categorical" in diags[0].message


def test_validate_unknown_attribute():
    diags = validate(parse("(nosuch>1)"), NUMERIC_SCHEMA)
    assert len(diags) == 1
    assert "schema" in diags[0].message


def test_validate_paper_composition_expression():
    target = parse(PAPER_EXPRESSIONS["influential_2019"])
    assert validate(target, NUMERIC_SCHEMA) == []


def test_validate_inherent_attributes_always_known():
    assert validate(parse("(depth=3, degree=&-1)"), {}) == []


def test_validate_ref_on_categorical_flagged():
    diags = validate(parse("(topics=&-1)"), NUMERIC_SCHEMA)
    assert any("numeric" in d.message for d in diags)


def test_validate_duplicate_elem_ids():
    pattern = NodePattern(kind=WILDCARD, elem_id="x")
    target = parse(". - exists <.>{0,}")
    from dataclasses import replace
    broken = replace(target, core=NodeCore(pattern=pattern),
                     ec=tuple(replace(c, path=replace(
                         c.path, steps=tuple(replace(s, node=replace(s.node, elem_id="x"))
                                             for s in c.path.steps)))
                              for c in target.ec))
    diags = validate(broken, {})
    assert any("duplicate" in d.message for d in diags)


def test_encode_decode_round_trip_fixture_expressions():
    for text in PAPER_EXPRESSIONS.values():
        target = parse(text)
        doc = ast_encode(target)
        again = ast_decode(doc)
        assert ast_equal(target, again)
        assert ast_encode(again) == doc  # encode(decode(d)) == d


def test_decode_bad_repetition():
    target = parse("(year=2019){2,}")
    doc = ast_encode(target)
    doc["core"]["path"]["steps"][0]["rep"] = {"min": 3, "max": 1}
    with pytest.raises(BadRepetition):
        ast_decode(doc)


def test_decode_rejects_unknown_fields():
    doc = ast_encode(parse("."))
    doc["extra"] = 1
    with pytest.raises(MalformedAst):
        ast_decode(doc)


def test_decode_rejects_unknown_quantifier():
    doc = ast_encode(parse(". - exists <.>{1,}"))
    doc["ec"][0]["quantifier"] = "some"
    with pytest.raises(MalformedAst):
        ast_decode(doc)


def test_decoded_author_path_shape():
    target = parse('(authors="Ben Shneiderman"){3,}')
    doc = ast_encode(target)
    again = ast_decode(doc)
    assert isinstance(again.core, PathCore)
    steps = again.core.path.steps
    assert len(steps) == 1
    assert steps[0].rep == Repetition(3, None)
    pred = steps[0].node.predicates[0]
    assert (pred.attribute, pred.op, pred.rhs) == ("authors", "eq", "Ben Shneiderman")


def test_ast_equal_reflexive_and_id_blind():
    target = parse('(year=2019)[<(citation>=200)>{3,}]')
    assert ast_equal(target, target)
    renamed = renumber(target, prefix="z")
    assert ast_equal(target, renamed)


def test_ast_equal_distinguishes_repetitions():
    a = parse("(v>1){2,5}")
    b = parse("(v>1){2,4}")
    assert not ast_equal(a, b)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_ast_equal_equivalence_relation(seed_a, seed_b):
    a = random_target(random.Random(seed_a))
    b = random_target(random.Random(seed_b))
    assert ast_equal(a, a)
    assert ast_equal(a, renumber(a, prefix="q"))
    assert ast_equal(a, b) == ast_equal(b, a)
    if ast_equal(a, b):
        c = renumber(b, prefix="r")
        assert ast_equal(a, c)


@given(st.integers(0, 10**6))
@settings(max_examples=80, deadline=None)
def test_random_ast_interchange_round_trip(seed):
    target = random_target(random.Random(seed))
    doc = ast_encode(target)
    again = ast_decode(doc)
    assert ast_equal(target, again)
    assert ast_encode(again) == doc


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_random_targets_validate_cleanly(seed):
    target = random_target(random.Random(seed))
    assert validate(target, TEST_SCHEMA) == []
