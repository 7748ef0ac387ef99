import random

import pytest

from treequery.ast import (
    EXISTS, NodeCore, PathCore, Repetition, SubtreeCore, WILDCARD, ast_equal,
)
from treequery.fixtures import (
    COVERAGE_EXPRESSIONS, PAPER_EXPRESSIONS, random_target,
)
from treequery.parser import (
    DanglingEC, QuerySyntaxError, RepetitionError, format, parse,
)

ALL_FIXTURE_EXPRESSIONS = list(PAPER_EXPRESSIONS.values()) + list(COVERAGE_EXPRESSIONS.values())


def test_author_chain_expression():
    target = parse('(authors="Ben Shneiderman"){3,}')
    assert isinstance(target.core, PathCore)
    steps = target.core.path.steps
    assert len(steps) == 1
    assert steps[0].rep == Repetition(3, None)
    pred = steps[0].node.predicates[0]
    assert pred.attribute == "authors"
    assert pred.op == "eq"
    assert pred.rhs == "Ben Shneiderman"


def test_author_star_expression():
    target = parse('(authors="Ben Shneiderman")[<(citation>=200)>{3,}]')
    assert isinstance(target.core, SubtreeCore)
    assert len(target.core.branch.arms) == 1
    arm = target.core.branch.arms[0]
    assert arm.rep == Repetition(3, None)
    pred = arm.path.steps[0].node.predicates[0]
    assert (pred.attribute, pred.op, pred.rhs) == ("citation", "ge", 200.0)


def test_wildcard_target():
    target = parse(".")
    assert isinstance(target.core, NodeCore)
    assert target.core.pattern.kind == WILDCARD


def test_composition_expression():
    target = parse('(year=2019)[<(.){0,}>{0,}] - exists <(citation>=200)>{10,}')
    assert isinstance(target.core, SubtreeCore)
    assert len(target.ec) == 1
    clause = target.ec[0]
    assert clause.quantifier == EXISTS
    assert clause.occurrences == Repetition(10, None)


def test_level_references():
    target = parse("(degree=&-1, size=#1)")
    preds = target.core.pattern.predicates
    assert preds[0].rhs.offset == -1
    assert preds[1].rhs.level == 1


def test_alternation_and_negation():
    target = parse('!(tag="a")|$')
    atoms = list(target.core.pattern.chain())
    assert len(atoms) == 2
    assert atoms[0].negated and atoms[0].kind == "custom"
    assert atoms[1].kind == "leaf" and not atoms[1].negated


def test_repetition_forms():
    assert parse("(v>1){2}").core.path.steps[0].rep == Repetition(2, 2)
    assert parse("(v>1){2,}").core.path.steps[0].rep == Repetition(2, None)
    assert parse("(v>1){,5}").core.path.steps[0].rep == Repetition(0, 5)
    assert parse("(v>1){2,5}").core.path.steps[0].rep == Repetition(2, 5)


def test_default_repetition_not_printed():
    target = parse("(v>1)/(v>2)")
    assert format(target) == "(v>1)/(v>2)"


def test_format_parse_fixpoint_on_fixtures():
    for text in ALL_FIXTURE_EXPRESSIONS:
        target = parse(text)
        canonical = format(target)
        assert ast_equal(parse(canonical), target)
        assert format(parse(canonical)) == canonical


def test_round_trip_200_random_asts():
    rng = random.Random(1234)
    for _ in range(200):
        target = random_target(rng)
        text = format(target)
        reparsed = parse(text)
        assert ast_equal(reparsed, target), text
        assert format(reparsed) == text


def test_syntax_error_has_span_within_input():
    for bad in ["((", "(authors=", "(a>1", "[<.>]", "a", "(v>1)//(v>2)", "(v in 3)",
                "(v>1)/", ". - exists .", "{2}", '("x"=1)', "!"]:
        with pytest.raises(QuerySyntaxError) as err:
            parse(bad)
        span = err.value.span
        assert 0 <= span.start <= span.end <= len(bad)


def test_repetition_error():
    with pytest.raises(RepetitionError):
        parse("(v>1){5,2}")
    with pytest.raises(RepetitionError):
        parse("(v>1){}")


def test_dangling_ec():
    with pytest.raises(DanglingEC):
        parse("- exists <.>{1,}")


def test_branch_after_multi_step_path_rejected():
    with pytest.raises(QuerySyntaxError):
        parse("(a>1)/(b>2)[<.>{1,}]")


def test_repetition_on_subtree_root_rejected():
    with pytest.raises(QuerySyntaxError):
        parse("(a>1){2}[<.>{1,}]")


def test_anchor_positions_enforced():
    with pytest.raises(QuerySyntaxError):
        parse("(v>1)/^")
    with pytest.raises(QuerySyntaxError):
        parse("$/(v>1)")
    parse("^/(v>1)/$")  # both anchors in legal spots


def test_parser_total_on_fuzz_sample():
    rng = random.Random(77)
    alphabet = '()[]<>{}|!/-.^$&#=," aein01'
    for _ in range(2000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        try:
            parse(text)
        except QuerySyntaxError:
            pass


def test_string_escapes():
    target = parse('(authors="a\\"b\\\\c\\n")')
    assert target.core.pattern.predicates[0].rhs == 'a"b\\c\n'
    assert ast_equal(parse(format(target)), target)


def test_number_forms():
    assert parse("(v>1.5)").core.pattern.predicates[0].rhs == 1.5
    assert parse("(v>-2)").core.pattern.predicates[0].rhs == -2.0
    assert parse("(v>1e3)").core.pattern.predicates[0].rhs == 1000.0
