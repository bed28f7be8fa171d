"""Boolean query parsing and evaluation.

Random expressions are evaluated both by the engine and by a direct
recursive oracle over the same AST, then cross-checked.
"""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scitrends.queries import (
    And,
    Not,
    Or,
    Phrase,
    QueryParseError,
    Venue,
    YearRange,
    evaluate,
    parse_query,
)
from scitrends.text import tokenize

DOC = {
    "tokens": tokenize("deep learning for image segmentation"),
    "year": 2015,
    "venue": "alpha venue",
}


def run(query):
    return evaluate(parse_query(query), DOC["tokens"], DOC["year"], DOC["venue"])


def test_phrase_match():
    assert run('"deep learning"')
    assert not run('"shallow learning"')


def test_phrase_requires_adjacency():
    assert not run('"deep segmentation"')


def test_and_or_not():
    assert run('"deep learning" AND "segmentation"')
    assert not run('"deep learning" AND "graphs"')
    assert run('"graphs" OR "segmentation"')
    assert run('NOT "graphs"')
    assert not run('NOT "deep learning"')


def test_precedence_and_binds_tighter():
    # a OR b AND c reads as a OR (b AND c)
    assert run('"graphs" OR "deep" AND "learning"')
    assert not run('("graphs" OR "deep") AND "missing"')


def test_year_predicates():
    assert run("year:2015")
    assert not run("year:2016")
    assert run("year:2010-2020")
    assert run("year:2015-")
    assert run("year:-2015")
    assert not run("year:2016-")


def test_venue_predicate():
    assert run('venue:"alpha venue"')
    assert run('venue:"Alpha  VENUE"')
    assert not run('venue:"beta venue"')


def test_venue_none_never_matches():
    node = parse_query('venue:"alpha venue"')
    assert not evaluate(node, DOC["tokens"], DOC["year"], None)


def test_case_insensitive_operators():
    assert run('"deep" and "learning"')
    assert run('not "graphs"')


def test_parse_errors_carry_position():
    for bad in ['"unclosed', "AND", '"a" AND', '("a"', "bareword", ""]:
        with pytest.raises(QueryParseError):
            parse_query(bad)


def test_nested_parens():
    assert run('(("deep" AND "learning") OR "missing")')


atoms = st.sampled_from(
    [
        Phrase(("deep", "learning")),
        Phrase(("graphs",)),
        Phrase(("segmentation",)),
        YearRange(2010, 2020),
        YearRange(2016, None),
        Venue("alpha venue"),
        Venue("beta venue"),
    ]
)


def trees(leaf):
    return st.recursive(
        leaf,
        lambda inner: st.one_of(
            st.builds(Not, inner),
            st.builds(And, st.tuples(inner, inner)),
            st.builds(Or, st.tuples(inner, inner, inner)),
        ),
        max_leaves=12,
    )


def oracle(node, tokens, year, venue):
    text = " ".join(tokens)
    if isinstance(node, Phrase):
        return f" {' '.join(node.tokens)} " in f" {text} "
    if isinstance(node, YearRange):
        lo = node.lo if node.lo is not None else year
        hi = node.hi if node.hi is not None else year
        return lo <= year <= hi
    if isinstance(node, Venue):
        return venue is not None and node.name == venue
    if isinstance(node, Not):
        return not oracle(node.operand, tokens, year, venue)
    if isinstance(node, And):
        return all(oracle(op, tokens, year, venue) for op in node.operands)
    return any(oracle(op, tokens, year, venue) for op in node.operands)


@given(trees(atoms))
def test_evaluate_matches_oracle(node):
    got = evaluate(node, DOC["tokens"], DOC["year"], DOC["venue"])
    assert got == oracle(node, DOC["tokens"], DOC["year"], DOC["venue"])


@given(trees(atoms))
def test_excluded_middle(node):
    conj = And((node, Not(node)))
    assert not evaluate(conj, DOC["tokens"], DOC["year"], DOC["venue"])
    disj = Or((node, Not(node)))
    assert evaluate(disj, DOC["tokens"], DOC["year"], DOC["venue"])
