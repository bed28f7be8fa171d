"""Boolean inclusion-query engine over document metadata.

Query grammar (inclusion criteria as search strings)::

    expr   := or
    or     := and ( OR and )*
    and    := unary ( AND unary )*
    unary  := NOT unary | atom
    atom   := '(' expr ')' | '"phrase"' | year-pred | venue-pred

Phrases match the concatenated title+abstract+keywords of a document,
case-insensitively and on word boundaries ("web" never matches "webs").
``year:2009-2013`` (either bound may be omitted, ``year:2010`` is a single
year) and ``venue:"name"`` (case-insensitive, punctuation-insensitive exact
match) restrict on metadata.  Bare unquoted terms are a parse error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .text import contains_phrase, normalize_label, tokenize


class QueryParseError(ValueError):
    """Raised on malformed query strings; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


@dataclass(frozen=True)
class Phrase:
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class YearRange:
    lo: int | None
    hi: int | None


@dataclass(frozen=True)
class Venue:
    name: str


@dataclass(frozen=True)
class Not:
    operand: "Node"


@dataclass(frozen=True)
class And:
    operands: tuple["Node", ...]


@dataclass(frozen=True)
class Or:
    operands: tuple["Node", ...]


Node = Union[Phrase, YearRange, Venue, Not, And, Or]

_YEAR_SPEC = re.compile(r"^(\d{1,4})?(?:(-)(\d{1,4})?)?$")


@dataclass(frozen=True)
class _Token:
    kind: str  # and | or | not | lparen | rparen | phrase | year | venue
    value: object
    position: int


def _lex(query: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(query)
    while i < n:
        ch = query[i]
        if ch.isspace():
            i += 1
        elif ch == "(":
            tokens.append(_Token("lparen", None, i))
            i += 1
        elif ch == ")":
            tokens.append(_Token("rparen", None, i))
            i += 1
        elif ch == '"':
            end = query.find('"', i + 1)
            if end == -1:
                raise QueryParseError("unterminated phrase", i)
            tokens.append(_Token("phrase", query[i + 1 : end], i))
            i = end + 1
        else:
            m = re.match(r"[A-Za-z]+:?", query[i:])
            if m is None:
                raise QueryParseError(f"unexpected character {ch!r}", i)
            word = m.group(0)
            upper = word.upper()
            if upper in ("AND", "OR", "NOT"):
                tokens.append(_Token(upper.lower(), None, i))
                i += len(word)
            elif word.lower() == "year:":
                spec = re.match(r"[0-9-]*", query[i + len(word):]).group(0)
                ym = _YEAR_SPEC.match(spec)
                if ym is None or (ym.group(1) is None and ym.group(3) is None):
                    raise QueryParseError(f"bad year predicate {spec!r}", i)
                lo = int(ym.group(1)) if ym.group(1) else None
                hi = int(ym.group(3)) if ym.group(3) else (lo if ym.group(2) is None else None)
                tokens.append(_Token("year", YearRange(lo, hi), i))
                i += len(word) + len(spec)
            elif word.lower() == "venue:":
                j = i + len(word)
                if j >= n or query[j] != '"':
                    raise QueryParseError("venue: must be followed by a quoted name", i)
                end = query.find('"', j + 1)
                if end == -1:
                    raise QueryParseError("unterminated venue name", j)
                tokens.append(_Token("venue", Venue(query[j + 1 : end]), i))
                i = end + 1
            else:
                raise QueryParseError(f"bare term {word!r}; terms must be quoted", i)
    return tokens


class _Parser:
    def __init__(self, query: str):
        self.query = query
        self.tokens = _lex(query)
        self.pos = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise QueryParseError("unexpected end of query", len(self.query))
        self.pos += 1
        return tok

    def parse(self) -> Node:
        node = self.parse_or()
        trailing = self.peek()
        if trailing is not None:
            raise QueryParseError("unexpected trailing input", trailing.position)
        return node

    def parse_or(self) -> Node:
        parts = [self.parse_and()]
        while (tok := self.peek()) is not None and tok.kind == "or":
            self.take()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self) -> Node:
        parts = [self.parse_unary()]
        while (tok := self.peek()) is not None and tok.kind == "and":
            self.take()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_unary(self) -> Node:
        tok = self.peek()
        if tok is not None and tok.kind == "not":
            self.take()
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self) -> Node:
        tok = self.take()
        if tok.kind == "lparen":
            node = self.parse_or()
            closing = self.take()
            if closing.kind != "rparen":
                raise QueryParseError("expected ')'", closing.position)
            return node
        if tok.kind == "phrase":
            return Phrase(tuple(tokenize(tok.value)))
        if tok.kind in ("year", "venue"):
            return tok.value
        raise QueryParseError(f"unexpected {tok.kind!r}", tok.position)


def parse_query(query: str) -> Node:
    """Parse ``query`` into an AST; raises :class:`QueryParseError`."""
    return _Parser(query).parse()


def evaluate(node: Node, text_tokens: list[str], year: int, venue: str | None) -> bool:
    """Evaluate a parsed query against one document's searchable fields."""
    if isinstance(node, Phrase):
        return contains_phrase(text_tokens, node.tokens)
    if isinstance(node, YearRange):
        return (node.lo is None or year >= node.lo) and (node.hi is None or year <= node.hi)
    if isinstance(node, Venue):
        return venue is not None and normalize_label(venue) == normalize_label(node.name)
    if isinstance(node, Not):
        return not evaluate(node.operand, text_tokens, year, venue)
    if isinstance(node, And):
        return all(evaluate(op, text_tokens, year, venue) for op in node.operands)
    if isinstance(node, Or):
        return any(evaluate(op, text_tokens, year, venue) for op in node.operands)
    raise TypeError(f"not a query node: {node!r}")
