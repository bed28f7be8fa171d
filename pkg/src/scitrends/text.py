"""Shared text normalisation, tokenisation, and n-gram helpers.

Every component that matches free text against controlled labels (topic
matching, boolean queries, technology mentions) goes through the same
normalisation so that "Object-Oriented  Programming", "object_oriented
programming" and "object oriented programming" are the same string.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Sequence

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Small built-in English stopword list used to cut candidate chunks for the
# embedding-based stage.  Callers can supply their own list instead.
DEFAULT_STOPWORDS = frozenset(
    """
    a about above after again all also am an and any are as at be because been
    before being below between both but by can did do does doing down during
    each few for from further had has have having he her here hers him his how
    i if in into is it its itself just me more most my no nor not now of off
    on once only or other our ours out over own same she so some such than
    that the their theirs them then there these they this those through to too
    under until up very was we were what when where which while who whom why
    will with you your yours
    """.split()
)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric run."""
    return _TOKEN_RE.findall(text.lower())


def normalize_label(raw: str) -> str:
    """Canonical form of a label: lowercased tokens joined by single spaces.

    Hyphens, underscores, and any other punctuation act as separators, and
    internal whitespace collapses, so all surface variants of a label
    normalise to the same string.
    """
    return " ".join(tokenize(raw))


def ngrams(tokens: Sequence[str], max_n: int = 3) -> Iterator[str]:
    """Yield every 1..max_n-gram of ``tokens`` as a space-joined string."""
    n_tokens = len(tokens)
    for n in range(1, max_n + 1):
        for i in range(n_tokens - n + 1):
            yield " ".join(tokens[i : i + n])


def contains_phrase(text_tokens: Sequence[str], phrase_tokens: Sequence[str]) -> bool:
    """True if ``phrase_tokens`` occurs as a consecutive run in ``text_tokens``.

    This is the word-boundary substring semantics used by the query engine:
    "web" matches the token "web" but never "webs".
    """
    k = len(phrase_tokens)
    if k == 0:
        return True
    if k > len(text_tokens):
        return False
    first = phrase_tokens[0]
    phrase = list(phrase_tokens)
    for i in range(len(text_tokens) - k + 1):
        if text_tokens[i] == first and text_tokens[i : i + k] == phrase:
            return True
    return False


def document_text(title: str, abstract: str, keywords: Iterable[str]) -> str:
    """Concatenated searchable text of a document."""
    return " ".join([title, abstract, *keywords])
