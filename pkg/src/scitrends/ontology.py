"""Topic ontology loading, equivalence resolution, and ancestor queries.

Two on-disk formats are supported:

* ``edge-csv``: UTF-8 CSV with header ``subject,relation,object`` and
  relation one of ``superTopicOf``, ``relatedEquivalent``, ``contributesTo``,
  ``sameAs``.  A ``superTopicOf`` row reads "subject has super-topic object"
  (subject is the child).  A row with empty relation and object declares a
  bare topic.  ``relevantEquivalent`` is accepted as an alias of
  ``relatedEquivalent``.
* ``turtle-subset``: one triple per line, ``<s> <p> <o> .``, full IRIs or
  prefixed names from the fixed prefix table below.  Here the hierarchy
  predicate follows the source schema's own reading: ``s superTopicOf o``
  means s is the super-area of o (subject is the parent), while
  ``skos:broaderGeneric`` points child -> parent.  Topic labels derive from
  the IRI local name (percent-decoded, underscores as spaces).

``contributesTo`` and ``sameAs`` rows are parsed and ignored in both formats;
triples with predicates outside the table are skipped.
"""

from __future__ import annotations

import csv
import re
import urllib.parse
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .text import normalize_label

TopicId = str

_CSO_SCHEMA = (
    "https://cso.kmi.open.ac.uk/schema/cso#",
    "http://cso.kmi.open.ac.uk/schema/cso#",
)
_OWL = "http://www.w3.org/2002/07/owl#"
_SKOS_2004 = "http://www.w3.org/2004/02/skos/core#"

#: Prefix table for the turtle subset; no other prefixes are accepted.
TURTLE_PREFIXES = {
    "cso": _CSO_SCHEMA[0],
    "owl": _OWL,
    "skos": _SKOS_2004,
}

# predicate IRI -> (relation, child_is_subject)
_PREDICATES: dict[str, tuple[str, bool]] = {}
for ns in _CSO_SCHEMA:
    _PREDICATES[ns + "superTopicOf"] = ("super", False)  # subject is parent
    _PREDICATES[ns + "relatedEquivalent"] = ("equiv", True)
    _PREDICATES[ns + "relevantEquivalent"] = ("equiv", True)
    _PREDICATES[ns + "contributesTo"] = ("ignore", True)
_PREDICATES[_SKOS_2004 + "broaderGeneric"] = ("super", True)  # subject is child
_PREDICATES[_OWL + "sameAs"] = ("external", True)

_CSV_RELATIONS = {
    "superTopicOf": "super",
    "relatedEquivalent": "equiv",
    "relevantEquivalent": "equiv",
    "contributesTo": "ignore",
    "sameAs": "external",
}


class OntologyError(ValueError):
    """Malformed ontology input."""


class OntologyCycleError(OntologyError):
    """The super-topic relation is cyclic; ``cycle`` names one offending loop."""

    def __init__(self, cycle: list[TopicId]):
        self.cycle = cycle
        super().__init__("cycle in super-topic hierarchy: " + " -> ".join(cycle + cycle[:1]))


@dataclass(frozen=True)
class TopicOntology:
    """Immutable topic ontology after equivalence canonicalisation.

    ``topics`` are canonical ids (the normalized label of each equivalence
    class representative).  Safe for unrestricted concurrent reads.
    """

    topics: frozenset[TopicId]
    labels: dict[TopicId, frozenset[str]]
    parents: dict[TopicId, frozenset[TopicId]]
    ancestors: dict[TopicId, frozenset[TopicId]]
    label_to_topic: dict[str, TopicId]

    @property
    def super_edges(self) -> frozenset[tuple[TopicId, TopicId]]:
        """All (child, parent) pairs."""
        return frozenset((c, p) for c, ps in self.parents.items() for p in ps)

    def __contains__(self, topic: TopicId) -> bool:
        return topic in self.topics


def canonical_topic(ontology: TopicOntology, raw_label: str) -> TopicId | None:
    """Canonical topic whose label set contains ``raw_label`` after normalisation."""
    return ontology.label_to_topic.get(normalize_label(raw_label))


def super_topics(ontology: TopicOntology, topic: TopicId, transitive: bool = False) -> frozenset[TopicId]:
    """Direct parents of ``topic``, or its full ancestor set if ``transitive``."""
    if topic not in ontology.topics:
        raise KeyError(f"unknown topic: {topic!r}")
    return ontology.ancestors[topic] if transitive else ontology.parents[topic]


def load_ontology(path: str | Path, format: str = "edge-csv") -> TopicOntology:
    """Load and validate a topic ontology from ``path``.

    Raises :class:`OntologyError` on malformed input or conflicting labels and
    :class:`OntologyCycleError` if the canonicalised hierarchy is not a DAG.
    """
    path = Path(path)
    if format == "edge-csv":
        nodes, labels, equiv_pairs, super_pairs = _parse_edge_csv(path)
    elif format == "turtle-subset":
        nodes, labels, equiv_pairs, super_pairs = _parse_turtle(path)
    else:
        raise OntologyError(f"unknown ontology format: {format!r}")
    return _assemble(nodes, labels, equiv_pairs, super_pairs)


def build_ontology(
    super_edges,
    equivalences=(),
    topics=(),
) -> TopicOntology:
    """Assemble an ontology from in-memory label pairs.

    ``super_edges`` holds (child, parent) pairs, ``equivalences`` holds
    (a, b) pairs canonicalised onto the earlier-seen member, ``topics``
    declares extra bare topics.  First-seen order runs topics, then edges,
    then equivalences.  Validation matches the file loaders.
    """
    nodes: list[str] = []
    seen: set[str] = set()
    labels: dict[str, set[str]] = {}

    def add(raw: str) -> str:
        label = normalize_label(raw)
        if not label:
            raise OntologyError(f"empty label from {raw!r}")
        if label not in seen:
            seen.add(label)
            nodes.append(label)
            labels[label] = {label}
        return label

    for t in topics:
        add(t)
    super_pairs = [(add(c), add(p)) for c, p in super_edges]
    equiv_pairs = [(add(a), add(b)) for a, b in equivalences]
    return _assemble(nodes, labels, equiv_pairs, super_pairs)


# ---------------------------------------------------------------------------
# parsing

def _parse_edge_csv(path: Path):
    nodes: list[str] = []  # node keys in first-seen order; key == normalized label
    seen: set[str] = set()
    labels: dict[str, set[str]] = {}
    equiv_pairs: list[tuple[str, str]] = []
    super_pairs: list[tuple[str, str]] = []  # (child, parent)

    def add_node(raw: str, lineno: int) -> str:
        label = normalize_label(raw)
        if not label:
            raise OntologyError(f"{path}:{lineno}: empty label")
        if label not in seen:
            seen.add(label)
            nodes.append(label)
            labels[label] = {label}
        return label

    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:3]] != ["subject", "relation", "object"]:
            raise OntologyError(f"{path}: expected header 'subject,relation,object'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 3:
                raise OntologyError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            raw_subj, raw_rel, raw_obj = (cell.strip() for cell in row[:3])
            if not raw_rel and not raw_obj:
                add_node(raw_subj, lineno)
                continue
            if raw_rel not in _CSV_RELATIONS:
                raise OntologyError(f"{path}:{lineno}: unknown relation {raw_rel!r}")
            relation = _CSV_RELATIONS[raw_rel]
            subj = add_node(raw_subj, lineno)
            if relation == "external":
                continue  # object is an external resource, not a topic
            obj = add_node(raw_obj, lineno)
            if relation == "equiv":
                equiv_pairs.append((subj, obj))
            elif relation == "super":
                super_pairs.append((subj, obj))  # subject has super-topic object
    return nodes, labels, equiv_pairs, super_pairs


_TURTLE_LINE = re.compile(
    r"^\s*(<[^<>\s]+>|[A-Za-z][\w-]*:[^\s<>]+)"
    r"\s+(<[^<>\s]+>|[A-Za-z][\w-]*:[^\s<>]+)"
    r"\s+(<[^<>\s]+>|[A-Za-z][\w-]*:[^\s<>]+)"
    r"\s*\.\s*$"
)


def _resolve_term(term: str, path: Path, lineno: int) -> str:
    if term.startswith("<"):
        return term[1:-1]
    prefix, _, local = term.partition(":")
    if prefix not in TURTLE_PREFIXES:
        raise OntologyError(f"{path}:{lineno}: unknown prefix {prefix!r}")
    return TURTLE_PREFIXES[prefix] + local


def _iri_label(iri: str, path: Path, lineno: int) -> str:
    local = re.split(r"[/#]", iri.rstrip("/"))[-1]
    label = normalize_label(urllib.parse.unquote(local))
    if not label:
        raise OntologyError(f"{path}:{lineno}: cannot derive a label from {iri!r}")
    return label


def _parse_turtle(path: Path):
    nodes: list[str] = []  # node keys are full IRIs, first-seen order
    seen: set[str] = set()
    labels: dict[str, set[str]] = {}
    equiv_pairs: list[tuple[str, str]] = []
    super_pairs: list[tuple[str, str]] = []

    def add_node(iri: str, lineno: int) -> str:
        if iri not in seen:
            seen.add(iri)
            nodes.append(iri)
            labels[iri] = {_iri_label(iri, path, lineno)}
        return iri

    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith(("#", "@prefix", "@base")):
                continue
            m = _TURTLE_LINE.match(stripped)
            if m is None:
                raise OntologyError(f"{path}:{lineno}: not a '<s> <p> <o> .' triple")
            subj = _resolve_term(m.group(1), path, lineno)
            pred = _resolve_term(m.group(2), path, lineno)
            obj = _resolve_term(m.group(3), path, lineno)
            if pred not in _PREDICATES:
                continue
            relation, child_is_subject = _PREDICATES[pred]
            add_node(subj, lineno)
            if relation == "external":
                continue
            add_node(obj, lineno)
            if relation == "equiv":
                equiv_pairs.append((subj, obj))
            elif relation == "super":
                child, parent = (subj, obj) if child_is_subject else (obj, subj)
                super_pairs.append((child, parent))
    return nodes, labels, equiv_pairs, super_pairs


# ---------------------------------------------------------------------------
# assembly

def _assemble(
    nodes: list[str],
    labels: dict[str, set[str]],
    equiv_pairs: list[tuple[str, str]],
    super_pairs: list[tuple[str, str]],
) -> TopicOntology:
    order = {key: i for i, key in enumerate(nodes)}
    uf_parent = {key: key for key in nodes}

    def find(key: str) -> str:
        root = key
        while uf_parent[root] != root:
            root = uf_parent[root]
        while uf_parent[key] != root:
            uf_parent[key], key = root, uf_parent[key]
        return root

    # The earliest-seen member of each class becomes its representative, so
    # the row "a,relatedEquivalent,b" canonicalises b onto a.
    for a, b in equiv_pairs:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        keep, drop = (ra, rb) if order[ra] <= order[rb] else (rb, ra)
        uf_parent[drop] = keep

    class_labels: dict[str, set[str]] = {}
    for key in nodes:
        class_labels.setdefault(find(key), set()).update(labels[key])

    # Canonical id = the representative's own label (keys are labels in
    # edge-csv; for turtle the representative IRI's derived label).
    canonical_ids = {root: next(iter(labels[root])) for root in class_labels}

    label_to_topic: dict[str, TopicId] = {}
    topic_labels: dict[TopicId, frozenset[str]] = {}
    for root, lbls in class_labels.items():
        topic = canonical_ids[root]
        for lbl in lbls:
            other = label_to_topic.get(lbl)
            if other is not None and other != topic:
                raise OntologyError(
                    f"label {lbl!r} maps to two distinct topics: {other!r} and {topic!r}"
                )
            label_to_topic[lbl] = topic
        topic_labels[topic] = frozenset(lbls)

    parents: dict[TopicId, set[TopicId]] = {t: set() for t in topic_labels}
    for child_key, parent_key in super_pairs:
        child = canonical_ids[find(child_key)]
        parent = canonical_ids[find(parent_key)]
        if child == parent:
            raise OntologyCycleError([child])
        parents[child].add(parent)

    _check_acyclic(parents)
    ancestors = _ancestor_closure(parents)
    return TopicOntology(
        topics=frozenset(topic_labels),
        labels=topic_labels,
        parents={t: frozenset(ps) for t, ps in parents.items()},
        ancestors=ancestors,
        label_to_topic=label_to_topic,
    )


def _check_acyclic(parents: dict[TopicId, set[TopicId]]) -> None:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {t: WHITE for t in parents}
    for start in parents:
        if colour[start] != WHITE:
            continue
        stack = [(start, iter(parents[start]))]
        colour[start] = GREY
        trail = [start]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if colour[nxt] == GREY:
                    raise OntologyCycleError(trail[trail.index(nxt):])
                if colour[nxt] == WHITE:
                    colour[nxt] = GREY
                    trail.append(nxt)
                    stack.append((nxt, iter(parents[nxt])))
                    advanced = True
                    break
            if not advanced:
                colour[node] = BLACK
                trail.pop()
                stack.pop()


def _ancestor_closure(parents: dict[TopicId, set[TopicId]]) -> dict[TopicId, frozenset[TopicId]]:
    closure: dict[TopicId, frozenset[TopicId]] = {}

    def resolve(topic: TopicId) -> frozenset[TopicId]:
        cached = closure.get(topic)
        if cached is not None:
            return cached
        acc: set[TopicId] = set()
        queue = deque(parents[topic])
        while queue:
            p = queue.popleft()
            if p in acc:
                continue
            acc.add(p)
            done = closure.get(p)
            if done is not None:
                acc |= done
            else:
                queue.extend(parents[p])
        result = frozenset(acc)
        closure[topic] = result
        return result

    for t in parents:
        resolve(t)
    return closure
