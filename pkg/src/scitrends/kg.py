"""Scholarly knowledge-graph assembly, statistics, and triple export.

The graph joins corpus documents with classifier annotations, affiliation
types, and industrial sectors.  Export writes a Turtle-subset file using
``hasTopic``, ``hasAffiliationType`` (publications), ``hasAssigneeType``
(patents), and ``hasIndustrialSector``; ``kind`` and ``year`` triples are
also written so the reader can reconstruct the graph, but the returned
count covers content triples (topics, affiliation, sectors) only.
Unknown-affiliation documents get no affiliation triple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import quote, unquote

from .corpus import (
    AffiliationType,
    Corpus,
    DocKind,
    OrgRegistry,
    assign_sectors,
    classify_affiliation,
)
from .ontology import TopicId, TopicOntology


class KGError(ValueError):
    """Inconsistent graph inputs or malformed triple files."""


@dataclass(frozen=True)
class DocEntry:
    kind: DocKind
    year: int
    topics: frozenset[TopicId]
    affiliation: AffiliationType
    sectors: frozenset[str]


@dataclass(frozen=True)
class AidaGraph:
    docs: dict[str, DocEntry]
    ontology: TopicOntology

    def __len__(self) -> int:
        return len(self.docs)


def build_graph(
    corpus: Corpus,
    annotations,
    registry: OrgRegistry,
    ontology: TopicOntology,
) -> AidaGraph:
    """Merge topic annotations, affiliation typing, and sectors per document.

    Documents without an annotation get an empty topic set; an annotation
    naming an unknown document or topic is an error.
    """
    topics_by_doc: dict[str, frozenset[TopicId]] = {}
    for ann in annotations:
        if ann.doc_id not in corpus.by_id:
            raise KGError(f"annotation for unknown doc {ann.doc_id!r}")
        if ann.doc_id in topics_by_doc:
            raise KGError(f"duplicate annotation for doc {ann.doc_id!r}")
        missing = sorted(t for t in ann.union if t not in ontology)
        if missing:
            raise KGError(f"doc {ann.doc_id!r}: topics not in ontology: {missing}")
        topics_by_doc[ann.doc_id] = frozenset(ann.union)
    docs: dict[str, DocEntry] = {}
    for doc in corpus:
        docs[doc.doc_id] = DocEntry(
            kind=doc.kind,
            year=doc.year,
            topics=topics_by_doc.get(doc.doc_id, frozenset()),
            affiliation=classify_affiliation(doc, registry),
            sectors=assign_sectors(doc, registry),
        )
    return AidaGraph(docs, ontology)


@dataclass(frozen=True)
class KindStats:
    total: int
    with_registry: int  # docs whose orgs all resolved (any non-unknown type)
    academic: int
    industrial: int
    collaborative: int
    other_typed: int
    unknown: int


@dataclass(frozen=True)
class StatsReport:
    per_kind: dict[DocKind, KindStats]


def graph_stats(graph: AidaGraph) -> StatsReport:
    per_kind: dict[DocKind, KindStats] = {}
    for kind in DocKind:
        counts = {cat: 0 for cat in AffiliationType}
        total = 0
        for entry in graph.docs.values():
            if entry.kind is kind:
                total += 1
                counts[entry.affiliation] += 1
        unknown = counts[AffiliationType.UNKNOWN]
        per_kind[kind] = KindStats(
            total=total,
            with_registry=total - unknown,
            academic=counts[AffiliationType.ACADEMIC],
            industrial=counts[AffiliationType.INDUSTRIAL],
            collaborative=counts[AffiliationType.COLLABORATIVE],
            other_typed=counts[AffiliationType.OTHER_TYPED],
            unknown=unknown,
        )
    return StatsReport(per_kind)


def stats_to_json(report: StatsReport) -> dict:
    return {
        kind.value + "s": {
            "total": ks.total,
            "with_registry": ks.with_registry,
            "academic": ks.academic,
            "industrial": ks.industrial,
            "collaborative": ks.collaborative,
            "other_typed": ks.other_typed,
            "unknown": ks.unknown,
        }
        for kind, ks in report.per_kind.items()
    }


_STATS_ROWS = [
    ("Total", "total"),
    ("With registry", "with_registry"),
    ("Academia", "academic"),
    ("Industry", "industrial"),
    ("Collaborative", "collaborative"),
    ("Additional", "other_typed"),
    ("Unknown", "unknown"),
]


def render_stats(report: StatsReport) -> str:
    """Aligned text table, one column per document kind."""
    kinds = list(DocKind)
    headers = ["Category"] + [k.value.capitalize() + "s" for k in kinds]
    rows = [
        [label] + [str(getattr(report.per_kind[k], attr)) for k in kinds]
        for label, attr in _STATS_ROWS
    ]
    widths = [
        max(len(r[c]) for r in [headers] + rows) for c in range(len(headers))
    ]
    lines = []
    for r in [headers] + rows:
        cells = [r[0].ljust(widths[0])] + [
            r[c].rjust(widths[c]) for c in range(1, len(headers))
        ]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


KG_PREFIXES = {
    "kg": "http://example.org/scholkg/schema#",
    "doc": "http://example.org/scholkg/document/",
    "topic": "http://example.org/scholkg/topic/",
}


def _doc_term(doc_id: str) -> str:
    return "doc:" + quote(doc_id, safe="")


def _topic_term(topic: TopicId) -> str:
    return "topic:" + quote(topic, safe="")


def export_triples(graph: AidaGraph, path: str) -> int:
    """Write the graph as Turtle-subset triples, deterministically ordered by
    (doc id, predicate, object).  Returns the content-triple count."""
    lines: list[tuple[str, str, str]] = []  # (doc_id, predicate term, object term)
    content = 0
    for doc_id, entry in graph.docs.items():
        lines.append((doc_id, "kg:kind", f'"{entry.kind.value}"'))
        lines.append((doc_id, "kg:year", str(entry.year)))
        for topic in entry.topics:
            lines.append((doc_id, "kg:hasTopic", _topic_term(topic)))
            content += 1
        if entry.affiliation is not AffiliationType.UNKNOWN:
            pred = (
                "kg:hasAffiliationType"
                if entry.kind is DocKind.PUBLICATION
                else "kg:hasAssigneeType"
            )
            lines.append((doc_id, pred, f'"{entry.affiliation.value}"'))
            content += 1
        for sector in entry.sectors:
            lines.append((doc_id, "kg:hasIndustrialSector", f'"{sector}"'))
            content += 1
    lines.sort()
    with open(path, "w", encoding="utf-8") as fh:
        for prefix, iri in KG_PREFIXES.items():
            fh.write(f"@prefix {prefix}: <{iri}> .\n")
        for doc_id, pred, obj in lines:
            fh.write(f"{_doc_term(doc_id)} {pred} {obj} .\n")
    return content


_TRIPLE_LINE = re.compile(
    r"^(?P<s>\S+)\s+(?P<p>\S+)\s+(?P<o>\"[^\"]*\"|\S+)\s+\.$"
)


def read_triples(path: str, ontology: TopicOntology) -> AidaGraph:
    """Reader for export_triples output; inverse up to graph equality."""
    fields: dict[str, dict] = {}

    def doc_fields(term: str, lineno: int) -> dict:
        if not term.startswith("doc:"):
            raise KGError(f"line {lineno}: subject {term!r} is not a doc:")
        doc_id = unquote(term[len("doc:"):])
        return fields.setdefault(
            doc_id,
            {"kind": None, "year": None, "topics": set(), "affiliation": None,
             "sectors": set()},
        )

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("@prefix"):
                continue
            m = _TRIPLE_LINE.match(line)
            if m is None:
                raise KGError(f"line {lineno}: malformed triple {line!r}")
            subj, pred, obj = m.group("s", "p", "o")
            entry = doc_fields(subj, lineno)
            literal = obj[1:-1] if obj.startswith('"') else None
            if pred == "kg:kind":
                entry["kind"] = DocKind(literal)
            elif pred == "kg:year":
                entry["year"] = int(obj)
            elif pred == "kg:hasTopic":
                if not obj.startswith("topic:"):
                    raise KGError(f"line {lineno}: bad topic term {obj!r}")
                topic = unquote(obj[len("topic:"):])
                if topic not in ontology:
                    raise KGError(f"line {lineno}: unknown topic {topic!r}")
                entry["topics"].add(topic)
            elif pred in ("kg:hasAffiliationType", "kg:hasAssigneeType"):
                entry["affiliation"] = AffiliationType(literal)
            elif pred == "kg:hasIndustrialSector":
                entry["sectors"].add(literal)
            else:
                raise KGError(f"line {lineno}: unknown predicate {pred!r}")
    docs: dict[str, DocEntry] = {}
    for doc_id, f in fields.items():
        if f["kind"] is None or f["year"] is None:
            raise KGError(f"doc {doc_id!r}: missing kind or year triple")
        docs[doc_id] = DocEntry(
            kind=f["kind"],
            year=f["year"],
            topics=frozenset(f["topics"]),
            affiliation=f["affiliation"] or AffiliationType.UNKNOWN,
            sectors=frozenset(f["sectors"]),
        )
    return AidaGraph(docs, ontology)
