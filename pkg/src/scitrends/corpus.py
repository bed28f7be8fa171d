"""Document corpus ingestion, affiliation typing, and boolean filtering.

Documents arrive as JSONL (one object per line) with fields
``id, kind, title, abstract, keywords[], year, venue?, org_ids[]``.
The organisation registry is an offline CSV ``org_id,org_type,sectors``
(sectors ``|``-separated) whose sector labels are drawn from a two-level
taxonomy CSV ``sector,parent_sector``.

A document's affiliation type is derived from its resolvable organisations:
academic when every org is educational, industrial when every org is a
company, collaborative when both kinds appear, other_typed when all orgs
resolve but none of those rules fire (e.g. government-only), and unknown
when the document has no orgs or any org cannot be resolved.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Union

from .queries import Node, evaluate, parse_query
from .text import document_text, tokenize


class CorpusError(ValueError):
    """Malformed corpus, registry, or taxonomy input."""


class DocKind(Enum):
    PUBLICATION = "publication"
    PATENT = "patent"


class OrgType(Enum):
    EDUCATION = "education"
    COMPANY = "company"
    GOVERNMENT = "government"
    OTHER = "other"


class AffiliationType(Enum):
    ACADEMIC = "academic"
    INDUSTRIAL = "industrial"
    COLLABORATIVE = "collaborative"
    OTHER_TYPED = "other_typed"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Document:
    doc_id: str
    kind: DocKind
    title: str
    year: int
    abstract: str = ""
    keywords: tuple[str, ...] = ()
    venue: str | None = None
    org_ids: tuple[str, ...] = ()  # deduplicated, first occurrence kept

    def __post_init__(self):
        deduped = _dedupe(self.org_ids)
        if deduped != self.org_ids:
            object.__setattr__(self, "org_ids", deduped)

    def search_text(self) -> str:
        return document_text(self.title, self.abstract, self.keywords)


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    by_id: dict[str, Document] = field(repr=False)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @staticmethod
    def from_documents(documents: Iterable[Document]) -> "Corpus":
        docs = tuple(documents)
        by_id: dict[str, Document] = {}
        for doc in docs:
            if doc.doc_id in by_id:
                raise CorpusError(f"duplicate doc_id {doc.doc_id!r}")
            by_id[doc.doc_id] = doc
        return Corpus(docs, by_id)


@dataclass(frozen=True)
class OrgRecord:
    org_type: OrgType
    sectors: frozenset[str]


@dataclass(frozen=True)
class OrgRegistry:
    entries: dict[str, OrgRecord]

    def resolve(self, org_id: str) -> OrgRecord | None:
        return self.entries.get(org_id)


@dataclass(frozen=True)
class SectorTaxonomy:
    """Two-level sector scheme: leaf sector -> parent sector."""

    parent_of: dict[str, str]

    @property
    def sectors(self) -> frozenset[str]:
        return frozenset(self.parent_of) | frozenset(
            p for p in self.parent_of.values() if p
        )

    def __contains__(self, sector: str) -> bool:
        return sector in self.sectors


def _dedupe(items: Iterable[str]) -> tuple[str, ...]:
    seen: dict[str, None] = {}
    for item in items:
        seen.setdefault(item, None)
    return tuple(seen)


_ALLOWED_KEYS = {"id", "kind", "title", "abstract", "keywords", "year", "venue", "org_ids"}


def _parse_document(obj: object, lineno: int) -> Document:
    def fail(msg: str):
        raise CorpusError(f"line {lineno}: {msg}")

    if not isinstance(obj, dict):
        fail("expected a JSON object")
    unknown = set(obj) - _ALLOWED_KEYS
    if unknown:
        fail(f"unknown fields {sorted(unknown)}")
    for key in ("id", "kind", "title", "year"):
        if key not in obj:
            fail(f"missing required field {key!r}")
    if not isinstance(obj["id"], str) or not obj["id"]:
        fail("id must be a non-empty string")
    try:
        kind = DocKind(obj["kind"])
    except ValueError:
        fail(f"kind must be 'publication' or 'patent', got {obj['kind']!r}")
    if not isinstance(obj["title"], str):
        fail("title must be a string")
    year = obj["year"]
    if not isinstance(year, int) or isinstance(year, bool) or not 1000 <= year <= 3000:
        fail(f"year must be an integer in [1000, 3000], got {year!r}")
    abstract = obj.get("abstract", "")
    if not isinstance(abstract, str):
        fail("abstract must be a string")
    keywords = obj.get("keywords", [])
    if not isinstance(keywords, list) or any(not isinstance(k, str) for k in keywords):
        fail("keywords must be a list of strings")
    venue = obj.get("venue")
    if venue is not None and not isinstance(venue, str):
        fail("venue must be a string or absent")
    org_ids = obj.get("org_ids", [])
    if not isinstance(org_ids, list) or any(not isinstance(o, str) for o in org_ids):
        fail("org_ids must be a list of strings")
    return Document(
        doc_id=obj["id"],
        kind=kind,
        title=obj["title"],
        year=year,
        abstract=abstract,
        keywords=tuple(keywords),
        venue=venue,
        org_ids=_dedupe(org_ids),
    )


def load_corpus(path: str) -> Corpus:
    """Read a JSONL corpus; rejects malformed lines and duplicate ids."""
    documents: list[Document] = []
    ids: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
            doc = _parse_document(obj, lineno)
            if doc.doc_id in ids:
                raise CorpusError(f"line {lineno}: duplicate doc_id {doc.doc_id!r}")
            ids.add(doc.doc_id)
            documents.append(doc)
    return Corpus(tuple(documents), {d.doc_id: d for d in documents})


def write_corpus(path: str, corpus: Corpus) -> None:
    """JSONL emitter; inverse of load_corpus."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            obj: dict = {
                "id": doc.doc_id,
                "kind": doc.kind.value,
                "title": doc.title,
                "abstract": doc.abstract,
                "keywords": list(doc.keywords),
                "year": doc.year,
                "org_ids": list(doc.org_ids),
            }
            if doc.venue is not None:
                obj["venue"] = doc.venue
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_taxonomy(path: str) -> SectorTaxonomy:
    """Read the two-level sector taxonomy CSV ``sector,parent_sector``."""
    parent_of: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["sector", "parent_sector"]:
            raise CorpusError(f"bad taxonomy header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise CorpusError(f"line {lineno}: expected 2 columns, got {len(row)}")
            sector, parent = row[0].strip(), row[1].strip()
            if not sector:
                raise CorpusError(f"line {lineno}: empty sector label")
            if sector in parent_of:
                raise CorpusError(f"line {lineno}: duplicate sector {sector!r}")
            parent_of[sector] = parent
    return SectorTaxonomy(parent_of)


def load_registry(path: str, taxonomy: SectorTaxonomy | None = None) -> OrgRegistry:
    """Read the organisation registry CSV ``org_id,org_type,sectors``.

    Sector labels are validated against ``taxonomy`` when one is given.
    """
    entries: dict[str, OrgRecord] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["org_id", "org_type", "sectors"]:
            raise CorpusError(f"bad registry header {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise CorpusError(f"line {lineno}: expected 3 columns, got {len(row)}")
            org_id, type_str, sector_str = (cell.strip() for cell in row)
            if not org_id:
                raise CorpusError(f"line {lineno}: empty org_id")
            if org_id in entries:
                raise CorpusError(f"line {lineno}: duplicate org_id {org_id!r}")
            try:
                org_type = OrgType(type_str)
            except ValueError:
                raise CorpusError(
                    f"line {lineno}: unknown org_type {type_str!r}"
                ) from None
            sectors = frozenset(s.strip() for s in sector_str.split("|") if s.strip())
            if taxonomy is not None:
                bad = sorted(s for s in sectors if s not in taxonomy)
                if bad:
                    raise CorpusError(f"line {lineno}: sectors not in taxonomy: {bad}")
            entries[org_id] = OrgRecord(org_type, sectors)
    return OrgRegistry(entries)


def classify_affiliation(doc: Document, registry: OrgRegistry) -> AffiliationType:
    """Type a document from its organisations; order of org_ids is irrelevant."""
    if not doc.org_ids:
        return AffiliationType.UNKNOWN
    records = [registry.resolve(org_id) for org_id in set(doc.org_ids)]
    if any(rec is None for rec in records):
        return AffiliationType.UNKNOWN
    types = {rec.org_type for rec in records}
    if types == {OrgType.EDUCATION}:
        return AffiliationType.ACADEMIC
    if types == {OrgType.COMPANY}:
        return AffiliationType.INDUSTRIAL
    if OrgType.EDUCATION in types and OrgType.COMPANY in types:
        return AffiliationType.COLLABORATIVE
    return AffiliationType.OTHER_TYPED


def assign_sectors(doc: Document, registry: OrgRegistry) -> frozenset[str]:
    """Union of sectors over the document's resolvable company-type orgs."""
    sectors: set[str] = set()
    for org_id in doc.org_ids:
        rec = registry.resolve(org_id)
        if rec is not None and rec.org_type is OrgType.COMPANY:
            sectors |= rec.sectors
    return frozenset(sectors)


def filter_corpus(corpus: Corpus, query: Union[str, Node]) -> Corpus:
    """Keep documents satisfying the boolean query; original order preserved."""
    node = parse_query(query) if isinstance(query, str) else query
    kept = tuple(
        doc
        for doc in corpus.documents
        if evaluate(node, tokenize(doc.search_text()), doc.year, doc.venue)
    )
    return Corpus(kept, {d.doc_id: d for d in kept})
