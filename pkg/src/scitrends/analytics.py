"""Trend analytics over the knowledge graph: per-topic four-stream time
series (RA/RI/PA/PI), academia-industry and papers-patents indexes,
emergence years, cross-stream lag statistics, and growing-topic rankings.

RA/RI are papers from academia/industry, PA/PI patents from
academia/industry.  Collaborative documents count in both the academia and
industry streams by default (``collaborative_in_both=False`` excludes them);
unknown and other-typed documents never enter the streams.  Index
denominators use all documents of the topic, whatever their type.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

from .corpus import AffiliationType, DocKind
from .kg import AidaGraph
from .ontology import TopicId

STREAMS = ("RA", "RI", "PA", "PI")


class AnalyticsError(ValueError):
    """Unknown topics or invalid year windows."""


@dataclass(frozen=True)
class TopicTimeSeries:
    topic: TopicId
    y0: int
    y1: int
    ra: tuple[int, ...]
    ri: tuple[int, ...]
    pa: tuple[int, ...]
    pi: tuple[int, ...]

    @property
    def years(self) -> range:
        return range(self.y0, self.y1 + 1)

    def stream(self, name: str) -> tuple[int, ...]:
        return {"RA": self.ra, "RI": self.ri, "PA": self.pa, "PI": self.pi}[name]


def _in_academia(aff: AffiliationType, collaborative_in_both: bool) -> bool:
    return aff is AffiliationType.ACADEMIC or (
        collaborative_in_both and aff is AffiliationType.COLLABORATIVE
    )


def _in_industry(aff: AffiliationType, collaborative_in_both: bool) -> bool:
    return aff is AffiliationType.INDUSTRIAL or (
        collaborative_in_both and aff is AffiliationType.COLLABORATIVE
    )


def topic_time_series(
    graph: AidaGraph,
    topic: TopicId,
    y0: int,
    y1: int,
    collaborative_in_both: bool = True,
) -> TopicTimeSeries:
    """Yearly RA/RI/PA/PI counts for one topic over [y0, y1]."""
    if topic not in graph.ontology:
        raise AnalyticsError(f"unknown topic {topic!r}")
    if y0 > y1:
        raise AnalyticsError(f"invalid year range [{y0}, {y1}]")
    n = y1 - y0 + 1
    ra, ri, pa, pi = [0] * n, [0] * n, [0] * n, [0] * n
    for entry in graph.docs.values():
        if topic not in entry.topics or not y0 <= entry.year <= y1:
            continue
        i = entry.year - y0
        academia = _in_academia(entry.affiliation, collaborative_in_both)
        industry = _in_industry(entry.affiliation, collaborative_in_both)
        if entry.kind is DocKind.PUBLICATION:
            ra[i] += academia
            ri[i] += industry
        else:
            pa[i] += academia
            pi[i] += industry
    return TopicTimeSeries(topic, y0, y1, tuple(ra), tuple(ri), tuple(pa), tuple(pi))


def _topic_counts(graph: AidaGraph, topic: TopicId) -> tuple[int, int, int, int, int]:
    """(total, academia, industry, papers, patents) for one topic."""
    total = academia = industry = papers = patents = 0
    for entry in graph.docs.values():
        if topic not in entry.topics:
            continue
        total += 1
        academia += _in_academia(entry.affiliation, True)
        industry += _in_industry(entry.affiliation, True)
        papers += entry.kind is DocKind.PUBLICATION
        patents += entry.kind is DocKind.PATENT
    return total, academia, industry, papers, patents


def academia_industry_index(graph: AidaGraph, topic: TopicId) -> float:
    """(academia - industry) / all documents of the topic; positive means
    predominantly academic.  Collaborative documents cancel out."""
    if topic not in graph.ontology:
        raise AnalyticsError(f"unknown topic {topic!r}")
    total, academia, industry, _, _ = _topic_counts(graph, topic)
    if total == 0:
        raise AnalyticsError(f"topic {topic!r} has no documents")
    return (academia - industry) / total


def papers_patents_index(graph: AidaGraph, topic: TopicId) -> float:
    """(papers - patents) / all documents of the topic."""
    if topic not in graph.ontology:
        raise AnalyticsError(f"unknown topic {topic!r}")
    total, _, _, papers, patents = _topic_counts(graph, topic)
    if total == 0:
        raise AnalyticsError(f"topic {topic!r} has no documents")
    return (papers - patents) / total


def emergence_year(counts, start_year: int, threshold: int = 10) -> int | None:
    """First year the cumulative count reaches the threshold; None if never."""
    if threshold < 1:
        raise AnalyticsError(f"threshold must be >= 1, got {threshold}")
    cumulative = 0
    for offset, count in enumerate(counts):
        cumulative += count
        if cumulative >= threshold:
            return start_year + offset
    return None


@dataclass(frozen=True)
class PairLag:
    count: int
    mean: float
    std: float  # population standard deviation


@dataclass(frozen=True)
class LagReport:
    emerged_topics: int
    first_emergence_share: dict[str, float]
    pairwise: dict[tuple[str, str], PairLag]


def lag_report(
    graph: AidaGraph,
    threshold: int = 10,
    collaborative_in_both: bool = True,
) -> LagReport:
    """Per-stream emergence comparison across all topics in the graph.

    First-emergence ties go to the earlier stream in the fixed priority
    RA > RI > PA > PI.  Pairwise lag (s1, s2) averages emergence(s2) -
    emergence(s1) over topics emerged in both streams.
    """
    years = [entry.year for entry in graph.docs.values()]
    topics = sorted({t for entry in graph.docs.values() for t in entry.topics})
    if not years or not topics:
        return LagReport(0, {s: 0.0 for s in STREAMS}, {})
    y0, y1 = min(years), max(years)
    first_counts = {s: 0 for s in STREAMS}
    lags: dict[tuple[str, str], list[int]] = {
        (a, b): [] for a in STREAMS for b in STREAMS if a != b
    }
    emerged_topics = 0
    for topic in topics:
        series = topic_time_series(graph, topic, y0, y1, collaborative_in_both)
        emerged = {
            s: e
            for s in STREAMS
            if (e := emergence_year(series.stream(s), y0, threshold)) is not None
        }
        if not emerged:
            continue
        emerged_topics += 1
        winner = min(emerged, key=lambda s: (emerged[s], STREAMS.index(s)))
        first_counts[winner] += 1
        for s1 in STREAMS:
            for s2 in STREAMS:
                if s1 != s2 and s1 in emerged and s2 in emerged:
                    lags[(s1, s2)].append(emerged[s2] - emerged[s1])
    shares = {
        s: (first_counts[s] / emerged_topics if emerged_topics else 0.0)
        for s in STREAMS
    }
    pairwise = {}
    for pair, values in lags.items():
        if values:
            mean = sum(values) / len(values)
            std = math.sqrt(sum((v - mean) ** 2 for v in values) / len(values))
            pairwise[pair] = PairLag(len(values), mean, std)
    return LagReport(emerged_topics, shares, pairwise)


def lag_report_to_json(report: LagReport) -> dict:
    return {
        "emerged_topics": report.emerged_topics,
        "first_emergence_share": dict(report.first_emergence_share),
        "pairwise": {
            f"{a}->{b}": {"count": lag.count, "mean": lag.mean, "std": lag.std}
            for (a, b), lag in sorted(report.pairwise.items())
        },
    }


@dataclass(frozen=True)
class GrowthRow:
    topic: TopicId
    count_a: int
    count_b: int
    growth: int
    relative_growth: float | None  # None when count_a = 0


def growing_topics(
    graph: AidaGraph,
    window_a: tuple[int, int],
    window_b: tuple[int, int],
    top_n: int,
) -> list[GrowthRow]:
    """Topics ranked by absolute document-count growth between two disjoint,
    ordered year windows; ties broken by topic id."""
    (a0, a1), (b0, b1) = window_a, window_b
    if not (a0 <= a1 and b0 <= b1 and a1 < b0):
        raise AnalyticsError(
            f"windows must be ordered and disjoint, got {window_a} and {window_b}"
        )
    if top_n < 1:
        raise AnalyticsError(f"top_n must be >= 1, got {top_n}")
    count_a: dict[TopicId, int] = {}
    count_b: dict[TopicId, int] = {}
    for entry in graph.docs.values():
        if a0 <= entry.year <= a1:
            bucket = count_a
        elif b0 <= entry.year <= b1:
            bucket = count_b
        else:
            continue
        for topic in entry.topics:
            bucket[topic] = bucket.get(topic, 0) + 1
    rows = []
    for topic in set(count_a) | set(count_b):
        ca, cb = count_a.get(topic, 0), count_b.get(topic, 0)
        rows.append(
            GrowthRow(
                topic=topic,
                count_a=ca,
                count_b=cb,
                growth=cb - ca,
                relative_growth=(cb - ca) / ca if ca else None,
            )
        )
    rows.sort(key=lambda r: (-r.growth, r.topic))
    return rows[:top_n]


def write_time_series_csv(path: str, series_list) -> None:
    """One row per topic per year: topic,year,ra,ri,pa,pi."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["topic", "year", "ra", "ri", "pa", "pi"])
        for ts in series_list:
            for i, year in enumerate(ts.years):
                writer.writerow([ts.topic, year, ts.ra[i], ts.ri[i], ts.pa[i], ts.pi[i]])


def write_indexes_csv(path: str, rows) -> None:
    """Rows of (topic, academia_industry_index, papers_patents_index)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["topic", "academia_industry_index", "papers_patents_index"])
        for topic, ai, pp in rows:
            writer.writerow([topic, repr(ai), repr(pp)])


def write_growth_csv(path: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["topic", "count_a", "count_b", "growth", "relative_growth"])
        for r in rows:
            rel = "" if r.relative_growth is None else repr(r.relative_growth)
            writer.writerow([r.topic, r.count_a, r.count_b, r.growth, rel])


def write_lag_json(path: str, report: LagReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lag_report_to_json(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
