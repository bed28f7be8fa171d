"""Technology-topic co-occurrence cube and adoption forecasting.

The cube counts, per (technology, topic, year), research papers that both
mention the technology (word-boundary phrase match, same normalization as
the syntactic classifier) and carry the topic annotation.  Technologies
below the minimum-paper threshold are dropped.  Adoption samples ask: given
a technology's recent spread across all topics, will a topic that has not
yet adopted it (cumulative count below ``adopted_at``) reach adoption
within the horizon?
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, DocKind
from .ml import Dataset, Metrics, prf, stratified_folds
from .forecast import _make_trainer
from .ontology import TopicId
from .text import contains_phrase, normalize_label, tokenize

FEATURE_LAYOUT = (
    "all-topic trailing counts (topic-major, oldest year first) "
    "followed by the target topic's own trailing counts"
)


class TTFError(ValueError):
    """Bad cube parameters or degenerate sample sets."""


@dataclass(frozen=True)
class TechTopicCube:
    technologies: tuple[str, ...]
    topics: tuple[TopicId, ...]
    y0: int
    y1: int
    cell: dict[tuple[str, TopicId, int], int]  # absent -> 0
    feature_layout: str = FEATURE_LAYOUT

    def count(self, tech: str, topic: TopicId, year: int) -> int:
        return self.cell.get((tech, topic, year), 0)

    @property
    def years(self) -> range:
        return range(self.y0, self.y1 + 1)


def load_technologies(path: str) -> list[str]:
    """One label per line, UTF-8; blank lines skipped."""
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def build_cube(
    corpus: Corpus,
    annotations,
    technologies,
    y0: int,
    y1: int,
    min_papers: int = 10,
) -> TechTopicCube:
    """Count papers per (technology, topic, year) over [y0, y1].

    Only publications count.  A technology whose total mentioning-paper
    count stays below ``min_papers`` is dropped from the cube.
    """
    if y0 > y1:
        raise TTFError(f"invalid year range [{y0}, {y1}]")
    tech_tokens: dict[str, tuple[str, ...]] = {}
    for raw in technologies:
        label = normalize_label(raw)
        if label and label not in tech_tokens:
            tech_tokens[label] = tuple(label.split())
    if not tech_tokens:
        raise TTFError("technology list is empty")
    union_by_doc = {ann.doc_id: ann.union for ann in annotations}
    cell: dict[tuple[str, TopicId, int], int] = {}
    papers_per_tech: dict[str, int] = {t: 0 for t in tech_tokens}
    for doc in corpus:
        if doc.kind is not DocKind.PUBLICATION or not y0 <= doc.year <= y1:
            continue
        tokens = tokenize(doc.search_text())
        topics = union_by_doc.get(doc.doc_id, frozenset())
        for tech, phrase in tech_tokens.items():
            if not contains_phrase(tokens, phrase):
                continue
            papers_per_tech[tech] += 1
            for topic in topics:
                key = (tech, topic, doc.year)
                cell[key] = cell.get(key, 0) + 1
    kept = tuple(t for t in tech_tokens if papers_per_tech[t] >= min_papers)
    kept_set = set(kept)
    cell = {k: v for k, v in cell.items() if k[0] in kept_set}
    topics = tuple(sorted({k[1] for k in cell}))
    return TechTopicCube(kept, topics, y0, y1, cell)


@dataclass(frozen=True)
class AdoptionSample:
    tech: str
    topic: TopicId
    as_of_year: int
    features: tuple[float, ...]
    label: bool


def adoption_samples(
    cube: TechTopicCube,
    feature_years: int = 5,
    horizon: int = 5,
    adopted_at: int = 10,
) -> list[AdoptionSample]:
    """Samples for (tech, topic) pairs not yet adopted at ``as_of_year``.

    Features: the technology's counts over every cube topic for the trailing
    ``feature_years`` (topic-major), then the target topic's own trailing
    counts.  Label: cumulative count reaches ``adopted_at`` within
    ``horizon`` years.  Feature years never exceed ``as_of_year``.
    """
    if feature_years < 1 or horizon < 1:
        raise TTFError("feature_years and horizon must be >= 1")
    span = cube.y1 - cube.y0 + 1
    if span < feature_years + horizon:
        raise TTFError(f"cube spans {span} years, need >= {feature_years + horizon}")
    samples: list[AdoptionSample] = []
    for tech in cube.technologies:
        # cumulative counts per topic, indexed by year offset
        counts = {
            topic: [cube.count(tech, topic, y) for y in cube.years]
            for topic in cube.topics
        }
        cumulative = {topic: np.cumsum(counts[topic]) for topic in cube.topics}
        for as_of in range(cube.y0 + feature_years - 1, cube.y1 - horizon + 1):
            i = as_of - cube.y0
            trailing = slice(i - feature_years + 1, i + 1)
            all_topic_feats = [
                c for topic in cube.topics for c in counts[topic][trailing]
            ]
            for topic in cube.topics:
                if int(cumulative[topic][i]) >= adopted_at:
                    continue
                label = int(cumulative[topic][i + horizon]) >= adopted_at
                features = tuple(
                    float(v) for v in all_topic_feats + counts[topic][trailing]
                )
                samples.append(AdoptionSample(tech, topic, as_of, features, label))
    return samples


@dataclass(frozen=True)
class TopicRow:
    topic: TopicId
    metrics: Metrics
    samples: int
    positives: int


@dataclass(frozen=True)
class AdoptionReport:
    overall: Metrics
    per_topic: tuple[TopicRow, ...]  # descending F1
    model_kind: str
    folds: int
    seed: int
    min_positive: int


def predict_adoption(
    samples,
    model_kind: str = "random_forest",
    folds: int = 10,
    seed: int = 0,
    min_positive: int = 50,
) -> AdoptionReport:
    """Cross-validated adoption prediction.

    Overall metrics are macro-averaged over folds; per-topic rows pool test
    predictions across folds, drop topics with fewer than ``min_positive``
    positive labels, and sort by descending F1 (ties by topic id).
    """
    samples = list(samples)
    if len(samples) < folds:
        raise TTFError(f"{len(samples)} samples for {folds} folds")
    y = np.array([int(s.label) for s in samples])
    if len(np.unique(y)) < 2:
        raise TTFError("need both positive and negative samples")
    X = np.array([s.features for s in samples], dtype=np.float64)
    data = Dataset(X, y)
    trainer = _make_trainer(model_kind, seed)
    fold_metrics = []
    pooled_pred = np.empty(len(samples), dtype=np.int64)
    for test_idx in stratified_folds(y, folds, seed):
        train_mask = np.ones(len(samples), dtype=bool)
        train_mask[test_idx] = False
        model = trainer(data.subset(train_mask))
        pred = model.predict(X[test_idx])
        pooled_pred[test_idx] = pred
        fold_metrics.append(prf(y[test_idx], pred))
    overall = Metrics(
        float(np.mean([m.precision for m in fold_metrics])),
        float(np.mean([m.recall for m in fold_metrics])),
        float(np.mean([m.f1 for m in fold_metrics])),
    )
    rows = []
    by_topic: dict[TopicId, list[int]] = {}
    for i, s in enumerate(samples):
        by_topic.setdefault(s.topic, []).append(i)
    for topic, idx in by_topic.items():
        idx = np.array(idx)
        positives = int(y[idx].sum())
        if positives < min_positive:
            continue
        rows.append(
            TopicRow(topic, prf(y[idx], pooled_pred[idx]), len(idx), positives)
        )
    rows.sort(key=lambda r: (-r.metrics.f1, r.topic))
    return AdoptionReport(overall, tuple(rows), model_kind, folds, seed, min_positive)


def write_cube_csv(path: str, cube: TechTopicCube) -> None:
    """Rows ``tech,topic,year,count`` sorted; zero cells omitted."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tech", "topic", "year", "count"])
        for (tech, topic, year), count in sorted(cube.cell.items()):
            writer.writerow([tech, topic, year, count])


def write_adoption_csv(path: str, report: AdoptionReport) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["topic", "precision", "recall", "f1", "samples", "positives"])
        for r in report.per_topic:
            writer.writerow(
                [
                    r.topic,
                    repr(r.metrics.precision),
                    repr(r.metrics.recall),
                    repr(r.metrics.f1),
                    r.samples,
                    r.positives,
                ]
            )


def adoption_report_to_json(report: AdoptionReport) -> dict:
    return {
        "model": report.model_kind,
        "folds": report.folds,
        "seed": report.seed,
        "min_positive": report.min_positive,
        "overall": {
            "precision": report.overall.precision,
            "recall": report.overall.recall,
            "f1": report.overall.f1,
        },
        "per_topic": [
            {
                "topic": r.topic,
                "precision": r.metrics.precision,
                "recall": r.metrics.recall,
                "f1": r.metrics.f1,
                "samples": r.samples,
                "positives": r.positives,
            }
            for r in report.per_topic
        ],
    }


def write_adoption_json(path: str, report: AdoptionReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(adoption_report_to_json(report), fh, indent=2)
        fh.write("\n")
