"""Forecasting which topics will attract industrial patents.

Samples pair a topic's four 5-year count streams (RA/RI/PA/PI) with a
label: true when the following horizon brings more than ``label_gt``
industrial patents, restricted to windows where the topic has not yet
emerged (cumulative industrial patents below ``emerged_lt`` at window end).
The 17 feature combinations either concatenate streams (``RA-RI`` and
friends) or sum them elementwise (``R`` = RA+RI, ``P`` = PA+PI).  The
cross-validation harness macro-averages positive-class metrics over
stratified folds; features are standardized on the training fold for
logistic regression.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .analytics import topic_time_series
from .kg import AidaGraph
from .ml import (
    Dataset,
    LogregModel,
    Metrics,
    apply_standardize,
    kfold_cv,
    prf,
    standardize,
    train_logreg,
    train_random_forest,
)
from .ontology import TopicId

FEATURE_COMBOS = (
    "RA", "RI", "PA", "PI", "R", "P",
    "RA-RI", "RA-PA", "RA-PI", "RI-PA", "RI-PI", "PA-PI",
    "RA-RI-PA", "RA-RI-PI", "RA-PA-PI", "RI-PA-PI", "RA-RI-PA-PI",
)

MODEL_KINDS = ("logreg", "random_forest")

METRIC_AVERAGING = "macro"  # mean of per-fold metrics


class ForecastError(ValueError):
    """Bad windows, combos, or degenerate sample sets."""


@dataclass(frozen=True)
class ForecastSample:
    topic: TopicId
    window_start: int
    ra: tuple[int, ...]
    ri: tuple[int, ...]
    pa: tuple[int, ...]
    pi: tuple[int, ...]
    label: bool

    def __post_init__(self):
        lengths = {len(self.ra), len(self.ri), len(self.pa), len(self.pi)}
        if len(lengths) != 1:
            raise ForecastError(f"stream lengths differ: {sorted(lengths)}")


def build_gold_standard(
    graph: AidaGraph,
    window: int = 5,
    horizon: int = 10,
    emerged_lt: int = 10,
    label_gt: int = 50,
    overlapping: bool = True,
) -> list[ForecastSample]:
    """One sample per topic per qualifying window.

    Qualification: cumulative industrial patents (from the first graph year)
    below ``emerged_lt`` at window end.  Label: industrial patents during
    the following ``horizon`` years exceed ``label_gt``.  Windows slide by
    one year, or by ``window`` years with ``overlapping=False``.
    """
    if window < 1 or horizon < 1:
        raise ForecastError("window and horizon must be >= 1")
    years = [entry.year for entry in graph.docs.values()]
    if not years:
        return []
    y_min, y_max = min(years), max(years)
    span = y_max - y_min + 1
    if span < window + horizon:
        raise ForecastError(
            f"graph spans {span} years, need >= {window + horizon}"
        )
    topics = sorted({t for entry in graph.docs.values() for t in entry.topics})
    step = 1 if overlapping else window
    samples: list[ForecastSample] = []
    for topic in topics:
        series = topic_time_series(graph, topic, y_min, y_max)
        cumulative_pi = np.cumsum(series.pi)
        for start in range(y_min, y_max - window - horizon + 2, step):
            end_idx = start - y_min + window - 1
            if int(cumulative_pi[end_idx]) >= emerged_lt:
                continue
            sl = slice(start - y_min, end_idx + 1)
            horizon_pi = sum(series.pi[end_idx + 1 : end_idx + 1 + horizon])
            samples.append(
                ForecastSample(
                    topic=topic,
                    window_start=start,
                    ra=series.ra[sl],
                    ri=series.ri[sl],
                    pa=series.pa[sl],
                    pi=series.pi[sl],
                    label=horizon_pi > label_gt,
                )
            )
    return samples


def featurize(sample: ForecastSample, combo: str) -> np.ndarray:
    """Feature vector for one combo: concatenation for hyphenated stream
    lists, elementwise sums for R and P."""
    if combo not in FEATURE_COMBOS:
        raise ForecastError(f"unknown combo {combo!r}")
    streams = {"RA": sample.ra, "RI": sample.ri, "PA": sample.pa, "PI": sample.pi}
    if combo == "R":
        return np.asarray(sample.ra, dtype=np.float64) + np.asarray(sample.ri)
    if combo == "P":
        return np.asarray(sample.pa, dtype=np.float64) + np.asarray(sample.pi)
    return np.concatenate(
        [np.asarray(streams[name], dtype=np.float64) for name in combo.split("-")]
    )


@dataclass(frozen=True)
class _StandardizedLogreg:
    mean: np.ndarray
    std: np.ndarray
    model: LogregModel

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.model.predict(apply_standardize(X, self.mean, self.std))


def _make_trainer(model_kind: str, seed: int):
    if model_kind == "logreg":

        def trainer(train: Dataset):
            Xs, mean, std = standardize(train.X)
            model = train_logreg(Dataset(Xs, train.y), seed=seed)
            return _StandardizedLogreg(mean, std, model)

        return trainer
    if model_kind == "random_forest":
        return lambda train: train_random_forest(train, seed=seed)
    raise ForecastError(f"unknown model kind {model_kind!r}")


@dataclass(frozen=True)
class ComboResult:
    combo: str
    precision: float
    recall: float
    f1: float
    folds: tuple[Metrics, ...]


def run_experiment(
    samples,
    combos=FEATURE_COMBOS,
    model_kind: str = "logreg",
    folds: int = 10,
    seed: int = 0,
) -> list[ComboResult]:
    """Stratified CV per combo; identical fold assignment across combos so
    rows are comparable.  Metrics are macro-averaged over folds."""
    samples = list(samples)
    if len(samples) < folds:
        raise ForecastError(f"{len(samples)} samples for {folds} folds")
    labels = np.array([int(s.label) for s in samples])
    if len(np.unique(labels)) < 2:
        raise ForecastError("need both positive and negative samples")
    trainer = _make_trainer(model_kind, seed)
    results = []
    for combo in combos:
        X = np.vstack([featurize(s, combo) for s in samples])
        fold_metrics = kfold_cv(Dataset(X, labels), folds, trainer, seed=seed)
        results.append(
            ComboResult(
                combo=combo,
                precision=float(np.mean([m.precision for m in fold_metrics])),
                recall=float(np.mean([m.recall for m in fold_metrics])),
                f1=float(np.mean([m.f1 for m in fold_metrics])),
                folds=tuple(fold_metrics),
            )
        )
    return results


def baseline_metrics(samples, folds: int = 10, seed: int = 0) -> Metrics:
    """Majority-class predictor evaluated on the same stratified folds."""
    labels = np.array([int(s.label) for s in samples])
    X = np.zeros((len(labels), 1))

    class _Majority:
        def __init__(self, label: int):
            self.label = label

        def predict(self, X):
            return np.full(len(X), self.label, dtype=np.int64)

    trainer = lambda train: _Majority(int(train.y.sum() * 2 > len(train.y)))
    fold_metrics = kfold_cv(Dataset(X, labels), folds, trainer, seed=seed)
    return Metrics(
        float(np.mean([m.precision for m in fold_metrics])),
        float(np.mean([m.recall for m in fold_metrics])),
        float(np.mean([m.f1 for m in fold_metrics])),
    )


def write_results_csv(path: str, results) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["combo", "precision", "recall", "f1"])
        for r in results:
            writer.writerow([r.combo, repr(r.precision), repr(r.recall), repr(r.f1)])


def results_to_json(results, model_kind: str, folds: int, seed: int) -> dict:
    return {
        "model": model_kind,
        "folds": folds,
        "seed": seed,
        "averaging": METRIC_AVERAGING,
        "rows": [
            {"combo": r.combo, "precision": r.precision, "recall": r.recall, "f1": r.f1}
            for r in results
        ],
    }


def write_results_json(path: str, results, model_kind: str, folds: int, seed: int) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(results_to_json(results, model_kind, folds, seed), fh, indent=2)
        fh.write("\n")


def write_samples_csv(path: str, samples) -> None:
    """Flat export for external models: one row per sample, streams
    column-expanded."""
    samples = list(samples)
    width = len(samples[0].ra) if samples else 0
    header = ["topic", "window_start", "label"]
    for stream in ("ra", "ri", "pa", "pi"):
        header.extend(f"{stream}{i}" for i in range(width))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in samples:
            row = [s.topic, s.window_start, int(s.label)]
            row.extend(s.ra)
            row.extend(s.ri)
            row.extend(s.pa)
            row.extend(s.pi)
            writer.writerow(row)
