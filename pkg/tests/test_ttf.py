"""Technology-topic cube recounts and adoption sampling.

The cube oracle recounts every (tech, topic, year) cell straight from the
documents.
"""

import random

import pytest

from scitrends.classifier import TopicClassifier
from scitrends.corpus import Corpus, DocKind, Document
from scitrends.ontology import build_ontology
from scitrends.text import contains_phrase, normalize_label, tokenize
from scitrends.ttf import (
    AdoptionSample,
    TTFError,
    adoption_samples,
    build_cube,
    load_technologies,
    predict_adoption,
    write_cube_csv,
)

TOPICS = ["alpha topic", "beta topic", "gamma topic"]
TECHS = ["quantum widget", "fuzzy gadget"]


def make_corpus(rng, n_docs=60, y0=2000, y1=2009):
    docs = []
    for i in range(n_docs):
        bits = []
        for topic in TOPICS:
            if rng.random() < 0.5:
                bits.append(topic)
        for tech in TECHS:
            if rng.random() < 0.5:
                bits.append(tech)
        kind = DocKind.PUBLICATION if rng.random() < 0.8 else DocKind.PATENT
        docs.append(
            Document(
                doc_id=f"d{i}",
                kind=kind,
                title="work on " + " and ".join(bits) if bits else "nothing",
                year=rng.randint(y0, y1),
            )
        )
    return Corpus.from_documents(docs)


def brute_force_cells(corpus, annotations, techs, y0, y1):
    union = {a.doc_id: a.union for a in annotations}
    cells = {}
    for doc in corpus:
        if doc.kind is not DocKind.PUBLICATION or not y0 <= doc.year <= y1:
            continue
        tokens = tokenize(doc.search_text())
        for tech in techs:
            phrase = tuple(normalize_label(tech).split())
            if not contains_phrase(tokens, phrase):
                continue
            for topic in union.get(doc.doc_id, ()):
                key = (normalize_label(tech), topic, doc.year)
                cells[key] = cells.get(key, 0) + 1
    return cells


def test_cube_matches_brute_force():
    rng = random.Random(17)
    ontology = build_ontology([], topics=TOPICS)
    corpus = make_corpus(rng)
    annotations = TopicClassifier(ontology).annotate_corpus(corpus)
    cube = build_cube(corpus, annotations, TECHS, 2000, 2009, min_papers=1)
    expected = brute_force_cells(corpus, annotations, TECHS, 2000, 2009)
    assert cube.cell == expected


def test_cube_min_papers_drops_rare_tech():
    ontology = build_ontology([], topics=["alpha topic"])
    docs = [
        Document("d1", DocKind.PUBLICATION, "alpha topic with rare gizmo", 2000),
        Document("d2", DocKind.PUBLICATION, "alpha topic with common gizmo", 2000),
        Document("d3", DocKind.PUBLICATION, "more common gizmo alpha topic", 2001),
    ]
    corpus = Corpus.from_documents(docs)
    annotations = TopicClassifier(ontology).annotate_corpus(corpus)
    cube = build_cube(
        corpus, annotations, ["rare gizmo", "common gizmo"], 2000, 2005, min_papers=2
    )
    assert cube.technologies == ("common gizmo",)
    assert cube.count("common gizmo", "alpha topic", 2000) == 1
    assert cube.count("rare gizmo", "alpha topic", 2000) == 0


def test_cube_ignores_patents_and_out_of_range_years():
    ontology = build_ontology([], topics=["alpha topic"])
    docs = [
        Document("d1", DocKind.PATENT, "alpha topic quantum widget", 2000),
        Document("d2", DocKind.PUBLICATION, "alpha topic quantum widget", 1999),
        Document("d3", DocKind.PUBLICATION, "alpha topic quantum widget", 2000),
    ]
    corpus = Corpus.from_documents(docs)
    annotations = TopicClassifier(ontology).annotate_corpus(corpus)
    cube = build_cube(corpus, annotations, ["quantum widget"], 2000, 2005, min_papers=1)
    assert sum(cube.cell.values()) == 1


def test_cube_word_boundary_mentions():
    ontology = build_ontology([], topics=["alpha topic"])
    docs = [
        Document("d1", DocKind.PUBLICATION, "alpha topic widgets galore", 2000),
    ]
    corpus = Corpus.from_documents(docs)
    annotations = TopicClassifier(ontology).annotate_corpus(corpus)
    # "widget" must not match the token "widgets"
    cube = build_cube(corpus, annotations, ["widget"], 2000, 2001, min_papers=0)
    assert cube.cell == {}


def test_cube_validation():
    ontology = build_ontology([], topics=["alpha topic"])
    corpus = Corpus.from_documents(
        [Document("d1", DocKind.PUBLICATION, "x", 2000)]
    )
    annotations = TopicClassifier(ontology).annotate_corpus(corpus)
    with pytest.raises(TTFError):
        build_cube(corpus, annotations, ["t"], 2005, 2000)
    with pytest.raises(TTFError):
        build_cube(corpus, annotations, [], 2000, 2005)


def test_load_technologies(tmp_path):
    path = tmp_path / "techs.txt"
    path.write_text("quantum widget\n\n  fuzzy gadget  \n")
    assert load_technologies(path) == ["quantum widget", "fuzzy gadget"]


def planted_cube():
    """One tech sweeping topic t0 then t1; t1 adopts late."""
    from scitrends.ttf import TechTopicCube

    cell = {}
    # t0: 5 papers every year from 2000; t1: 5 papers every year from 2006
    for year in range(2000, 2012):
        cell[("tech", "t0", year)] = 5
        if year >= 2006:
            cell[("tech", "t1", year)] = 5
    return TechTopicCube(("tech",), ("t0", "t1"), 2000, 2011, cell)


def test_adoption_samples_layout_and_labels():
    cube = planted_cube()
    samples = adoption_samples(cube, feature_years=3, horizon=3, adopted_at=10)
    # features: 2 topics x 3 trailing years + 3 target years = 9
    assert all(len(s.features) == 9 for s in samples)
    # t0 reaches 10 cumulative papers during 2001, so it only appears
    # while still unadopted
    t0_years = [s.as_of_year for s in samples if s.topic == "t0"]
    assert t0_years == []  # first eligible as_of is 2002, already adopted
    t1 = {s.as_of_year: s for s in samples if s.topic == "t1"}
    # cumulative for t1 reaches 10 during 2007
    assert 2002 in t1 and t1[2002].label is False
    assert t1[2005].label is True  # horizon 2006-2008 brings it to 15
    assert 2008 not in t1  # adopted by then


def test_adoption_sample_features_are_trailing_counts():
    cube = planted_cube()
    samples = adoption_samples(cube, feature_years=3, horizon=3, adopted_at=10)
    s = next(x for x in samples if x.topic == "t1" and x.as_of_year == 2006)
    # all-topic block: t0 counts 2004-2006, t1 counts 2004-2006; then target
    assert s.features == (5.0, 5.0, 5.0, 0.0, 0.0, 5.0, 0.0, 0.0, 5.0)


def test_adoption_samples_validation():
    cube = planted_cube()
    with pytest.raises(TTFError):
        adoption_samples(cube, feature_years=0)
    with pytest.raises(TTFError):
        adoption_samples(cube, feature_years=10, horizon=10)


def test_predict_adoption_report_shape():
    rng = random.Random(23)
    samples = []
    # synthetic: positives have rising trailing counts
    for i in range(120):
        label = i % 3 == 0
        base = [float(rng.randint(3, 6)) for _ in range(6)] if label else [
            float(rng.randint(0, 1)) for _ in range(6)
        ]
        samples.append(
            AdoptionSample(
                tech="tech",
                topic=f"t{i % 4}",
                as_of_year=2005,
                features=tuple(base),
                label=label,
            )
        )
    report = predict_adoption(samples, folds=4, seed=0, min_positive=5)
    assert report.overall.f1 > 0.9
    assert report.model_kind == "random_forest"
    f1s = [r.metrics.f1 for r in report.per_topic]
    assert f1s == sorted(f1s, reverse=True)
    assert all(r.positives >= 5 for r in report.per_topic)


def test_predict_adoption_min_positive_filters():
    rng = random.Random(29)
    samples = []
    for i in range(80):
        label = i % 2 == 0 and i % 8 != 0
        samples.append(
            AdoptionSample(
                "tech",
                "busy" if i < 70 else "quiet",
                2005,
                tuple(float(rng.randint(0, 5)) for _ in range(4)),
                label,
            )
        )
    report = predict_adoption(samples, folds=4, seed=0, min_positive=10)
    topics = {r.topic for r in report.per_topic}
    assert "quiet" not in topics


def test_predict_adoption_validation():
    sample = AdoptionSample("t", "x", 2000, (1.0,), True)
    with pytest.raises(TTFError):
        predict_adoption([sample] * 3, folds=10)
    with pytest.raises(TTFError):
        predict_adoption([sample] * 20, folds=4)  # single class


def test_cube_csv(tmp_path):
    cube = planted_cube()
    path = tmp_path / "cube.csv"
    write_cube_csv(path, cube)
    lines = path.read_text().splitlines()
    assert lines[0] == "tech,topic,year,count"
    assert lines[1] == "tech,t0,2000,5"
    assert len(lines) == 1 + len(cube.cell)
