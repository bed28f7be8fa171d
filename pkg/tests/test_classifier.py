"""Classifier stages against brute-force oracles.

Edit distance is checked against a full-matrix DP; the blocked fuzzy
matcher is checked against the all-pairs scan it is supposed to equal at
every threshold.
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scitrends.classifier import (
    ClassifierConfig,
    SyntacticMatcher,
    TopicClassifier,
    classify,
    elbow_select,
    enrich,
    levenshtein_distance,
    levenshtein_similarity,
    read_annotations,
    semantic_classify,
    syntactic_classify,
    write_annotations,
)
from scitrends.corpus import Corpus, DocKind, Document
from scitrends.ontology import OntologyError, build_ontology
from scitrends.text import ngrams, tokenize
from tests.test_embeddings import write_vectors


def dp_distance(a, b):
    """Textbook full-matrix edit distance."""
    m, n = len(a), len(b)
    table = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        table[i][0] = i
    for j in range(n + 1):
        table[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            table[i][j] = min(
                table[i - 1][j] + 1, table[i][j - 1] + 1, table[i - 1][j - 1] + cost
            )
    return table[m][n]


def make_doc(text, doc_id="d1"):
    return Document(doc_id=doc_id, kind=DocKind.PUBLICATION, title=text, year=2010)


words = st.text(alphabet="ab ", max_size=16)


@given(words, words)
def test_distance_matches_dp(a, b):
    assert levenshtein_distance(a, b) == dp_distance(a, b)


@given(words, words, st.integers(0, 6))
def test_cutoff_agrees_with_dp(a, b, cutoff):
    true = dp_distance(a, b)
    got = levenshtein_distance(a, b, cutoff=cutoff)
    if true <= cutoff:
        assert got == true
    else:
        assert got == cutoff + 1


@given(words, words)
def test_distance_symmetry(a, b):
    assert levenshtein_distance(a, b) == levenshtein_distance(b, a)


def test_distance_hand_values():
    assert levenshtein_distance("kitten", "sitting") == 3
    assert levenshtein_distance("", "abc") == 3
    assert levenshtein_distance("same", "same") == 0


def test_similarity_hand_values():
    assert levenshtein_similarity("", "") == 1.0
    assert levenshtein_similarity("abcd", "abce") == pytest.approx(0.75)
    assert levenshtein_similarity("a", "b") == 0.0


# --- fuzzy matcher vs all-pairs brute force -------------------------------

def brute_force_match(gram, ontology, threshold):
    best = {}
    for label, topic in ontology.label_to_topic.items():
        sim = levenshtein_similarity(gram, label)
        if sim >= threshold and sim > best.get(topic, -1.0):
            best[topic] = sim
    return tuple(sorted(best.items()))


def random_labels(rng, count):
    labels = set()
    while len(labels) < count:
        n_words = rng.randint(1, 3)
        label = " ".join(
            "".join(rng.choice("abcd") for _ in range(rng.randint(2, 9)))
            for _ in range(n_words)
        )
        labels.add(label)
    return sorted(labels)


@pytest.mark.parametrize("threshold", [0.5, 0.7, 0.8, 0.94, 1.0])
def test_matcher_equals_brute_force(threshold):
    rng = random.Random(int(threshold * 100))
    ontology = build_ontology([], topics=random_labels(rng, 60))
    matcher = SyntacticMatcher(ontology, threshold)
    queries = random_labels(rng, 80)
    # near-misses of real labels stress the distance-1 and distance-2 paths
    for label in list(ontology.label_to_topic)[:30]:
        i = rng.randrange(len(label))
        queries.append(label[:i] + label[i + 1 :])
        queries.append(label[:i] + "x" + label[i:])
        queries.append(label)
    for gram in queries:
        assert matcher.match(gram) == brute_force_match(gram, ontology, threshold), (
            threshold,
            gram,
        )


def test_matcher_memo_is_transparent():
    ontology = build_ontology([], topics=["deep learning", "deep learnings"])
    matcher = SyntacticMatcher(ontology, 0.9)
    first = matcher.match("deep learning")
    assert matcher.match("deep learning") == first
    assert first and first[0][1] == 1.0


def test_higher_threshold_returns_subset():
    rng = random.Random(5)
    ontology = build_ontology([], topics=random_labels(rng, 40))
    low = SyntacticMatcher(ontology, 0.6)
    high = SyntacticMatcher(ontology, 0.9)
    for gram in random_labels(rng, 60):
        low_topics = {t for t, _ in low.match(gram)}
        high_topics = {t for t, _ in high.match(gram)}
        assert high_topics <= low_topics


def test_exact_threshold_equals_substring_scan():
    ontology = build_ontology(
        [("neural networks", "machine learning")], topics=["graph theory"]
    )
    matcher = SyntacticMatcher(ontology, 1.0)
    doc = make_doc("a study of neural networks and graph theory")
    tokens = tokenize(doc.search_text())
    expected = {
        (topic, 1.0)
        for gram in ngrams(tokens, 3)
        if (topic := ontology.label_to_topic.get(gram)) is not None
    }
    assert matcher.classify_tokens(tokens) == expected


def test_syntactic_classify_scores_are_best_per_topic():
    ontology = build_ontology([], topics=["machine learning"])
    # both an exact and a fuzzy occurrence: exact 1.0 must win
    doc = make_doc("machine learning and machine learnin")
    got = syntactic_classify(doc, ontology, threshold=0.9)
    assert got == {("machine learning", 1.0)}


def test_syntactic_classify_rejects_mismatched_matcher():
    onto_a = build_ontology([], topics=["alpha"])
    onto_b = build_ontology([], topics=["beta"])
    matcher = SyntacticMatcher(onto_a, 0.94)
    with pytest.raises(ValueError):
        syntactic_classify(make_doc("x"), onto_b, matcher=matcher)


# --- elbow selection ------------------------------------------------------

def test_elbow_keeps_head_before_gap():
    scores = {"a": 10.0, "b": 9.5, "c": 9.0, "d": 2.0, "e": 1.5}
    assert elbow_select(scores.items()) == {"a", "b", "c"}


def test_elbow_degenerate_keeps_all():
    assert elbow_select({"a": 5.0, "b": 5.0}.items()) == {"a", "b"}
    assert elbow_select({"a": 5.0, "b": 3.0}.items()) == {"a", "b"}
    assert elbow_select([]) == set()


@given(
    st.dictionaries(
        st.text(alphabet="pqr", min_size=1, max_size=3),
        st.floats(0.0, 100.0),
        max_size=10,
    )
)
def test_elbow_selects_a_score_prefix(scores):
    selected = elbow_select(scores.items())
    if not scores:
        assert selected == set()
        return
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    assert {t for t, _ in ranked[: len(selected)]} == selected


# --- enrichment -----------------------------------------------------------

def test_enrich_adds_ancestors_only():
    ontology = build_ontology([("c", "b"), ("b", "a")])
    assert enrich({"c"}, ontology) == {"a", "b"}
    assert enrich({"a"}, ontology) == set()


def test_enrich_excludes_inputs():
    ontology = build_ontology([("c", "b"), ("b", "a")])
    assert enrich({"c", "b"}, ontology) == {"a"}


def test_enrich_closure_is_idempotent():
    ontology = build_ontology([("d", "c"), ("c", "b"), ("b", "a")])
    direct = {"d"}
    added = enrich(direct, ontology)
    assert enrich(direct | added, ontology) == set()


def test_enrich_unknown_topic_raises():
    ontology = build_ontology([("a", "b")])
    with pytest.raises(OntologyError):
        enrich({"ghost"}, ontology)


# --- full pipeline --------------------------------------------------------

def test_classify_syntactic_plus_enrichment():
    ontology = build_ontology(
        [
            ("neural networks", "machine learning"),
            ("machine learning", "artificial intelligence"),
        ]
    )
    ann = classify(make_doc("advances in neural networks"), ontology)
    assert {t for t, _ in ann.syntactic} == {"neural networks"}
    assert ann.enhanced == {"machine learning", "artificial intelligence"}
    assert ann.union == {"neural networks", "machine learning", "artificial intelligence"}
    assert ann.semantic == frozenset()


def test_semantic_stage_finds_vocabulary_neighbours(tmp_path):
    ontology = build_ontology([], topics=["machine learning", "graph theory"])
    path = tmp_path / "vec.txt"
    write_vectors(
        path,
        [
            ("machine_learning", [1.0, 0.0]),
            ("neural", [0.95, 0.05]),
            ("networks", [0.9, 0.1]),
            ("graph_theory", [0.0, 1.0]),
        ],
    )
    from scitrends.embeddings import load_embeddings

    model = load_embeddings(path)
    doc = make_doc("neural networks")
    got = semantic_classify(doc, ontology, model)
    assert {t for t, _ in got} == {"machine learning"}


def test_semantic_scores_are_frequency_times_diversity(tmp_path):
    ontology = build_ontology([], topics=["machine learning"])
    path = tmp_path / "vec.txt"
    write_vectors(path, [("machine_learning", [1.0, 0.0]), ("neural", [0.9, 0.1])])
    from scitrends.embeddings import load_embeddings

    model = load_embeddings(path)
    # "neural" occurs twice; 1 distinct gram names the topic -> 2 * 1
    doc = make_doc("neural and neural")
    got = semantic_classify(doc, ontology, model)
    assert got == {("machine learning", 2.0)}


def test_classifier_threads_do_not_change_output():
    ontology = build_ontology([("neural networks", "machine learning")])
    docs = [make_doc(f"neural networks study {i}", f"d{i}") for i in range(8)]
    corpus = Corpus.from_documents(docs)
    clf = TopicClassifier(ontology)
    assert clf.annotate_corpus(corpus, threads=1) == clf.annotate_corpus(corpus, threads=4)


def test_annotations_round_trip(tmp_path):
    ontology = build_ontology([("neural networks", "machine learning")])
    docs = [make_doc("neural networks", "d1"), make_doc("nothing here", "d2")]
    clf = TopicClassifier(ontology)
    annotations = [clf.annotate(d) for d in docs]
    path = tmp_path / "ann.jsonl"
    assert write_annotations(path, annotations) == 2
    assert read_annotations(path) == annotations


def test_config_validation():
    with pytest.raises(ValueError):
        ClassifierConfig(threshold=0.0)
    with pytest.raises(ValueError):
        ClassifierConfig(top_k=0)
    with pytest.raises(ValueError):
        ClassifierConfig(max_ngram=0)
