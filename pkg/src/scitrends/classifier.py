"""Three-stage topic classifier: syntactic n-gram matching, embedding-based
semantic scoring, and super-topic enrichment.

The syntactic stage compares every 1/2/3-gram of a document against ontology
labels under normalized Levenshtein similarity.  Near-exact thresholds make
fuzzy matches rare, which the matcher exploits: an exact dictionary handles
distance 0, a deletion-variant index finds every distance-1 candidate, and a
length-window scan covers the residual distance >= 2 cases (only possible for
strings of length >= 2/(1-threshold)).  Blocking is lossless: for any
threshold the result equals the all-pairs brute force.

The semantic stage embeds candidate n-grams (underscore-joined vocabulary
entry when present, else the average of member-token vectors), retrieves
top-k cosine neighbours above a floor, maps neighbour words to ontology
topics, scores each topic by frequency x diversity, and keeps the
elbow-selected prefix.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .corpus import Corpus, Document
from .embeddings import EmbeddingModel, embed_ngram, most_similar
from .ontology import OntologyError, TopicId, TopicOntology, canonical_topic
from .text import DEFAULT_STOPWORDS, ngrams, tokenize


def levenshtein_distance(a: str, b: str, cutoff: int | None = None) -> int:
    """Edit distance; with ``cutoff`` set, any distance above it is reported
    as ``cutoff + 1`` (the scan stops early)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a) if cutoff is None or len(a) <= cutoff else cutoff + 1
    if cutoff is not None and len(a) - len(b) > cutoff:
        return cutoff + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        row_min = i
        for j, cb in enumerate(b, start=1):
            val = min(prev[j] + 1, curr[j - 1] + 1, prev[j - 1] + (ca != cb))
            curr.append(val)
            if val < row_min:
                row_min = val
        if cutoff is not None and row_min > cutoff:
            return cutoff + 1
        prev = curr
    dist = prev[-1]
    if cutoff is not None and dist > cutoff:
        return cutoff + 1
    return dist


def levenshtein_similarity(a: str, b: str) -> float:
    """1 - editDistance / max length; two empty strings score 1.0."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / max(len(a), len(b))


@dataclass(frozen=True)
class ClassifierConfig:
    threshold: float = 0.94  # syntactic similarity cut-off
    top_k: int = 10  # semantic neighbours per n-gram
    similarity_floor: float = 0.7  # minimum cosine for a neighbour
    max_ngram: int = 3
    stopwords: frozenset[str] = DEFAULT_STOPWORDS

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {self.top_k}")
        if self.max_ngram < 1:
            raise ValueError(f"max_ngram must be >= 1, got {self.max_ngram}")


@dataclass(frozen=True)
class TopicAnnotation:
    doc_id: str
    syntactic: frozenset[tuple[TopicId, float]]
    semantic: frozenset[tuple[TopicId, float]]
    enhanced: frozenset[TopicId]
    union: frozenset[TopicId]


class SyntacticMatcher:
    """Reusable n-gram-to-label matcher for one ontology and threshold.

    Results are memoized per n-gram, so corpus-wide runs pay the fuzzy
    search once per distinct string.
    """

    def __init__(self, ontology: TopicOntology, threshold: float = 0.94):
        if not 0.0 < threshold <= 1.0:
            raise ValueError(f"threshold must be in (0, 1], got {threshold}")
        self.ontology = ontology
        self.threshold = threshold
        self._exact = ontology.label_to_topic
        self._memo: dict[str, tuple[tuple[TopicId, float], ...]] = {}
        if threshold < 1.0:
            # d >= 1 needs max(len) >= 1/(1-t); d >= 2 needs >= 2/(1-t)
            self._d1_min = math.ceil(1.0 / (1.0 - threshold) - 1e-9)
            self._d2_min = math.ceil(2.0 / (1.0 - threshold) - 1e-9)
            self._min_query_len = math.floor(threshold * self._d1_min)
            self._by_length: dict[int, list[tuple[str, TopicId]]] = {}
            self._variants: dict[str, list[tuple[str, TopicId]]] = {}
            for label, topic in self._exact.items():
                self._by_length.setdefault(len(label), []).append((label, topic))
                entry = (label, topic)
                self._variants.setdefault(label, []).append(entry)
                for i in range(len(label)):
                    variant = label[:i] + label[i + 1 :]
                    self._variants.setdefault(variant, []).append(entry)

    def match(self, gram: str) -> tuple[tuple[TopicId, float], ...]:
        """All (topic, best similarity >= threshold) matches for one n-gram."""
        cached = self._memo.get(gram)
        if cached is not None:
            return cached
        best: dict[TopicId, float] = {}
        topic = self._exact.get(gram)
        if topic is not None:
            best[topic] = 1.0
        if self.threshold < 1.0 and len(gram) >= self._min_query_len:
            self._fuzzy(gram, best)
        result = tuple(sorted(best.items()))
        self._memo[gram] = result
        return result

    def _verify(self, gram: str, label: str, topic: TopicId, best: dict) -> None:
        longest = max(len(gram), len(label))
        cutoff = math.floor((1.0 - self.threshold) * longest + 1e-9)
        dist = levenshtein_distance(gram, label, cutoff=cutoff)
        if dist > cutoff:
            return
        score = 1.0 - dist / longest
        if score >= self.threshold and score > best.get(topic, -1.0):
            best[topic] = score

    def _fuzzy(self, gram: str, best: dict[TopicId, float]) -> None:
        seen: set[str] = set()
        candidates = list(self._variants.get(gram, ()))
        for i in range(len(gram)):
            candidates.extend(self._variants.get(gram[:i] + gram[i + 1 :], ()))
        for label, topic in candidates:
            if label != gram and label not in seen:
                seen.add(label)
                self._verify(gram, label, topic, best)
        # distance >= 2 region: length window [t*len, len/t], long strings only
        lo = math.ceil(self.threshold * len(gram) - 1e-9)
        hi = math.floor(len(gram) / self.threshold + 1e-9)
        if len(gram) < self._d2_min:
            lo = max(lo, self._d2_min)
        for length in range(lo, hi + 1):
            for label, topic in self._by_length.get(length, ()):
                if label != gram and label not in seen:
                    self._verify(gram, label, topic, best)

    def classify_tokens(self, tokens: list[str], max_ngram: int = 3) -> set[tuple[TopicId, float]]:
        best: dict[TopicId, float] = {}
        for gram in set(ngrams(tokens, max_ngram)):
            for topic, score in self.match(gram):
                if score > best.get(topic, -1.0):
                    best[topic] = score
        return set(best.items())


def syntactic_classify(
    doc: Document,
    ontology: TopicOntology,
    threshold: float = 0.94,
    max_ngram: int = 3,
    matcher: SyntacticMatcher | None = None,
) -> set[tuple[TopicId, float]]:
    """Topics whose best label similarity against any document 1/2/3-gram
    reaches the threshold, with that best score."""
    if matcher is None:
        matcher = SyntacticMatcher(ontology, threshold)
    elif matcher.threshold != threshold or matcher.ontology is not ontology:
        raise ValueError("matcher was built for a different ontology/threshold")
    return matcher.classify_tokens(tokenize(doc.search_text()), max_ngram)


def _candidate_grams(
    tokens: list[str], stopwords: frozenset[str], max_ngram: int
) -> Counter:
    """N-gram occurrence counts over maximal stopword-free token runs."""
    counts: Counter = Counter()
    run: list[str] = []
    for token in tokens + [""]:
        if token and token not in stopwords:
            run.append(token)
            continue
        for n in range(1, max_ngram + 1):
            for i in range(len(run) - n + 1):
                counts[tuple(run[i : i + n])] += 1
        run = []
    return counts


def elbow_select(scores) -> set[TopicId]:
    """Keep the descending-score prefix ending at the point farthest from the
    first-to-last chord; degenerate lists (<= 2 distinct scores) keep all."""
    items = sorted(scores, key=lambda kv: (-kv[1], kv[0]))
    if not items:
        return set()
    if len({score for _, score in items}) <= 2:
        return {topic for topic, _ in items}
    first, last = items[0][1], items[-1][1]
    span = len(items) - 1
    best_i, best_d = 0, -1.0
    for i, (_, score) in enumerate(items):
        dist = abs(span * (score - first) - (last - first) * i)
        if dist > best_d:
            best_i, best_d = i, dist
    return {topic for topic, _ in items[: best_i + 1]}


def semantic_classify(
    doc: Document,
    ontology: TopicOntology,
    model: EmbeddingModel,
    config: ClassifierConfig = ClassifierConfig(),
    _topic_cache: dict | None = None,
) -> set[tuple[TopicId, float]]:
    """Embedding-neighbourhood topics scored by frequency x diversity.

    frequency(t) = occurrences of n-grams whose neighbourhood names t;
    diversity(t) = number of distinct such n-grams; elbow-selected.
    """
    counts = _candidate_grams(
        tokenize(doc.search_text()), config.stopwords, config.max_ngram
    )
    if not counts:
        return set()
    frequency: Counter = Counter()
    diversity: Counter = Counter()
    for gram, occurrences in counts.items():
        if _topic_cache is not None and gram in _topic_cache:
            topics = _topic_cache[gram]
        else:
            topics = frozenset()
            vec = embed_ngram(model, gram)
            if vec is not None:
                neighbours = most_similar(
                    model, vec, config.top_k, config.similarity_floor
                )
                topics = frozenset(
                    t
                    for word, _ in neighbours
                    if (t := canonical_topic(ontology, word)) is not None
                )
            if _topic_cache is not None:
                _topic_cache[gram] = topics
        for topic in topics:
            frequency[topic] += occurrences
            diversity[topic] += 1
    scores = {t: float(frequency[t] * diversity[t]) for t in frequency}
    selected = elbow_select(scores.items())
    return {(t, scores[t]) for t in selected}


def enrich(topics: set[TopicId], ontology: TopicOntology) -> set[TopicId]:
    """Ancestor-closure additions for a topic set (inputs excluded)."""
    added: set[TopicId] = set()
    for topic in topics:
        if topic not in ontology:
            raise OntologyError(f"unknown topic {topic!r}")
        added |= ontology.ancestors[topic]
    return added - set(topics)


def classify(
    doc: Document,
    ontology: TopicOntology,
    model: EmbeddingModel | None = None,
    config: ClassifierConfig = ClassifierConfig(),
    _matcher: SyntacticMatcher | None = None,
    _topic_cache: dict | None = None,
) -> TopicAnnotation:
    """Run syntactic, then semantic (when a model is given), then enrichment."""
    syntactic = syntactic_classify(
        doc, ontology, config.threshold, config.max_ngram, matcher=_matcher
    )
    semantic: set[tuple[TopicId, float]] = set()
    if model is not None:
        semantic = semantic_classify(doc, ontology, model, config, _topic_cache)
    direct = {t for t, _ in syntactic} | {t for t, _ in semantic}
    enhanced = enrich(direct, ontology)
    return TopicAnnotation(
        doc_id=doc.doc_id,
        syntactic=frozenset(syntactic),
        semantic=frozenset(semantic),
        enhanced=frozenset(enhanced),
        union=frozenset(direct | enhanced),
    )


class TopicClassifier:
    """Corpus-level driver sharing the matcher and semantic caches."""

    def __init__(
        self,
        ontology: TopicOntology,
        model: EmbeddingModel | None = None,
        config: ClassifierConfig = ClassifierConfig(),
    ):
        self.ontology = ontology
        self.model = model
        self.config = config
        self._matcher = SyntacticMatcher(ontology, config.threshold)
        self._topic_cache: dict = {}

    def annotate(self, doc: Document) -> TopicAnnotation:
        return classify(
            doc,
            self.ontology,
            self.model,
            self.config,
            _matcher=self._matcher,
            _topic_cache=self._topic_cache,
        )

    def annotate_corpus(self, corpus: Corpus, threads: int = 1) -> list[TopicAnnotation]:
        if threads <= 1:
            return [self.annotate(doc) for doc in corpus]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(self.annotate, corpus.documents))


def write_annotations(path: str, annotations) -> int:
    """JSONL emitter, one object per document; list fields sorted."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for ann in annotations:
            obj = {
                "doc_id": ann.doc_id,
                "syntactic": [[t, s] for t, s in sorted(ann.syntactic)],
                "semantic": [[t, s] for t, s in sorted(ann.semantic)],
                "enhanced": sorted(ann.enhanced),
                "union": sorted(ann.union),
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
            count += 1
    return count


def read_annotations(path: str) -> list[TopicAnnotation]:
    out: list[TopicAnnotation] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out.append(
                    TopicAnnotation(
                        doc_id=obj["doc_id"],
                        syntactic=frozenset((t, float(s)) for t, s in obj["syntactic"]),
                        semantic=frozenset((t, float(s)) for t, s in obj["semantic"]),
                        enhanced=frozenset(obj["enhanced"]),
                        union=frozenset(obj["union"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"line {lineno}: bad annotation: {exc}") from exc
    return out
