"""Seeded synthetic fixtures: ontologies, corpora, registries, embedding
files, and planted-signal datasets with known ground truth.

Label vocabulary and filler vocabulary are disjoint, so classifier runs on
generated text recover exactly the planted topic labels.  Every generator is
deterministic given its seed.
"""

from __future__ import annotations

import random

from .corpus import (
    AffiliationType,
    Corpus,
    DocKind,
    Document,
    OrgRecord,
    OrgRegistry,
    OrgType,
)
from .emergence import TopicNetwork
from .forecast import ForecastSample
from .kg import AidaGraph, DocEntry
from .ontology import TopicOntology, build_ontology
from .ttf import TechTopicCube

_ADJECTIVES = [
    "adaptive", "neural", "semantic", "quantum", "distributed", "probabilistic",
    "symbolic", "spectral", "temporal", "spatial", "robust", "scalable",
    "modular", "hybrid", "generative", "discriminative", "hierarchical",
    "incremental", "parallel", "sequential", "stochastic", "deterministic",
    "relational", "statistical", "evolutionary", "cognitive", "visual",
    "lexical", "numeric", "dynamic", "static", "formal", "empirical",
    "recursive", "sparse", "dense", "latent", "contextual", "federated",
    "autonomous",
]

_NOUNS = [
    "parsing", "retrieval", "clustering", "segmentation", "verification",
    "synthesis", "inference", "optimization", "compression", "encryption",
    "rendering", "simulation", "annotation", "translation", "recognition",
    "planning", "scheduling", "indexing", "ranking", "summarization",
    "alignment", "calibration", "estimation", "diagnosis", "navigation",
    "perception", "reasoning", "learning", "mining", "modelling",
    "monitoring", "routing", "caching", "filtering", "matching",
    "tracking", "forecasting", "sampling", "validation", "integration",
    "abstraction", "interpolation",
]

_FILLERS = [
    "paper", "study", "approach", "method", "results", "show", "present",
    "propose", "evaluate", "framework", "novel", "improve", "performance",
    "experiments", "benchmark", "compare", "baseline", "dataset", "report",
    "describe", "introduce", "investigate", "task", "problem", "solution",
    "measure", "observe", "significant", "gains", "work", "prior", "new",
    "applied", "using", "based", "toward", "against", "several", "large",
]

_TECH_NOUNS = [
    "engine", "toolkit", "compiler", "runtime", "scheduler", "allocator",
    "debugger", "profiler", "emulator", "interpreter", "assembler", "linker",
]

_TITLE_TEMPLATES = [
    "{a} for {b}",
    "a study of {a}",
    "improving {a} with {b}",
    "{a} revisited",
    "on the role of {a} in {b}",
]

_SENTENCES = [
    "this paper presents an approach to {a} motivated by {b}",
    "we evaluate {a} on a large benchmark and report significant gains",
    "our method combines {a} with {b} to improve performance",
    "experiments show that {a} outperforms several baselines",
    "we investigate the problem of {a} and propose a new solution",
]


def make_topic_labels(n: int, seed: int = 0) -> list[str]:
    """n distinct two-word labels drawn from the reserved label vocabulary."""
    combos = [f"{a} {b}" for a in _ADJECTIVES for b in _NOUNS]
    if n > len(combos):
        raise ValueError(f"at most {len(combos)} labels available, asked for {n}")
    rng = random.Random(seed)
    rng.shuffle(combos)
    return combos[:n]


def make_ontology(n_topics: int, seed: int = 0, extra_parent_share: float = 0.1) -> TopicOntology:
    """Random rooted DAG: each topic's parents sit earlier in label order."""
    labels = make_topic_labels(n_topics, seed)
    rng = random.Random(seed + 1)
    edges = []
    for i in range(1, n_topics):
        edges.append((labels[i], labels[rng.randrange(i)]))
        if i > 1 and rng.random() < extra_parent_share:
            second = labels[rng.randrange(i)]
            if (labels[i], second) not in edges:
                edges.append((labels[i], second))
    return build_ontology(edges, topics=labels[:1])


def ontology_csv(ontology: TopicOntology) -> str:
    """Edge-csv serialization (subject is the child)."""
    lines = ["subject,relation,object"]
    covered = set()
    for child, parent in sorted(ontology.super_edges):
        lines.append(f"{child},superTopicOf,{parent}")
        covered.add(child)
        covered.add(parent)
    for topic in sorted(ontology.topics - covered):
        lines.append(f"{topic},,")
    return "\n".join(lines) + "\n"


_SECTOR_TAXONOMY = {
    "automotive": "manufacturing",
    "electronics": "manufacturing",
    "aerospace": "manufacturing",
    "software": "services",
    "finance": "services",
    "telecom": "services",
    "energy": "utilities",
}


def make_registry(
    seed: int = 0, n_edu: int = 20, n_company: int = 20, n_gov: int = 4
) -> OrgRegistry:
    rng = random.Random(seed)
    sectors = sorted(_SECTOR_TAXONOMY)
    entries: dict[str, OrgRecord] = {}
    for i in range(n_edu):
        entries[f"edu{i}"] = OrgRecord(OrgType.EDUCATION, frozenset())
    for i in range(n_company):
        picked = rng.sample(sectors, rng.choice([1, 1, 2]))
        entries[f"co{i}"] = OrgRecord(OrgType.COMPANY, frozenset(picked))
    for i in range(n_gov):
        entries[f"gov{i}"] = OrgRecord(OrgType.GOVERNMENT, frozenset())
    return OrgRegistry(entries)


def registry_csv(registry: OrgRegistry) -> str:
    lines = ["org_id,org_type,sectors"]
    for org_id in sorted(registry.entries):
        rec = registry.entries[org_id]
        lines.append(f"{org_id},{rec.org_type.value},{'|'.join(sorted(rec.sectors))}")
    return "\n".join(lines) + "\n"


def taxonomy_csv() -> str:
    lines = ["sector,parent_sector"]
    for sector, parent in sorted(_SECTOR_TAXONOMY.items()):
        lines.append(f"{sector},{parent}")
    return "\n".join(lines) + "\n"


def _org_pool(registry: OrgRegistry, org_type: OrgType) -> list[str]:
    return sorted(
        org_id for org_id, rec in registry.entries.items() if rec.org_type is org_type
    )


def make_corpus(
    ontology: TopicOntology,
    registry: OrgRegistry,
    n_docs: int,
    y0: int = 2000,
    y1: int = 2019,
    seed: int = 0,
    patent_share: float = 0.25,
    technologies: list[str] | None = None,
) -> Corpus:
    """Documents with planted topic labels in the text and mixed affiliations.

    Topic popularity is Zipf-like, so a handful of topics dominate; patents
    lean industrial.  When a technology list is given, documents mention a
    technology phrase with probability 0.3.
    """
    rng = random.Random(seed)
    topics = sorted(ontology.topics)
    rng.shuffle(topics)
    weights = [1.0 / (rank + 1) ** 0.9 for rank in range(len(topics))]
    edu = _org_pool(registry, OrgType.EDUCATION)
    companies = _org_pool(registry, OrgType.COMPANY)
    gov = _org_pool(registry, OrgType.GOVERNMENT)
    docs: list[Document] = []
    for i in range(n_docs):
        kind = DocKind.PATENT if rng.random() < patent_share else DocKind.PUBLICATION
        n_topics = rng.choice([1, 2, 2, 3])
        chosen: list[str] = []
        for t in rng.choices(topics, weights=weights, k=n_topics):
            if t not in chosen:
                chosen.append(t)
        a, b = chosen[0], chosen[-1]
        title = rng.choice(_TITLE_TEMPLATES).format(a=a, b=b)
        sentences = [
            rng.choice(_SENTENCES).format(a=t, b=rng.choice([a, b])) for t in chosen
        ]
        sentences.append(" ".join(rng.choices(_FILLERS, k=rng.randrange(6, 12))))
        if technologies and rng.random() < 0.3:
            tech = rng.choice(technologies)
            sentences.append(f"our implementation relies on the {tech}")
        abstract = ". ".join(sentences)
        if kind is DocKind.PATENT:
            mix = rng.choices(
                ["industrial", "academic", "collaborative", "government", "none", "ghost"],
                weights=[55, 15, 10, 5, 10, 5],
            )[0]
        else:
            mix = rng.choices(
                ["academic", "industrial", "collaborative", "government", "none", "ghost"],
                weights=[50, 15, 15, 5, 10, 5],
            )[0]
        if mix == "academic":
            orgs = rng.sample(edu, rng.choice([1, 1, 2]))
        elif mix == "industrial":
            orgs = rng.sample(companies, rng.choice([1, 1, 2]))
        elif mix == "collaborative":
            orgs = [rng.choice(edu), rng.choice(companies)]
        elif mix == "government":
            orgs = [rng.choice(gov)]
        elif mix == "ghost":
            orgs = [rng.choice(edu), f"ghost{i}"]
        else:
            orgs = []
        docs.append(
            Document(
                doc_id=f"d{i:06d}",
                kind=kind,
                title=title,
                year=rng.randint(y0, y1),
                abstract=abstract,
                keywords=tuple(chosen) if rng.random() < 0.5 else (),
                venue=rng.choice(["alpha venue", "beta venue", None]),
                org_ids=tuple(orgs),
            )
        )
    return Corpus.from_documents(docs)


def make_technologies(n: int, seed: int = 0) -> list[str]:
    """Technology phrases disjoint from topic labels (distinct noun pool)."""
    combos = [f"{a} {b}" for a in _ADJECTIVES for b in _TECH_NOUNS]
    if n > len(combos):
        raise ValueError(f"at most {len(combos)} technologies available")
    rng = random.Random(seed + 7)
    rng.shuffle(combos)
    return combos[:n]


def make_embeddings_text(ontology: TopicOntology, dim: int = 32, seed: int = 0) -> str:
    """Textual vector file: each topic label gets an underscore-joined entry
    on its own unit direction; label tokens sit near their topics; filler
    words get unrelated vectors."""
    rng = random.Random(seed)

    def rand_vec() -> list[float]:
        v = [rng.gauss(0.0, 1.0) for _ in range(dim)]
        norm = sum(x * x for x in v) ** 0.5 or 1.0
        return [x / norm for x in v]

    rows: dict[str, list[float]] = {}
    token_dirs: dict[str, list[list[float]]] = {}
    for topic in sorted(ontology.topics):
        for label in sorted(ontology.labels[topic]):
            direction = rand_vec()
            rows["_".join(label.split())] = direction
            for token in label.split():
                token_dirs.setdefault(token, []).append(direction)
    for token, dirs in sorted(token_dirs.items()):
        if token in rows:
            continue
        mixed = [sum(d[i] for d in dirs) / len(dirs) for i in range(dim)]
        noise = rand_vec()
        rows[token] = [0.9 * m + 0.1 * s for m, s in zip(mixed, noise)]
    for word in _FILLERS:
        rows.setdefault(word, rand_vec())
    lines = [f"{len(rows)} {dim}"]
    for word, vec in rows.items():
        lines.append(word + " " + " ".join(f"{x:.6f}" for x in vec))
    return "\n".join(lines) + "\n"


def make_lag_graph(
    n_topics: int = 40,
    seed: int = 0,
    gap: int = 3,
    per_stream: int = 10,
) -> AidaGraph:
    """Graph where every topic's academic-paper stream reaches ``per_stream``
    documents exactly ``gap`` years before its industrial-paper stream."""
    labels = make_topic_labels(n_topics, seed)
    ontology = build_ontology([], topics=labels)
    rng = random.Random(seed + 1)
    docs: dict[str, DocEntry] = {}
    for t, label in enumerate(labels):
        base = 2000 + rng.randrange(6)
        for j in range(per_stream):
            docs[f"ra-{t}-{j}"] = DocEntry(
                DocKind.PUBLICATION, base, frozenset([label]),
                AffiliationType.ACADEMIC, frozenset(),
            )
            docs[f"ri-{t}-{j}"] = DocEntry(
                DocKind.PUBLICATION, base + gap, frozenset([label]),
                AffiliationType.INDUSTRIAL, frozenset(),
            )
    return AidaGraph(docs, ontology)


_NOISE_PATTERNS = [
    (3, 3, 3, 3, 3),  # constant, slope 0
    (5, 4, 3, 2, 1),  # declining
    (2, 2, 0, 0, 0),  # early burst
    (4, 0, 0, 0, 0),  # single year, below support rule
    (0, 3, 2, 1, 0),  # rise then fall, slope < 0
]


def make_acceleration_windows(
    seed: int = 0, n_noise_topics: int = 20, n_noise_edges: int = 30
) -> tuple[list[TopicNetwork], frozenset[str]]:
    """Five yearly networks with one planted accelerating triangle among
    noise edges whose slopes are all <= 0.  Returns (networks, planted set)."""
    rng = random.Random(seed)
    planted = ("planted alpha", "planted beta", "planted gamma")
    noise_topics = [f"noise {i:02d}" for i in range(n_noise_topics)]
    yearly: list[dict[tuple[str, str], int]] = [{} for _ in range(5)]
    triangle = [
        tuple(sorted(pair))
        for pair in [(planted[0], planted[1]), (planted[0], planted[2]), (planted[1], planted[2])]
    ]
    for x in range(5):
        for edge in triangle:
            yearly[x][edge] = x + 1  # weights 1..5, slope 1.0 on every edge
    chosen: set[tuple[str, str]] = set()
    while len(chosen) < n_noise_edges:
        a, b = rng.sample(noise_topics, 2)
        chosen.add(tuple(sorted((a, b))))
    for edge in sorted(chosen):
        pattern = rng.choice(_NOISE_PATTERNS)
        for x, w in enumerate(pattern):
            if w > 0:
                yearly[x][edge] = w
    networks = []
    for x in range(5):
        nodes: dict[str, int] = {}
        for a, b in yearly[x]:
            nodes[a] = nodes.get(a, 0) + 1
            nodes[b] = nodes.get(b, 0) + 1
        networks.append(TopicNetwork(2000 + x, nodes, yearly[x]))
    return networks, frozenset(planted)


def make_forecast_samples(
    n: int = 2000, seed: int = 0, positive_share: float = 0.3
) -> list[ForecastSample]:
    """Planted signal: positives have linearly rising RI and PI streams; RA
    and PA are uninformative noise for both classes."""
    rng = random.Random(seed)
    labels = make_topic_labels(60, seed)
    samples = []
    for i in range(n):
        positive = rng.random() < positive_share

        def noise() -> tuple[int, ...]:
            return tuple(rng.randrange(4) for _ in range(5))

        if positive:
            base = rng.randrange(3)
            slope = rng.choice([2, 3])
            ri = tuple(base + slope * x + rng.randrange(2) for x in range(5))
            pi = tuple(base + slope * x + rng.randrange(2) for x in range(5))
        else:
            ri, pi = noise(), noise()
        samples.append(
            ForecastSample(
                topic=labels[i % len(labels)],
                window_start=2000 + (i % 10),
                ra=noise(),
                ri=ri,
                pa=noise(),
                pi=pi,
                label=positive,
            )
        )
    return samples


def make_adoption_cube(
    seed: int = 0,
    n_tech: int = 12,
    n_topics: int = 8,
    y0: int = 2000,
    y1: int = 2011,
) -> TechTopicCube:
    """Cube where 'spreading' technologies sweep across topics in a wave
    (recent cross-topic activity predicts upcoming adoption) and dormant
    technologies stay near zero."""
    rng = random.Random(seed)
    techs = make_technologies(n_tech, seed)
    topics = make_topic_labels(n_topics, seed + 13)
    cell: dict[tuple[str, str, int], int] = {}
    for tech in techs:
        spreading = rng.random() < 0.5
        if not spreading:
            for topic in topics:
                if rng.random() < 0.2:
                    year = rng.randint(y0, y1)
                    cell[(tech, topic, year)] = 1
            continue
        wave = rng.randint(y0 + 1, y0 + 4)
        for rank, topic in enumerate(sorted(topics, key=lambda t: rng.random())):
            start = wave + rank  # one topic adopts per year
            for year in range(start, y1 + 1):
                cell[(tech, topic, year)] = 3 + rng.randrange(3)
    return TechTopicCube(tuple(techs), tuple(sorted(topics)), y0, y1, cell)
