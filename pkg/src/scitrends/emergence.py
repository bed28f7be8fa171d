"""Detection of topic groups nurturing future research areas.

Pipeline: yearly topic co-occurrence networks over research papers; an
acceleration graph built from a 5-year window (least-squares slope per edge,
positive-growth percentile filter); overlapping communities via clique
percolation.  The combination is a declared variant, labelled
``acpm-variant`` in exported metadata.  Detected clusters are scored against
a gold standard of emerging topics with known ancestor sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import DocKind
from .kg import AidaGraph
from .ontology import TopicId

METHOD_NAME = "acpm-variant"
WINDOW_LENGTH = 5


class EmergenceError(ValueError):
    """Bad window shapes, parameters, or gold-standard files."""


@dataclass(frozen=True)
class TopicNetwork:
    year: int
    node_weight: dict[TopicId, int]
    edge_weight: dict[tuple[TopicId, TopicId], int]  # keys sorted pairs

    def __post_init__(self):
        for a, b in self.edge_weight:
            if a >= b:
                raise EmergenceError(f"edge key ({a!r}, {b!r}) not sorted")
            if a not in self.node_weight or b not in self.node_weight:
                raise EmergenceError(f"edge ({a!r}, {b!r}) references missing node")


def build_topic_network(graph: AidaGraph, year: int) -> TopicNetwork:
    """Nodes: topics on >= 1 paper of the year, weighted by paper count.
    Edges: topic pairs co-annotated on a paper, weighted by co-occurrence."""
    node_weight: dict[TopicId, int] = {}
    edge_weight: dict[tuple[TopicId, TopicId], int] = {}
    for entry in graph.docs.values():
        if entry.kind is not DocKind.PUBLICATION or entry.year != year:
            continue
        topics = sorted(entry.topics)
        for t in topics:
            node_weight[t] = node_weight.get(t, 0) + 1
        for i, a in enumerate(topics):
            for b in topics[i + 1 :]:
                edge_weight[(a, b)] = edge_weight.get((a, b), 0) + 1
    return TopicNetwork(year, node_weight, edge_weight)


def acceleration_graph(
    networks: list[TopicNetwork], growth_percentile: float = 0.75
) -> TopicNetwork:
    """Edges intensifying over a 5-year window.

    An edge qualifies if present in >= 2 of the 5 networks; its yearly
    weights (missing years = 0) get a least-squares slope; kept when the
    slope is positive and at or above the given percentile of positive
    slopes.  Output edge weight = slope x 1000 truncated; node weight =
    number of kept incident edges.
    """
    if len(networks) != WINDOW_LENGTH:
        raise EmergenceError(f"need {WINDOW_LENGTH} networks, got {len(networks)}")
    years = [n.year for n in networks]
    if years != list(range(years[0], years[0] + WINDOW_LENGTH)):
        raise EmergenceError(f"networks must cover consecutive years, got {years}")
    if not 0.0 <= growth_percentile <= 1.0:
        raise EmergenceError(f"growth_percentile must be in [0, 1], got {growth_percentile}")
    support: dict[tuple[TopicId, TopicId], int] = {}
    for net in networks:
        for edge in net.edge_weight:
            support[edge] = support.get(edge, 0) + 1
    # least squares over x = 0..4: slope = sum((x - 2) * w_x) / 10
    slopes: dict[tuple[TopicId, TopicId], float] = {}
    for edge, count in support.items():
        if count < 2:
            continue
        slope = (
            sum((x - 2) * net.edge_weight.get(edge, 0) for x, net in enumerate(networks))
            / 10.0
        )
        if slope > 0.0:
            slopes[edge] = slope
    if not slopes:
        return TopicNetwork(years[-1], {}, {})
    cutoff = float(np.quantile(sorted(slopes.values()), growth_percentile))
    edge_weight = {
        edge: int(slope * 1000) for edge, slope in slopes.items() if slope >= cutoff
    }
    node_weight: dict[TopicId, int] = {}
    for a, b in edge_weight:
        node_weight[a] = node_weight.get(a, 0) + 1
        node_weight[b] = node_weight.get(b, 0) + 1
    return TopicNetwork(years[-1], node_weight, edge_weight)


def _maximal_cliques(adj: dict[TopicId, set[TopicId]]) -> list[frozenset[TopicId]]:
    """Bron-Kerbosch with pivoting."""
    cliques: list[frozenset[TopicId]] = []

    def expand(r: set, p: set, x: set) -> None:
        if not p and not x:
            cliques.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(adj[u] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & adj[v], x & adj[v])
            p.remove(v)
            x.add(v)

    expand(set(), set(adj), set())
    return cliques


def clique_percolation(network: TopicNetwork, k: int = 3) -> list[frozenset[TopicId]]:
    """Overlapping communities: connected components of the k-clique
    adjacency relation (cliques adjacent when sharing k-1 nodes), computed
    over maximal cliques.  Deterministic order by sorted members."""
    if k < 3:
        raise EmergenceError(f"k must be >= 3, got {k}")
    adj: dict[TopicId, set[TopicId]] = {}
    for a, b in network.edge_weight:
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    cliques = [c for c in _maximal_cliques(adj) if len(c) >= k]
    parent = list(range(len(cliques)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(cliques)):
        for j in range(i + 1, len(cliques)):
            if len(cliques[i] & cliques[j]) >= k - 1:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict[int, set[TopicId]] = {}
    for i, clique in enumerate(cliques):
        groups.setdefault(find(i), set()).update(clique)
    return sorted((frozenset(g) for g in groups.values()), key=sorted)


def detect_emerging(
    networks: list[TopicNetwork],
    k: int = 3,
    growth_percentile: float = 0.75,
) -> list[frozenset[TopicId]]:
    """Clusters of topics whose collaboration accelerates over the window."""
    return clique_percolation(acceleration_graph(networks, growth_percentile), k)


@dataclass(frozen=True)
class GoldEntry:
    emerging_topic: str
    debut_year: int
    ancestors: frozenset[TopicId]

    def __post_init__(self):
        if not self.ancestors:
            raise EmergenceError(
                f"gold entry {self.emerging_topic!r} has no ancestors"
            )


@dataclass(frozen=True)
class GoldStandard:
    entries: tuple[GoldEntry, ...]


def load_gold(path: str) -> GoldStandard:
    """JSON list of {emerging_topic, debut_year, ancestors[]}."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise EmergenceError("gold standard must be a JSON list")
    entries = []
    for i, obj in enumerate(data):
        try:
            entries.append(
                GoldEntry(
                    emerging_topic=obj["emerging_topic"],
                    debut_year=int(obj["debut_year"]),
                    ancestors=frozenset(obj["ancestors"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise EmergenceError(f"gold entry {i}: {exc}") from exc
    return GoldStandard(tuple(entries))


def save_gold(path: str, gold: GoldStandard) -> None:
    data = [
        {
            "emerging_topic": e.emerging_topic,
            "debut_year": e.debut_year,
            "ancestors": sorted(e.ancestors),
        }
        for e in gold.entries
    ]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def evaluate_against_gold(
    clusters,
    gold: GoldStandard,
    min_overlap: float = 0.5,
) -> tuple[float, float]:
    """(precision, recall): a cluster matches a gold entry when
    |cluster & ancestors| / |ancestors| >= min_overlap; precision over
    clusters, recall over gold entries.  No clusters -> precision 0."""
    if not gold.entries:
        raise EmergenceError("gold standard is empty")
    clusters = list(clusters)
    matched_clusters = 0
    covered = [False] * len(gold.entries)
    for cluster in clusters:
        hit = False
        for i, entry in enumerate(gold.entries):
            overlap = len(cluster & entry.ancestors) / len(entry.ancestors)
            if overlap >= min_overlap:
                hit = True
                covered[i] = True
        matched_clusters += hit
    precision = matched_clusters / len(clusters) if clusters else 0.0
    recall = sum(covered) / len(gold.entries)
    return precision, recall


def write_networks_csv(path: str, networks) -> None:
    """Edge list rows ``year,a,b,weight`` sorted by (year, a, b)."""
    rows = []
    for net in networks:
        for (a, b), w in net.edge_weight.items():
            rows.append((net.year, a, b, w))
    rows.sort()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("year,a,b,weight\n")
        for year, a, b, w in rows:
            fh.write(f"{year},{a},{b},{w}\n")


def write_clusters_json(
    path: str, clusters, window_years, k, growth_percentile, evaluation=None
) -> None:
    payload = {
        "method": METHOD_NAME,
        "window_years": list(window_years),
        "k": k,
        "growth_percentile": growth_percentile,
        "clusters": [sorted(c) for c in clusters],
    }
    if evaluation is not None:
        precision, recall = evaluation
        payload["evaluation"] = {"precision": precision, "recall": recall}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
