#!/usr/bin/env python3
"""Run the full analysis pipeline over a synthetic workspace.

Generates data unless the workspace already holds a corpus, then drives
every CLI stage in order: classify, build-kg, stats, trends, emergence,
forecast, ttf, and the report bundle.  Timings per stage go to stdout.
"""

import argparse
import sys
import time
from collections import Counter
from pathlib import Path

from scitrends.classifier import read_annotations
from scitrends.cli import run_command


def stage(argv: list[str]) -> None:
    start = time.perf_counter()
    rc = run_command(argv)
    print(f"[{argv[0]}] exit {rc} in {time.perf_counter() - start:.2f}s")
    if rc != 0:
        sys.exit(rc)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--workspace", required=True, help="directory from make_synthetic_data")
    parser.add_argument("--topics", type=int, default=100, help="ontology size when generating")
    parser.add_argument("--docs", type=int, default=2000, help="corpus size when generating")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=4)
    args = parser.parse_args()

    ws = Path(args.workspace)
    if not (ws / "corpus.jsonl").exists():
        from make_synthetic_data import main as generate

        generate([
            "--out-dir", str(ws),
            "--topics", str(args.topics),
            "--docs", str(args.docs),
            "--seed", str(args.seed),
        ])

    stage([
        "classify",
        "--ontology", str(ws / "ontology.csv"),
        "--corpus", str(ws / "corpus.jsonl"),
        "--embeddings", str(ws / "embeddings.txt"),
        "--out", str(ws / "annotations.jsonl"),
        "--threads", str(args.threads),
    ])
    stage([
        "build-kg",
        "--ontology", str(ws / "ontology.csv"),
        "--corpus", str(ws / "corpus.jsonl"),
        "--annotations", str(ws / "annotations.jsonl"),
        "--registry", str(ws / "registry.csv"),
        "--taxonomy", str(ws / "taxonomy.csv"),
        "--out", str(ws / "graph.ttl"),
    ])
    stage([
        "stats",
        "--ontology", str(ws / "ontology.csv"),
        "--graph", str(ws / "graph.ttl"),
        "--out", str(ws / "stats.json"),
        "--text-out", str(ws / "stats.txt"),
    ])

    counts = Counter(
        t for a in read_annotations(ws / "annotations.jsonl") for t in a.union
    )
    busiest = ",".join(t for t, _n in counts.most_common(3))
    stage([
        "trends",
        "--ontology", str(ws / "ontology.csv"),
        "--graph", str(ws / "graph.ttl"),
        "--topic", busiest,
        "--out", str(ws / "series.csv"),
        "--indexes-out", str(ws / "indexes.csv"),
        "--lag-out", str(ws / "lag.json"),
    ])
    stage([
        "emergence",
        "--ontology", str(ws / "ontology.csv"),
        "--graph", str(ws / "graph.ttl"),
        "--start-year", "2010",
        "--out", str(ws / "clusters.json"),
        "--networks-out", str(ws / "networks.csv"),
    ])
    stage([
        "forecast",
        "--ontology", str(ws / "ontology.csv"),
        "--graph", str(ws / "graph.ttl"),
        "--window", "3", "--horizon", "3",
        "--emerged-lt", "1000000", "--label-gt", "2",
        "--overlapping", "false", "--folds", "3",
        "--out", str(ws / "forecast.csv"),
        "--json-out", str(ws / "forecast.json"),
    ])
    stage([
        "ttf",
        "--corpus", str(ws / "corpus.jsonl"),
        "--annotations", str(ws / "annotations.jsonl"),
        "--technologies", str(ws / "technologies.txt"),
        "--y0", "2000", "--y1", "2019",
        "--min-papers", "1", "--feature-years", "3",
        "--horizon", "3", "--adopted-at", "3",
        # logreg: the all-topic feature vector grows with ontology size,
        # and tree building over it dominates everything else at this scale
        "--model", "logreg",
        "--folds", "3", "--min-positive", "1",
        "--out", str(ws / "adoption.csv"),
        "--cube-out", str(ws / "cube.csv"),
    ])
    stage([
        "report",
        "--ontology", str(ws / "ontology.csv"),
        "--graph", str(ws / "graph.ttl"),
        "--window-a", "2000:2009",
        "--window-b", "2010:2019",
        "--out-dir", str(ws / "report"),
    ])


if __name__ == "__main__":
    main()
