#!/usr/bin/env python3
"""Generate a synthetic workspace for pipeline experiments.

Writes an ontology, organisation registry, sector taxonomy, corpus,
technology list, and word-vector file into one directory, all derived
from a single seed so runs are reproducible.
"""

import argparse
from pathlib import Path

from scitrends.corpus import write_corpus
from scitrends.synth import (
    make_corpus,
    make_embeddings_text,
    make_ontology,
    make_registry,
    make_technologies,
    ontology_csv,
    registry_csv,
    taxonomy_csv,
)


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True, help="workspace directory to fill")
    parser.add_argument("--topics", type=int, default=100)
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--technologies", type=int, default=12)
    parser.add_argument("--y0", type=int, default=2000)
    parser.add_argument("--y1", type=int, default=2019)
    parser.add_argument("--patent-share", type=float, default=0.25)
    parser.add_argument("--embedding-dim", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ontology = make_ontology(args.topics, seed=args.seed)
    registry = make_registry(seed=args.seed)
    technologies = make_technologies(args.technologies, seed=args.seed)
    corpus = make_corpus(
        ontology,
        registry,
        args.docs,
        y0=args.y0,
        y1=args.y1,
        seed=args.seed,
        patent_share=args.patent_share,
        technologies=technologies,
    )

    (out / "ontology.csv").write_text(ontology_csv(ontology))
    (out / "registry.csv").write_text(registry_csv(registry))
    (out / "taxonomy.csv").write_text(taxonomy_csv())
    (out / "technologies.txt").write_text("\n".join(technologies) + "\n")
    (out / "embeddings.txt").write_text(
        make_embeddings_text(ontology, dim=args.embedding_dim, seed=args.seed)
    )
    write_corpus(out / "corpus.jsonl", corpus)
    for name in (
        "ontology.csv",
        "registry.csv",
        "taxonomy.csv",
        "technologies.txt",
        "embeddings.txt",
        "corpus.jsonl",
    ):
        print(f"wrote {out / name}")


if __name__ == "__main__":
    main()
