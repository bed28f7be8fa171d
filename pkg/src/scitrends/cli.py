"""Command-line pipeline driver.

One executable with subcommands: classify, build-kg, stats, trends,
emergence, forecast, ttf, filter, report.  Every parameter can come from a
``--config file.json`` (keys = parameter names with underscores); explicit
flags win.  Each run writes a JSON manifest next to its primary output
recording command, parameters, inputs, and outputs.  The manifest excludes
runtime-only knobs (thread count), so reruns with the same config and seed
are byte-identical at any ``--threads`` value.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analytics import (
    academia_industry_index,
    growing_topics,
    lag_report,
    papers_patents_index,
    topic_time_series,
    write_growth_csv,
    write_indexes_csv,
    write_lag_json,
    write_time_series_csv,
)
from .classifier import (
    ClassifierConfig,
    TopicClassifier,
    read_annotations,
    write_annotations,
)
from .corpus import filter_corpus, load_corpus, load_registry, load_taxonomy, write_corpus
from .embeddings import load_embeddings
from .emergence import (
    build_topic_network,
    detect_emerging,
    evaluate_against_gold,
    load_gold,
    write_clusters_json,
    write_networks_csv,
)
from .forecast import (
    FEATURE_COMBOS,
    build_gold_standard,
    run_experiment,
    write_results_csv,
    write_results_json,
    write_samples_csv,
)
from .kg import build_graph, export_triples, graph_stats, read_triples, render_stats, stats_to_json
from .ontology import load_ontology
from .ttf import (
    adoption_samples,
    build_cube,
    load_technologies,
    predict_adoption,
    write_adoption_csv,
    write_adoption_json,
    write_cube_csv,
)


class UsageError(Exception):
    """Bad flags or missing required parameters (exit 1)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are 1
        raise UsageError(message)


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_window(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected a year window 'Y0:Y1', got {text!r}"
        ) from None


# name, type, default, required, help
_SPECS: dict[str, list[tuple]] = {
    "classify": [
        ("ontology", str, None, True, "ontology file"),
        ("ontology_format", str, "edge-csv", False, "edge-csv or turtle-subset"),
        ("corpus", str, None, True, "corpus JSONL"),
        ("embeddings", str, None, False, "word-vector file enabling the semantic stage"),
        ("threshold", float, 0.94, False, "syntactic similarity threshold"),
        ("top_k", int, 10, False, "semantic neighbours per n-gram"),
        ("similarity_floor", float, 0.7, False, "minimum neighbour cosine"),
        ("out", str, None, True, "annotations JSONL to write"),
    ],
    "build-kg": [
        ("ontology", str, None, True, "ontology file"),
        ("ontology_format", str, "edge-csv", False, "edge-csv or turtle-subset"),
        ("corpus", str, None, True, "corpus JSONL"),
        ("annotations", str, None, True, "annotations JSONL from classify"),
        ("registry", str, None, True, "organisation registry CSV"),
        ("taxonomy", str, None, False, "sector taxonomy CSV for validation"),
        ("out", str, None, True, "triple file to write"),
    ],
    "stats": [
        ("ontology", str, None, True, "ontology file"),
        ("ontology_format", str, "edge-csv", False, "edge-csv or turtle-subset"),
        ("graph", str, None, True, "triple file from build-kg"),
        ("out", str, None, True, "stats JSON to write"),
        ("text_out", str, None, False, "optional aligned-text table"),
    ],
    "trends": [
        ("ontology", str, None, True, "ontology file"),
        ("ontology_format", str, "edge-csv", False, "edge-csv or turtle-subset"),
        ("graph", str, None, True, "triple file from build-kg"),
        ("topic", str, None, True, "comma-separated topic labels"),
        ("y0", int, None, False, "first year (default: graph minimum)"),
        ("y1", int, None, False, "last year (default: graph maximum)"),
        ("out", str, None, True, "time-series CSV to write"),
        ("indexes_out", str, None, False, "optional per-topic index CSV"),
        ("lag_out", str, None, False, "optional lag-report JSON"),
        ("emergence_threshold", int, 10, False, "documents needed to emerge"),
    ],
    "emergence": [
        ("ontology", str, None, True, "ontology file"),
        ("ontology_format", str, "edge-csv", False, "edge-csv or turtle-subset"),
        ("graph", str, None, True, "triple file from build-kg"),
        ("start_year", int, None, True, "first year of the 5-year window"),
        ("k", int, 3, False, "clique size"),
        ("growth_percentile", float, 0.75, False, "positive-slope percentile"),
        ("gold", str, None, False, "gold-standard JSON for evaluation"),
        ("min_overlap", float, 0.5, False, "cluster/ancestors overlap to match"),
        ("out", str, None, True, "clusters JSON to write"),
        ("networks_out", str, None, False, "optional edge-list CSV"),
    ],
    "forecast": [
        ("ontology", str, None, True, "ontology file"),
        ("ontology_format", str, "edge-csv", False, "edge-csv or turtle-subset"),
        ("graph", str, None, True, "triple file from build-kg"),
        ("window", int, 5, False, "feature window years"),
        ("horizon", int, 10, False, "label horizon years"),
        ("emerged_lt", int, 10, False, "emergence cut-off (cumulative PI)"),
        ("label_gt", int, 50, False, "positive-label patent count"),
        ("overlapping", _parse_bool, True, False, "slide windows by one year"),
        ("combos", str, "all", False, "comma-separated combo names or 'all'"),
        ("model", str, "logreg", False, "logreg or random_forest"),
        ("folds", int, 10, False, "cross-validation folds"),
        ("seed", int, 0, False, "random seed"),
        ("out", str, None, True, "results CSV to write"),
        ("json_out", str, None, False, "optional results JSON"),
        ("samples_out", str, None, False, "optional samples CSV"),
    ],
    "ttf": [
        ("corpus", str, None, True, "corpus JSONL"),
        ("annotations", str, None, True, "annotations JSONL from classify"),
        ("technologies", str, None, True, "technology list, one label per line"),
        ("y0", int, None, True, "first cube year"),
        ("y1", int, None, True, "last cube year"),
        ("min_papers", int, 10, False, "minimum mentioning papers per technology"),
        ("feature_years", int, 5, False, "trailing feature window"),
        ("horizon", int, 5, False, "adoption horizon"),
        ("adopted_at", int, 10, False, "cumulative count defining adoption"),
        ("model", str, "random_forest", False, "logreg or random_forest"),
        ("folds", int, 10, False, "cross-validation folds"),
        ("seed", int, 0, False, "random seed"),
        ("min_positive", int, 50, False, "positives needed for a per-topic row"),
        ("out", str, None, True, "adoption CSV to write"),
        ("json_out", str, None, False, "optional adoption JSON"),
        ("cube_out", str, None, False, "optional cube CSV"),
    ],
    "filter": [
        ("corpus", str, None, True, "corpus JSONL"),
        ("query", str, None, True, "boolean query string"),
        ("out", str, None, True, "filtered corpus JSONL to write"),
    ],
    "report": [
        ("ontology", str, None, True, "ontology file"),
        ("ontology_format", str, "edge-csv", False, "edge-csv or turtle-subset"),
        ("graph", str, None, True, "triple file from build-kg"),
        ("window_a", _parse_window, None, True, "first growth window, 'Y0:Y1'"),
        ("window_b", _parse_window, None, True, "second growth window, 'Y0:Y1'"),
        ("top_n", int, 20, False, "growing topics to keep"),
        ("emergence_threshold", int, 10, False, "documents needed to emerge"),
        ("out_dir", str, None, True, "directory for the report bundle"),
    ],
}


def _build_parser() -> _Parser:
    parser = _Parser(prog="scitrends", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    for command, spec in _SPECS.items():
        p = sub.add_parser(command, add_help=True)
        p.add_argument("--config", type=str, default=None, help="JSON parameter file")
        p.add_argument("--threads", type=int, default=1, help="worker thread cap")
        for name, typ, _default, _required, help_text in spec:
            flag = "--" + name.replace("_", "-")
            p.add_argument(flag, dest=name, type=typ, default=None, help=help_text)
    return parser


def _resolve_params(command: str, args: argparse.Namespace) -> dict:
    """defaults < config file < explicit flags."""
    spec = _SPECS[command]
    params = {name: default for name, _t, default, _r, _h in spec}
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise UsageError(f"config {args.config} must hold a JSON object")
        types = {name: typ for name, typ, _d, _r, _h in spec}
        for key, value in loaded.items():
            if key not in params:
                raise UsageError(f"config key {key!r} unknown for {command!r}")
            if isinstance(value, str) and types[key] is not str:
                value = types[key](value)
            elif types[key] is _parse_window and isinstance(value, list):
                value = tuple(value)
            params[key] = value
    for name, _t, _d, _r, _h in spec:
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    missing = [
        name for name, _t, _d, required, _h in spec if required and params[name] is None
    ]
    if missing:
        flags = ", ".join("--" + m.replace("_", "-") for m in missing)
        raise UsageError(f"{command}: missing required parameters: {flags}")
    return params


def _write_manifest(command: str, params: dict, outputs: list[str]) -> None:
    """Sidecar JSON next to the first output (or manifest.json for dirs)."""
    primary = Path(outputs[0])
    path = primary / "manifest.json" if primary.is_dir() else Path(str(primary) + ".manifest.json")
    manifest = {
        "command": command,
        "version": __version__,
        "parameters": {
            k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(params.items())
        },
        "outputs": sorted(str(o) for o in outputs),
    }
    with path.open("w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_graph(params: dict):
    ontology = load_ontology(params["ontology"], params["ontology_format"])
    return ontology, read_triples(params["graph"], ontology)


def _cmd_classify(params: dict, threads: int) -> list[str]:
    ontology = load_ontology(params["ontology"], params["ontology_format"])
    corpus = load_corpus(params["corpus"])
    model = load_embeddings(params["embeddings"]) if params["embeddings"] else None
    config = ClassifierConfig(
        threshold=params["threshold"],
        top_k=params["top_k"],
        similarity_floor=params["similarity_floor"],
    )
    annotations = TopicClassifier(ontology, model, config).annotate_corpus(
        corpus, threads
    )
    write_annotations(params["out"], annotations)
    return [params["out"]]


def _cmd_build_kg(params: dict, threads: int) -> list[str]:
    ontology = load_ontology(params["ontology"], params["ontology_format"])
    corpus = load_corpus(params["corpus"])
    annotations = read_annotations(params["annotations"])
    taxonomy = load_taxonomy(params["taxonomy"]) if params["taxonomy"] else None
    registry = load_registry(params["registry"], taxonomy)
    graph = build_graph(corpus, annotations, registry, ontology)
    count = export_triples(graph, params["out"])
    print(f"wrote {count} content triples")
    return [params["out"]]


def _cmd_stats(params: dict, threads: int) -> list[str]:
    _, graph = _load_graph(params)
    report = graph_stats(graph)
    outputs = [params["out"]]
    with open(params["out"], "w", encoding="utf-8") as fh:
        json.dump(stats_to_json(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    if params["text_out"]:
        with open(params["text_out"], "w", encoding="utf-8") as fh:
            fh.write(render_stats(report))
        outputs.append(params["text_out"])
    return outputs


def _graph_year_span(graph) -> tuple[int, int]:
    years = [entry.year for entry in graph.docs.values()]
    if not years:
        raise ValueError("graph has no documents")
    return min(years), max(years)


def _cmd_trends(params: dict, threads: int) -> list[str]:
    _, graph = _load_graph(params)
    topics = [t.strip() for t in params["topic"].split(",") if t.strip()]
    if not topics:
        raise UsageError("trends: --topic lists no topics")
    y_min, y_max = _graph_year_span(graph)
    y0 = params["y0"] if params["y0"] is not None else y_min
    y1 = params["y1"] if params["y1"] is not None else y_max
    series = [topic_time_series(graph, t, y0, y1) for t in topics]
    write_time_series_csv(params["out"], series)
    outputs = [params["out"]]
    if params["indexes_out"]:
        rows = [
            (t, academia_industry_index(graph, t), papers_patents_index(graph, t))
            for t in topics
        ]
        write_indexes_csv(params["indexes_out"], rows)
        outputs.append(params["indexes_out"])
    if params["lag_out"]:
        write_lag_json(params["lag_out"], lag_report(graph, params["emergence_threshold"]))
        outputs.append(params["lag_out"])
    return outputs


def _cmd_emergence(params: dict, threads: int) -> list[str]:
    _, graph = _load_graph(params)
    years = range(params["start_year"], params["start_year"] + 5)
    networks = [build_topic_network(graph, y) for y in years]
    clusters = detect_emerging(networks, params["k"], params["growth_percentile"])
    evaluation = None
    if params["gold"]:
        gold = load_gold(params["gold"])
        evaluation = evaluate_against_gold(clusters, gold, params["min_overlap"])
    write_clusters_json(
        params["out"], clusters, years, params["k"], params["growth_percentile"], evaluation
    )
    outputs = [params["out"]]
    if params["networks_out"]:
        write_networks_csv(params["networks_out"], networks)
        outputs.append(params["networks_out"])
    return outputs


def _cmd_forecast(params: dict, threads: int) -> list[str]:
    _, graph = _load_graph(params)
    samples = build_gold_standard(
        graph,
        window=params["window"],
        horizon=params["horizon"],
        emerged_lt=params["emerged_lt"],
        label_gt=params["label_gt"],
        overlapping=params["overlapping"],
    )
    if params["combos"] == "all":
        combos = FEATURE_COMBOS
    else:
        combos = tuple(c.strip() for c in params["combos"].split(",") if c.strip())
    results = run_experiment(
        samples, combos, params["model"], params["folds"], params["seed"]
    )
    write_results_csv(params["out"], results)
    outputs = [params["out"]]
    if params["json_out"]:
        write_results_json(
            params["json_out"], results, params["model"], params["folds"], params["seed"]
        )
        outputs.append(params["json_out"])
    if params["samples_out"]:
        write_samples_csv(params["samples_out"], samples)
        outputs.append(params["samples_out"])
    return outputs


def _cmd_ttf(params: dict, threads: int) -> list[str]:
    corpus = load_corpus(params["corpus"])
    annotations = read_annotations(params["annotations"])
    technologies = load_technologies(params["technologies"])
    cube = build_cube(
        corpus, annotations, technologies, params["y0"], params["y1"], params["min_papers"]
    )
    samples = adoption_samples(
        cube, params["feature_years"], params["horizon"], params["adopted_at"]
    )
    report = predict_adoption(
        samples, params["model"], params["folds"], params["seed"], params["min_positive"]
    )
    write_adoption_csv(params["out"], report)
    outputs = [params["out"]]
    if params["json_out"]:
        write_adoption_json(params["json_out"], report)
        outputs.append(params["json_out"])
    if params["cube_out"]:
        write_cube_csv(params["cube_out"], cube)
        outputs.append(params["cube_out"])
    return outputs


def _cmd_filter(params: dict, threads: int) -> list[str]:
    corpus = load_corpus(params["corpus"])
    write_corpus(params["out"], filter_corpus(corpus, params["query"]))
    return [params["out"]]


def _cmd_report(params: dict, threads: int) -> list[str]:
    _, graph = _load_graph(params)
    out_dir = Path(params["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    report = graph_stats(graph)
    with (out_dir / "stats.json").open("w", encoding="utf-8") as fh:
        json.dump(stats_to_json(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with (out_dir / "stats.txt").open("w", encoding="utf-8") as fh:
        fh.write(render_stats(report))
    rows = growing_topics(graph, params["window_a"], params["window_b"], params["top_n"])
    write_growth_csv(str(out_dir / "growing_topics.csv"), rows)
    seen = sorted({t for entry in graph.docs.values() for t in entry.topics})
    index_rows = [
        (t, academia_industry_index(graph, t), papers_patents_index(graph, t))
        for t in seen
    ]
    write_indexes_csv(str(out_dir / "indexes.csv"), index_rows)
    write_lag_json(
        str(out_dir / "lag.json"), lag_report(graph, params["emergence_threshold"])
    )
    return [str(out_dir)]


_HANDLERS = {
    "classify": _cmd_classify,
    "build-kg": _cmd_build_kg,
    "stats": _cmd_stats,
    "trends": _cmd_trends,
    "emergence": _cmd_emergence,
    "forecast": _cmd_forecast,
    "ttf": _cmd_ttf,
    "filter": _cmd_filter,
    "report": _cmd_report,
}

_DATA_ERRORS = (ValueError, OSError, json.JSONDecodeError)


def run_command(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        params = _resolve_params(args.command, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except _DATA_ERRORS as exc:  # unreadable or corrupt config file
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        outputs = _HANDLERS[args.command](params, max(1, args.threads))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_manifest(args.command, params, outputs)
    for out in outputs:
        print(f"wrote {out}")
    return 0


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
