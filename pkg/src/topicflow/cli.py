"""Command-line entry point: ``topicflow <command>``.

Commands mirror the pipeline stages (ingest, stats, graph, cluster, trace,
export) plus ``run`` for all of them. ``--config`` loads a TOML/JSON file and
any flag given explicitly overrides it. TOPICFLOW_LOG sets the log level.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, PipelineConfig, load_config, parse_fuzzy_table, read_table
from .corpus import IngestError, corpus_stats, corpus_to_dict, ingest
from .crisp import CrispConfig, parse_alpha
from .flow import emit_dot, emit_json, flow_from_trace
from .fuzzy import LEVELS
from .gow import build_graph
from .mcl import cluster_graph
from .pipeline import (
    StageError,
    dump_json,
    read_clusters,
    read_corpus,
    read_graphs,
    read_trace,
    run_pipeline,
    write_clusters,
    write_graphs,
)
from .trace import trace_crisp, trace_fuzzy

logger = logging.getLogger("topicflow")


def _overrides(cfg: PipelineConfig, args: argparse.Namespace) -> PipelineConfig:
    """Replace config fields with every flag the user actually passed."""
    def pick(section, **names):
        changes = {field: getattr(args, arg) for field, arg in names.items()
                   if getattr(args, arg, None) is not None}
        return dataclasses.replace(section, **changes) if changes else section

    ingest_opts = pick(cfg.ingest, bucket="bucket", timezone="timezone", bucket_field="bucket_field")
    mcl = pick(cfg.mcl, expansion="expansion", inflation="inflation", self_loop_weight="self_loop_weight",
               prune_threshold="prune_threshold", tolerance="tolerance", max_iterations="max_iterations")
    export = pick(cfg.export, min_mu="min_mu", min_level="min_level", label_tokens="label_tokens")
    crisp = cfg.crisp if getattr(args, "alpha", None) is None else CrispConfig(parse_alpha(args.alpha))
    fuzzy = cfg.fuzzy
    if getattr(args, "params", None):
        data = read_table(args.params)
        fuzzy = parse_fuzzy_table(data.get("fuzzy", data), "fuzzy")
    min_npmi = cfg.min_npmi if getattr(args, "min_npmi", None) is None else args.min_npmi
    return dataclasses.replace(cfg, ingest=ingest_opts, mcl=mcl, export=export, crisp=crisp, fuzzy=fuzzy,
                               min_npmi=min_npmi)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def cmd_ingest(args, cfg: PipelineConfig) -> int:
    with open(args.input) as fh:
        corpus, report = ingest(fh, cfg.ingest.bucket, cfg.ingest.timezone, cfg.ingest.bucket_field)
    _write(args.out, dump_json(corpus_to_dict(corpus)))
    print(f"{report.accepted} records in {len(corpus.timepoints)} timepoints, {report.skipped} skipped",
          file=sys.stderr)
    return 0


def cmd_stats(args, cfg: PipelineConfig) -> int:
    rows = corpus_stats(read_corpus(args.corpus))
    if args.format == "json":
        _write(None, dump_json(rows))
        return 0
    width = max(len("timepoint"), *(len(r["label"]) for r in rows))
    print(f"{'timepoint':<{width}}  {'docs':>6}  {'tokens':>6}")
    for r in rows:
        print(f"{r['label']:<{width}}  {r['docs']:>6}  {r['tokens']:>6}")
    return 0


def cmd_graph(args, cfg: PipelineConfig) -> int:
    corpus = read_corpus(args.corpus)
    write_graphs([build_graph(tp, cfg.min_npmi) for tp in corpus.timepoints], Path(args.out))
    return 0


def cmd_cluster(args, cfg: PipelineConfig) -> int:
    write_clusters([cluster_graph(g, cfg.mcl) for g in read_graphs(args.graphs)], Path(args.out))
    return 0


def cmd_trace(args, cfg: PipelineConfig) -> int:
    clusterings = read_clusters(args.clusters)
    trace = trace_crisp(clusterings, cfg.crisp) if args.mode == "crisp" else trace_fuzzy(clusterings, cfg.fuzzy)
    _write(args.out, dump_json(trace.to_dict()))
    return 0


def cmd_export(args, cfg: PipelineConfig) -> int:
    flow = flow_from_trace(read_trace(args.trace))
    if args.format == "json":
        _write(args.out, emit_json(flow))
    else:
        opts = cfg.export
        _write(args.out, emit_dot(flow, opts.label_tokens, opts.min_mu, opts.min_level))
    return 0


def cmd_run(args, cfg: PipelineConfig) -> int:
    manifest = run_pipeline(cfg, args.input, args.out_dir)
    print(f"wrote {sum(len(v) for v in manifest['stages'].values())} artifacts to {args.out_dir}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="topicflow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="TOML or JSON pipeline config")
        p.set_defaults(func=func)
        return p

    def ingest_flags(p):
        p.add_argument("--bucket", choices=["day", "field"])
        p.add_argument("--timezone")
        p.add_argument("--bucket-field", dest="bucket_field")

    def mcl_flags(p):
        p.add_argument("--inflation", type=float)
        p.add_argument("--expansion", type=int)
        p.add_argument("--self-loop-weight", dest="self_loop_weight", type=float)
        p.add_argument("--prune-threshold", dest="prune_threshold", type=float)
        p.add_argument("--tolerance", type=float)
        p.add_argument("--max-iterations", dest="max_iterations", type=int)

    def trace_flags(p):
        p.add_argument("--alpha", help="crisp threshold, e.g. 0.6667 or 2/3")
        p.add_argument("--params", help="TOML/JSON file of per-kind trapezoids")

    def export_flags(p):
        p.add_argument("--min-mu", dest="min_mu", type=float)
        p.add_argument("--min-level", dest="min_level", choices=LEVELS)
        p.add_argument("--label-tokens", dest="label_tokens", action=argparse.BooleanOptionalAction, default=None)

    p = add("ingest", cmd_ingest, "bucket JSON-lines documents into timepoints")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    ingest_flags(p)

    p = add("stats", cmd_stats, "per-timepoint document and token counts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", choices=["table", "json"], default="table")

    p = add("graph", cmd_graph, "build NPMI graphs of words")
    p.add_argument("--corpus", required=True)
    p.add_argument("--min-npmi", dest="min_npmi", type=float)
    p.add_argument("--out", required=True)

    p = add("cluster", cmd_cluster, "Markov-cluster each graph")
    p.add_argument("--graphs", required=True)
    p.add_argument("--out", required=True)
    mcl_flags(p)

    p = add("trace", cmd_trace, "classify transitions between consecutive clusterings")
    p.add_argument("--clusters", required=True)
    p.add_argument("--mode", choices=["crisp", "fuzzy"], required=True)
    p.add_argument("--out")
    trace_flags(p)

    p = add("export", cmd_export, "render a trace as a flow graph")
    p.add_argument("--trace", required=True)
    p.add_argument("--format", choices=["dot", "json"], default="dot")
    p.add_argument("--out")
    export_flags(p)

    p = add("run", cmd_run, "run the full pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--min-npmi", dest="min_npmi", type=float)
    ingest_flags(p)
    mcl_flags(p)
    trace_flags(p)
    export_flags(p)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    level = logging.getLevelName(os.environ.get("TOPICFLOW_LOG", "WARNING").upper())
    logging.basicConfig(
        level=level if isinstance(level, int) else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = _overrides(load_config(args.config), args)
        return args.func(args, cfg)
    except StageError as exc:
        print(f"topicflow: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, ValueError, IngestError, OSError, json.JSONDecodeError) as exc:
        print(f"topicflow {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
