#!/usr/bin/env python3
"""Random corpus with fifteen days of fixed document counts; prints ingest stats and cluster counts.

Handy as a sizing check: the token draws are uniform, so the clusterings are
noise and only the per-stage volumes mean anything.
"""
import argparse
import io

from topicflow.corpus import corpus_stats, ingest
from topicflow.gow import build_graph
from topicflow.mcl import MclParams, cluster_graph
from topicflow.synthetic import daily_volume_records, to_jsonl


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=19)
    parser.add_argument("--min-npmi", type=float, default=0.0)
    args = parser.parse_args()

    corpus, report = ingest(io.StringIO(to_jsonl(daily_volume_records(args.seed))))
    print(f"{report.accepted} documents, {report.skipped} skipped")
    print(f"{'day':<11} {'docs':>5} {'tokens':>6} {'nodes':>5} {'edges':>5} {'clusters':>8}")
    for row, tp in zip(corpus_stats(corpus), corpus.timepoints):
        graph = build_graph(tp, args.min_npmi)
        clusters = cluster_graph(graph, MclParams())
        print(f"{row['label']:<11} {row['docs']:>5} {row['tokens']:>6} {len(graph.nodes):>5} "
              f"{len(graph.edges):>5} {len(clusters.clusters):>8}")


if __name__ == "__main__":
    main()
