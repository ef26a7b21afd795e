#!/usr/bin/env python3
"""Write the synthetic drift corpus, run the full pipeline on it and list the transitions."""
import argparse
from pathlib import Path

from topicflow.config import PipelineConfig
from topicflow.pipeline import read_trace, run_pipeline
from topicflow.synthetic import drift_records, to_jsonl


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="drift-run")
    parser.add_argument("--mode", choices=["crisp", "fuzzy"], default="crisp")
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    src = out / "drift.jsonl"
    src.write_text(to_jsonl(drift_records()))
    run_pipeline(PipelineConfig(), src, out)

    trace = read_trace(out / f"trace-{args.mode}.json")
    for t, pair in enumerate(trace.transitions):
        a, b = trace.clusterings[t].label, trace.clusterings[t + 1].label
        print(f"{a} -> {b}")
        for tr in pair:
            grade = "" if args.mode == "crisp" else f"  {tr.dominant} mu={tr.mu:.3f}"
            print(f"  {tr.kind:<9} {','.join(tr.sources) or '-':>9} -> {','.join(tr.targets) or '-'}{grade}")
    print(f"artifacts in {out}; render with: dot -Tsvg {out}/flow-{args.mode}.dot -o flow.svg")


if __name__ == "__main__":
    main()
