"""Stage functions and the end-to-end run that writes every stage artifact plus a manifest."""
from __future__ import annotations

import hashlib
import json
import logging
import shutil
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Sequence

from .config import PipelineConfig
from .corpus import TimepointedCorpus, corpus_from_dict, corpus_to_dict, ingest
from .flow import emit_dot, emit_json, flow_from_trace
from .gow import TemporalGraph, build_graph
from .mcl import ClusterSet, cluster_graph
from .trace import Trace, trace_crisp, trace_fuzzy

logger = logging.getLogger(__name__)

PARTIAL = ".partial"


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def timepoint_filename(index: int) -> str:
    return f"t{index:03d}.json"


# ---- stage IO -------------------------------------------------------------

def read_corpus(path: str | Path) -> TimepointedCorpus:
    return corpus_from_dict(json.loads(Path(path).read_text()))


def write_graphs(graphs: Sequence[TemporalGraph], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for g in graphs:
        (out_dir / timepoint_filename(g.timepoint_index)).write_text(dump_json(g.to_dict()))


def read_graphs(in_dir: str | Path) -> list[TemporalGraph]:
    graphs = [TemporalGraph.from_dict(json.loads(p.read_text())) for p in sorted(Path(in_dir).glob("t*.json"))]
    return sorted(graphs, key=lambda g: g.timepoint_index)


def write_clusters(clusterings: Sequence[ClusterSet], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for cs in clusterings:
        (out_dir / timepoint_filename(cs.timepoint_index)).write_text(dump_json(cs.to_dict()))


def read_clusters(in_dir: str | Path) -> list[ClusterSet]:
    sets = [ClusterSet.from_dict(json.loads(p.read_text())) for p in sorted(Path(in_dir).glob("t*.json"))]
    return sorted(sets, key=lambda cs: cs.timepoint_index)


def read_trace(path: str | Path) -> Trace:
    return Trace.from_dict(json.loads(Path(path).read_text()))


# ---- end-to-end run ------------------------------------------------------

@contextmanager
def _stage(name: str) -> Iterator[None]:
    logger.info("stage %s", name)
    try:
        yield
    except Exception as exc:
        raise StageError(name, exc) from exc


def _promote(partial: Path, final: Path) -> None:
    if final.is_dir():
        shutil.rmtree(final)
    elif final.exists():
        final.unlink()
    partial.replace(final)


def _partial(path: Path) -> Path:
    p = path.with_name(path.name + PARTIAL)
    if p.is_dir():
        shutil.rmtree(p)
    elif p.exists():
        p.unlink()
    return p


def run_pipeline(config: PipelineConfig, input_path: str | Path, out_dir: str | Path) -> dict:
    """Run every stage, writing artifacts under out_dir.

    Each stage writes to a ``.partial`` sibling first and renames it on
    success, so a failing stage leaves its partial output behind. Returns the
    manifest, which is also written to ``manifest.json``.
    """
    input_path = Path(input_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stages: dict[str, list[Path]] = {}

    with _stage("ingest"):
        with input_path.open() as fh:
            corpus, report = ingest(fh, config.ingest.bucket, config.ingest.timezone, config.ingest.bucket_field)
        target = out / "corpus.json"
        tmp = _partial(target)
        tmp.write_text(dump_json(corpus_to_dict(corpus)))
        _promote(tmp, target)
        stages["ingest"] = [target]

    with _stage("graph"):
        target = out / "graphs"
        tmp = _partial(target)
        tmp.mkdir()
        graphs = []
        for tp in corpus.timepoints:
            g = build_graph(tp, config.min_npmi)
            write_graphs([g], tmp)
            graphs.append(g)
        _promote(tmp, target)
        stages["graph"] = sorted(target.iterdir())

    with _stage("cluster"):
        target = out / "clusters"
        tmp = _partial(target)
        tmp.mkdir()
        clusterings = []
        for g in graphs:
            cs = cluster_graph(g, config.mcl)
            write_clusters([cs], tmp)
            clusterings.append(cs)
        _promote(tmp, target)
        stages["cluster"] = sorted(target.iterdir())

    traces = {}
    with _stage("trace"):
        stages["trace"] = []
        traces["crisp"] = trace_crisp(clusterings, config.crisp)
        traces["fuzzy"] = trace_fuzzy(clusterings, config.fuzzy)
        for mode, tr in traces.items():
            target = out / f"trace-{mode}.json"
            tmp = _partial(target)
            tmp.write_text(dump_json(tr.to_dict()))
            _promote(tmp, target)
            stages["trace"].append(target)

    with _stage("export"):
        stages["export"] = []
        opts = config.export
        for mode, tr in traces.items():
            flow = flow_from_trace(tr)
            rendered = {
                f"flow-{mode}.json": emit_json(flow),
                f"flow-{mode}.dot": emit_dot(flow, opts.label_tokens, opts.min_mu, opts.min_level),
            }
            for name, text in rendered.items():
                target = out / name
                tmp = _partial(target)
                tmp.write_text(text)
                _promote(tmp, target)
                stages["export"].append(target)

    manifest = {
        "config": config.to_dict(),
        "config_sha256": config.digest(),
        "input_sha256": sha256_file(input_path),
        "ingest": {"accepted": report.accepted, "skipped": report.skipped},
        "timepoints": [tp.label for tp in corpus.timepoints],
        "stages": {
            stage: {p.relative_to(out).as_posix(): sha256_file(p) for p in _files(paths)}
            for stage, paths in stages.items()
        },
    }
    (out / "manifest.json").write_text(dump_json(manifest))
    return manifest


def _files(paths: Sequence[Path]) -> list[Path]:
    out = []
    for p in paths:
        out.extend(sorted(p.rglob("*")) if p.is_dir() else [p])
    return sorted(out)
