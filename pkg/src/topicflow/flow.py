"""Global progression flow: cluster nodes, typed transition edges, topic sequences.

Rendering goes to Graphviz DOT (one rank per timepoint, left to right) or to
canonical JSON that reads back into an equal FlowGraph.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .fuzzy import LEVELS
from .mcl import ClusterSet
from .trace import Trace, Transition

PALETTE = {
    "unchanged": "#1f77b4",
    "absorb": "#2ca02c",
    "dissolve": "#ff7f0e",
    "split": "#9467bd",
    "merge": "#8c564b",
    "disappear": "#d62728",
    "emerge": "#17becf",
}
LEVEL_STYLE = {"weak": "dashed", "medium": "solid", "strong": "bold"}
TOKEN_LABEL_MAX_CLUSTERS = 20


class FlowError(ValueError):
    pass


@dataclass(frozen=True)
class FlowNode:
    cluster_id: str
    timepoint_index: int
    tokens: tuple[str, ...]
    sequence_id: str


@dataclass(frozen=True)
class FlowEdge:
    t: int
    kind: str
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    dominant: Optional[str] = None
    mu: Optional[float] = None


@dataclass(frozen=True)
class FlowGraph:
    mode: str
    timepoints: tuple[str, ...]
    nodes: tuple[FlowNode, ...]
    edges: tuple[FlowEdge, ...]
    sequences: dict[str, tuple[str, ...]] = field(default_factory=dict)
    # cluster id -> sequences that closed by merging into it
    joins: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "timepoints": list(self.timepoints),
            "nodes": [
                {"id": n.cluster_id, "timepoint": n.timepoint_index, "tokens": list(n.tokens), "sequence": n.sequence_id}
                for n in self.nodes
            ],
            "edges": [
                {"t": e.t, "kind": e.kind, "sources": list(e.sources), "targets": list(e.targets),
                 "dominant": e.dominant, "mu": e.mu}
                for e in self.edges
            ],
            "sequences": {k: list(v) for k, v in self.sequences.items()},
            "joins": {k: list(v) for k, v in self.joins.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FlowGraph":
        return cls(
            data["mode"],
            tuple(data["timepoints"]),
            tuple(FlowNode(n["id"], n["timepoint"], tuple(n["tokens"]), n["sequence"]) for n in data["nodes"]),
            tuple(
                FlowEdge(e["t"], e["kind"], tuple(e["sources"]), tuple(e["targets"]), e["dominant"], e["mu"])
                for e in data["edges"]
            ),
            {k: tuple(v) for k, v in data["sequences"].items()},
            {k: tuple(v) for k, v in data["joins"].items()},
        )


def build_flow(
    clusterings: Sequence[ClusterSet],
    transitions: Sequence[Sequence[Transition]],
    mode: str,
) -> FlowGraph:
    """Assemble nodes, edges and sequences across all timepoints.

    A cluster starts a new sequence when nothing but an emerge leads into it
    (every cluster of the first timepoint does). Otherwise it continues the
    smallest sequence among the clusters feeding it, and any other feeding
    sequences are recorded as joining there.
    """
    if mode not in ("crisp", "fuzzy"):
        raise FlowError(f"unknown mode {mode!r}")
    if len(transitions) != max(len(clusterings) - 1, 0):
        raise FlowError(f"{len(clusterings)} timepoints need {len(clusterings) - 1} transition lists, got {len(transitions)}")
    for i, cs in enumerate(clusterings):
        if cs.timepoint_index != clusterings[0].timepoint_index + i:
            raise FlowError(f"timepoint gap before index {cs.timepoint_index}")

    edges = []
    for t, pair in enumerate(transitions):
        known_src = {c.cluster_id for c in clusterings[t]}
        known_dst = {c.cluster_id for c in clusterings[t + 1]}
        for tr in pair:
            if not set(tr.sources) <= known_src or not set(tr.targets) <= known_dst:
                raise FlowError(f"transition {tr.kind} {tr.sources}->{tr.targets} does not fit timepoint pair {t}")
            if mode == "fuzzy":
                edges.append(FlowEdge(t, tr.kind, tr.sources, tr.targets, tr.dominant, tr.mu))
            else:
                edges.append(FlowEdge(t, tr.kind, tr.sources, tr.targets))

    ordinal: dict[str, int] = {}
    joins_raw: dict[str, list[int]] = {}
    counter = 0
    for t, cs in enumerate(clusterings):
        feeders: dict[str, set[str]] = {c.cluster_id: set() for c in cs}
        if t > 0:
            for tr in transitions[t - 1]:
                if tr.kind == "emerge":
                    continue
                for target in tr.targets:
                    feeders[target].update(tr.sources)
        for c in cs:
            upstream = sorted({ordinal[s] for s in feeders[c.cluster_id]})
            if not upstream:
                ordinal[c.cluster_id] = counter
                counter += 1
            else:
                ordinal[c.cluster_id] = upstream[0]
                if len(upstream) > 1:
                    joins_raw[c.cluster_id] = upstream[1:]

    width = max(4, len(str(max(counter - 1, 0))))

    def seq_name(n: int) -> str:
        return f"S{n:0{width}d}"

    nodes = []
    sequences: dict[str, list[str]] = {}
    for cs in clusterings:
        for c in cs:
            sid = seq_name(ordinal[c.cluster_id])
            nodes.append(FlowNode(c.cluster_id, cs.timepoint_index, tuple(sorted(c.tokens)), sid))
            sequences.setdefault(sid, []).append(c.cluster_id)
    return FlowGraph(
        mode,
        tuple(cs.label or str(cs.timepoint_index) for cs in clusterings),
        tuple(nodes),
        tuple(edges),
        {k: tuple(v) for k, v in sorted(sequences.items())},
        {k: tuple(seq_name(n) for n in v) for k, v in sorted(joins_raw.items())},
    )


def flow_from_trace(trace: Trace) -> FlowGraph:
    return build_flow(trace.clusterings, trace.transitions, trace.mode)


def filter_edges(flow: FlowGraph, min_mu: float = 0.0, min_level: str = "weak") -> list[FlowEdge]:
    """Edges whose dominant membership reaches min_mu and whose set is at least min_level.

    Crisp edges carry no membership and always pass.
    """
    floor = LEVELS.index(min_level)
    return [
        e for e in flow.edges
        if e.mu is None or (e.mu >= min_mu and LEVELS.index(e.dominant) >= floor)
    ]


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def _attrs(**kw) -> str:
    return "[" + ", ".join(f"{k}={v}" for k, v in kw.items()) + "]"


def emit_dot(
    flow: FlowGraph,
    label_tokens: Optional[bool] = None,
    min_mu: float = 0.0,
    min_level: str = "weak",
) -> str:
    """Deterministic Graphviz source for the flow.

    Edge colour encodes the transition kind, pen width is 0.5 + 2.5 * mu
    (crisp edges count as mu = 1), and line style marks the dominant set.
    Splits and merges fan out into one drawn edge per cluster pair; emerge
    and disappear attach to point nodes in the neighbouring rank.
    """
    by_tp: dict[int, list[FlowNode]] = {}
    for n in flow.nodes:
        by_tp.setdefault(n.timepoint_index, []).append(n)
    if label_tokens is None:
        label_tokens = max((len(v) for v in by_tp.values()), default=0) <= TOKEN_LABEL_MAX_CLUSTERS
    base = min(by_tp, default=0)
    tp_indices = sorted(set(by_tp) | set(range(base, base + len(flow.timepoints))))

    kept = filter_edges(flow, min_mu, min_level)
    extra_points: dict[int, list[str]] = {}
    lines_edges = []
    for e in kept:
        mu = 1.0 if e.mu is None else e.mu
        attrs = {"color": _q(PALETTE[e.kind]), "penwidth": f"{0.5 + 2.5 * mu:.3f}"}
        if e.dominant is not None:
            attrs["style"] = LEVEL_STYLE[e.dominant]
            attrs["tooltip"] = _q(f"{e.kind} {e.dominant} {mu:.3f}")
        else:
            attrs["tooltip"] = _q(e.kind)
        if e.kind == "emerge":
            point = f"{e.targets[0]}__emerge"
            extra_points.setdefault(base + e.t, []).append(point)
            pairs = [(point, e.targets[0])]
        elif e.kind == "disappear":
            point = f"{e.sources[0]}__disappear"
            extra_points.setdefault(base + e.t + 1, []).append(point)
            pairs = [(e.sources[0], point)]
        else:
            pairs = [(s, d) for s in e.sources for d in e.targets]
        for s, d in pairs:
            lines_edges.append(f"  {_q(s)} -> {_q(d)} {_attrs(**attrs)};")

    out = [
        "digraph topicflow {",
        "  rankdir=LR;",
        '  node [shape=box, style=rounded, fontname="Helvetica", fontsize=10];',
        "  edge [arrowsize=0.6];",
    ]
    for i in tp_indices:
        tp_label = flow.timepoints[i - base] if i - base < len(flow.timepoints) else str(i)
        out.append(f"  subgraph {_q(f'rank_{i}')} {{")
        out.append("    rank=same;")
        out.append(f"    {_q(f'tp_{i}')} {_attrs(shape='plaintext', label=_q(tp_label))};")
        for n in sorted(by_tp.get(i, []), key=lambda n: n.cluster_id):
            label = n.cluster_id
            if label_tokens:
                label += "\n" + ", ".join(n.tokens)
            out.append(f"    {_q(n.cluster_id)} {_attrs(label=_q(label))};")
        for p in sorted(extra_points.get(i, [])):
            out.append(f"    {_q(p)} {_attrs(shape='point', width='0.08')};")
        out.append("  }")
    for a, b in zip(tp_indices, tp_indices[1:]):
        out.append(f"  {_q(f'tp_{a}')} -> {_q(f'tp_{b}')} [style=invis];")
    out.extend(lines_edges)
    out.append("}")
    return "\n".join(out) + "\n"


def emit_json(flow: FlowGraph) -> str:
    return json.dumps(flow.to_dict(), sort_keys=True, indent=2) + "\n"


def read_json(text: str) -> FlowGraph:
    return FlowGraph.from_dict(json.loads(text))
