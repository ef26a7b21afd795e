"""Per-timepoint graph-of-words with NPMI edge weights."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .corpus import Document, Timepoint


@dataclass(frozen=True)
class CooccurrenceCounts:
    freq: dict[str, int]
    joint: dict[tuple[str, str], int]
    n_docs: int


@dataclass(frozen=True)
class TemporalGraph:
    timepoint_index: int
    nodes: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "timepoint": self.timepoint_index,
            "label": self.label,
            "nodes": list(self.nodes),
            "edges": [[u, v, w] for u, v, w in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TemporalGraph":
        return cls(
            data["timepoint"],
            tuple(data["nodes"]),
            tuple((u, v, float(w)) for u, v, w in data["edges"]),
            data.get("label", ""),
        )


def cooccurrence_counts(documents: Sequence[Document]) -> CooccurrenceCounts:
    """Document frequencies and joint document frequencies (set semantics per document)."""
    if not documents:
        raise ValueError("need at least one document")
    freq: Counter[str] = Counter()
    joint: Counter[tuple[str, str]] = Counter()
    for doc in documents:
        toks = sorted(doc.token_set)
        freq.update(toks)
        joint.update(combinations(toks, 2))
    return CooccurrenceCounts(dict(freq), dict(joint), len(documents))


def npmi(n_x: int, n_y: int, n_xy: int, n: int) -> float:
    """Normalized PMI from document counts, natural log.

    Returns 1.0 exactly for perfect co-occurrence (n_x == n_y == n_xy), which
    also covers the p(x, y) = 1 limit where the normaliser vanishes.
    """
    if not 0 < n_xy <= min(n_x, n_y) <= max(n_x, n_y) <= n:
        raise ValueError(f"invalid counts n_x={n_x} n_y={n_y} n_xy={n_xy} N={n}")
    if n_x == n_y == n_xy:
        return 1.0
    pmi = math.log(n_xy * n / (n_x * n_y))
    value = pmi / -math.log(n_xy / n)
    return min(1.0, max(-1.0, value))


def build_graph(timepoint: Timepoint, min_npmi: float = 0.0) -> TemporalGraph:
    """Graph over the timepoint's unique tokens; edges where NPMI > min_npmi."""
    if min_npmi < 0:
        raise ValueError("min_npmi must be >= 0; MCL needs positive affinities")
    counts = cooccurrence_counts(timepoint.documents)
    edges = []
    for (u, v), n_uv in sorted(counts.joint.items()):
        w = npmi(counts.freq[u], counts.freq[v], n_uv, counts.n_docs)
        if w > min_npmi:
            edges.append((u, v, w))
    return TemporalGraph(timepoint.index, tuple(sorted(counts.freq)), tuple(edges), timepoint.label)
