"""Markov clustering of temporal graphs and the cluster containers used downstream."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .gow import TemporalGraph

logger = logging.getLogger(__name__)


class MclError(ValueError):
    pass


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MclParams:
    expansion: int = 2
    inflation: float = 2.0
    self_loop_weight: float = 1.0
    prune_threshold: float = 1e-5
    tolerance: float = 1e-6
    max_iterations: int = 100

    def __post_init__(self):
        if isinstance(self.expansion, bool) or not isinstance(self.expansion, int) or self.expansion < 2:
            raise ValueError(f"expansion must be an integer >= 2, got {self.expansion!r}")
        if not self.inflation > 1:
            raise ValueError(f"inflation must be > 1, got {self.inflation!r}")
        if not self.self_loop_weight >= 0:
            raise ValueError(f"self_loop_weight must be >= 0, got {self.self_loop_weight!r}")
        if not self.prune_threshold >= 0:
            raise ValueError(f"prune_threshold must be >= 0, got {self.prune_threshold!r}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance!r}")
        if isinstance(self.max_iterations, bool) or not isinstance(self.max_iterations, int) or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be a positive integer, got {self.max_iterations!r}")


@dataclass(frozen=True)
class Cluster:
    cluster_id: str
    tokens: frozenset[str]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"cluster {self.cluster_id} is empty")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class ClusterSet:
    timepoint_index: int
    clusters: tuple[Cluster, ...]
    label: str = ""

    def __post_init__(self):
        seen: set[str] = set()
        for c in self.clusters:
            if seen & c.tokens:
                raise ValueError(f"clusters overlap at timepoint {self.timepoint_index}")
            seen |= c.tokens
        ids = [c.cluster_id for c in self.clusters]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate cluster ids")

    def __iter__(self):
        return iter(self.clusters)

    def __len__(self) -> int:
        return len(self.clusters)

    def vocabulary(self) -> frozenset[str]:
        return frozenset().union(*(c.tokens for c in self.clusters))

    def to_dict(self) -> dict:
        return {
            "timepoint": self.timepoint_index,
            "label": self.label,
            "clusters": [{"id": c.cluster_id, "tokens": sorted(c.tokens)} for c in self.clusters],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClusterSet":
        return cls(
            data["timepoint"],
            tuple(Cluster(c["id"], frozenset(c["tokens"])) for c in data["clusters"]),
            data.get("label", ""),
        )

    @classmethod
    def from_token_groups(cls, timepoint_index: int, groups: Iterable[Iterable[str]], label: str = "") -> "ClusterSet":
        """Assign canonical ids to plain token groups (size desc, then smallest token)."""
        sets = [frozenset(g) for g in groups]
        sets.sort(key=lambda s: (-len(s), min(s)))
        width = max(2, len(str(len(sets) - 1)))
        prefix = timepoint_letters(timepoint_index)
        return cls(
            timepoint_index,
            tuple(Cluster(f"{prefix}{i:0{width}d}", s) for i, s in enumerate(sets)),
            label,
        )


def timepoint_letters(index: int) -> str:
    """0 -> A, 25 -> Z, 26 -> AA, ... (bijective base 26)."""
    if index < 0:
        raise ValueError("timepoint index must be >= 0")
    out = ""
    n = index + 1
    while n:
        n, rem = divmod(n - 1, 26)
        out = chr(ord("A") + rem) + out
    return out


def adjacency_matrix(graph: TemporalGraph, self_loop_weight: float = 1.0) -> np.ndarray:
    pos = {tok: i for i, tok in enumerate(graph.nodes)}
    m = np.zeros((len(graph.nodes), len(graph.nodes)))
    for u, v, w in graph.edges:
        m[pos[u], pos[v]] = w
        m[pos[v], pos[u]] = w
    np.fill_diagonal(m, self_loop_weight)
    return m


def normalize_columns(matrix: np.ndarray) -> np.ndarray:
    if (matrix < 0).any():
        raise MclError("matrix has negative entries")
    sums = matrix.sum(axis=0)
    if (sums == 0).any():
        raise MclError("all-zero column; isolated nodes need a positive self-loop weight")
    return matrix / sums


@dataclass
class MclResult:
    matrix: np.ndarray
    converged: bool
    iterations: int


def mcl_iterate(
    matrix: np.ndarray,
    params: MclParams = MclParams(),
    callback: Optional[Callable[[int, np.ndarray], None]] = None,
) -> MclResult:
    """Expand, inflate, prune and renormalize until the matrix stops changing.

    `callback(iteration, matrix)` sees the column-stochastic state after each
    step. A run that hits max_iterations warns and returns converged=False.
    """
    m = np.asarray(matrix, dtype=float)
    for it in range(1, params.max_iterations + 1):
        prev = m
        m = np.linalg.matrix_power(m, params.expansion)
        m = normalize_columns(np.power(m, params.inflation))
        if params.prune_threshold > 0:
            # never prune a column's maximum, so no column can empty out
            keep = (m >= params.prune_threshold) | (m == m.max(axis=0))
            m = normalize_columns(np.where(keep, m, 0.0))
        if callback is not None:
            callback(it, m)
        if np.abs(m - prev).max() < params.tolerance:
            return MclResult(m, True, it)
    warnings.warn(f"MCL did not converge in {params.max_iterations} iterations", ConvergenceWarning, stacklevel=2)
    return MclResult(m, False, params.max_iterations)


class _UnionFind:
    def __init__(self, items: Iterable[int]):
        self.parent = {i: i for i in items}

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def extract_clusters(
    matrix: np.ndarray,
    nodes: Sequence[str],
    timepoint_index: int,
    label: str = "",
    threshold: float = 1e-9,
) -> ClusterSet:
    """Read clusters off a converged MCL matrix.

    Attractors are nodes keeping mass on their own diagonal; attractors that
    exchange mass form one system. Each node joins the system of the attractors
    holding its column mass. When those attractors belong to different systems
    the largest entry wins, ties going to the lexicographically smallest node.
    """
    n = len(nodes)
    if matrix.shape != (n, n):
        raise MclError(f"matrix shape {matrix.shape} does not match {n} nodes")
    pos = matrix > threshold
    attractors = [i for i in range(n) if pos[i, i]]
    systems = _UnionFind(attractors)
    for a in attractors:
        for b in attractors:
            if a < b and (pos[a, b] or pos[b, a]):
                systems.union(a, b)

    assigned: dict[int, int] = {}
    pending = []
    for j in range(n):
        cands = [i for i in attractors if pos[i, j]]
        roots = {systems.find(i) for i in cands}
        if len(roots) == 1:
            assigned[j] = roots.pop()
        elif roots:
            best = min(cands, key=lambda i: (-matrix[i, j], nodes[i]))
            assigned[j] = systems.find(best)
        else:
            pending.append(j)

    # nodes with no attractor mass (unconverged runs) follow their heaviest row
    while pending:
        progressed = False
        for j in list(pending):
            i = min(range(n), key=lambda r: (-matrix[r, j], nodes[r]))
            if i in assigned:
                assigned[j] = assigned[i]
                pending.remove(j)
                progressed = True
        if not progressed:
            for j in pending:
                assigned[j] = -1 - j
            break

    groups: dict[int, list[str]] = {}
    for j in range(n):
        groups.setdefault(assigned[j], []).append(nodes[j])
    return ClusterSet.from_token_groups(timepoint_index, groups.values(), label)


def cluster_graph(graph: TemporalGraph, params: MclParams = MclParams()) -> ClusterSet:
    """Run MCL on one temporal graph and return its labelled clusters."""
    if not graph.nodes:
        return ClusterSet(graph.timepoint_index, (), graph.label)
    m = normalize_columns(adjacency_matrix(graph, params.self_loop_weight))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        result = mcl_iterate(m, params)
    if not result.converged:
        logger.warning("timepoint %d: %s", graph.timepoint_index, caught[-1].message if caught else "no convergence")
    return extract_clusters(result.matrix, graph.nodes, graph.timepoint_index, graph.label)
