"""Transitions over a whole ordered sequence of clusterings, and their JSON form."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from .crisp import CrispConfig, CrispTransition, classify_crisp
from .fuzzy import FuzzyTransition, TrapezoidParams, default_param_table, fuzzify_transitions
from .mcl import ClusterSet

MODES = ("crisp", "fuzzy")

Transition = Union[CrispTransition, FuzzyTransition]


@dataclass(frozen=True)
class Trace:
    mode: str
    clusterings: tuple[ClusterSet, ...]
    # transitions[i] holds the pair (clusterings[i], clusterings[i + 1])
    transitions: tuple[tuple[Transition, ...], ...]
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        records = [tr.to_dict(t) for t, pair in enumerate(self.transitions) for tr in pair]
        return {
            "mode": self.mode,
            "config": self.config,
            "clusterings": [cs.to_dict() for cs in self.clusterings],
            "transitions": records,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Trace":
        mode = data["mode"]
        if mode not in MODES:
            raise ValueError(f"unknown trace mode {mode!r}")
        clusterings = tuple(ClusterSet.from_dict(c) for c in data["clusterings"])
        parse = CrispTransition.from_dict if mode == "crisp" else FuzzyTransition.from_dict
        pairs: list[list[Transition]] = [[] for _ in range(max(len(clusterings) - 1, 0))]
        for rec in data["transitions"]:
            t = rec["t"]
            if not 0 <= t < len(pairs):
                raise ValueError(f"transition at t={t} has no timepoint pair")
            pairs[t].append(parse(rec))
        return cls(mode, clusterings, tuple(tuple(p) for p in pairs), data.get("config", {}))


def trace_crisp(clusterings: Sequence[ClusterSet], cfg: CrispConfig = CrispConfig()) -> Trace:
    pairs = tuple(tuple(classify_crisp(a, b, cfg)) for a, b in zip(clusterings, clusterings[1:]))
    return Trace("crisp", tuple(clusterings), pairs, {"alpha": cfg.alpha})


def trace_fuzzy(
    clusterings: Sequence[ClusterSet],
    params: Optional[Mapping[str, TrapezoidParams]] = None,
) -> Trace:
    table = default_param_table()
    if params:
        table.update(params)
    pairs = tuple(tuple(fuzzify_transitions(a, b, table)) for a, b in zip(clusterings, clusterings[1:]))
    return Trace("fuzzy", tuple(clusterings), pairs, {k: p.to_dict() for k, p in sorted(table.items())})
