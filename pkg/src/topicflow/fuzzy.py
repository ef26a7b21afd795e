"""Graded (weak / medium / strong) transitions from trapezoidal memberships."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .mcl import Cluster, ClusterSet

LEVELS = ("weak", "medium", "strong")
GRADED_KINDS = ("unchanged", "absorb", "dissolve", "split", "merge", "disappear")


@dataclass(frozen=True)
class TrapezoidParams:
    """Support [a, d] and core [b, c] of the medium set; weak falls a->b, strong rises c->d."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        chain = (("0", 0.0), ("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d), ("1", 1.0))
        for (lo_name, lo), (hi_name, hi) in zip(chain, chain[1:]):
            if not lo < hi:
                raise ValueError(f"trapezoid requires {lo_name} < {hi_name} (got {lo_name}={lo}, {hi_name}={hi})")

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


DEFAULT_PARAMS = TrapezoidParams(0.3, 0.4, 0.6, 0.7)
DISAPPEAR_PARAMS = TrapezoidParams(0.25, 0.35, 0.55, 0.65)


def default_param_table() -> dict[str, TrapezoidParams]:
    table = {kind: DEFAULT_PARAMS for kind in GRADED_KINDS}
    table["disappear"] = DISAPPEAR_PARAMS
    return table


@dataclass(frozen=True)
class FuzzyGrade:
    weak: float
    medium: float
    strong: float

    @property
    def dominant(self) -> str:
        values = self.as_tuple()
        top = max(values)
        # ties resolve toward the stronger set
        return LEVELS[max(i for i, v in enumerate(values) if v == top)]

    def __getitem__(self, level: str) -> float:
        return getattr(self, level)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.weak, self.medium, self.strong)

    def to_dict(self) -> dict:
        return {"weak": self.weak, "medium": self.medium, "strong": self.strong}


def trapezoid_grade(x: float, params: TrapezoidParams = DEFAULT_PARAMS) -> FuzzyGrade:
    if not 0 <= x <= 1:
        raise ValueError(f"discourse value {x!r} outside [0, 1]")
    a, b, c, d = params.a, params.b, params.c, params.d
    if x <= a:
        weak = 1.0
    elif x < b:
        weak = (b - x) / (b - a)
    else:
        weak = 0.0
    if x <= a or x >= d:
        medium = 0.0
    elif x < b:
        medium = (x - a) / (b - a)
    elif x <= c:
        medium = 1.0
    else:
        medium = (d - x) / (d - c)
    if x <= c:
        strong = 0.0
    elif x < d:
        strong = (x - c) / (d - c)
    else:
        strong = 1.0
    return FuzzyGrade(weak, medium, strong)


def _require_overlap(a: Cluster, b: Cluster) -> int:
    shared = len(a.tokens & b.tokens)
    if not shared:
        raise ValueError(f"{a.cluster_id} and {b.cluster_id} share no token; not a transition")
    return shared


def discourse_unchanged(a: Cluster, b: Cluster) -> float:
    shared = _require_overlap(a, b)
    return shared / len(a.tokens | b.tokens)


def discourse_absorb(a: Cluster, b: Cluster) -> float:
    shared = _require_overlap(a, b)
    return max(shared / len(a.tokens) - shared / len(a.tokens | b.tokens), 0.0)


def discourse_dissolve(a: Cluster, b: Cluster) -> float:
    shared = _require_overlap(a, b)
    return max(shared / len(b.tokens) - shared / len(a.tokens | b.tokens), 0.0)


def _one_to_many(one: Cluster, many: Sequence[Cluster]) -> float:
    if len(many) < 2:
        raise ValueError("a split or merge needs at least two counterpart clusters")
    covered: set[str] = set()
    union = set(one.tokens)
    for part in many:
        _require_overlap(one, part)
        covered |= one.tokens & part.tokens
        union |= part.tokens
    return len(covered) / len(union)


def discourse_split(a: Cluster, parts: Sequence[Cluster]) -> float:
    """Covered share of A over the union of A and all its parts."""
    return _one_to_many(a, parts)


def discourse_merge(parts: Sequence[Cluster], b: Cluster) -> float:
    return _one_to_many(b, parts)


def discourse_disappear(a: Cluster, next_vocab: frozenset[str] | set[str]) -> float:
    """Share of A's tokens that no cluster at the next timepoint holds."""
    return len(a.tokens - next_vocab) / len(a.tokens)


@dataclass(frozen=True)
class FuzzyTransition:
    kind: str
    sources: tuple[str, ...]
    targets: tuple[str, ...]
    x: Optional[float] = None
    grade: Optional[FuzzyGrade] = None

    @property
    def dominant(self) -> str:
        return "strong" if self.grade is None else self.grade.dominant

    @property
    def mu(self) -> float:
        """Membership of the dominant set; emerge is strong by fiat."""
        return 1.0 if self.grade is None else self.grade[self.dominant]

    def to_dict(self, t: int) -> dict:
        return {
            "t": t,
            "kind": self.kind,
            "sources": list(self.sources),
            "targets": list(self.targets),
            "x": self.x,
            "mu": None if self.grade is None else self.grade.to_dict(),
            "dominant": self.dominant,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FuzzyTransition":
        mu = data.get("mu")
        grade = None if mu is None else FuzzyGrade(mu["weak"], mu["medium"], mu["strong"])
        return cls(data["kind"], tuple(data["sources"]), tuple(data["targets"]), data.get("x"), grade)


def fuzzify_transitions(
    current: ClusterSet,
    nxt: ClusterSet,
    params: Optional[Mapping[str, TrapezoidParams]] = None,
) -> list[FuzzyTransition]:
    """All graded transitions between two consecutive clusterings.

    Every intersecting pair gets unchanged, absorb and dissolve gradings; a
    cluster touching two or more clusters on the other side gets one split
    (or merge) over all of them; every current cluster gets a disappear
    grading; next clusters touching nothing emerge.
    """
    table = default_param_table()
    if params:
        table.update(params)

    def graded(kind, sources, targets, x):
        return FuzzyTransition(kind, tuple(sources), tuple(targets), x, trapezoid_grade(x, table[kind]))

    out: list[FuzzyTransition] = []
    links = [(a, b) for a in current for b in nxt if a.tokens & b.tokens]
    for a, b in links:
        ids = ([a.cluster_id], [b.cluster_id])
        out.append(graded("unchanged", *ids, discourse_unchanged(a, b)))
        out.append(graded("absorb", *ids, discourse_absorb(a, b)))
        out.append(graded("dissolve", *ids, discourse_dissolve(a, b)))
    for a in current:
        parts = [b for b in nxt if a.tokens & b.tokens]
        if len(parts) >= 2:
            out.append(graded("split", [a.cluster_id], [b.cluster_id for b in parts], discourse_split(a, parts)))
    for b in nxt:
        parts = [a for a in current if a.tokens & b.tokens]
        if len(parts) >= 2:
            out.append(graded("merge", [a.cluster_id for a in parts], [b.cluster_id], discourse_merge(parts, b)))
    vocab = nxt.vocabulary()
    for a in current:
        out.append(graded("disappear", [a.cluster_id], [], discourse_disappear(a, vocab)))
    prior = current.vocabulary()
    for b in nxt:
        if not b.tokens & prior:
            out.append(FuzzyTransition("emerge", (), (b.cluster_id,)))
    return out
