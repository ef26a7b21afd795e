"""Threshold (match-alpha) classification of transitions between consecutive clusterings.

Every cluster on either side lands in exactly one transition. Pairs are
resolved in passes, each claiming the clusters it uses:

1. unchanged  -- A and B are each other's alpha-match
2. absorb / merge  -- sources whose alpha-match is the same unclaimed B;
   one source absorbs into B, two or more whose shared part covers at least
   alpha of B merge into it
3. dissolve / split  -- targets whose reverse alpha-match is the same
   unclaimed A; one such fragment is a dissolve, two or more covering at
   least alpha of A are a split
4. disappear for leftover sources, emerge for leftover targets
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .mcl import Cluster, ClusterSet

KINDS = ("unchanged", "absorb", "dissolve", "split", "merge", "disappear", "emerge")

# float slack for thresholds like 2/3 that are not exactly representable
_EPS = 1e-12


def parse_alpha(value: Union[str, float, int]) -> float:
    """Accept 0.6667, "0.6667" or "2/3"."""
    alpha = float(Fraction(value)) if isinstance(value, str) else float(value)
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {value!r}")
    return alpha


@dataclass(frozen=True)
class CrispConfig:
    alpha: float = 2 / 3

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha!r}")


@dataclass(frozen=True)
class CrispTransition:
    kind: str
    sources: tuple[str, ...]
    targets: tuple[str, ...]

    def __post_init__(self):
        ns, nt = len(self.sources), len(self.targets)
        ok = {
            "unchanged": ns == 1 and nt == 1,
            "absorb": ns == 1 and nt == 1,
            "dissolve": ns == 1 and nt == 1,
            "split": ns == 1 and nt >= 2,
            "merge": ns >= 2 and nt == 1,
            "disappear": ns == 1 and nt == 0,
            "emerge": ns == 0 and nt == 1,
        }
        if self.kind not in ok:
            raise ValueError(f"unknown transition kind {self.kind!r}")
        if not ok[self.kind]:
            raise ValueError(f"{self.kind} with {ns} sources and {nt} targets")

    def to_dict(self, t: int) -> dict:
        return {"t": t, "kind": self.kind, "sources": list(self.sources), "targets": list(self.targets)}

    @classmethod
    def from_dict(cls, data: dict) -> "CrispTransition":
        return cls(data["kind"], tuple(data["sources"]), tuple(data["targets"]))


def overlap_ratio(a: Cluster, b: Cluster) -> float:
    """|A & B| / |A|."""
    return len(a.tokens & b.tokens) / len(a.tokens)


def _meets(shared: int, size: int, alpha: float) -> bool:
    return shared / size >= alpha - _EPS


def match_alpha(a: Cluster, candidates: ClusterSet, alpha: float) -> Optional[Cluster]:
    """Candidate with the highest overlap ratio against `a`, if that ratio reaches alpha.

    Ratios share the denominator |a|, so ranking by intersection size is exact;
    ties go to the smallest cluster id.
    """
    best = None
    best_key = None
    for b in candidates:
        shared = len(a.tokens & b.tokens)
        if not shared:
            continue
        key = (-shared, b.cluster_id)
        if best_key is None or key < best_key:
            best, best_key = b, key
    if best is None or not _meets(-best_key[0], len(a), alpha):
        return None
    return best


def classify_crisp(current: ClusterSet, nxt: ClusterSet, cfg: CrispConfig = CrispConfig()) -> list[CrispTransition]:
    alpha = cfg.alpha
    src = {c.cluster_id: c for c in current}
    dst = {c.cluster_id: c for c in nxt}
    fwd = {a.cluster_id: m.cluster_id for a in current if (m := match_alpha(a, nxt, alpha))}
    back = {b.cluster_id: m.cluster_id for b in nxt if (m := match_alpha(b, current, alpha))}
    claimed_src: set[str] = set()
    claimed_dst: set[str] = set()
    out: list[CrispTransition] = []

    def claim(kind, sources, targets):
        claimed_src.update(sources)
        claimed_dst.update(targets)
        out.append(CrispTransition(kind, tuple(sorted(sources)), tuple(sorted(targets))))

    for a_id in sorted(src):
        b_id = fwd.get(a_id)
        if b_id is not None and back.get(b_id) == a_id:
            claim("unchanged", [a_id], [b_id])

    for b_id in sorted(dst):
        if b_id in claimed_dst:
            continue
        group = [a_id for a_id in sorted(src) if a_id not in claimed_src and fwd.get(a_id) == b_id]
        if not group:
            continue
        target = dst[b_id]
        covered = frozenset().union(*(src[a].tokens for a in group)) & target.tokens
        if len(group) >= 2 and _meets(len(covered), len(target), alpha):
            claim("merge", group, [b_id])
        else:
            best = min(group, key=lambda a: (-len(src[a].tokens & target.tokens), a))
            claim("absorb", [best], [b_id])

    for a_id in sorted(src):
        if a_id in claimed_src:
            continue
        parts = [b_id for b_id in sorted(dst) if b_id not in claimed_dst and back.get(b_id) == a_id]
        if not parts:
            continue
        source = src[a_id]
        covered = frozenset().union(*(dst[b].tokens for b in parts)) & source.tokens
        if len(parts) >= 2 and _meets(len(covered), len(source), alpha):
            claim("split", [a_id], parts)
        else:
            best = min(parts, key=lambda b: (-len(dst[b].tokens & source.tokens), b))
            claim("dissolve", [a_id], [best])

    for a_id in sorted(src):
        if a_id not in claimed_src:
            claim("disappear", [a_id], [])
    for b_id in sorted(dst):
        if b_id not in claimed_dst:
            claim("emerge", [], [b_id])
    return out
