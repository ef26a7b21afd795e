"""Ingestion of timestamped, pre-tokenized documents into ordered timepoints."""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Iterator
from zoneinfo import ZoneInfo

logger = logging.getLogger(__name__)

BUCKET_MODES = ("day", "field")


class IngestError(ValueError):
    """Raised when ingestion yields no usable record."""


@dataclass(frozen=True)
class Document:
    doc_id: str
    timestamp: str
    tokens: tuple[str, ...]

    @property
    def token_set(self) -> frozenset[str]:
        return frozenset(self.tokens)


@dataclass(frozen=True)
class Timepoint:
    index: int
    label: str
    documents: tuple[Document, ...]

    def unique_tokens(self) -> set[str]:
        out: set[str] = set()
        for doc in self.documents:
            out.update(doc.tokens)
        return out


@dataclass(frozen=True)
class TimepointedCorpus:
    timepoints: tuple[Timepoint, ...]

    def __post_init__(self):
        for i, tp in enumerate(self.timepoints):
            if tp.index != i:
                raise ValueError(f"timepoint indices must be consecutive from 0, got {tp.index} at {i}")
        labels = [tp.label for tp in self.timepoints]
        if len(set(labels)) != len(labels):
            raise ValueError("timepoint labels must be unique")

    @property
    def vocabulary(self) -> dict[str, int]:
        counts: Counter[str] = Counter()
        for tp in self.timepoints:
            for doc in tp.documents:
                counts.update(doc.tokens)
        return dict(sorted(counts.items()))

    @property
    def n_documents(self) -> int:
        return sum(len(tp.documents) for tp in self.timepoints)


@dataclass
class IngestReport:
    accepted: int = 0
    skipped: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    def skip(self, lineno: int, reason: str) -> None:
        self.skipped += 1
        self.errors.append((lineno, reason))
        logger.warning("line %d skipped: %s", lineno, reason)


def _parse_timestamp(value: str, tz: ZoneInfo) -> datetime:
    # fromisoformat on 3.10 does not take a trailing Z
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    ts = datetime.fromisoformat(value)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=tz)
    return ts.astimezone(tz)


def _normalize_tokens(raw) -> tuple[str, ...]:
    if not isinstance(raw, list):
        raise ValueError("tokens must be a list")
    out = []
    for tok in raw:
        if not isinstance(tok, str):
            raise ValueError(f"token {tok!r} is not a string")
        tok = tok.strip().lower()
        if tok:
            out.append(tok)
    return tuple(out)


def ingest(
    lines: Iterable[str],
    bucket: str = "day",
    timezone: str = "UTC",
    bucket_field: str = "timepoint",
) -> tuple[TimepointedCorpus, IngestReport]:
    """Parse JSON-lines records and bucket them into ordered timepoints.

    Each line holds ``{"id": str, "timestamp": str, "tokens": [str]}``. With
    ``bucket="day"`` documents are grouped by calendar day in ``timezone``;
    with ``bucket="field"`` the value of ``bucket_field`` names the timepoint
    and buckets are ordered by their earliest timestamp.

    Malformed records are skipped and reported with their line number.
    Raises IngestError when no record survives.
    """
    if bucket not in BUCKET_MODES:
        raise ValueError(f"bucket must be one of {BUCKET_MODES}, got {bucket!r}")
    tz = ZoneInfo(timezone)
    report = IngestReport()
    seen_ids: set[str] = set()
    buckets: dict[str, list[tuple[datetime, Document]]] = {}

    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            if not isinstance(rec, dict):
                raise ValueError("record is not an object")
            doc_id = rec["id"]
            stamp = rec["timestamp"]
            if not isinstance(doc_id, str) or not isinstance(stamp, str):
                raise ValueError("id and timestamp must be strings")
            ts = _parse_timestamp(stamp, tz)
            tokens = _normalize_tokens(rec["tokens"])
            if bucket == "field":
                key = rec[bucket_field]
                if not isinstance(key, (str, int)):
                    raise ValueError(f"{bucket_field} must be a string or integer")
                key = str(key)
            else:
                key = ts.date().isoformat()
        except (ValueError, KeyError, TypeError) as exc:
            report.skip(lineno, f"malformed record: {exc}")
            continue
        if not tokens:
            report.skip(lineno, "empty token list")
            continue
        if doc_id in seen_ids:
            report.skip(lineno, f"duplicate id {doc_id!r}")
            continue
        seen_ids.add(doc_id)
        buckets.setdefault(key, []).append((ts, Document(doc_id, stamp, tokens)))
        report.accepted += 1

    if not buckets:
        raise IngestError(f"no valid records ({report.skipped} skipped)")

    if bucket == "day":
        order = sorted(buckets)
    else:
        order = sorted(buckets, key=lambda k: (min(ts for ts, _ in buckets[k]), k))
    timepoints = []
    for index, key in enumerate(order):
        docs = sorted(buckets[key], key=lambda item: (item[0], item[1].doc_id))
        timepoints.append(Timepoint(index, key, tuple(d for _, d in docs)))
    return TimepointedCorpus(tuple(timepoints)), report


def corpus_stats(corpus: TimepointedCorpus) -> list[dict]:
    """One row per timepoint with document count and unique-token count."""
    return [
        {"index": tp.index, "label": tp.label, "docs": len(tp.documents), "tokens": len(tp.unique_tokens())}
        for tp in corpus.timepoints
    ]


def to_records(corpus: TimepointedCorpus, bucket_field: str = "timepoint") -> Iterator[dict]:
    """Emit ingestable records, tagging each with its timepoint label."""
    for tp in corpus.timepoints:
        for doc in tp.documents:
            yield {"id": doc.doc_id, "timestamp": doc.timestamp, "tokens": list(doc.tokens), bucket_field: tp.label}


def corpus_to_dict(corpus: TimepointedCorpus) -> dict:
    return {
        "timepoints": [
            {
                "index": tp.index,
                "label": tp.label,
                "documents": [
                    {"id": d.doc_id, "timestamp": d.timestamp, "tokens": list(d.tokens)} for d in tp.documents
                ],
            }
            for tp in corpus.timepoints
        ]
    }


def corpus_from_dict(data: dict) -> TimepointedCorpus:
    return TimepointedCorpus(
        tuple(
            Timepoint(
                tp["index"],
                tp["label"],
                tuple(Document(d["id"], d["timestamp"], tuple(d["tokens"])) for d in tp["documents"]),
            )
            for tp in data["timepoints"]
        )
    )
