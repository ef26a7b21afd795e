"""Synthetic fixtures: a scripted drift scenario, a one-shared-token flow, a fifteen-day volume corpus.

The drift scenario plants one event of each kind across six days. Its corpus
form writes every cluster as documents holding the whole token group, so each
timepoint's graph is a disjoint union of NPMI-1 cliques and MCL recovers the
planted clusters exactly.
"""
from __future__ import annotations

import json
import random
from datetime import date, timedelta

from .mcl import ClusterSet

DRIFT_START = date(2021, 3, 1)

# one list of token groups per day
DRIFT_GROUPS: list[list[list[str]]] = [
    # t0
    [
        ["school", "campus", "reopening", "students"],
        ["testing", "site", "queue", "hours"],
        ["mask", "mandate", "county"],
        ["vaccine", "clinic"],
        ["booster", "pharmacy"],
    ],
    # t1: first group splits exactly; second keeps half its words
    [
        ["school", "campus"],
        ["reopening", "students"],
        ["testing", "site", "weekend", "drive"],
        ["mask", "mandate", "county"],
        ["vaccine", "clinic"],
        ["booster", "pharmacy"],
    ],
    # t2: vaccine + booster merge; reopening absorbed into a wider group; curfew emerges
    [
        ["school", "campus"],
        ["reopening", "students", "buses", "lunch"],
        ["testing", "site", "weekend", "drive"],
        ["mask", "mandate", "county"],
        ["vaccine", "clinic", "booster", "pharmacy"],
        ["curfew", "downtown", "police"],
    ],
    # t3: testing group dissolves into a smaller one
    [
        ["school", "campus"],
        ["reopening", "students", "buses", "lunch"],
        ["testing", "site"],
        ["mask", "mandate", "county"],
        ["vaccine", "clinic", "booster", "pharmacy"],
        ["curfew", "downtown", "police"],
    ],
    # t4: curfew group vanishes; vaccine group drifts to a weak overlap
    [
        ["school", "campus"],
        ["reopening", "students", "buses", "lunch"],
        ["testing", "site"],
        ["mask", "mandate", "county"],
        ["vaccine", "clinic", "appointments", "portal", "waitlist"],
    ],
    # t5: a fresh topic emerges
    [
        ["school", "campus"],
        ["reopening", "students", "buses", "lunch"],
        ["testing", "site"],
        ["mask", "mandate", "county"],
        ["vaccine", "clinic", "appointments", "portal", "waitlist"],
        ["heatwave", "cooling", "center"],
    ],
]

# per-day document counts for the volume fixture
DAILY_LABELS = ["8/19", "8/20", "8/21", "8/22", "8/23", "8/24", "8/25", "8/26",
                 "8/27", "8/28", "8/29", "8/30", "8/31", "9/1", "9/2"]
DAILY_DOC_COUNTS = [38, 89, 87, 65, 27, 68, 53, 29, 19, 53, 23, 18, 40, 35, 16]


def drift_labels() -> list[str]:
    return [(DRIFT_START + timedelta(days=i)).isoformat() for i in range(len(DRIFT_GROUPS))]


def drift_clusterings() -> list[ClusterSet]:
    return [
        ClusterSet.from_token_groups(i, groups, label)
        for i, (groups, label) in enumerate(zip(DRIFT_GROUPS, drift_labels()))
    ]


def drift_records() -> list[dict]:
    """Documents realising the drift scenario: 1-3 copies of each token group per day."""
    records = []
    for t, (groups, label) in enumerate(zip(DRIFT_GROUPS, drift_labels())):
        n = 0
        for g, tokens in enumerate(groups):
            for copy in range(1 + (t + g) % 3):
                hour = 8 + n % 12
                records.append({
                    "id": f"d{t}-{g}-{copy}",
                    "timestamp": f"{label}T{hour:02d}:{(7 * n) % 60:02d}:00+00:00",
                    "tokens": tokens[copy % len(tokens):] + tokens[:copy % len(tokens)],
                })
                n += 1
    return records


def daily_volume_records(seed: int = 19, vocab_size: int = 400, tokens_per_doc: tuple[int, int] = (2, 7)) -> list[dict]:
    """Random documents following DAILY_DOC_COUNTS, one day per entry."""
    rng = random.Random(seed)
    vocab = [f"w{i:03d}" for i in range(vocab_size)]
    records = []
    for day, count in enumerate(DAILY_DOC_COUNTS):
        stamp = date(2020, 8, 19) + timedelta(days=day)
        for k in range(count):
            n_tok = rng.randint(*tokens_per_doc)
            records.append({
                "id": f"t{day:02d}-{k:03d}",
                "timestamp": f"{stamp.isoformat()}T{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:00",
                "tokens": rng.sample(vocab, n_tok),
            })
    return records


def to_jsonl(records: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


# A01 -> B00 -> C02 where B00 and C02 share a single token
SHARED_TOKEN_GROUPS: list[list[list[str]]] = [
    [["cases", "county", "deaths", "hospital"], ["#tag1", "masks", "stores"]],
    [["#tag1"], ["cases"], ["county"], ["masks"], ["stores"]],
    [["cases", "county", "deaths", "hospital"], ["masks", "stores", "retail", "gloves"],
     ["#tag1", "school", "reopening"]],
]


def shared_token_clusterings() -> list[ClusterSet]:
    return [ClusterSet.from_token_groups(i, groups) for i, groups in enumerate(SHARED_TOKEN_GROUPS)]
