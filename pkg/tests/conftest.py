import json

import pytest

from topicflow.mcl import Cluster, ClusterSet
from topicflow.synthetic import drift_clusterings, drift_records, to_jsonl


def cl(cid, *tokens):
    return Cluster(cid, frozenset(tokens))


def cset(t, *groups, label=""):
    return ClusterSet.from_token_groups(t, [g.split() if isinstance(g, str) else g for g in groups], label)


@pytest.fixture
def drift():
    return drift_clusterings()


@pytest.fixture
def drift_input(tmp_path):
    path = tmp_path / "drift.jsonl"
    path.write_text(to_jsonl(drift_records()))
    return path


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records))
    return path
