"""Trace topic evolution across timepoints with crisp and fuzzy cluster transitions."""
from .corpus import Document, Timepoint, TimepointedCorpus, corpus_stats, ingest
from .crisp import CrispConfig, CrispTransition, classify_crisp, match_alpha, overlap_ratio
from .flow import FlowGraph, build_flow, emit_dot, emit_json, filter_edges, read_json
from .fuzzy import (
    DEFAULT_PARAMS,
    DISAPPEAR_PARAMS,
    FuzzyGrade,
    FuzzyTransition,
    TrapezoidParams,
    fuzzify_transitions,
    trapezoid_grade,
)
from .gow import TemporalGraph, build_graph, cooccurrence_counts, npmi
from .mcl import Cluster, ClusterSet, MclParams, cluster_graph, extract_clusters, mcl_iterate, normalize_columns
from .trace import Trace, trace_crisp, trace_fuzzy

__version__ = "0.1.0"
