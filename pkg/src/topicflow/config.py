"""Pipeline configuration: dataclass sections loaded from TOML or JSON, unknown keys rejected."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .corpus import BUCKET_MODES
from .crisp import CrispConfig, parse_alpha
from .fuzzy import GRADED_KINDS, LEVELS, TrapezoidParams, default_param_table
from .mcl import MclParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class IngestOptions:
    bucket: str = "day"
    timezone: str = "UTC"
    bucket_field: str = "timepoint"

    def __post_init__(self):
        if self.bucket not in BUCKET_MODES:
            raise ValueError(f"bucket must be one of {BUCKET_MODES}, got {self.bucket!r}")


@dataclass(frozen=True)
class ExportOptions:
    min_mu: float = 0.0
    min_level: str = "weak"
    label_tokens: Optional[bool] = None

    def __post_init__(self):
        if not 0 <= self.min_mu <= 1:
            raise ValueError(f"min_mu must lie in [0, 1], got {self.min_mu!r}")
        if self.min_level not in LEVELS:
            raise ValueError(f"min_level must be one of {LEVELS}, got {self.min_level!r}")


@dataclass(frozen=True)
class PipelineConfig:
    ingest: IngestOptions = field(default_factory=IngestOptions)
    min_npmi: float = 0.0
    mcl: MclParams = field(default_factory=MclParams)
    crisp: CrispConfig = field(default_factory=CrispConfig)
    fuzzy: dict = field(default_factory=default_param_table)
    export: ExportOptions = field(default_factory=ExportOptions)
    # no stage draws random numbers; the flag only records that
    deterministic: bool = True

    def __post_init__(self):
        if not self.min_npmi >= 0:
            raise ValueError(f"min_npmi must be >= 0, got {self.min_npmi!r}")
        if self.deterministic is not True:
            raise ValueError("deterministic must be true: the pipeline has no stochastic stage")

    def to_dict(self) -> dict:
        return {
            "ingest": dataclasses.asdict(self.ingest),
            "min_npmi": self.min_npmi,
            "mcl": dataclasses.asdict(self.mcl),
            "crisp": {"alpha": self.crisp.alpha},
            "fuzzy": {k: p.to_dict() for k, p in sorted(self.fuzzy.items())},
            "export": dataclasses.asdict(self.export),
            "deterministic": self.deterministic,
        }

    def digest(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def _section(cls, data: Any, name: str, **converters):
    if not isinstance(data, dict):
        raise ConfigError(f"[{name}] must be a table")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(unknown)}")
    try:
        kwargs = {k: converters[k](v) if k in converters else v for k, v in data.items()}
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}] {exc}") from exc


def parse_fuzzy_table(data: Any, name: str = "fuzzy") -> dict[str, TrapezoidParams]:
    """Per-kind trapezoids; kinds left out keep their defaults."""
    if not isinstance(data, dict):
        raise ConfigError(f"[{name}] must be a table")
    table = default_param_table()
    for kind, params in data.items():
        if kind not in GRADED_KINDS:
            raise ConfigError(f"unknown transition kind [{name}.{kind}]; expected one of {GRADED_KINDS}")
        table[kind] = _section(TrapezoidParams, params, f"{name}.{kind}")
    return table


def config_from_dict(data: dict) -> PipelineConfig:
    known = {f.name for f in dataclasses.fields(PipelineConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    kwargs: dict[str, Any] = {}
    if "ingest" in data:
        kwargs["ingest"] = _section(IngestOptions, data["ingest"], "ingest")
    if "mcl" in data:
        kwargs["mcl"] = _section(MclParams, data["mcl"], "mcl")
    if "crisp" in data:
        kwargs["crisp"] = _section(CrispConfig, data["crisp"], "crisp", alpha=parse_alpha)
    if "fuzzy" in data:
        kwargs["fuzzy"] = parse_fuzzy_table(data["fuzzy"])
    if "export" in data:
        kwargs["export"] = _section(ExportOptions, data["export"], "export")
    for key in ("min_npmi", "deterministic"):
        if key in data:
            kwargs[key] = data[key]
    try:
        return PipelineConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def read_table(path: str | Path) -> dict:
    """Load a TOML or JSON file (by suffix) into a dict."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return json.loads(path.read_text())
    with path.open("rb") as fh:
        return tomllib.load(fh)


def load_config(path: Optional[str | Path]) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    return config_from_dict(read_table(path))
