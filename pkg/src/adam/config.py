"""Run configuration: defaults, config-file loading, flag resolution.

Precedence is command-line flags over config-file values over built-in
defaults. The resolved configuration is echoed as deterministic JSON
(sorted keys, no timestamps) next to every artifact a command writes,
so any run can be reproduced from its output directory alone.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import FormatError, SchemaError

RESOLVED_CONFIG_NAME = "resolved-config.json"


@dataclass(frozen=True)
class RunConfig:
    # artifact paths
    dataset: str | None = None
    schema: str | None = None
    corpus: str | None = None
    store: str | None = None
    model: str | None = None
    # backend selection per service
    embedding_backend: str = "mock"  # mock | remote
    llm_backend: str = "mock"  # mock | remote
    embedding_url: str | None = None
    embedding_model: str = "text-embedding-ada-002"
    embedding_dim: int = 1536
    llm_url: str | None = None
    summarization_model: str = "gpt-4o"
    classification_model: str = "gpt-4o-mini"
    # chunking
    segment_length: int = 2000
    overlap: int = 400
    # retrieval
    top_k: int = 5
    threshold: float = 0.8
    # agent budgets
    summarization_budget: int = 100_000
    classification_budget: int = 50_000
    fallback_threshold: float = 0.5
    # protocol
    split_fraction: float = 0.75
    n_pos: int = 15
    n_neg: int = 15
    n_features: int = 20
    tuning_trials: int = 0
    tuning_folds: int = 3
    n_seeds: int = 10
    seed_base: int = 0
    seed: int = 0
    jobs: int = 1
    tolerate_failures: bool = False

    def validate(self) -> None:
        if self.embedding_backend not in ("mock", "remote"):
            raise SchemaError(
                f"embedding_backend must be mock or remote, "
                f"got {self.embedding_backend!r}")
        if self.llm_backend not in ("mock", "remote"):
            raise SchemaError(
                f"llm_backend must be mock or remote, got {self.llm_backend!r}")
        if self.embedding_backend == "remote" and not self.embedding_url:
            raise SchemaError("embedding_backend=remote requires embedding_url")
        if self.llm_backend == "remote" and not self.llm_url:
            raise SchemaError("llm_backend=remote requires llm_url")
        if self.embedding_dim < 1:
            raise SchemaError(f"embedding_dim must be >= 1, got {self.embedding_dim}")
        if self.segment_length < 1:
            raise SchemaError(
                f"segment_length must be >= 1, got {self.segment_length}")
        if not 0 <= self.overlap < self.segment_length:
            raise SchemaError(
                f"overlap must lie in [0, segment_length), got {self.overlap}")
        if self.top_k < 1:
            raise SchemaError(f"top_k must be >= 1, got {self.top_k}")
        if not -1.0 <= self.threshold <= 1.0:
            raise SchemaError(
                f"threshold must lie in [-1, 1], got {self.threshold}")
        if self.summarization_budget < 1 or self.classification_budget < 1:
            raise SchemaError("token budgets must be >= 1")
        if not 0.0 <= self.fallback_threshold <= 1.0:
            raise SchemaError(
                f"fallback_threshold must lie in [0, 1], "
                f"got {self.fallback_threshold}")
        if not 0.0 < self.split_fraction < 1.0:
            raise SchemaError(
                f"split_fraction must lie in (0, 1), got {self.split_fraction}")
        if self.n_pos < 1 or self.n_neg < 1:
            raise SchemaError("cohort sizes must be >= 1")
        if self.tuning_trials < 0:
            raise SchemaError(
                f"tuning_trials must be >= 0, got {self.tuning_trials}")
        if self.tuning_folds < 2:
            raise SchemaError(
                f"tuning_folds must be >= 2, got {self.tuning_folds}")
        if self.n_seeds < 1:
            raise SchemaError(f"n_seeds must be >= 1, got {self.n_seeds}")
        if self.jobs < 1:
            raise SchemaError(f"jobs must be >= 1, got {self.jobs}")


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def load_config_file(path) -> dict:
    """JSON object of RunConfig keys; unknown keys are rejected."""
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise SchemaError(f"{path}: config must be a JSON object")
    unknown = sorted(set(obj) - set(_FIELD_TYPES))
    if unknown:
        raise SchemaError(f"{path}: unknown config keys {unknown}")
    return obj


def resolve_config(file_values: dict | None = None, **flag_values) -> RunConfig:
    """Merge defaults, config-file values, and flags (flags win).

    Flag values of None mean "not given" and never override.
    """
    merged: dict = {}
    if file_values:
        merged.update(file_values)
    for key, value in flag_values.items():
        if key not in _FIELD_TYPES:
            raise SchemaError(f"unknown config key {key!r}")
        if value is not None:
            merged[key] = value
    config = RunConfig(**merged)
    config.validate()
    return config


def write_resolved_config(config: RunConfig, directory, command: str) -> Path:
    """Echo the fully-resolved configuration next to the artifacts."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = {"command": command}
    payload.update(asdict(config))
    path = directory / RESOLVED_CONFIG_NAME
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
