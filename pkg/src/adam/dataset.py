"""Tabular sample ingestion, grouped splitting, and cohort drawing.

A dataset is a CSV of per-visit samples: one row per stool sample with
a binary label, a study (participant) id, optional visit number,
clinical covariates, and taxon relative abundances. A JSON schema maps
column names to roles so arbitrary CSV layouts can be ingested.

Feature order is deterministic: clinical columns sorted
lexicographically, then taxon columns sorted lexicographically.
Missing clinical values become NaN (to be median-imputed from training
data only); missing taxon values are treated as zero abundance.

Splitting is grouped by study id so no participant appears on both
sides, and stratified by each study's majority label.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CohortError, EmptyInputError, FormatError, SchemaError, StratificationError

ROLES = ("sample_id", "study_id", "visit", "label", "clinical", "taxon", "ignore")
_MISSING_TOKENS = {"", "na", "nan", "null", "none"}
_TRUE_TOKENS = {"1", "yes", "true", "y"}
_FALSE_TOKENS = {"0", "no", "false", "n"}


@dataclass(frozen=True)
class Sample:
    """One per-visit observation; value tuples align to the owning set's names."""

    sample_id: str
    study_id: str
    visit_index: int
    label: int
    clinical: tuple[float, ...]
    taxa: tuple[float, ...]


@dataclass(frozen=True)
class SampleSet:
    """An ordered, immutable collection of samples on a shared feature axis."""

    clinical_names: tuple[str, ...]
    taxon_names: tuple[str, ...]
    samples: tuple[Sample, ...]

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def feature_names(self) -> tuple[str, ...]:
        return self.clinical_names + self.taxon_names

    def feature_matrix(self) -> np.ndarray:
        """(n_samples, n_features) float matrix, clinical block then taxa block."""
        return np.array([s.clinical + s.taxa for s in self.samples], dtype=float)

    def taxa_matrix(self) -> np.ndarray:
        return np.array([s.taxa for s in self.samples], dtype=float)

    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.samples], dtype=int)

    def study_ids(self) -> tuple[str, ...]:
        return tuple(sorted({s.study_id for s in self.samples}))

    def subset(self, sample_ids) -> "SampleSet":
        """Samples with the given ids, in the order the ids are given."""
        by_id = {s.sample_id: s for s in self.samples}
        missing = [sid for sid in sample_ids if sid not in by_id]
        if missing:
            raise KeyError(f"unknown sample ids: {missing[:5]}")
        return SampleSet(self.clinical_names, self.taxon_names,
                         tuple(by_id[sid] for sid in sample_ids))

    def restrict_to_studies(self, study_ids) -> "SampleSet":
        """Samples whose study is in study_ids, preserving original order."""
        wanted = set(study_ids)
        return SampleSet(self.clinical_names, self.taxon_names,
                         tuple(s for s in self.samples if s.study_id in wanted))

    def get(self, sample_id: str) -> Sample:
        for s in self.samples:
            if s.sample_id == sample_id:
                return s
        raise KeyError(f"unknown sample id: {sample_id}")

    def prior_visits(self, sample: Sample) -> tuple[Sample, ...]:
        """Earlier visits of the same study, in ascending visit order."""
        hist = [s for s in self.samples
                if s.study_id == sample.study_id and s.visit_index < sample.visit_index]
        return tuple(sorted(hist, key=lambda s: (s.visit_index, s.sample_id)))


@dataclass(frozen=True)
class ParseResult:
    sample_set: SampleSet
    rejected: tuple[tuple[int, str], ...]  # (file line number, reason)


@dataclass(frozen=True)
class Schema:
    """Column-to-role mapping for CSV ingestion."""

    columns: dict[str, str]
    default_role: str | None = None

    def role_of(self, column: str) -> str:
        if column in self.columns:
            return self.columns[column]
        if self.default_role is not None:
            return self.default_role
        raise SchemaError(f"column {column!r} has no role and the schema sets no default_role")


def load_schema(source) -> Schema:
    """Build a Schema from a dict or a JSON file path."""
    if isinstance(source, Schema):
        return source
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            try:
                obj = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{source}: invalid JSON: {exc}") from exc
    else:
        obj = source
    if not isinstance(obj, dict) or "columns" not in obj:
        raise SchemaError("schema must be an object with a 'columns' mapping")
    columns = obj["columns"]
    if not isinstance(columns, dict):
        raise SchemaError("'columns' must map column names to roles")
    default_role = obj.get("default_role")
    for col, role in columns.items():
        if role not in ROLES:
            raise SchemaError(f"column {col!r} has unknown role {role!r}; valid roles: {ROLES}")
    if default_role is not None and default_role not in ROLES:
        raise SchemaError(f"unknown default_role {default_role!r}")
    for unique_role in ("sample_id", "study_id", "label", "visit"):
        hits = [c for c, r in columns.items() if r == unique_role]
        if len(hits) > 1:
            raise SchemaError(f"role {unique_role!r} assigned to multiple columns: {hits}")
    for required in ("sample_id", "study_id", "label"):
        if required not in columns.values():
            raise SchemaError(f"schema assigns no column to required role {required!r}")
    return Schema(columns=dict(columns), default_role=default_role)


def _parse_label(token: str) -> int:
    t = token.strip().lower()
    if t in _TRUE_TOKENS:
        return 1
    if t in _FALSE_TOKENS:
        return 0
    raise ValueError(f"unrecognized label value {token!r}")


def _parse_float(token: str, missing_as: float) -> float:
    t = token.strip().lower()
    if t in _MISSING_TOKENS:
        return missing_as
    return float(token)


def parse_samples(path, schema) -> ParseResult:
    """Ingest a CSV under a column-role schema.

    Rows that cannot be interpreted (bad label, unparseable number,
    negative abundance, duplicate sample id, missing ids) are rejected
    individually and reported with their file line number; the rest
    form the returned SampleSet.
    """
    schema = load_schema(schema)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path}: file is empty") from None
        roles = [schema.role_of(col) for col in header]
        for required in ("sample_id", "study_id", "label"):
            if required not in roles:
                raise SchemaError(f"{path}: no column plays role {required!r}")
        clinical_cols = sorted(header[i] for i, r in enumerate(roles) if r == "clinical")
        taxon_cols = sorted(header[i] for i, r in enumerate(roles) if r == "taxon")
        col_index = {col: i for i, col in enumerate(header)}
        if len(col_index) != len(header):
            raise SchemaError(f"{path}: duplicate column names in header")
        id_i = header.index(next(c for c, r in zip(header, roles) if r == "sample_id"))
        study_i = header.index(next(c for c, r in zip(header, roles) if r == "study_id"))
        label_i = header.index(next(c for c, r in zip(header, roles) if r == "label"))
        visit_i = None
        for c, r in zip(header, roles):
            if r == "visit":
                visit_i = header.index(c)

        samples: list[Sample] = []
        rejected: list[tuple[int, str]] = []
        seen_ids: set[str] = set()
        visit_counter: dict[str, int] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                rejected.append((lineno, f"expected {len(header)} fields, got {len(row)}"))
                continue
            sample_id = row[id_i].strip()
            study_id = row[study_i].strip()
            if not sample_id:
                rejected.append((lineno, "empty sample_id"))
                continue
            if not study_id:
                rejected.append((lineno, "empty study_id"))
                continue
            if sample_id in seen_ids:
                rejected.append((lineno, f"duplicate sample_id {sample_id!r}"))
                continue
            try:
                label = _parse_label(row[label_i])
            except ValueError as exc:
                rejected.append((lineno, str(exc)))
                continue
            if visit_i is not None:
                try:
                    visit = int(row[visit_i].strip())
                    if visit < 1:
                        raise ValueError
                except ValueError:
                    rejected.append((lineno, f"visit must be a positive integer, got {row[visit_i]!r}"))
                    continue
            else:
                visit = visit_counter.get(study_id, 0) + 1
            try:
                clinical = tuple(_parse_float(row[col_index[c]], float("nan"))
                                 for c in clinical_cols)
            except ValueError as exc:
                rejected.append((lineno, f"bad clinical value: {exc}"))
                continue
            try:
                taxa = tuple(_parse_float(row[col_index[c]], 0.0) for c in taxon_cols)
            except ValueError as exc:
                rejected.append((lineno, f"bad abundance value: {exc}"))
                continue
            if any(v < 0 for v in taxa):
                rejected.append((lineno, "negative abundance"))
                continue
            seen_ids.add(sample_id)
            visit_counter[study_id] = visit if visit_i is not None else visit_counter.get(study_id, 0) + 1
            samples.append(Sample(sample_id=sample_id, study_id=study_id,
                                  visit_index=visit, label=label,
                                  clinical=clinical, taxa=taxa))
    if not samples:
        raise EmptyInputError(f"{path}: no usable rows")
    return ParseResult(SampleSet(tuple(clinical_cols), tuple(taxon_cols), tuple(samples)),
                       tuple(rejected))


@dataclass(frozen=True)
class SplitResult:
    train: SampleSet
    test: SampleSet
    train_studies: tuple[str, ...]
    test_studies: tuple[str, ...]


def split_grouped_stratified(sample_set: SampleSet,
                             train_fraction: float = 0.75,
                             seed: int = 0) -> SplitResult:
    """Group-disjoint train/test split of studies, stratified by label.

    Each study is assigned its majority sample label (ties count as
    positive). Within each label stratum the study ids are sorted,
    shuffled by the seed, and the first round(fraction * size) go to
    train; rounding is half-up and clamped so both partitions keep at
    least one study per stratum.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if len(sample_set) == 0:
        raise EmptyInputError("cannot split an empty sample set")
    labels_by_study: dict[str, list[int]] = {}
    for s in sample_set.samples:
        labels_by_study.setdefault(s.study_id, []).append(s.label)
    stratum_of = {sid: int(2 * sum(lbls) >= len(lbls))
                  for sid, lbls in labels_by_study.items()}
    rng = random.Random(seed)
    train_ids: list[str] = []
    test_ids: list[str] = []
    for label in (0, 1):
        ids = sorted(sid for sid, lab in stratum_of.items() if lab == label)
        if len(ids) < 2:
            raise StratificationError(
                f"label stratum {label} has {len(ids)} study ids; "
                f"need at least 2 to cover both partitions")
        rng.shuffle(ids)
        k = int(train_fraction * len(ids) + 0.5)
        k = min(max(k, 1), len(ids) - 1)
        train_ids.extend(ids[:k])
        test_ids.extend(ids[k:])
    return SplitResult(train=sample_set.restrict_to_studies(train_ids),
                       test=sample_set.restrict_to_studies(test_ids),
                       train_studies=tuple(sorted(train_ids)),
                       test_studies=tuple(sorted(test_ids)))


def draw_eval_cohort(sample_set: SampleSet,
                     n_pos: int = 15,
                     n_neg: int = 15,
                     seed: int = 0) -> SampleSet:
    """Draw exactly n_pos positive and n_neg negative samples without
    replacement, deterministically per seed."""
    pos = sorted(s.sample_id for s in sample_set.samples if s.label == 1)
    neg = sorted(s.sample_id for s in sample_set.samples if s.label == 0)
    if len(pos) < n_pos:
        raise CohortError(f"need {n_pos} positive samples, only {len(pos)} available")
    if len(neg) < n_neg:
        raise CohortError(f"need {n_neg} negative samples, only {len(neg)} available")
    rng = random.Random(seed)
    chosen = rng.sample(pos, n_pos) + rng.sample(neg, n_neg)
    return sample_set.subset(chosen)


def feature_medians(matrix: np.ndarray) -> np.ndarray:
    """Per-column medians ignoring NaN; all-NaN columns get 0.0.

    Compute these on training data only and reuse them everywhere else
    so no test-set information leaks into the model.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise EmptyInputError("need a non-empty 2-d matrix to compute medians")
    medians = np.zeros(matrix.shape[1])
    for j in range(matrix.shape[1]):
        col = matrix[:, j]
        finite = col[~np.isnan(col)]
        medians[j] = float(np.median(finite)) if finite.size else 0.0
    return medians


def impute(matrix: np.ndarray, medians: np.ndarray) -> np.ndarray:
    """Replace NaN cells with the given per-column medians."""
    matrix = np.asarray(matrix, dtype=float)
    medians = np.asarray(medians, dtype=float)
    if matrix.shape[1] != medians.size:
        raise ValueError(f"median vector ({medians.size}) does not match "
                         f"matrix columns ({matrix.shape[1]})")
    out = matrix.copy()
    nan_r, nan_c = np.nonzero(np.isnan(out))
    out[nan_r, nan_c] = medians[nan_c]
    return out
