"""CSV ingestion, grouped splitting, cohorts, and imputation."""

import math
import random

import numpy as np
import pytest

from adam.dataset import (
    Schema,
    draw_eval_cohort,
    feature_medians,
    impute,
    load_schema,
    parse_samples,
    split_grouped_stratified,
)
from adam.errors import CohortError, EmptyInputError, SchemaError

SCHEMA = {
    "columns": {
        "sid": "sample_id",
        "pid": "study_id",
        "visit": "visit",
        "dx": "label",
        "age": "clinical",
        "TaxA": "taxon",
        "TaxB": "taxon",
        "note": "ignore",
    }
}


def _write(tmp_path, rows, header="sid,pid,visit,dx,age,TaxA,TaxB,note"):
    path = tmp_path / "data.csv"
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    return path


def test_parse_clean_rows(tmp_path):
    path = _write(tmp_path, [
        "S1,P1,1,yes,70,1.5,2.5,hello",
        "S2,P1,2,no,80,0.5,3.5,world",
        "S3,P2,1,1,75,2.0,0.0,",
    ])
    result = parse_samples(path, SCHEMA)
    assert result.rejected == ()
    ss = result.sample_set
    assert len(ss) == 3
    assert ss.clinical_names == ("age",)
    assert ss.taxon_names == ("TaxA", "TaxB")
    assert ss.samples[0].label == 1 and ss.samples[1].label == 0
    assert ss.samples[0].visit_index == 1 and ss.samples[1].visit_index == 2
    assert ss.samples[2].taxa == (2.0, 0.0)
    matrix = ss.feature_matrix()
    assert matrix.shape == (3, 3)
    assert ss.feature_names == ("age", "TaxA", "TaxB")


def test_parse_rejects_bad_rows_individually(tmp_path):
    path = _write(tmp_path, [
        "S1,P1,1,yes,70,1.5,2.5,ok",
        "S2,P1,2,maybe,80,0.5,3.5,bad label",
        "S3,P2,1,no,notanumber,1.0,1.0,bad clinical",
        "S4,P2,2,no,75,-3.0,1.0,negative abundance",
        "S1,P3,1,no,75,1.0,1.0,duplicate id",
        ",P3,1,no,75,1.0,1.0,empty id",
        "S5,P3,1,no,75,1.0,1.0,ok",
        "S6,P3,2,no,75,1.0",
    ])
    result = parse_samples(path, SCHEMA)
    assert len(result.sample_set) == 2
    reasons = {line: reason for line, reason in result.rejected}
    assert set(reasons) == {3, 4, 5, 6, 7, 9}
    assert "label" in reasons[3]
    assert "clinical" in reasons[4]
    assert reasons[5] == "negative abundance"
    assert "duplicate" in reasons[6]
    assert "empty sample_id" in reasons[7]
    assert "fields" in reasons[9]


def test_parse_missing_values(tmp_path):
    path = _write(tmp_path, [
        "S1,P1,1,yes,,1.5,na,x",
        "S2,P1,2,no,NA,nan,2.0,x",
    ])
    ss = parse_samples(path, SCHEMA).sample_set
    assert math.isnan(ss.samples[0].clinical[0])
    assert math.isnan(ss.samples[1].clinical[0])
    # missing abundances read as zero, not NaN
    assert ss.samples[0].taxa == (1.5, 0.0)
    assert ss.samples[1].taxa == (0.0, 2.0)


def test_parse_without_visit_column_counts_visits(tmp_path):
    schema = {"columns": {"sid": "sample_id", "pid": "study_id",
                          "dx": "label", "age": "clinical"}}
    path = _write(tmp_path, [
        "S1,P1,1,yes,70,x",
        "S2,P1,1,yes,71,x",
        "S3,P2,1,no,72,x",
    ], header="sid,pid,ignored,dx,age,extra")
    with pytest.raises(SchemaError):
        parse_samples(path, schema)
    schema["columns"]["ignored"] = "ignore"
    schema["columns"]["extra"] = "ignore"
    ss = parse_samples(path, schema).sample_set
    assert [s.visit_index for s in ss.samples] == [1, 2, 1]


def test_parse_all_rows_bad_raises(tmp_path):
    path = _write(tmp_path, ["S1,P1,0,yes,70,1.0,1.0,x"])
    with pytest.raises(EmptyInputError):
        parse_samples(path, SCHEMA)


def test_schema_validation():
    with pytest.raises(SchemaError):
        load_schema({"columns": {"a": "sample_id", "b": "study_id"}})
    with pytest.raises(SchemaError):
        load_schema({"columns": {"a": "sample_id", "b": "sample_id",
                                 "c": "study_id", "d": "label"}})
    with pytest.raises(SchemaError):
        load_schema({"columns": {"a": "nonsense", "b": "study_id",
                                 "c": "label", "d": "sample_id"}})
    schema = load_schema({"columns": {"a": "sample_id", "b": "study_id",
                                      "c": "label"},
                          "default_role": "taxon"})
    assert schema.role_of("anything") == "taxon"
    strict = Schema(columns={"a": "sample_id"})
    with pytest.raises(SchemaError):
        strict.role_of("unknown")


def test_split_is_group_disjoint_and_stratified(sample_set):
    for seed in range(8):
        split = split_grouped_stratified(sample_set, 0.75, seed=seed)
        train_studies = set(split.train_studies)
        test_studies = set(split.test_studies)
        assert not train_studies & test_studies
        assert {s.study_id for s in split.train.samples} == train_studies
        assert {s.study_id for s in split.test.samples} == test_studies
        assert len(split.train) + len(split.test) == len(sample_set)
        # at least one study of each label stratum on both sides
        for part in (split.train, split.test):
            labels = part.labels()
            assert labels.min() == 0 and labels.max() == 1
    # determinism and seed sensitivity
    again = split_grouped_stratified(sample_set, 0.75, seed=3)
    assert again.train_studies == \
        split_grouped_stratified(sample_set, 0.75, seed=3).train_studies
    other = split_grouped_stratified(sample_set, 0.75, seed=4)
    assert other.train_studies != again.train_studies


def test_split_fraction_bounds(sample_set):
    with pytest.raises(ValueError):
        split_grouped_stratified(sample_set, 0.0, seed=0)
    with pytest.raises(ValueError):
        split_grouped_stratified(sample_set, 1.0, seed=0)


def test_draw_eval_cohort_counts_and_determinism(sample_set):
    cohort = draw_eval_cohort(sample_set, 15, 15, seed=0)
    labels = cohort.labels()
    assert len(cohort) == 30
    assert int(labels.sum()) == 15
    ids = [s.sample_id for s in cohort.samples]
    assert len(set(ids)) == 30
    again = draw_eval_cohort(sample_set, 15, 15, seed=0)
    assert [s.sample_id for s in again.samples] == ids
    different = draw_eval_cohort(sample_set, 15, 15, seed=1)
    assert [s.sample_id for s in different.samples] != ids


def test_draw_eval_cohort_insufficient(sample_set):
    n_pos = int(sample_set.labels().sum())
    with pytest.raises(CohortError):
        draw_eval_cohort(sample_set, n_pos + 1, 1, seed=0)


def test_prior_visits(sample_set):
    with_history = [s for s in sample_set.samples if s.visit_index >= 3]
    assert with_history
    sample = with_history[0]
    priors = sample_set.prior_visits(sample)
    assert [p.visit_index for p in priors] == \
        sorted(p.visit_index for p in priors)
    assert all(p.visit_index < sample.visit_index for p in priors)
    assert all(p.study_id == sample.study_id for p in priors)


def test_feature_medians_and_impute():
    matrix = np.array([[1.0, np.nan, 5.0],
                       [3.0, np.nan, 7.0],
                       [np.nan, np.nan, 9.0]])
    medians = feature_medians(matrix)
    assert medians[0] == 2.0
    assert medians[1] == 0.0  # all-NaN column falls back to zero
    assert medians[2] == 7.0
    filled = impute(matrix, medians)
    assert not np.isnan(filled).any()
    assert filled[2, 0] == 2.0 and filled[0, 1] == 0.0
    assert filled[0, 0] == 1.0  # observed cells untouched
    with pytest.raises(EmptyInputError):
        feature_medians(np.empty((0, 3)))
    with pytest.raises(ValueError):
        impute(matrix, medians[:2])


def test_impute_random_roundtrip():
    rng = np.random.default_rng(7)
    for _ in range(20):
        matrix = rng.normal(size=(30, 6))
        mask = rng.random(matrix.shape) < 0.2
        holed = matrix.copy()
        holed[mask] = np.nan
        medians = feature_medians(holed)
        for j in range(6):
            observed = holed[:, j][~np.isnan(holed[:, j])]
            if observed.size:
                assert medians[j] == np.median(observed)
        filled = impute(holed, medians)
        assert not np.isnan(filled).any()
        assert np.array_equal(filled[~mask], matrix[~mask])


def test_subset_and_restrict(sample_set):
    first = sample_set.samples[0]
    sub = sample_set.subset([first.sample_id])
    assert len(sub) == 1 and sub.samples[0] == first
    with pytest.raises(KeyError):
        sample_set.subset(["missing-id"])
    study = sample_set.restrict_to_studies([first.study_id])
    assert {s.study_id for s in study.samples} == {first.study_id}
