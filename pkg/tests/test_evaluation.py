"""Seeded evaluation protocol, trial persistence, and model comparison."""

import math

import numpy as np
import pytest

from adam.ensemble import BinaryMetrics
from adam.errors import EmptyInputError, StratificationError
from adam.evaluation import (
    CSV_FIELDS,
    MODEL_TAGS,
    ComparisonSummary,
    EvaluationConfig,
    EvaluationRun,
    TrialResult,
    aggregate_trials,
    compare_models,
    format_metrics_table,
    format_summary,
    read_trials_csv,
    run_seeded_trials,
    select_features,
    write_trials_csv,
)
from adam.stats import cohens_d, levene_test, mann_whitney_u, variance_f_test

SEEDS = (0, 1, 2, 3)


@pytest.fixture(scope="session")
def eval_run(sample_set):
    return run_seeded_trials(sample_set, SEEDS)


def test_trial_grid_counts_and_order(eval_run):
    assert not eval_run.failures
    assert [(t.seed, t.model) for t in eval_run.trials] == \
        [(seed, tag) for seed in SEEDS for tag in MODEL_TAGS]
    assert all(t.cohort_size == 30 for t in eval_run.trials)
    for trial in eval_run.trials:
        m = trial.metrics
        for value in (m.accuracy, m.precision, m.recall, m.f1):
            assert 0.0 <= value <= 1.0
        assert m.auc is not None and 0.0 <= m.auc <= 1.0


def test_adam_equals_thresholded_ensemble_per_seed(eval_run):
    by_tag = {}
    for trial in eval_run.trials:
        by_tag.setdefault(trial.model, []).append(trial)
    for gbdt_trial, adam_trial in zip(by_tag["baseline-gbdt"], by_tag["adam"]):
        assert gbdt_trial.seed == adam_trial.seed
        assert gbdt_trial.metrics == adam_trial.metrics


def test_parallel_run_matches_sequential(sample_set, eval_run):
    again = run_seeded_trials(sample_set, SEEDS, jobs=2)
    assert again == eval_run


def test_trials_csv_round_trip(eval_run, tmp_path):
    path = tmp_path / "trials.csv"
    write_trials_csv(eval_run.trials, path)
    header = path.read_text().splitlines()[0]
    assert header == ",".join(CSV_FIELDS)
    rows = read_trials_csv(path)
    assert len(rows) == len(eval_run.trials)
    for trial, row in zip(eval_run.trials, rows):
        assert row["seed"] == trial.seed
        assert row["model"] == trial.model
        assert row["accuracy"] == trial.metrics.accuracy
        assert row["auc"] == trial.metrics.auc
        assert row["f1"] == trial.metrics.f1
    twin = tmp_path / "again.csv"
    write_trials_csv(eval_run.trials, twin)
    assert path.read_bytes() == twin.read_bytes()


def test_trials_csv_handles_undefined_auc(tmp_path):
    metrics = BinaryMetrics(accuracy=1.0, precision=1.0, recall=1.0,
                            f1=1.0, auc=None)
    trial = TrialResult(seed=7, model="baseline-lr", metrics=metrics,
                        cohort_size=4)
    path = tmp_path / "one.csv"
    write_trials_csv([trial], path)
    rows = read_trials_csv(path)
    assert rows[0]["auc"] is None

    bad = tmp_path / "bad.csv"
    bad.write_text("seed,model,f1\n0,adam,1.0\n")
    with pytest.raises(ValueError, match="header"):
        read_trials_csv(bad)


def test_aggregate_matches_numpy(eval_run):
    aggregates = aggregate_trials(eval_run.trials)
    assert set(aggregates) == set(MODEL_TAGS)
    for tag in MODEL_TAGS:
        rows = [t for t in eval_run.trials if t.model == tag]
        for metric in ("accuracy", "auc", "f1"):
            values = np.array([getattr(t.metrics, metric) for t in rows])
            mean, std, n = aggregates[tag][metric]
            assert n == len(SEEDS)
            assert mean == pytest.approx(values.mean(), abs=0)
            assert std == pytest.approx(values.std(ddof=1), abs=0)


def test_aggregate_skips_undefined_auc():
    metrics = BinaryMetrics(accuracy=0.5, precision=0.5, recall=0.5,
                            f1=0.5, auc=None)
    trials = [TrialResult(seed=s, model="baseline-rf", metrics=metrics,
                          cohort_size=2) for s in (0, 1)]
    stats = aggregate_trials(trials)["baseline-rf"]
    assert stats["f1"] == (0.5, 0.0, 2)
    assert stats["auc"][2] == 0
    assert math.isnan(stats["auc"][0])
    table = format_metrics_table(trials)
    assert "n/a" in table
    with pytest.raises(EmptyInputError):
        format_metrics_table([])


def test_metrics_table_layout(eval_run):
    table = format_metrics_table(eval_run.trials)
    lines = table.splitlines()
    assert lines[0] == f"Model performance averaged across {len(SEEDS)} random seeds"
    rows = lines[4:8]
    assert [r.split()[0] for r in rows] == list(MODEL_TAGS)
    assert all("+-" in r for r in rows)


def test_run_validation(sample_set):
    with pytest.raises(EmptyInputError):
        run_seeded_trials(sample_set, [])
    with pytest.raises(ValueError, match="distinct"):
        run_seeded_trials(sample_set, [1, 1])
    with pytest.raises(ValueError, match="unknown model"):
        run_seeded_trials(sample_set, [0], models=("gbdt",))


def test_failure_handling(sample_set):
    studies = sorted({s.study_id for s in sample_set.samples})[:3]
    tiny = sample_set.restrict_to_studies(studies)
    with pytest.raises(StratificationError):
        run_seeded_trials(tiny, [0], models=("baseline-lr",))
    tolerant = run_seeded_trials(
        tiny, [0, 1], config=EvaluationConfig(tolerate_failures=True),
        models=("baseline-lr",))
    assert tolerant.trials == ()
    assert len(tolerant.failures) == 2
    assert all(f.model == "setup" for f in tolerant.failures)


def test_tuned_variant_keeps_equivalence(sample_set):
    run = run_seeded_trials(sample_set, [0],
                            config=EvaluationConfig(tuning_trials=4),
                            models=("baseline-gbdt", "adam"))
    gbdt_trial, adam_trial = run.trials
    assert gbdt_trial.metrics == adam_trial.metrics


def test_config_defaults():
    config = EvaluationConfig()
    assert config.train_fraction == 0.75
    assert (config.n_pos, config.n_neg) == (15, 15)
    assert config.n_features == 20
    assert config.tuning_trials == 0
    assert config.fallback_threshold == 0.5
    assert config.tolerate_failures is False


# --- feature screening --------------------------------------------------------

def test_select_features_finds_signal():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((240, 6))
    y = (X[:, 3] + 0.2 * X[:, 1] > 0).astype(float)
    chosen = select_features(X, y, 2)
    assert chosen.shape == (2,)
    assert 3 in chosen
    assert list(chosen) == sorted(chosen)
    assert np.array_equal(select_features(X, y, 2), chosen)
    assert np.array_equal(select_features(X, y, 0), np.arange(6))
    assert np.array_equal(select_features(X, y, 99), np.arange(6))


# --- cross-model comparison ---------------------------------------------------

ADAM_F1 = tuple(float(x) for x in (
    ["0.59521553942444849"] + ["0.66054567849098167"] * 2
    + ["0.67094246374079169"] * 7 + ["0.69868889610924167"] * 5
    + ["0.74162912426336969"] * 5 + ["0.77370707044418929"] * 5
    + ["0.8020851737971102"] * 4 + ["0.89762970813175702"]))
BASELINE_F1 = tuple(float(x) for x in (
    ["0.35192065537588474", "0.47550396014758672"]
    + ["0.53211669391348171"] * 3 + ["0.59521553942444849"] * 3
    + ["0.66054567849098167"] * 7 + ["0.69868889610924167"] * 6
    + ["0.77370707044418929"] * 6 + ["0.84430354010855735"] * 2
    + ["0.96577605548683865"]))


def test_comparison_reproduces_reported_statistics():
    summary = compare_models(ADAM_F1, BASELINE_F1)
    assert (summary.n_adam, summary.n_baseline) == (30, 30)
    assert f"{summary.adam_mean_f1:.4f}" == "0.7263"
    assert f"{summary.baseline_mean_f1:.4f}" == "0.6774"
    assert f"{summary.adam_std_f1:.4f}" == "0.0632"
    assert f"{summary.baseline_std_f1:.4f}" == "0.1217"
    assert f"{summary.variance_ratio:.2f}" == "3.71"
    assert f"{summary.f_test[0]:.2f}" == "3.71"
    assert f"{summary.mann_whitney[1]:.4f}" == "0.0418"
    assert f"{summary.levene[1]:.4f}" == "0.0300"
    assert abs(summary.cohens_d - 0.5038) <= 1e-3


def test_comparison_components_match_stats_module():
    a = np.asarray(ADAM_F1)
    b = np.asarray(BASELINE_F1)
    summary = compare_models(ADAM_F1, BASELINE_F1)
    assert summary.mann_whitney == mann_whitney_u(a, b)
    assert summary.levene == levene_test(a, b, center="mean")
    assert summary.f_test == variance_f_test(b, a)
    assert summary.cohens_d == cohens_d(a, b)
    assert summary.variance_ratio == np.var(b, ddof=1) / np.var(a, ddof=1)
    assert summary.adam_std_f1 == math.sqrt(np.var(a, ddof=1))


def test_comparison_accepts_trials(eval_run):
    adam = [t for t in eval_run.trials if t.model == "adam"]
    gbdt = [t for t in eval_run.trials if t.model == "baseline-gbdt"]
    from_trials = compare_models(adam, gbdt)
    from_floats = compare_models([t.metrics.f1 for t in adam],
                                 [t.metrics.f1 for t in gbdt])
    assert from_trials == from_floats


def test_identical_groups_comparison():
    summary = compare_models(ADAM_F1, ADAM_F1)
    assert summary.cohens_d == 0.0
    assert summary.mann_whitney[1] == 1.0
    assert summary.levene == (0.0, 1.0)
    assert summary.f_test[0] == 1.0
    assert summary.f_test[1] == pytest.approx(1.0, rel=1e-12)
    assert summary.variance_ratio == 1.0
    with pytest.raises(EmptyInputError):
        compare_models([], ADAM_F1)


def test_format_summary_contents():
    summary = compare_models(ADAM_F1, BASELINE_F1)
    text = format_summary(summary)
    assert f"adam_mean_f1: {summary.adam_mean_f1:.17g}" in text
    assert f"mann_whitney_p: {summary.mann_whitney[1]:.17g}" in text
    assert f"levene_p: {summary.levene[1]:.17g}" in text
    assert f"cohens_d: {summary.cohens_d:.17g}" in text
    assert "variance_ratio_baseline_over_adam: " in text
    lines = text.splitlines()
    assert any(line.startswith("adam ") for line in lines)
    assert any(line.startswith("baseline ") for line in lines)
