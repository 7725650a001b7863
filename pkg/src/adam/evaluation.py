"""Seeded evaluation protocol and cross-model statistical comparison.

One trial = one seed: draw a group-disjoint stratified split, impute
with training medians, keep the strongest features by split gain, fit
each requested model, and score it on a fixed-size evaluation cohort
drawn from the held-out studies. The "adam" variant routes every cohort
sample through the three-agent pipeline and scores its verdicts; with
the deterministic mock backends the whole run is a pure function of
(dataset, seeds, configuration).

Per-seed F1 vectors from two runs are compared with Mann-Whitney U,
Levene's test, a variance F-test, and Cohen's d.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .agents import (
    AgentContext,
    DeployedModel,
    ThresholdMockLLM,
    TitleEchoMock,
    run_computational,
    run_pipeline,
)
from .dataset import (
    SampleSet,
    draw_eval_cohort,
    feature_medians,
    impute,
    split_grouped_stratified,
)
from .ensemble import (
    BinaryMetrics,
    GBDTParams,
    accuracy,
    auc_score,
    evaluate_binary,
    feature_gains,
    fit_gbdt,
    fit_logistic_regression,
    fit_random_forest,
    precision_recall_f1,
    run_search,
)
from .errors import AdamError, EmptyInputError
from .stats import cohens_d, levene_test, mann_whitney_u, variance_f_test

MODEL_TAGS = ("baseline-gbdt", "baseline-rf", "baseline-lr", "adam")
CSV_FIELDS = ("seed", "model", "accuracy", "auc", "f1")


@dataclass(frozen=True)
class EvaluationConfig:
    train_fraction: float = 0.75
    n_pos: int = 15
    n_neg: int = 15
    n_features: int = 20
    tuning_trials: int = 0
    tuning_folds: int = 3
    fallback_threshold: float = 0.5
    tolerate_failures: bool = False


@dataclass(frozen=True)
class TrialResult:
    seed: int
    model: str
    metrics: BinaryMetrics
    cohort_size: int


@dataclass(frozen=True)
class SeedFailure:
    seed: int
    model: str  # offending model tag, or "setup" for split/cohort failures
    message: str


@dataclass(frozen=True)
class EvaluationRun:
    trials: tuple[TrialResult, ...]
    failures: tuple[SeedFailure, ...]


def select_features(X, y, n_features: int, seed: int = 0) -> np.ndarray:
    """Indices of the strongest features by total split gain, ascending.

    A screening ensemble with default parameters ranks the columns;
    ties fall back to column order. n_features <= 0 keeps everything.
    """
    X = np.asarray(X, dtype=float)
    d = X.shape[1]
    if n_features <= 0 or n_features >= d:
        return np.arange(d)
    screen = fit_gbdt(X, np.asarray(y, dtype=float), seed=seed)
    gains = feature_gains(screen)
    order = np.lexsort((np.arange(d), -gains))
    return np.sort(order[:n_features])


def _fit_tuned_gbdt(X, y, groups, config: EvaluationConfig, seed: int):
    if config.tuning_trials > 0:
        search = run_search(X, y, groups, n_trials=config.tuning_trials,
                            seed=seed, n_folds=config.tuning_folds)
        params = GBDTParams(**search.best_params)
        return fit_gbdt(X, y, params, seed=seed)
    return fit_gbdt(X, y, seed=seed)


def _history_outputs(sample, test_set, clinical_names, taxon_names,
                     deployed, reference):
    outputs = []
    last_visit = 0
    for prior in test_set.prior_visits(sample):
        if prior.visit_index <= last_visit:
            continue  # duplicate visit index: keep the first sample
        outputs.append(run_computational(prior, clinical_names, taxon_names,
                                         deployed, reference))
        last_visit = prior.visit_index
    return tuple(outputs)


def _adam_metrics(cohort, test_set, deployed, reference, config,
                  summarizer, classifier, searcher) -> BinaryMetrics:
    labels = []
    predictions = []
    scores = []
    for sample in cohort.samples:
        output = run_computational(sample, cohort.clinical_names,
                                   cohort.taxon_names, deployed, reference)
        history = _history_outputs(sample, test_set, cohort.clinical_names,
                                   cohort.taxon_names, deployed, reference)
        ctx = AgentContext(sample_id=sample.sample_id,
                           study_id=sample.study_id,
                           visit_index=sample.visit_index,
                           computational=output,
                           history=history)
        report = run_pipeline(ctx, searcher, summarizer, classifier,
                              fallback_threshold=config.fallback_threshold)
        labels.append(sample.label)
        predictions.append(1.0 if report.verdict == "Yes" else 0.0)
        scores.append(output.probability)
    y = np.asarray(labels, dtype=float)
    yhat = np.asarray(predictions, dtype=float)
    precision, recall, f1 = precision_recall_f1(y, yhat)
    return BinaryMetrics(accuracy=accuracy(y, yhat), precision=precision,
                         recall=recall, f1=f1, auc=auc_score(y, scores))


def _run_one_seed(sample_set, seed, config, models, summarizer, classifier,
                  searcher) -> list[TrialResult]:
    split = split_grouped_stratified(sample_set, config.train_fraction, seed)
    train, test = split.train, split.test
    medians = feature_medians(train.feature_matrix())
    X_train = impute(train.feature_matrix(), medians)
    y_train = train.labels()
    selected = select_features(X_train, y_train, config.n_features, seed=seed)
    names = train.feature_names
    selected_names = tuple(names[j] for j in selected)
    X_train = X_train[:, selected]

    cohort = draw_eval_cohort(test, config.n_pos, config.n_neg, seed)
    X_cohort = impute(cohort.feature_matrix(), medians)[:, selected]
    y_cohort = cohort.labels()
    threshold = config.fallback_threshold

    gbdt_model = None
    if "baseline-gbdt" in models or "adam" in models:
        gbdt_model = _fit_tuned_gbdt(X_train, y_train, train.study_ids(),
                                     config, seed)

    results = []
    for tag in models:
        if tag == "baseline-gbdt":
            metrics = evaluate_binary(y_cohort,
                                      gbdt_model.predict_proba(X_cohort),
                                      threshold=threshold)
        elif tag == "baseline-rf":
            forest = fit_random_forest(X_train, y_train, seed=seed)
            metrics = evaluate_binary(y_cohort, forest.predict_proba(X_cohort),
                                      threshold=threshold)
        elif tag == "baseline-lr":
            linear = fit_logistic_regression(X_train, y_train)
            metrics = evaluate_binary(y_cohort, linear.predict_proba(X_cohort),
                                      threshold=threshold)
        else:
            deployed = DeployedModel(
                model=gbdt_model,
                feature_names=selected_names,
                medians={name: float(value)
                         for name, value in zip(names, medians)
                         if name in selected_names},
            )
            healthy_ids = [s.sample_id for s in train.samples if s.label == 0]
            if not healthy_ids:
                raise EmptyInputError(
                    f"seed {seed}: training partition has no healthy samples "
                    "to serve as the beta-diversity reference")
            reference = train.subset(healthy_ids)
            metrics = _adam_metrics(cohort, test, deployed, reference, config,
                                    summarizer, classifier, searcher)
        results.append(TrialResult(seed=seed, model=tag, metrics=metrics,
                                   cohort_size=len(cohort.samples)))
    return results


def run_seeded_trials(sample_set: SampleSet, seeds, config=None,
                      models=MODEL_TAGS, summarizer=None, classifier=None,
                      searcher=None, jobs: int = 1) -> EvaluationRun:
    """Evaluate every requested model on every seed.

    A failing seed aborts the run unless config.tolerate_failures is
    set, in which case it is recorded and skipped in aggregation. The
    adam variant defaults to the deterministic mock backends when no
    LLM clients are supplied. jobs > 1 fans independent seeds out to
    worker processes; results are identical to a sequential run.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise EmptyInputError("no seeds given")
    if len(set(seeds)) != len(seeds):
        raise ValueError("seeds must be distinct")
    models = tuple(models)
    unknown = [tag for tag in models if tag not in MODEL_TAGS]
    if unknown:
        raise ValueError(f"unknown model tags {unknown}; valid: {MODEL_TAGS}")
    if config is None:
        config = EvaluationConfig()
    if "adam" in models:
        summarizer = summarizer if summarizer is not None else TitleEchoMock()
        classifier = classifier if classifier is not None else ThresholdMockLLM()

    trials: list[TrialResult] = []
    failures: list[SeedFailure] = []

    def record(seed, resolve):
        try:
            trials.extend(resolve())
        except AdamError as exc:
            if not config.tolerate_failures:
                raise
            failures.append(SeedFailure(seed=seed, model="setup",
                                        message=str(exc)))

    if jobs > 1 and len(seeds) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=min(jobs, len(seeds))) as pool:
            futures = [(seed, pool.submit(_run_one_seed, sample_set, seed,
                                          config, models, summarizer,
                                          classifier, searcher))
                       for seed in seeds]
            for seed, future in futures:
                record(seed, future.result)
    else:
        for seed in seeds:
            record(seed, lambda: _run_one_seed(sample_set, seed, config,
                                               models, summarizer, classifier,
                                               searcher))
    return EvaluationRun(trials=tuple(trials), failures=tuple(failures))


def write_trials_csv(trials, path) -> None:
    """One row per (seed, model): seed, model, accuracy, auc, f1.

    An undefined AUC (single-class cohort) is stored as an empty cell.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for trial in trials:
            m = trial.metrics
            auc = "" if m.auc is None else f"{m.auc:.17g}"
            writer.writerow([trial.seed, trial.model,
                             f"{m.accuracy:.17g}", auc, f"{m.f1:.17g}"])


def read_trials_csv(path) -> list[dict]:
    """Rows written by write_trials_csv, with typed values."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_FIELDS:
            raise ValueError(f"{path}: expected header {','.join(CSV_FIELDS)}")
        for row in reader:
            rows.append({
                "seed": int(row["seed"]),
                "model": row["model"],
                "accuracy": float(row["accuracy"]),
                "auc": None if row["auc"] == "" else float(row["auc"]),
                "f1": float(row["f1"]),
            })
    return rows


def aggregate_trials(trials) -> dict[str, dict[str, tuple[float, float, int]]]:
    """Per model tag, (mean, sample std, n) for accuracy, auc, and f1.

    Trials whose AUC is undefined are skipped in the auc aggregate.
    """
    by_tag: dict[str, list[TrialResult]] = {}
    for trial in trials:
        by_tag.setdefault(trial.model, []).append(trial)
    out = {}
    for tag, rows in by_tag.items():
        stats = {}
        for metric in ("accuracy", "auc", "f1"):
            values = [getattr(t.metrics, metric) for t in rows]
            values = [v for v in values if v is not None]
            if not values:
                stats[metric] = (math.nan, math.nan, 0)
                continue
            arr = np.asarray(values, dtype=float)
            std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0
            stats[metric] = (float(arr.mean()), std, arr.size)
        out[tag] = stats
    return out


def format_metrics_table(trials) -> str:
    """Mean +- std per metric per model, one row per model tag."""
    trials = list(trials)
    if not trials:
        raise EmptyInputError("no trials to tabulate")
    aggregates = aggregate_trials(trials)
    n_seeds = len({t.seed for t in trials})
    tags = [tag for tag in MODEL_TAGS if tag in aggregates]
    tags += sorted(set(aggregates) - set(tags))
    lines = [f"Model performance averaged across {n_seeds} random seeds", ""]
    header = (f"{'model':<14} {'accuracy':>17} {'auc':>17} {'f1':>17}")
    lines.append(header)
    lines.append("-" * len(header))
    for tag in tags:
        cells = [f"{tag:<14}"]
        for metric in ("accuracy", "auc", "f1"):
            mean, std, n = aggregates[tag][metric]
            cell = "n/a" if n == 0 else f"{mean:.4f} +- {std:.4f}"
            cells.append(f"{cell:>17}")
        lines.append(" ".join(cells))
    lines.append("")
    return "\n".join(lines)


@dataclass(frozen=True)
class ComparisonSummary:
    n_adam: int
    n_baseline: int
    adam_mean_f1: float
    baseline_mean_f1: float
    adam_std_f1: float
    baseline_std_f1: float
    variance_ratio: float  # baseline variance / adam variance
    mann_whitney: tuple[float, float]  # (U, p)
    levene: tuple[float, float]  # (W, p)
    f_test: tuple[float, float]  # (F, p)
    cohens_d: float


def _f1_vector(values) -> np.ndarray:
    out = [float(v.metrics.f1) if isinstance(v, TrialResult) else float(v)
           for v in values]
    if not out:
        raise EmptyInputError("no F1 values to compare")
    return np.asarray(out)


def compare_models(adam, baseline) -> ComparisonSummary:
    """Statistical comparison of two per-seed F1 vectors.

    Accepts TrialResult sequences or raw F1 sequences. The variance
    ratio and F statistic are oriented baseline over adam, so values
    above 1 mean the baseline is more variable.
    """
    a = _f1_vector(adam)
    b = _f1_vector(baseline)
    var_a = float(np.var(a, ddof=1)) if a.size > 1 else 0.0
    var_b = float(np.var(b, ddof=1)) if b.size > 1 else 0.0
    return ComparisonSummary(
        n_adam=a.size,
        n_baseline=b.size,
        adam_mean_f1=float(np.mean(a)),
        baseline_mean_f1=float(np.mean(b)),
        adam_std_f1=math.sqrt(var_a),
        baseline_std_f1=math.sqrt(var_b),
        variance_ratio=var_b / var_a if var_a > 0 else math.inf,
        mann_whitney=mann_whitney_u(a, b),
        levene=levene_test(a, b, center="mean"),
        f_test=variance_f_test(b, a),
        cohens_d=cohens_d(a, b),
    )


def format_summary(summary: ComparisonSummary) -> str:
    """Key-value block plus a small table, ready to print or save."""
    u_stat, u_p = summary.mann_whitney
    w_stat, w_p = summary.levene
    f_stat, f_p = summary.f_test
    pairs = [
        ("n_adam", f"{summary.n_adam}"),
        ("n_baseline", f"{summary.n_baseline}"),
        ("adam_mean_f1", f"{summary.adam_mean_f1:.17g}"),
        ("baseline_mean_f1", f"{summary.baseline_mean_f1:.17g}"),
        ("adam_std_f1", f"{summary.adam_std_f1:.17g}"),
        ("baseline_std_f1", f"{summary.baseline_std_f1:.17g}"),
        ("variance_ratio_baseline_over_adam", f"{summary.variance_ratio:.17g}"),
        ("mann_whitney_u", f"{u_stat:.17g}"),
        ("mann_whitney_p", f"{u_p:.17g}"),
        ("levene_w", f"{w_stat:.17g}"),
        ("levene_p", f"{w_p:.17g}"),
        ("f_statistic", f"{f_stat:.17g}"),
        ("f_test_p", f"{f_p:.17g}"),
        ("cohens_d", f"{summary.cohens_d:.17g}"),
    ]
    lines = [f"{key}: {value}" for key, value in pairs]
    lines.append("")
    header = f"{'model':<10} {'n':>4} {'mean_f1':>9} {'std_f1':>8} {'var_f1':>8}"
    lines.append(header)
    lines.append("-" * len(header))
    lines.append(f"{'adam':<10} {summary.n_adam:>4} "
                 f"{summary.adam_mean_f1:>9.4f} {summary.adam_std_f1:>8.4f} "
                 f"{summary.adam_std_f1 ** 2:>8.4f}")
    lines.append(f"{'baseline':<10} {summary.n_baseline:>4} "
                 f"{summary.baseline_mean_f1:>9.4f} "
                 f"{summary.baseline_std_f1:>8.4f} "
                 f"{summary.baseline_std_f1 ** 2:>8.4f}")
    lines.append("")
    return "\n".join(lines)
