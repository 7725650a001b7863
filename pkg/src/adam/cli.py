"""Command-line surface for the full pipeline.

Subcommands:
  synth     write the bundled seeded synthetic dataset
  ingest    validate a dataset file and emit a summary
  index     chunk, embed, and persist a literature corpus
  train     split, select features, optionally tune, fit, save the model
  classify  run the three-agent pipeline over an evaluation cohort
  evaluate  run the seeded multi-model trial protocol
  compare   statistical comparison of two per-seed trial files
  report    re-render saved classification dossiers to documents

Configuration precedence: flags > --config file > built-in defaults.
Every artifact-producing run echoes its fully-resolved configuration as
resolved-config.json in the output directory. Exit status: 0 success,
1 diagnosed failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from dataclasses import asdict, replace
from pathlib import Path

from .agents import (
    AgentContext,
    ClassificationReport,
    DeployedModel,
    HttpChatBackend,
    ThresholdMockLLM,
    TitleEchoMock,
    render_report,
    run_computational,
    run_pipeline,
)
from .chunker import read_corpus
from .config import RunConfig, load_config_file, resolve_config, write_resolved_config
from .dataset import (
    draw_eval_cohort,
    feature_medians,
    impute,
    parse_samples,
    split_grouped_stratified,
)
from .embedding import OfflineHashEmbedder, RemoteEmbedder
from .ensemble import evaluate_binary, model_from_dict, model_to_dict
from .errors import AdamError, FormatError, IntegrityError, SchemaError
from .evaluation import (
    EvaluationConfig,
    MODEL_TAGS,
    _fit_tuned_gbdt,
    _history_outputs,
    compare_models,
    format_metrics_table,
    format_summary,
    read_trials_csv,
    run_seeded_trials,
    select_features,
    write_trials_csv,
)
from .synthetic import write_dataset
from .vectorstore import SemanticSearch, index_corpus, load_collections, save_collections

_MODEL_ALIASES = {
    "gbdt": "baseline-gbdt",
    "rf": "baseline-rf",
    "lr": "baseline-lr",
    "adam": "adam",
    "baseline-gbdt": "baseline-gbdt",
    "baseline-rf": "baseline-rf",
    "baseline-lr": "baseline-lr",
}


def _resolve(args: argparse.Namespace, **flags) -> RunConfig:
    file_values = load_config_file(args.config) if args.config else None
    return resolve_config(file_values, **flags)


def _echo(config: RunConfig, out, command: str) -> None:
    if out is not None:
        write_resolved_config(config, out, command)


def _embedder(config: RunConfig):
    if config.embedding_backend == "mock":
        return OfflineHashEmbedder(dim=config.embedding_dim)
    return RemoteEmbedder(url=config.embedding_url,
                          model=config.embedding_model,
                          dim=config.embedding_dim)


def _llm_backends(config: RunConfig):
    if config.llm_backend == "mock":
        return TitleEchoMock(), ThresholdMockLLM()
    return (HttpChatBackend(url=config.llm_url,
                            model=config.summarization_model),
            HttpChatBackend(url=config.llm_url,
                            model=config.classification_model))


def _searcher(config: RunConfig):
    if config.store is None:
        return None
    collections = load_collections(config.store,
                                   expected_dim=config.embedding_dim)
    if not collections:
        raise FormatError(f"{config.store}: no collections found")
    return SemanticSearch(tuple(collections.values()), _embedder(config),
                          k=config.top_k, threshold=config.threshold)


def _load_sample_set(config: RunConfig, quiet: bool = False):
    if config.dataset is None or config.schema is None:
        raise SchemaError("this command needs --dataset and --schema")
    result = parse_samples(config.dataset, config.schema)
    if result.rejected and not quiet:
        print(f"rejected {len(result.rejected)} row(s):", file=sys.stderr)
        for line_number, reason in result.rejected:
            print(f"  line {line_number}: {reason}", file=sys.stderr)
    if len(result.sample_set) == 0:
        raise FormatError(f"{config.dataset}: no usable rows")
    return result


# ---------------------------------------------------------------------------
# subcommands

def cmd_synth(args) -> int:
    config = _resolve(args, seed=args.seed)
    out = Path(args.out)
    csv_path, schema_path = write_dataset(out, seed=config.seed)
    result = parse_samples(csv_path, schema_path)
    n = len(result.sample_set)
    positives = int(result.sample_set.labels().sum())
    print(f"wrote {csv_path}")
    print(f"wrote {schema_path}")
    print(f"samples: {n} ({positives} positive, {100.0 * positives / n:.2f}%)")
    _echo(replace(config, dataset=str(csv_path), schema=str(schema_path)),
          out, "synth")
    return 0


def _dataset_summary(config: RunConfig, result) -> str:
    ss = result.sample_set
    labels = ss.labels()
    positives = int(labels.sum())
    visits_per_study: dict[str, int] = {}
    for sample in ss.samples:
        visits_per_study[sample.study_id] = visits_per_study.get(
            sample.study_id, 0) + 1
    counts = sorted(visits_per_study.values())
    lines = [
        f"dataset: {config.dataset}",
        f"samples: {len(ss)}",
        f"positive samples: {positives} "
        f"({100.0 * positives / len(ss):.2f}%)",
        f"studies: {len(visits_per_study)}",
        f"visits per participant: min {counts[0]}, "
        f"median {statistics.median(counts):g}, max {counts[-1]}",
        f"clinical columns: {len(ss.clinical_names)}",
        f"taxon columns: {len(ss.taxon_names)}",
        f"rejected rows: {len(result.rejected)}",
    ]
    lines.extend(f"  line {line_number}: {reason}"
                 for line_number, reason in result.rejected)
    return "\n".join(lines) + "\n"


def cmd_ingest(args) -> int:
    config = _resolve(args, dataset=args.dataset, schema=args.schema)
    result = _load_sample_set(config, quiet=True)
    summary = _dataset_summary(config, result)
    print(summary, end="")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "dataset-summary.txt").write_text(summary, encoding="utf-8")
        _echo(config, out, "ingest")
    return 0


def cmd_index(args) -> int:
    config = _resolve(args, corpus=args.corpus, store=args.store,
                      embedding_backend=args.embedding_backend,
                      embedding_dim=args.embedding_dim,
                      embedding_url=args.embedding_url,
                      segment_length=args.segment_length,
                      overlap=args.overlap)
    if config.store is None:
        raise SchemaError("index needs --store (directory for .advec files)")
    store = Path(config.store)
    built = None
    if config.corpus is not None:
        documents = read_corpus(config.corpus)
        built = index_corpus(documents, _embedder(config),
                             segment_length=config.segment_length,
                             overlap=config.overlap)
        save_collections(built, store)
        for name in sorted(built):
            print(f"collection {name}: {built[name].count} record(s)")
        print(f"indexed {sum(c.count for c in built.values())} record(s) "
              f"from {len(documents)} document(s) into {store}")
    if args.verify or config.corpus is None:
        loaded = load_collections(store, expected_dim=config.embedding_dim)
        total = sum(c.count for c in loaded.values())
        if built is not None:
            if set(loaded) != set(built):
                raise IntegrityError(
                    f"{store}: reloaded collection names {sorted(loaded)} "
                    f"differ from written {sorted(built)}")
            for name, collection in built.items():
                if loaded[name] != collection:
                    raise IntegrityError(
                        f"{store}: collection {name} changed across the "
                        "save/load round trip")
        print(f"verified {total} record(s) across {len(loaded)} "
              f"collection(s) in {store}")
    _echo(config, store, "index")
    return 0


def _model_bundle(model, feature_names, medians, split) -> dict:
    return {
        "format": "adam-model-bundle",
        "model": model_to_dict(model),
        "feature_names": list(feature_names),
        "medians": {name: float(value)
                    for name, value in medians.items()},
        "train_studies": list(split.train_studies),
        "test_studies": list(split.test_studies),
    }


def _load_model_bundle(path):
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "adam-model-bundle":
        raise FormatError(f"{path}: not a model bundle")
    for key in ("model", "feature_names", "medians", "train_studies",
                "test_studies"):
        if key not in doc:
            raise FormatError(f"{path}: bundle lacks {key!r}")
    model = model_from_dict(doc["model"])
    names = tuple(str(n) for n in doc["feature_names"])
    medians = {str(k): float(v) for k, v in doc["medians"].items()}
    if model.n_features != len(names):
        raise FormatError(
            f"{path}: model expects {model.n_features} features but the "
            f"bundle names {len(names)}")
    return (model, names, medians,
            tuple(doc["train_studies"]), tuple(doc["test_studies"]))


def cmd_train(args) -> int:
    config = _resolve(args, dataset=args.dataset, schema=args.schema,
                      model=args.model, seed=args.seed,
                      split_fraction=args.split_fraction,
                      n_features=args.n_features,
                      tuning_trials=args.tuning_trials,
                      tuning_folds=args.tuning_folds)
    out = Path(args.out)
    sample_set = _load_sample_set(config).sample_set
    split = split_grouped_stratified(sample_set, config.split_fraction,
                                     config.seed)
    train, test = split.train, split.test
    medians = feature_medians(train.feature_matrix())
    X_train = impute(train.feature_matrix(), medians)
    y_train = train.labels()
    selected = select_features(X_train, y_train, config.n_features,
                               seed=config.seed)
    names = train.feature_names
    selected_names = tuple(names[j] for j in selected)
    evaluation_config = EvaluationConfig(tuning_trials=config.tuning_trials,
                                         tuning_folds=config.tuning_folds)
    model = _fit_tuned_gbdt(X_train[:, selected], y_train,
                            train.study_ids(), evaluation_config, config.seed)

    train_metrics = evaluate_binary(
        y_train, model.predict_proba(X_train[:, selected]))
    X_test = impute(test.feature_matrix(), medians)[:, selected]
    test_metrics = evaluate_binary(test.labels(), model.predict_proba(X_test))

    bundle = _model_bundle(model, selected_names,
                           {name: float(value)
                            for name, value in zip(names, medians)
                            if name in selected_names}, split)
    model_path = Path(config.model) if config.model else out / "model.json"
    out.mkdir(parents=True, exist_ok=True)
    model_path.parent.mkdir(parents=True, exist_ok=True)
    with open(model_path, "w", encoding="utf-8") as fh:
        json.dump(bundle, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"trained on {len(train)} sample(s) from "
          f"{len(split.train_studies)} study(ies); "
          f"{len(selected_names)} feature(s)")
    print(f"training accuracy: {train_metrics.accuracy:.4f}  "
          f"f1: {train_metrics.f1:.4f}")
    print(f"holdout accuracy: {test_metrics.accuracy:.4f}  "
          f"f1: {test_metrics.f1:.4f}  "
          f"({len(test)} sample(s), {len(split.test_studies)} study(ies))")
    print(f"wrote {model_path}")
    _echo(replace(config, model=str(model_path)), out, "train")
    return 0


def cmd_classify(args) -> int:
    config = _resolve(args, dataset=args.dataset, schema=args.schema,
                      model=args.model, store=args.store, seed=args.seed,
                      n_pos=args.n_pos, n_neg=args.n_neg,
                      llm_backend=args.llm_backend, llm_url=args.llm_url,
                      embedding_backend=args.embedding_backend,
                      embedding_dim=args.embedding_dim,
                      embedding_url=args.embedding_url,
                      top_k=args.top_k, threshold=args.threshold,
                      summarization_budget=args.summarization_budget,
                      classification_budget=args.classification_budget,
                      fallback_threshold=args.fallback_threshold)
    if config.model is None:
        raise SchemaError("classify needs --model (bundle from train)")
    out = Path(args.out)
    model, names, medians, train_studies, test_studies = _load_model_bundle(
        config.model)
    sample_set = _load_sample_set(config).sample_set
    train = sample_set.restrict_to_studies(train_studies)
    test = sample_set.restrict_to_studies(test_studies)
    healthy_ids = [s.sample_id for s in train.samples if s.label == 0]
    if not healthy_ids:
        raise SchemaError("training partition has no healthy samples to "
                          "serve as the beta-diversity reference")
    reference = train.subset(healthy_ids)
    deployed = DeployedModel(model=model, feature_names=names,
                             medians=medians)
    cohort = draw_eval_cohort(test, config.n_pos, config.n_neg, config.seed)
    searcher = _searcher(config)
    summarizer, classifier = _llm_backends(config)

    reports_dir = out / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    yes = 0
    for sample in cohort.samples:
        output = run_computational(sample, cohort.clinical_names,
                                   cohort.taxon_names, deployed, reference)
        history = _history_outputs(sample, test, cohort.clinical_names,
                                   cohort.taxon_names, deployed, reference)
        ctx = AgentContext(sample_id=sample.sample_id,
                           study_id=sample.study_id,
                           visit_index=sample.visit_index,
                           computational=output, history=history)
        report = run_pipeline(
            ctx, searcher, summarizer, classifier,
            summarization_budget=config.summarization_budget,
            classification_budget=config.classification_budget,
            fallback_threshold=config.fallback_threshold,
            summarization_model=config.summarization_model,
            classification_model=config.classification_model)
        report_path = reports_dir / f"{sample.sample_id}.md"
        report_path.write_text(render_report(report), encoding="utf-8")
        yes += report.verdict == "Yes"
        entries.append({
            "sample_id": sample.sample_id,
            "study_id": sample.study_id,
            "visit_index": sample.visit_index,
            "label": sample.label,
            "probability": output.probability,
            "verdict": report.verdict,
            "report_path": str(report_path.relative_to(out)),
            "prompt_tokens": {t.stage: t.prompt_tokens
                              for t in ctx.transcripts},
            "report": asdict(report),
        })
    dossier = {
        "format": "adam-dossier",
        "cohort": {"n_pos": config.n_pos, "n_neg": config.n_neg,
                   "seed": config.seed, "size": len(cohort.samples)},
        "samples": entries,
    }
    with open(out / "dossier.json", "w", encoding="utf-8") as fh:
        json.dump(dossier, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"classified {len(entries)} sample(s): {yes} Yes, "
          f"{len(entries) - yes} No")
    print(f"wrote {out / 'dossier.json'} and {len(entries)} report(s) "
          f"under {reports_dir}")
    _echo(config, out, "classify")
    return 0


def _parse_model_tags(text: str) -> tuple[str, ...]:
    tags = []
    for token in text.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token not in _MODEL_ALIASES:
            raise SchemaError(
                f"unknown model {token!r}; choose from "
                f"{sorted(set(_MODEL_ALIASES))}")
        tag = _MODEL_ALIASES[token]
        if tag not in tags:
            tags.append(tag)
    if not tags:
        raise SchemaError("no models requested")
    return tuple(tags)


def cmd_evaluate(args) -> int:
    config = _resolve(args, dataset=args.dataset, schema=args.schema,
                      n_seeds=args.seeds, seed_base=args.seed_base,
                      split_fraction=args.split_fraction,
                      n_pos=args.n_pos, n_neg=args.n_neg,
                      n_features=args.n_features,
                      tuning_trials=args.tuning_trials,
                      tuning_folds=args.tuning_folds,
                      fallback_threshold=args.fallback_threshold,
                      tolerate_failures=args.tolerate_failures,
                      llm_backend=args.llm_backend, llm_url=args.llm_url,
                      store=args.store,
                      embedding_backend=args.embedding_backend,
                      embedding_dim=args.embedding_dim,
                      embedding_url=args.embedding_url,
                      top_k=args.top_k, threshold=args.threshold,
                      jobs=args.jobs)
    out = Path(args.out)
    tags = _parse_model_tags(args.models)
    sample_set = _load_sample_set(config).sample_set
    evaluation_config = EvaluationConfig(
        train_fraction=config.split_fraction,
        n_pos=config.n_pos, n_neg=config.n_neg,
        n_features=config.n_features,
        tuning_trials=config.tuning_trials,
        tuning_folds=config.tuning_folds,
        fallback_threshold=config.fallback_threshold,
        tolerate_failures=config.tolerate_failures)
    seeds = range(config.seed_base, config.seed_base + config.n_seeds)
    summarizer = classifier = None
    if "adam" in tags and config.llm_backend == "remote":
        summarizer, classifier = _llm_backends(config)
    searcher = _searcher(config) if "adam" in tags else None
    run = run_seeded_trials(sample_set, seeds, config=evaluation_config,
                            models=tags, summarizer=summarizer,
                            classifier=classifier, searcher=searcher,
                            jobs=config.jobs)

    out.mkdir(parents=True, exist_ok=True)
    write_trials_csv(run.trials, out / "trials.csv")
    for tag in tags:
        rows = [t for t in run.trials if t.model == tag]
        if rows:
            write_trials_csv(rows, out / f"trials-{tag}.csv")
    table = format_metrics_table(run.trials) if run.trials else "no trials\n"
    (out / "metrics.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    if run.failures:
        lines = [f"seed {f.seed} [{f.model}]: {f.message}"
                 for f in run.failures]
        (out / "failures.txt").write_text("\n".join(lines) + "\n",
                                          encoding="utf-8")
        print(f"failures: {len(run.failures)} seed(s) skipped "
              f"(see {out / 'failures.txt'})", file=sys.stderr)
    print(f"wrote {out / 'trials.csv'} and per-model trial files")
    _echo(config, out, "evaluate")
    return 0


def _f1_column(path) -> list[float]:
    rows = read_trials_csv(path)
    if not rows:
        raise FormatError(f"{path}: no trial rows")
    tags = sorted({row["model"] for row in rows})
    if len(tags) > 1:
        raise FormatError(
            f"{path}: holds {len(tags)} model tags {tags}; pass a "
            "single-model trial file (trials-<model>.csv)")
    return [row["f1"] for row in rows]


def cmd_compare(args) -> int:
    config = _resolve(args)
    summary = compare_models(_f1_column(args.adam), _f1_column(args.baseline))
    text = format_summary(summary)
    print(text, end="")
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.txt").write_text(text, encoding="utf-8")
        _echo(config, out, "compare")
    return 0


def cmd_report(args) -> int:
    config = _resolve(args)
    with open(args.dossier, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{args.dossier}: invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "adam-dossier":
        raise FormatError(f"{args.dossier}: not a classification dossier")
    out = Path(args.out)
    reports_dir = out / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)
    count = 0
    for entry in doc.get("samples", ()):
        payload = entry["report"]
        report = ClassificationReport(
            sample_id=payload["sample_id"],
            verdict=payload["verdict"],
            probability=payload["probability"],
            sections=tuple((title, body)
                           for title, body in payload["sections"]),
            summary=payload["summary"],
            step_transcripts=tuple(payload["step_transcripts"]),
        )
        path = reports_dir / f"{report.sample_id}.md"
        path.write_text(render_report(report), encoding="utf-8")
        count += 1
    print(f"rendered {count} report(s) under {reports_dir}")
    _echo(config, out, "report")
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adam",
        description="Gut-microbiome Alzheimer's screening pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", required=out_required,
                       help="output directory for artifacts")

    p = sub.add_parser("synth", help="write the seeded synthetic dataset")
    common(p)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="validate a dataset and summarize it")
    common(p, out_required=False)
    p.add_argument("--dataset", help="CSV file")
    p.add_argument("--schema", help="column-role schema JSON")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="chunk + embed a corpus into a store")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--corpus", help="JSONL corpus file")
    p.add_argument("--store", help="directory for .advec collections")
    p.add_argument("--embedding-backend", choices=("mock", "remote"))
    p.add_argument("--embedding-dim", type=int, default=None)
    p.add_argument("--embedding-url")
    p.add_argument("--segment-length", type=int, default=None)
    p.add_argument("--overlap", type=int, default=None)
    p.add_argument("--verify", action="store_true",
                   help="reload the store and recount records")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("train", help="fit and save the boosted ensemble")
    common(p)
    p.add_argument("--dataset")
    p.add_argument("--schema")
    p.add_argument("--model", help="model bundle path (default OUT/model.json)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--split-fraction", type=float, default=None)
    p.add_argument("--n-features", type=int, default=None)
    p.add_argument("--tuning-trials", type=int, default=None)
    p.add_argument("--tuning-folds", type=int, default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify",
                       help="run the agent pipeline over a cohort")
    common(p)
    p.add_argument("--dataset")
    p.add_argument("--schema")
    p.add_argument("--model", help="model bundle from train")
    p.add_argument("--store", help="vector store for retrieval (optional)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--n-pos", type=int, default=None)
    p.add_argument("--n-neg", type=int, default=None)
    p.add_argument("--llm-backend", choices=("mock", "remote"))
    p.add_argument("--llm-url")
    p.add_argument("--embedding-backend", choices=("mock", "remote"))
    p.add_argument("--embedding-dim", type=int, default=None)
    p.add_argument("--embedding-url")
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--summarization-budget", type=int, default=None)
    p.add_argument("--classification-budget", type=int, default=None)
    p.add_argument("--fallback-threshold", type=float, default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="seeded multi-model trial protocol")
    common(p)
    p.add_argument("--dataset")
    p.add_argument("--schema")
    p.add_argument("--seeds", type=int, default=None,
                   help="number of consecutive seeds (from --seed-base)")
    p.add_argument("--seed-base", type=int, default=None)
    p.add_argument("--models", default="gbdt,rf,lr,adam",
                   help="comma-separated: gbdt, rf, lr, adam")
    p.add_argument("--split-fraction", type=float, default=None)
    p.add_argument("--n-pos", type=int, default=None)
    p.add_argument("--n-neg", type=int, default=None)
    p.add_argument("--n-features", type=int, default=None)
    p.add_argument("--tuning-trials", type=int, default=None)
    p.add_argument("--tuning-folds", type=int, default=None)
    p.add_argument("--fallback-threshold", type=float, default=None)
    p.add_argument("--tolerate-failures", action="store_true", default=None)
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes for independent seeds (default 1)")
    p.add_argument("--llm-backend", choices=("mock", "remote"))
    p.add_argument("--llm-url")
    p.add_argument("--store", help="vector store for the adam variant")
    p.add_argument("--embedding-backend", choices=("mock", "remote"))
    p.add_argument("--embedding-dim", type=int, default=None)
    p.add_argument("--embedding-url")
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="compare two per-seed trial files")
    common(p, out_required=False)
    p.add_argument("--adam", required=True,
                   help="trial CSV for the adam side")
    p.add_argument("--baseline", required=True,
                   help="trial CSV for the baseline side")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("report", help="re-render reports from a dossier")
    common(p)
    p.add_argument("--dossier", required=True, help="dossier.json from classify")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AdamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
