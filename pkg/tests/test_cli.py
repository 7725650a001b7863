"""End-to-end command-line walkthrough plus configuration resolution."""

import json

import pytest

from adam.cli import main
from adam.config import (
    RESOLVED_CONFIG_NAME,
    RunConfig,
    load_config_file,
    resolve_config,
)
from adam.errors import SchemaError

EMBED_DIM = "64"


def _write_corpus(path):
    docs = [
        {"publication_id": "PUB0001", "title": "Microbial diversity in dementia",
         "text": "Shannon diversity differs between groups. " * 60,
         "keywords": ["alzheimer", "diversity"]},
        {"publication_id": "PUB0002", "title": "Gut flora and immune aging",
         "text": "Commensal bacteria modulate immune senescence. " * 80,
         "keywords": ["gut", "microbiome"]},
    ]
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc) + "\n")


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    """Artifacts of one full CLI walkthrough, shared across tests."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    assert main(["synth", "--out", str(data), "--seed", "0"]) == 0
    resolved = json.loads((data / RESOLVED_CONFIG_NAME).read_text())
    dataset, schema = resolved["dataset"], resolved["schema"]

    assert main(["ingest", "--dataset", dataset, "--schema", schema,
                 "--out", str(root / "ingest")]) == 0

    corpus = root / "corpus.jsonl"
    _write_corpus(corpus)
    store = root / "store"
    assert main(["index", "--corpus", str(corpus), "--store", str(store),
                 "--embedding-dim", EMBED_DIM, "--verify"]) == 0

    train_dir = root / "train"
    assert main(["train", "--dataset", dataset, "--schema", schema,
                 "--out", str(train_dir), "--seed", "0"]) == 0
    model = str(train_dir / "model.json")

    classify_args = ["--dataset", dataset, "--schema", schema,
                     "--model", model, "--store", str(store),
                     "--embedding-dim", EMBED_DIM, "--seed", "0"]
    first, second = root / "classify-a", root / "classify-b"
    assert main(["classify", "--out", str(first)] + classify_args) == 0
    assert main(["classify", "--out", str(second)] + classify_args) == 0

    eval_dir = root / "eval"
    assert main(["evaluate", "--dataset", dataset, "--schema", schema,
                 "--out", str(eval_dir), "--seeds", "3",
                 "--models", "gbdt,adam"]) == 0

    compare_dir = root / "compare"
    assert main(["compare", "--adam", str(eval_dir / "trials-adam.csv"),
                 "--baseline", str(eval_dir / "trials-baseline-gbdt.csv"),
                 "--out", str(compare_dir)]) == 0

    report_dir = root / "rerender"
    assert main(["report", "--dossier", str(first / "dossier.json"),
                 "--out", str(report_dir)]) == 0

    return {"root": root, "dataset": dataset, "schema": schema,
            "store": store, "model": model, "first": first, "second": second,
            "eval": eval_dir, "compare": compare_dir, "report": report_dir}


# --- per-command artifacts ----------------------------------------------------

def test_synth_and_ingest_artifacts(workspace):
    summary = (workspace["root"] / "ingest" / "dataset-summary.txt").read_text()
    assert "samples: 335" in summary
    assert "positive samples: 110" in summary
    assert "studies: 100" in summary
    assert "rejected rows: 0" in summary


def test_resolved_config_echo(workspace):
    for directory, command in ((workspace["root"] / "data", "synth"),
                               (workspace["store"], "index"),
                               (workspace["root"] / "train", "train"),
                               (workspace["first"], "classify"),
                               (workspace["eval"], "evaluate"),
                               (workspace["compare"], "compare"),
                               (workspace["report"], "report")):
        payload = json.loads((directory / RESOLVED_CONFIG_NAME).read_text())
        assert payload["command"] == command
        missing = {f for f in RunConfig.__dataclass_fields__
                   if f not in payload}
        assert not missing


def test_index_store_files(workspace):
    names = sorted(p.name for p in workspace["store"].glob("*.advec"))
    assert names == ["alzheimers.advec", "microbiome.advec"]


def test_train_bundle_shape(workspace):
    bundle = json.loads((workspace["root"] / "train" / "model.json").read_text())
    assert bundle["format"] == "adam-model-bundle"
    assert len(bundle["feature_names"]) == 20
    assert set(bundle["medians"]) == set(bundle["feature_names"])
    assert bundle["model"]["format"] == "adam-gbdt"
    assert not set(bundle["train_studies"]) & set(bundle["test_studies"])


def test_classify_rerun_is_byte_identical(workspace):
    first, second = workspace["first"], workspace["second"]
    assert (first / "dossier.json").read_bytes() == \
        (second / "dossier.json").read_bytes()
    reports = sorted(p.name for p in (first / "reports").glob("*.md"))
    assert len(reports) == 30
    for name in reports:
        assert (first / "reports" / name).read_bytes() == \
            (second / "reports" / name).read_bytes()


def test_classify_dossier_contents(workspace):
    dossier = json.loads((workspace["first"] / "dossier.json").read_text())
    assert dossier["format"] == "adam-dossier"
    assert dossier["cohort"] == {"n_pos": 15, "n_neg": 15, "seed": 0,
                                 "size": 30}
    entries = dossier["samples"]
    assert len(entries) == 30
    assert sum(e["label"] == 1 for e in entries) == 15
    for entry in entries:
        assert entry["verdict"] in ("Yes", "No")
        assert 0.0 <= entry["probability"] <= 1.0
        assert entry["prompt_tokens"]["summarization"] <= 100_000
        assert entry["prompt_tokens"]["classification"] <= 50_000
        assert len(entry["report"]["step_transcripts"]) == 16
        body = (workspace["first"] / entry["report_path"]).read_text()
        assert body.startswith(f"Prediction: {entry['verdict']} - ")


def test_evaluate_outputs(workspace):
    eval_dir = workspace["eval"]
    table = (eval_dir / "metrics.txt").read_text()
    assert "averaged across 3 random seeds" in table
    assert "baseline-gbdt" in table and "adam" in table
    trials = (eval_dir / "trials.csv").read_text().splitlines()
    assert trials[0] == "seed,model,accuracy,auc,f1"
    assert len(trials) == 1 + 3 * 2
    adam_rows = (eval_dir / "trials-adam.csv").read_text().splitlines()
    gbdt_rows = (eval_dir / "trials-baseline-gbdt.csv").read_text().splitlines()
    assert len(adam_rows) == len(gbdt_rows) == 4
    for adam_row, gbdt_row in zip(adam_rows[1:], gbdt_rows[1:]):
        assert adam_row.split(",")[2:] == gbdt_row.split(",")[2:]


def test_compare_identical_models_is_degenerate(workspace):
    text = (workspace["compare"] / "comparison.txt").read_text()
    assert "cohens_d: 0" in text
    assert "mann_whitney_p: 1" in text


def test_report_rerender_matches_original(workspace):
    original = workspace["first"] / "reports"
    rerendered = workspace["report"] / "reports"
    names = sorted(p.name for p in original.glob("*.md"))
    assert sorted(p.name for p in rerendered.glob("*.md")) == names
    for name in names:
        assert (original / name).read_bytes() == \
            (rerendered / name).read_bytes()


# --- exit codes ----------------------------------------------------------------

def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main(["synth", "--out", "x", "--no-such-flag"])
    assert err.value.code == 2
    with pytest.raises(SystemExit) as err:
        main([])
    assert err.value.code == 2


def test_diagnosed_failures_exit_1(workspace, tmp_path, capsys):
    assert main(["ingest", "--dataset", str(tmp_path / "missing.csv"),
                 "--schema", str(tmp_path / "missing.json")]) == 1
    assert "error:" in capsys.readouterr().err

    assert main(["classify", "--dataset", workspace["dataset"],
                 "--schema", workspace["schema"],
                 "--out", str(tmp_path / "c")]) == 1
    assert "--model" in capsys.readouterr().err

    assert main(["index", "--corpus", "whatever.jsonl",
                 "--store", str(tmp_path / "s")]) == 1

    assert main(["evaluate", "--dataset", workspace["dataset"],
                 "--schema", workspace["schema"],
                 "--out", str(tmp_path / "e"), "--models", "xgboost"]) == 1
    assert "unknown model" in capsys.readouterr().err

    mixed = workspace["eval"] / "trials.csv"
    assert main(["compare", "--adam", str(mixed),
                 "--baseline", str(mixed)]) == 1
    assert "model tags" in capsys.readouterr().err

    not_dossier = tmp_path / "plain.json"
    not_dossier.write_text("{}")
    assert main(["report", "--dossier", str(not_dossier),
                 "--out", str(tmp_path / "r")]) == 1


# --- configuration resolution ---------------------------------------------------

def test_config_file_precedence(tmp_path):
    config_file = tmp_path / "run.json"
    config_file.write_text(json.dumps({"seed": 7, "top_k": 9}))
    out = tmp_path / "synth"
    assert main(["synth", "--config", str(config_file),
                 "--out", str(out)]) == 0
    resolved = json.loads((out / RESOLVED_CONFIG_NAME).read_text())
    assert resolved["seed"] == 7
    assert resolved["top_k"] == 9

    out2 = tmp_path / "synth2"
    assert main(["synth", "--config", str(config_file), "--seed", "9",
                 "--out", str(out2)]) == 0
    resolved = json.loads((out2 / RESOLVED_CONFIG_NAME).read_text())
    assert resolved["seed"] == 9


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    config_file = tmp_path / "run.json"
    config_file.write_text(json.dumps({"sede": 7}))
    assert main(["synth", "--config", str(config_file),
                 "--out", str(tmp_path / "x")]) == 1
    assert "unknown config keys" in capsys.readouterr().err
    config_file.write_text("[1, 2]")
    with pytest.raises(SchemaError, match="JSON object"):
        load_config_file(config_file)


def test_run_config_defaults_and_validation():
    config = RunConfig()
    assert config.embedding_dim == 1536
    assert (config.segment_length, config.overlap) == (2000, 400)
    assert (config.top_k, config.threshold) == (5, 0.8)
    assert config.summarization_budget == 100_000
    assert config.classification_budget == 50_000
    assert config.fallback_threshold == 0.5
    assert (config.n_pos, config.n_neg) == (15, 15)
    assert (config.n_seeds, config.seed_base) == (10, 0)
    config.validate()

    assert resolve_config({"seed": 3}, seed=None).seed == 3
    assert resolve_config({"seed": 3}, seed=5).seed == 5
    with pytest.raises(SchemaError):
        resolve_config(None, no_such_key=1)
    for bad in ({"overlap": 2000}, {"threshold": 1.5},
                {"split_fraction": 1.0}, {"llm_backend": "remote"},
                {"embedding_backend": "quantum"}, {"jobs": 0}):
        with pytest.raises(SchemaError):
            resolve_config(bad)
