import json

import pytest
import yaml

from facihub.cli import main


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump({
        "storage": {"data_dir": str(tmp_path / "state")},
        "targeting": {"fraction": 1.0},
    }))
    return str(path)


def run_cli(config_path, *args):
    return main(["--config", config_path, *args])


def test_ingest_prints_report(config_path, capsys):
    code = run_cli(config_path, "ingest", "src/facihub/fixtures/sample_log.ndjson")
    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert report["accepted"] == 20


def test_run_prints_manifest(config_path, capsys):
    run_cli(config_path, "ingest", "src/facihub/fixtures/sample_log.ndjson")
    capsys.readouterr()
    code = run_cli(config_path, "run", "--as-of", "2025-12-03T00:00:00Z")
    assert code == 0
    manifest = json.loads(capsys.readouterr().out)
    assert manifest["as_of"] == "2025-12-03T00:00:00Z"
    assert manifest["n_emitted"] >= 1


def test_full_cli_flow_and_reports(config_path, tmp_path, capsys):
    run_cli(config_path, "ingest", "src/facihub/fixtures/sample_log.ndjson")
    run_cli(config_path, "run", "--as-of", "2025-12-03T00:00:00Z")
    capsys.readouterr()

    # Decide everything through the engine (the CLI has no review subcommand;
    # review is an API/UI surface).
    from facihub.config import load_config
    from facihub.engine import Engine
    engine = Engine(load_config(config_path))
    flags = {"role_task_alignment": "pass", "interactional_appropriateness": "pass",
             "factual_plausibility": "pass"}
    from facihub.records import parse_timestamp
    for candidate in engine.board.pending():
        engine.decide(candidate.candidate_id, "accept", flags, "rev1",
                      decided_at=parse_timestamp("2025-12-03T01:00:00Z"))

    code = run_cli(config_path, "publish", "--published-at", "2025-12-03T02:00:00Z")
    assert code == 0
    published = json.loads(capsys.readouterr().out)["published"]
    assert published

    out = tmp_path / "metrics.tsv"
    assert run_cli(config_path, "metrics", "--out", str(out)) == 0
    assert out.read_text().startswith("date\tgenerated")

    balance_out = tmp_path / "balance.tsv"
    assert run_cli(config_path, "analyze", "--balance", "--out", str(balance_out)) == 0
    assert "mean_posting_hour" in balance_out.read_text()

    perm_out = tmp_path / "perm.tsv"
    assert run_cli(config_path, "analyze", "--permutation", "SP_total",
                   "--n-permutations", "50", "--seed", "7",
                   "--out", str(perm_out)) == 0
    assert perm_out.read_text().startswith("indicator\tobserved_delta")


def test_unknown_subcommand_exits_2(config_path, capsys):
    assert run_cli(config_path, "frobnicate") == 2


def test_no_subcommand_exits_2(config_path):
    assert run_cli(config_path) == 2


def test_operational_error_is_single_json_line(config_path, capsys):
    code = run_cli(config_path, "ingest", "does-not-exist.ndjson")
    assert code == 1
    err_lines = capsys.readouterr().err.strip().splitlines()
    assert len(err_lines) == 1
    parsed = json.loads(err_lines[0])
    assert "error" in parsed and "message" in parsed


def test_analyze_goal_writes_nine_row_table(config_path, tmp_path, capsys):
    # Build a store large enough for paired analysis via the synthetic log.
    from synthlog import generate_log
    log_path = tmp_path / "synthetic.ndjson"
    log_path.write_text("\n".join(generate_log(seed=5, n_records=500)) + "\n")
    run_cli(config_path, "ingest", str(log_path))
    run_cli(config_path, "run", "--as-of", "2025-12-08T00:00:00Z")
    capsys.readouterr()
    out = tmp_path / "goal1.tsv"
    code = run_cli(config_path, "analyze", "--goal", "1", "--out", str(out))
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 10  # header + nine indices
    assert lines[1].split("\t")[0] == "SP_AF"


def test_analyze_learner_means_export(config_path, tmp_path, capsys):
    run_cli(config_path, "ingest", "src/facihub/fixtures/sample_log.ndjson")
    run_cli(config_path, "run", "--as-of", "2025-12-03T00:00:00Z")
    capsys.readouterr()
    out = tmp_path / "means.tsv"
    assert run_cli(config_path, "analyze", "--learner-means", "--out", str(out)) == 0
    header = out.read_text().splitlines()[0].split("\t")
    assert header[:2] == ["learner_id", "condition"]
    assert header[2:] == ["SP_AF", "SP_OC", "SP_NC", "SP_total",
                          "CP_PT", "CP_EX", "CP_IN", "CP_RC", "CP_total"]
