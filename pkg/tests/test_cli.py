from __future__ import annotations

import json

import pytest
from typer.testing import CliRunner

from dadc.cli import app
from dadc.export import write_dataset_csv

runner = CliRunner()


def _run(*args: str):
    return runner.invoke(app, list(args))


def test_generate_writes_the_dataset(tmp_path):
    result = _run("generate", "--generate", "heart", "--seed", "1", "--out", str(tmp_path))
    assert result.exit_code == 0, result.output
    text = (tmp_path / "heart.csv").read_text(encoding="utf-8")
    assert text.startswith("x,y,label\n")
    assert len(text.splitlines()) == 214
    report = json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))
    assert report["summary"]["n"] == 213
    assert set(report["artifacts"]) == {"dataset"}


def test_cluster_emits_every_artifact(tmp_path):
    result = _run(
        "cluster",
        "-g",
        "heart",
        "--out",
        str(tmp_path),
        "--emit",
        "labels,graph-csv,graph-svg,plot,trace",
        "--baseline",
        "cfsfdp",
    )
    assert result.exit_code == 0, result.output
    for name in (
        "labels.csv",
        "decision_graph.csv",
        "decision_graph.svg",
        "clusters.svg",
        "fusion_trace.csv",
        "labels_cfsfdp.csv",
        "report.json",
    ):
        assert (tmp_path / name).is_file(), name
    assert "final_clusters=3" in result.output
    assert "ca=1.0000" in result.output


def test_cluster_reads_a_csv(tmp_path, worked_example):
    src = write_dataset_csv(tmp_path / "pts.csv", worked_example)
    out = tmp_path / "out"
    result = _run("cluster", "--input", str(src), "--out", str(out), "--k", "5")
    assert result.exit_code == 0, result.output
    lines = (out / "labels.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "id,cluster"
    assert len(lines) == 51


@pytest.mark.parametrize(
    "command",
    [
        ("generate", "--generate", "ed", "--seed", "2"),
        ("cluster", "--generate", "heart", "--emit", "labels,graph-csv,trace"),
        ("decision-graph", "--generate", "heart"),
        ("evaluate", "--generate", "heart"),
        ("sweep", "--generate", "heart", "--seeds", "2", "--levels", "0.05"),
    ],
)
def test_runs_are_byte_identical(tmp_path, command):
    first, second = tmp_path / "a", tmp_path / "b"
    assert _run(*command, "--out", str(first)).exit_code == 0
    assert _run(*command, "--out", str(second)).exit_code == 0
    csvs = sorted(p.name for p in first.glob("*.csv"))
    assert csvs
    for name in csvs:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name


def test_evaluate_and_sweep_outputs(tmp_path):
    assert _run("evaluate", "-g", "heart", "--out", str(tmp_path)).exit_code == 0
    rows = (tmp_path / "evaluation.csv").read_text(encoding="utf-8").splitlines()
    assert rows[0] == "algorithm,ca,n_evaluated,clusters,noise"
    assert [r.split(",")[0] for r in rows[1:]] == ["cfsfdp", "dadc"]

    result = _run("sweep", "-g", "heart", "--out", str(tmp_path), "--seeds", "2", "--levels", "0.01,0.05")
    assert result.exit_code == 0, result.output
    sweep = (tmp_path / "sweep.csv").read_text(encoding="utf-8").splitlines()
    assert sweep[0] == "level,algorithm,mean_ca,std_ca,seeds"
    assert len(sweep) == 5


@pytest.mark.parametrize(
    "args",
    [
        ("cluster",),
        ("cluster", "-g", "heart", "--k", "0"),
        ("cluster", "-g", "heart", "--fusion-threshold", "-1"),
        ("cluster", "-g", "heart", "--dc", "wide"),
        ("cluster", "-g", "heart", "--emit", "png"),
        ("cluster", "-g", "heart", "--noise-level", "0.5"),
        ("cluster", "-g", "heart", "--baseline", "dbscan"),
        ("cluster", "-g", "spiral"),
    ],
)
def test_configuration_errors_exit_2(tmp_path, args):
    result = _run(*args, "--out", str(tmp_path))
    assert result.exit_code == 2, result.output


def test_data_errors_exit_3(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n3,oops\n", encoding="utf-8")
    out = tmp_path / "out"
    result = _run("cluster", "--input", str(bad), "--out", str(out))
    assert result.exit_code == 3
    error = json.loads((out / "error.json").read_text(encoding="utf-8"))
    assert error["type"] == "ParseError"
    assert _run("cluster", "--input", str(tmp_path / "missing.csv"), "--out", str(out)).exit_code == 3


def test_unwritable_out_exits_3_without_falling_back(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    result = _run("cluster", "-g", "heart", "--out", str(blocker / "sub"))
    assert result.exit_code == 3, result.output
    assert not (tmp_path / "outputs").exists()


def test_unwritable_env_out_exits_3(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    monkeypatch.setenv("DADC_OUT", str(blocker / "sub"))
    assert _run("generate", "-g", "ed", "--out", str(tmp_path / "flag")).exit_code == 3
    assert not (tmp_path / "flag").exists()
    assert not (tmp_path / "outputs").exists()


def test_k_not_below_n_exits_2(tmp_path):
    result = _run("cluster", "-g", "heart", "--k", "500", "--out", str(tmp_path))
    assert result.exit_code == 2, result.output


def test_evaluate_without_truth_exits_3(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("0,0\n1,0\n0,1\n10,10\n11,10\n10,11\n", encoding="utf-8")
    assert _run("evaluate", "--input", str(pts), "--k", "2", "--out", str(tmp_path)).exit_code == 3


def test_no_center_exits_4(tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("0,0\n1,0\n2,0\n3,0\n", encoding="utf-8")
    # with both fractions at 1 nothing can exceed the maxima
    result = _run(
        "cluster", "--input", str(pts), "--k", "1", "--density-fraction", "1", "--delta-fraction", "1",
        "--out", str(tmp_path),
    )
    assert result.exit_code == 4


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"generate": "heart", "density": {"k": 9}, "seed": 4}), encoding="utf-8")
    out = tmp_path / "out"
    assert _run("cluster", "--config", str(cfg), "--k", "6", "--out", str(out)).exit_code == 0
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["config"]["density"]["k"] == 6
    assert report["config"]["seed"] == 4


def test_env_overrides_out(tmp_path, monkeypatch):
    env_out = tmp_path / "env"
    monkeypatch.setenv("DADC_OUT", str(env_out))
    assert _run("generate", "-g", "ed", "--out", str(tmp_path / "flag")).exit_code == 0
    assert (env_out / "ed.csv").is_file()
    assert not (tmp_path / "flag" / "ed.csv").exists()
