from __future__ import annotations

import numpy as np
import pytest

from dadc.algorithm import dadc_cluster
from dadc.centers import NOISE, PointRole
from dadc.config import SelectionCfg
from dadc.dataset import Dataset, load_dataset_file
from dadc.ensemble import TraceRow
from dadc.errors import ConfigError, DataError
from dadc.evaluation import EvaluationReport, SweepRow
from dadc.export import (
    export_decision_graph,
    render_cluster_plot_svg,
    render_decision_graph_svg,
    write_dataset_csv,
    write_evaluation_csv,
    write_labels_csv,
    write_sweep_csv,
    write_trace_csv,
)


@pytest.fixture(scope="module")
def heart_result(heart):
    return dadc_cluster(heart)


def test_labels_csv(tmp_path):
    path = write_labels_csv(tmp_path / "labels.csv", np.array([0, 1, NOISE]))
    assert path.read_text(encoding="utf-8") == "id,cluster\n0,0\n1,1\n2,-1\n"


def test_decision_graph_csv_has_one_row_per_point(tmp_path, heart, heart_result):
    path = export_decision_graph(
        heart_result.profile, heart_result.initial.roles, heart_result.critical, tmp_path / "g.csv"
    )
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "id,adaptive_density,delta,role"
    assert len(lines) == heart.n + 1
    roles = [line.rsplit(",", 1)[1] for line in lines[1:]]
    assert roles.count("center") == heart_result.initial.n_clusters


def test_decision_graph_svg_counts(heart, heart_result):
    svg = render_decision_graph_svg(heart_result.profile, heart_result.initial.roles, heart_result.critical)
    lines = svg.splitlines()
    assert lines[1].startswith("<!-- dadc ")
    assert svg.count("<circle ") == heart.n
    assert svg.count('<line class="threshold"') == 2
    assert svg.count('class="critical-point"') == 1
    assert svg.count('<circle class="center"') == heart_result.initial.n_clusters


def test_decision_graph_svg_notes_the_outlier_plane(heart_result):
    svg = render_decision_graph_svg(heart_result.profile, heart_result.initial.roles, heart_result.critical)
    assert svg.count("<desc>") == 1
    assert svg.count('class="legend"') == 1
    assert "domain-density plane" in svg
    assert f"{heart_result.critical.density_x:.6g}" in svg


def test_decision_graph_mode_and_role_count(tmp_path, heart_result):
    with pytest.raises(ConfigError):
        export_decision_graph(
            heart_result.profile, heart_result.initial.roles, heart_result.critical, tmp_path / "g.png", "png"
        )
    with pytest.raises(ConfigError):
        export_decision_graph(heart_result.profile, (PointRole.CENTER,), heart_result.critical, tmp_path / "g.csv")


def test_cluster_plot_marks_noise():
    ds = Dataset(np.array([[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]]))
    svg = render_cluster_plot_svg(ds, np.array([0, 0, NOISE]), centers=(0,))
    assert svg.count('class="cluster-0"') == 2
    assert svg.count('class="noise"') == 1
    assert svg.count('r="5"') == 1


def test_dataset_csv_round_trip(tmp_path, heart):
    path = write_dataset_csv(tmp_path / "heart.csv", heart)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "x,y,label"
    back = load_dataset_file(path)
    np.testing.assert_array_equal(back.coords, heart.coords)
    np.testing.assert_array_equal(back.labels, heart.labels)


def test_trace_csv(tmp_path):
    rows = [TraceRow(0, 0, 1, 0.9, 4.0, 1.2, 4.1, True), TraceRow(1, 0, 2, 0.5, 1.0, 1.0, 0.9, False)]
    text = write_trace_csv(tmp_path / "t.csv", rows).read_text(encoding="utf-8")
    assert text.splitlines() == [
        "round,a,b,ids,ccd,cds_ratio,cfd,merged",
        "0,0,1,0.9,4.0,1.2,4.1,1",
        "1,0,2,0.5,1.0,1.0,0.9,0",
    ]


def test_evaluation_and_sweep_csv(tmp_path):
    reports = {"dadc": EvaluationReport(1.0, (), 10), "cfsfdp": EvaluationReport(0.5, (), 10, noise=0)}
    text = write_evaluation_csv(tmp_path / "e.csv", reports).read_text(encoding="utf-8")
    assert text.splitlines()[1:] == ["cfsfdp,0.5,10,0,0", "dadc,1.0,10,0,0"]
    sweep = write_sweep_csv(tmp_path / "s.csv", [SweepRow(0.05, "dadc", 0.98, 0.01, 10)])
    assert sweep.read_text(encoding="utf-8").splitlines()[1] == "0.05,dadc,0.98,0.01,10"


def test_unwritable_target_is_a_data_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(DataError):
        write_labels_csv(blocker / "labels.csv", np.array([0]))


def test_export_is_byte_stable(tmp_path, ed):
    fragmenting = SelectionCfg(density_fraction=0.05, delta_fraction=0.05)
    a = dadc_cluster(ed, selection=fragmenting)
    b = dadc_cluster(ed, selection=fragmenting)
    pa = write_trace_csv(tmp_path / "a.csv", a.trace)
    pb = write_trace_csv(tmp_path / "b.csv", b.trace)
    assert pa.read_bytes() == pb.read_bytes()
