"""Run orchestration for the CLI subcommands: load, cluster, export, report."""
from __future__ import annotations

import logging
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from .algorithm import DadcResult, dadc_cluster
from .baseline import cfsfdp_cluster
from .centers import PointRole, critical_point, partition_points
from .config import EmitTarget, RunConfig
from .dataset import Dataset, load_dataset_file
from .density import compute_profile
from .errors import EXIT_OK, ConfigError, DataError, exit_code_for
from .evaluation import EvaluationReport, NoiseSpec, RobustnessSweep, clustering_accuracy, inject_noise
from .export import (
    export_decision_graph,
    write_cluster_plot,
    write_dataset_csv,
    write_evaluation_csv,
    write_labels_csv,
    write_sweep_csv,
    write_trace_csv,
)
from .synthgen import generate
from .utils import ensure_outputs_dir, sha256_of_files, write_json

log = logging.getLogger("DADC.pipeline")

COMMANDS = ("generate", "cluster", "decision-graph", "evaluate", "sweep")


@dataclass
class RunSummary:
    command: str
    n: int = 0
    centers: Optional[int] = None
    initial_clusters: Optional[int] = None
    final_clusters: Optional[int] = None
    ca: Optional[float] = None
    baseline_centers: Optional[int] = None
    baseline_ca: Optional[float] = None
    out_dir: Optional[Path] = None
    artifacts: dict[str, Path] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        data = {
            "command": self.command,
            "n": self.n,
            "centers": self.centers,
            "initial_clusters": self.initial_clusters,
            "final_clusters": self.final_clusters,
            "ca": self.ca,
            "baseline_centers": self.baseline_centers,
            "baseline_ca": self.baseline_ca,
        }
        return {k: v for k, v in data.items() if v is not None}

    def lines(self) -> list[str]:
        parts = []
        for key, value in self.to_dict().items():
            parts.append(f"{key}={value:.4f}" if isinstance(value, float) else f"{key}={value}")
        out = [" ".join(parts)]
        out += [f"wrote {path}" for _, path in sorted(self.artifacts.items())]
        return out


class Pipeline:
    """One CLI invocation: a validated config, an output directory and the artifacts written there."""

    def __init__(self, config: RunConfig) -> None:
        self._cfg = config
        self._out: Optional[Path] = None
        self._log = logging.getLogger("DADC.pipeline")

    @property
    def out_dir(self) -> Path:
        if self._out is None:
            self._out = ensure_outputs_dir(self._cfg.out)
        return self._out

    # ------------------------------------------------------------------
    # Public API
    # ------------------------------------------------------------------

    def run(self, command: str) -> RunSummary:
        handlers: dict[str, Callable[[], RunSummary]] = {
            "generate": self.generate,
            "cluster": self.cluster,
            "decision-graph": self.decision_graph,
            "evaluate": self.evaluate,
            "sweep": self.sweep,
        }
        if command not in handlers:
            raise ConfigError(f"unknown command {command!r}")
        self._log.info("Running %s", command)
        summary = handlers[command]()
        summary.out_dir = self.out_dir
        self._write_report(summary)
        return summary

    def load(self) -> Dataset:
        cfg = self._cfg
        if cfg.input:
            dataset = load_dataset_file(cfg.input)
        else:
            dataset = generate(cfg.generate or "", cfg.seed)
        if cfg.noise.level > 0:
            dataset = inject_noise(dataset, NoiseSpec(cfg.noise.level, cfg.seed))
            self._log.info("Injected noise: level=%.3f, n=%d", cfg.noise.level, dataset.n)
        return dataset

    def generate(self) -> RunSummary:
        dataset = self.load()
        summary = RunSummary("generate", n=dataset.n)
        summary.artifacts["dataset"] = write_dataset_csv(self.out_dir / f"{dataset.name}.csv", dataset)
        return summary

    def cluster(self) -> RunSummary:
        dataset = self.load()
        result = self._dadc(dataset)
        summary = RunSummary(
            "cluster",
            n=dataset.n,
            centers=result.initial.n_clusters,
            initial_clusters=result.initial.n_clusters,
            final_clusters=result.final.n_clusters,
        )
        if dataset.has_truth:
            summary.ca = clustering_accuracy(result.labels, dataset.labels).ca

        emit = self._cfg.export.emit
        out = self.out_dir
        if EmitTarget.LABELS in emit:
            summary.artifacts["labels"] = write_labels_csv(out / "labels.csv", result.labels)
        if result.profile is not None and result.critical is not None:
            roles = result.initial.roles
            if EmitTarget.GRAPH_CSV in emit:
                summary.artifacts["graph_csv"] = export_decision_graph(
                    result.profile, roles, result.critical, out / "decision_graph.csv", "csv"
                )
            if EmitTarget.GRAPH_SVG in emit:
                summary.artifacts["graph_svg"] = export_decision_graph(
                    result.profile, roles, result.critical, out / "decision_graph.svg", "svg"
                )
        if EmitTarget.PLOT in emit:
            summary.artifacts["plot"] = write_cluster_plot(
                out / "clusters.svg", dataset, result.labels, result.final.centers
            )
        if EmitTarget.TRACE in emit:
            summary.artifacts["trace"] = write_trace_csv(out / "fusion_trace.csv", result.trace)

        if self._cfg.baseline.enabled:
            base = cfsfdp_cluster(dataset, cutoff=self._cfg.baseline.dc)
            summary.baseline_centers = base.clustering.n_clusters
            if dataset.has_truth:
                summary.baseline_ca = clustering_accuracy(base.clustering.labels, dataset.labels).ca
            if EmitTarget.LABELS in emit:
                summary.artifacts["baseline_labels"] = write_labels_csv(
                    out / "labels_cfsfdp.csv", base.clustering.labels
                )
        return summary

    def decision_graph(self) -> RunSummary:
        """Profile and roles only; no clustering artifacts."""
        dataset = self.load()
        cfg = self._cfg
        profile = compute_profile(
            dataset, k=cfg.density.k, length_unit=cfg.density.length_unit, backend=cfg.density.backend
        )
        cp = critical_point(
            profile,
            density_fraction=cfg.selection.density_fraction,
            delta_fraction=cfg.selection.delta_fraction,
        )
        roles = partition_points(profile, cp)
        summary = RunSummary("decision-graph", n=dataset.n, centers=sum(r is PointRole.CENTER for r in roles))
        summary.artifacts["graph_csv"] = export_decision_graph(
            profile, roles, cp, self.out_dir / "decision_graph.csv", "csv"
        )
        if EmitTarget.GRAPH_SVG in cfg.export.emit:
            summary.artifacts["graph_svg"] = export_decision_graph(
                profile, roles, cp, self.out_dir / "decision_graph.svg", "svg"
            )
        return summary

    def evaluate(self) -> RunSummary:
        dataset = self.load()
        if not dataset.has_truth:
            raise DataError("evaluation needs truth labels (a 'label' column or a generated dataset)")
        result = self._dadc(dataset)
        base = cfsfdp_cluster(dataset, cutoff=self._cfg.baseline.dc)
        reports: dict[str, EvaluationReport] = {
            "dadc": clustering_accuracy(result.labels, dataset.labels),
            "cfsfdp": clustering_accuracy(base.clustering.labels, dataset.labels),
        }
        summary = RunSummary(
            "evaluate",
            n=dataset.n,
            centers=result.initial.n_clusters,
            initial_clusters=result.initial.n_clusters,
            final_clusters=result.final.n_clusters,
            ca=reports["dadc"].ca,
            baseline_centers=base.clustering.n_clusters,
            baseline_ca=reports["cfsfdp"].ca,
        )
        summary.artifacts["evaluation"] = write_evaluation_csv(self.out_dir / "evaluation.csv", reports)
        return summary

    def sweep(self) -> RunSummary:
        cfg = self._cfg
        if cfg.noise.level > 0:
            self._log.warning("noise.level is ignored by the sweep; it uses noise.levels")
        dataset = self._clean()
        sweep = RobustnessSweep(
            density=cfg.density,
            selection=cfg.selection,
            ensemble=cfg.ensemble,
            cutoff=cfg.baseline.dc,
            max_workers=cfg.noise.workers,
        )
        rows = sweep.run(dataset, cfg.noise.levels, cfg.noise.seed_list)
        summary = RunSummary("sweep", n=dataset.n)
        summary.artifacts["sweep"] = write_sweep_csv(self.out_dir / "sweep.csv", rows)
        for row in rows:
            self._log.info("level=%.2f %s mean_ca=%.4f std=%.4f", row.level, row.algorithm, row.mean_ca, row.std_ca)
        return summary

    # ------------------------------------------------------------------
    # Internal helpers
    # ------------------------------------------------------------------

    def _clean(self) -> Dataset:
        cfg = self._cfg
        return load_dataset_file(cfg.input) if cfg.input else generate(cfg.generate or "", cfg.seed)

    def _dadc(self, dataset: Dataset) -> DadcResult:
        cfg = self._cfg
        return dadc_cluster(dataset, density=cfg.density, selection=cfg.selection, ensemble=cfg.ensemble)

    def _write_report(self, summary: RunSummary) -> None:
        artifacts = {
            name: {"path": path.name, "sha256": sha256_of_files([path])} for name, path in summary.artifacts.items()
        }
        report = {
            "summary": summary.to_dict(),
            "config": self._cfg.to_dict(),
            "artifacts": artifacts,
            "artifacts_sha256": sha256_of_files(list(summary.artifacts.values())) if artifacts else None,
        }
        write_json(self.out_dir / "report.json", report)


def run_pipeline(config: RunConfig, command: str = "cluster") -> RunSummary:
    return Pipeline(config).run(command)


def execute(config: RunConfig, command: str, *, echo: Callable[[str], None] = print) -> int:
    """
    Run ``command`` and map failures to an exit status.

    On failure an ``error.json`` (message + traceback) is written to the output
    directory when one is usable.
    """
    pipeline = Pipeline(config)
    try:
        summary = pipeline.run(command)
    except Exception as exc:
        code = exit_code_for(exc)
        if code == 1:
            log.exception("Command %s failed", command)
        else:
            log.error("Command %s failed: %s", command, exc)
        _write_error(config, exc)
        echo(f"error: {exc}")
        return code
    for line in summary.lines():
        echo(line)
    return EXIT_OK


def _write_error(config: RunConfig, exc: BaseException) -> None:
    try:
        out = ensure_outputs_dir(config.out)
        payload = {"error": str(exc), "type": type(exc).__name__, "traceback": traceback.format_exc()}
        write_json(out / "error.json", payload)
    except (OSError, DataError) as io_exc:
        log.warning("Could not write error.json: %s", io_exc)


__all__ = ["COMMANDS", "RunSummary", "Pipeline", "run_pipeline", "execute"]
