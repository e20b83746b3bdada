# -*- coding: utf-8 -*-
"""
DADC — Evaluation

- clustering accuracy (per-cluster majority counts over the evaluated points)
- uniform noise injection inside the data bounds
- robustness sweep: noise level × seed cells for DADC and the CFSFDP baseline
"""
from __future__ import annotations

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from sklearn.metrics.cluster import contingency_matrix

from .algorithm import dadc_cluster
from .baseline import cfsfdp_cluster
from .centers import NOISE
from .config import DensityCfg, EnsembleCfg, SelectionCfg
from .dataset import UNLABELED, Dataset
from .errors import ConfigError, DataError

log = logging.getLogger("DADC.evaluation")

MAX_NOISE_FRACTION = 0.15
ALGORITHMS = ("cfsfdp", "dadc")

# ===========================================================================
# SECTION 1: Clustering accuracy
# ===========================================================================


@dataclass(frozen=True, slots=True)
class ClusterScore:
    cluster: int
    size: int
    majority_label: int
    majority_count: int


@dataclass(frozen=True)
class EvaluationReport:
    ca: float
    per_cluster: tuple[ClusterScore, ...]
    n_evaluated: int
    noise: int = 0

    @property
    def clusters(self) -> int:
        return len(self.per_cluster)


def clustering_accuracy(
    labels: np.ndarray,
    truth: np.ndarray,
    evaluated: Optional[np.ndarray] = None,
) -> EvaluationReport:
    """
    Sum of per-cluster majority-class counts divided by the number of evaluated points.

    Args:
        labels: cluster id per point, NOISE (-1) for discarded points.
        truth: class per point.
        evaluated: ids or boolean mask of the points to score; defaults to every
            point whose truth is not UNLABELED.

    NOISE points count in the denominator and earn no credit.
    """
    labels = np.asarray(labels, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if labels.shape != truth.shape:
        raise DataError(f"{labels.shape[0]} labels for {truth.shape[0]} truth values")
    if evaluated is None:
        idx = np.flatnonzero(truth != UNLABELED)
    else:
        evaluated = np.asarray(evaluated)
        idx = np.flatnonzero(evaluated) if evaluated.dtype == bool else evaluated.astype(np.int64)
    if idx.size == 0:
        raise DataError("no points to evaluate")

    lab, tru = labels[idx], truth[idx]
    kept = lab != NOISE
    scores: list[ClusterScore] = []
    if kept.any():
        classes = np.unique(tru[kept])
        clusters = np.unique(lab[kept])
        # rows: classes, columns: clusters, both sorted
        table = contingency_matrix(tru[kept], lab[kept])
        best = table.argmax(axis=0)
        for col, cluster in enumerate(clusters):
            scores.append(
                ClusterScore(
                    int(cluster),
                    int(table[:, col].sum()),
                    int(classes[best[col]]),
                    int(table[best[col], col]),
                )
            )

    correct = sum(s.majority_count for s in scores)
    return EvaluationReport(
        ca=correct / idx.size,
        per_cluster=tuple(scores),
        n_evaluated=int(idx.size),
        noise=int(np.count_nonzero(lab == NOISE)),
    )


# ===========================================================================
# SECTION 2: Noise injection
# ===========================================================================


@dataclass(frozen=True, slots=True)
class NoiseSpec:
    """Fraction of n to add as uniform noise; bounds default to the data's bounding box."""

    fraction: float
    seed: int = 0
    bounds: Optional[tuple[tuple[float, float], ...]] = None

    def validate(self) -> NoiseSpec:
        if not (0.0 <= float(self.fraction) <= MAX_NOISE_FRACTION):
            raise ConfigError(f"noise fraction out of range [0, {MAX_NOISE_FRACTION}]: {self.fraction}")
        return self


def data_bounds(dataset: Dataset) -> tuple[tuple[float, float], ...]:
    lo, hi = dataset.coords.min(axis=0), dataset.coords.max(axis=0)
    return tuple((float(a), float(b)) for a, b in zip(lo, hi))


def noise_count(n: int, fraction: float) -> int:
    # Guard against 0.15 * 100 == 15.000000000000002.
    return max(0, math.ceil(fraction * n - 1e-9))


def inject_noise(dataset: Dataset, spec: NoiseSpec) -> Dataset:
    """
    Append ⌈fraction·n⌉ unlabeled uniform points, distinct from each other and
    from existing points. Deterministic per seed.
    """
    spec.validate()
    count = noise_count(dataset.n, spec.fraction)
    if count == 0:
        return dataset
    bounds = spec.bounds or data_bounds(dataset)
    if len(bounds) != dataset.dim:
        raise ConfigError(f"noise bounds cover {len(bounds)} dimensions, dataset has {dataset.dim}")
    lo = np.array([b[0] for b in bounds], dtype=np.float64)
    hi = np.array([b[1] for b in bounds], dtype=np.float64)
    if np.any(hi <= lo):
        raise DataError("noise bounds have zero volume")

    rng = np.random.default_rng(spec.seed)
    seen = {tuple(row) for row in dataset.coords.tolist()}
    noise: list[list[float]] = []
    while len(noise) < count:
        for row in rng.uniform(lo, hi, size=(count - len(noise), dataset.dim)).tolist():
            key = tuple(row)
            if key not in seen:
                seen.add(key)
                noise.append(row)
    return dataset.appended(np.array(noise, dtype=np.float64))


def drop_injected(dataset: Dataset, n_original: int) -> Dataset:
    """Undo :func:`inject_noise`: keep the first ``n_original`` points."""
    return dataset.subset(range(n_original))


# ===========================================================================
# SECTION 3: Robustness sweep
# ===========================================================================


@dataclass(frozen=True, slots=True)
class SweepRow:
    level: float
    algorithm: str
    mean_ca: float
    std_ca: float
    seeds: int


class RobustnessSweep:
    """Runs level × seed cells on a small thread pool and aggregates CA per (level, algorithm)."""

    def __init__(
        self,
        *,
        density: Optional[DensityCfg] = None,
        selection: Optional[SelectionCfg] = None,
        ensemble: Optional[EnsembleCfg] = None,
        cutoff: Union[float, str] = "auto",
        max_workers: int = 2,
    ) -> None:
        self._density = (density or DensityCfg()).validate()
        self._selection = (selection or SelectionCfg()).validate()
        self._ensemble = (ensemble or EnsembleCfg()).validate()
        self._cutoff = cutoff
        self._max_workers = max_workers
        self._lock = threading.Lock()
        self._results: dict[tuple[float, str], list[float]] = {}
        self._log = logging.getLogger("DADC.sweep")

    def run(self, dataset: Dataset, levels: Sequence[float], seeds: Sequence[int]) -> list[SweepRow]:
        if not dataset.has_truth:
            raise DataError("robustness sweep needs a dataset with truth labels")
        for level in levels:
            NoiseSpec(level).validate()
        if not seeds:
            raise ConfigError("robustness sweep needs at least one seed")

        self._results = {}
        cells = [(float(level), int(seed)) for level in levels for seed in seeds]
        self._log.info("Sweep: %d levels × %d seeds on n=%d", len(levels), len(seeds), dataset.n)
        with ThreadPoolExecutor(max_workers=self._max_workers, thread_name_prefix="sweep-worker") as pool:
            futures = [pool.submit(self._run_cell, dataset, level, seed) for level, seed in cells]
            for future in futures:
                future.result()

        rows = []
        for (level, algorithm), values in sorted(self._results.items()):
            arr = np.sort(np.array(values, dtype=np.float64))
            rows.append(SweepRow(level, algorithm, float(arr.mean()), float(arr.std()), int(arr.size)))
        return rows

    def _run_cell(self, dataset: Dataset, level: float, seed: int) -> None:
        try:
            noisy = inject_noise(dataset, NoiseSpec(level, seed))
            truth = np.full(noisy.n, UNLABELED, dtype=np.int64)
            truth[: dataset.n] = dataset.labels
            scored = np.arange(dataset.n)[dataset.labeled_mask()]

            dadc = dadc_cluster(noisy, density=self._density, selection=self._selection, ensemble=self._ensemble)
            base = cfsfdp_cluster(noisy, cutoff=self._cutoff)
            scores = {
                "dadc": clustering_accuracy(dadc.labels, truth, scored).ca,
                "cfsfdp": clustering_accuracy(base.clustering.labels, truth, scored).ca,
            }
        except Exception:
            self._log.exception("Sweep cell failed (level=%s, seed=%s)", level, seed)
            raise
        with self._lock:
            for algorithm, ca in scores.items():
                self._results.setdefault((level, algorithm), []).append(ca)


def robustness_sweep(
    dataset: Dataset,
    levels: Sequence[float],
    k: int = 5,
    threshold: float = 1.0,
    seeds: Sequence[int] = tuple(range(10)),
    *,
    length_unit: Union[float, str] = 1.0,
    selection: Optional[SelectionCfg] = None,
    cutoff: Union[float, str] = "auto",
    max_workers: int = 2,
) -> list[SweepRow]:
    sweep = RobustnessSweep(
        density=DensityCfg(k=k, length_unit=length_unit),
        selection=selection,
        ensemble=EnsembleCfg(fusion_threshold=threshold),
        cutoff=cutoff,
        max_workers=max_workers,
    )
    return sweep.run(dataset, levels, seeds)


__all__ = [
    "ClusterScore",
    "EvaluationReport",
    "clustering_accuracy",
    "NoiseSpec",
    "data_bounds",
    "noise_count",
    "inject_noise",
    "drop_injected",
    "SweepRow",
    "RobustnessSweep",
    "robustness_sweep",
]
