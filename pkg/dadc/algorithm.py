"""End-to-end DADC clustering of one dataset: profile, centers, self-ensemble."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from .centers import CriticalPoint, InitialClustering, select_centers, single_cluster
from .config import DensityCfg, EnsembleCfg, SelectionCfg
from .dataset import Dataset, DistanceSource, MetricSource
from .density import DensityProfile, compute_profile
from .ensemble import EnsembleResult, TraceRow, run_ensemble
from .errors import ConfigError

log = logging.getLogger("DADC.algorithm")


@dataclass(frozen=True)
class DadcResult:
    profile: Optional[DensityProfile]
    critical: Optional[CriticalPoint]
    initial: InitialClustering
    final: InitialClustering
    trace: tuple[TraceRow, ...] = field(default=(), repr=False)

    @property
    def labels(self):
        return self.final.labels


def dadc_cluster(
    dataset: Dataset,
    source: Optional[DistanceSource] = None,
    *,
    density: Optional[DensityCfg] = None,
    selection: Optional[SelectionCfg] = None,
    ensemble: Optional[EnsembleCfg] = None,
) -> DadcResult:
    """
    Cluster ``dataset`` with the given (validated) config sections.

    A single point comes back as one cluster; otherwise k must be below n.
    """
    density = (density or DensityCfg()).validate()
    selection = (selection or SelectionCfg()).validate()
    ensemble = (ensemble or EnsembleCfg()).validate()
    source = source or MetricSource(dataset.coords)

    if dataset.n == 1:
        trivial = single_cluster(1)
        return DadcResult(profile=None, critical=None, initial=trivial, final=trivial)

    log.debug("Clustering %d points with k=%d", dataset.n, density.k)
    if density.k >= dataset.n:
        raise ConfigError(f"k={density.k} needs at least k+1 points, dataset has {dataset.n}")
    profile = compute_profile(dataset, source, density.k, length_unit=density.length_unit, backend=density.backend)
    cp, initial = select_centers(
        profile,
        source,
        density_fraction=selection.density_fraction,
        delta_fraction=selection.delta_fraction,
    )

    if not ensemble.enabled:
        return DadcResult(profile=profile, critical=cp, initial=initial, final=initial)
    result: EnsembleResult = run_ensemble(initial, profile, profile.index, ensemble.fusion_threshold)
    return DadcResult(profile=profile, critical=cp, initial=initial, final=result.clustering, trace=result.trace)


__all__ = ["DadcResult", "dadc_cluster"]
