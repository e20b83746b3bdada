"""CFSFDP baseline: cutoff-density peaks with fixed decision-graph fractions."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .centers import CriticalPoint, InitialClustering, PointRole
from .dataset import Dataset, DistanceSource, MetricSource
from .density import BaselineProfile, auto_cutoff, cfsfdp_profile, density_order

log = logging.getLogger("DADC.baseline")


@dataclass(frozen=True)
class BaselineResult:
    profile: BaselineProfile
    critical: CriticalPoint
    clustering: InitialClustering


def baseline_critical_point(
    profile: BaselineProfile, *, density_fraction: float = 0.5, delta_fraction: float = 0.25
) -> CriticalPoint:
    rho_x = float(profile.rho.max()) * density_fraction
    return CriticalPoint(x=rho_x, y=float(profile.delta.max()) * delta_fraction, density_x=rho_x)


def baseline_centers(profile: BaselineProfile, cp: CriticalPoint) -> np.ndarray:
    """Ids clearing both thresholds, in (rho desc, id asc) order."""
    order = density_order(profile.rho.astype(np.float64))
    mask = (profile.rho > cp.x) & (profile.delta > cp.y)
    return order[mask[order]]


def cfsfdp_cluster(
    dataset: Dataset,
    source: Optional[DistanceSource] = None,
    cutoff: Union[float, str] = "auto",
    *,
    density_fraction: float = 0.5,
    delta_fraction: float = 0.25,
) -> BaselineResult:
    """
    Classic density-peak clustering.

    Every non-center point joins the cluster of its nearest higher-rho point
    (the delta witness), processed in rho order. No point is left as noise;
    when no point clears the thresholds the densest point is the only center.
    """
    source = source or MetricSource(dataset.coords)
    dc = auto_cutoff(source) if cutoff == "auto" else float(cutoff)
    profile = cfsfdp_profile(dataset, source, dc)
    cp = baseline_critical_point(profile, density_fraction=density_fraction, delta_fraction=delta_fraction)

    order = density_order(profile.rho.astype(np.float64))
    centers = [int(c) for c in baseline_centers(profile, cp)]
    if not centers:
        centers = [int(order[0])]

    labels = np.full(profile.n, -1, dtype=np.int64)
    for cluster, c in enumerate(centers):
        labels[c] = cluster
    for i in order:
        if labels[i] == -1:
            labels[i] = labels[profile.witness[i]]

    center_set = set(centers)
    roles = tuple(PointRole.CENTER if i in center_set else PointRole.REMAINING for i in range(profile.n))
    log.info("CFSFDP: d_c=%.6g, %d center(s)", dc, len(centers))
    return BaselineResult(
        profile=profile,
        critical=cp,
        clustering=InitialClustering(labels=labels, centers=tuple(centers), roles=roles),
    )


__all__ = ["BaselineResult", "baseline_critical_point", "baseline_centers", "cfsfdp_cluster"]
