# -*- coding: utf-8 -*-
"""
DADC — Cluster center self-identification

- critical point of the decision graph
- partition into centers, outliers and remaining points
- assignment of remaining points in descending adaptive-density order
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from .dataset import DistanceSource
from .density import DensityProfile, density_order
from .errors import ConfigError, NoCenterError

log = logging.getLogger("DADC.centers")

NOISE = -1


class PointRole(enum.Enum):
    CENTER = "center"
    OUTLIER = "outlier"
    REMAINING = "remaining"

    @staticmethod
    def parse(val: Any) -> PointRole:
        if isinstance(val, PointRole):
            return val
        normalized = str(val).strip().lower()
        for role in PointRole:
            if role.value == normalized:
                return role
        raise ValueError(f"invalid point role: {val!r}")


@dataclass(frozen=True, slots=True)
class CriticalPoint:
    """
    Decision-graph thresholds.

    ``x`` bounds the adaptive density and ``y`` the delta for centers;
    ``density_x`` is the matching bound on the domain density that, with
    ``y``, spans the outlier wedge.
    """

    x: float
    y: float
    density_x: float


@dataclass(frozen=True)
class InitialClustering:
    """Cluster label per point (NOISE for outliers) and one center per cluster."""

    labels: np.ndarray
    centers: tuple[int, ...]
    roles: tuple[PointRole, ...] = ()

    def __post_init__(self) -> None:
        labels = np.array(self.labels, dtype=np.int64)
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "centers", tuple(int(c) for c in self.centers))
        for cluster, center in enumerate(self.centers):
            if labels[center] != cluster:
                raise ValueError(f"center {center} is not labeled with its own cluster {cluster}")

    @property
    def n(self) -> int:
        return int(self.labels.shape[0])

    @property
    def n_clusters(self) -> int:
        return len(self.centers)

    @property
    def noise(self) -> np.ndarray:
        return np.flatnonzero(self.labels == NOISE)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster)

    def sizes(self) -> list[int]:
        return [int(np.count_nonzero(self.labels == c)) for c in range(self.n_clusters)]


# ===========================================================================
# SECTION 1: Critical point and partition
# ===========================================================================


def critical_point(
    profile: DensityProfile,
    *,
    density_fraction: float = 0.5,
    delta_fraction: float = 0.25,
) -> CriticalPoint:
    return CriticalPoint(
        x=float(profile.adaptive_density.max()) * density_fraction,
        y=float(profile.delta.max()) * delta_fraction,
        density_x=float(profile.domain_density.max()) * density_fraction,
    )


def partition_points(profile: DensityProfile, cp: CriticalPoint) -> tuple[PointRole, ...]:
    """
    Role per point.

    Center: adaptive density > cp.x and delta > cp.y.
    Outlier: domain density < cp.density_x and delta above the line from the
    origin through (cp.density_x, cp.y). Everything else is Remaining; points
    on a boundary stay Remaining.

    Raises:
        NoCenterError: no point clears both center thresholds.
    """
    n = profile.n
    if n == 1 or float(profile.delta.max()) == 0.0:
        roles = [PointRole.REMAINING] * n
        roles[profile.top] = PointRole.CENTER
        log.warning("Degenerate decision graph (n=%d); using a single cluster", n)
        return tuple(roles)

    adaptive, delta, dd = profile.adaptive_density, profile.delta, profile.domain_density
    center = (adaptive > cp.x) & (delta > cp.y)
    outlier = ~center & (dd < cp.density_x) & (delta * cp.density_x > cp.y * dd)
    if not center.any():
        raise NoCenterError(f"no point clears the critical point (x={cp.x:.6g}, y={cp.y:.6g})")

    roles = np.where(center, 0, np.where(outlier, 1, 2))
    lookup = (PointRole.CENTER, PointRole.OUTLIER, PointRole.REMAINING)
    log.debug("Partition: %d centers, %d outliers", int(center.sum()), int(outlier.sum()))
    return tuple(lookup[r] for r in roles)


# ===========================================================================
# SECTION 2: Assignment
# ===========================================================================


def assign_remaining(
    profile: DensityProfile,
    roles: Sequence[PointRole],
    source: DistanceSource,
) -> InitialClustering:
    """
    Label every non-outlier point.

    Centers get cluster ids in descending adaptive-density order. Remaining
    points, in the same order, take the label of the nearest non-outlier that
    comes earlier in that order (equal distances go to the smaller id).
    """
    n = profile.n
    if len(roles) != n:
        raise ConfigError(f"{len(roles)} roles for {n} points")
    if PointRole.CENTER not in roles:
        raise NoCenterError("assignment needs at least one center")

    order = density_order(profile.adaptive_density)
    labels = np.full(n, NOISE, dtype=np.int64)
    centers: list[int] = []
    for i in order:
        if roles[i] is PointRole.CENTER:
            labels[i] = len(centers)
            centers.append(int(i))

    eligible = np.array([roles[i] is not PointRole.OUTLIER for i in order], dtype=bool)
    targets = order[eligible]
    # Number of eligible points strictly before each position in `order`.
    before = np.concatenate([[0], np.cumsum(eligible)[:-1]])
    densest_label = int(labels[profile.top]) if labels[profile.top] != NOISE else 0

    fallbacks = 0
    for pos, i in enumerate(order):
        if roles[i] is not PointRole.REMAINING:
            continue
        cand = targets[: before[pos]]
        if cand.size == 0:
            labels[i] = densest_label
            fallbacks += 1
            continue
        d = source.row(int(i), cand)
        labels[i] = labels[cand[np.lexsort((cand, d))[0]]]

    if fallbacks:
        log.warning("%d remaining point(s) had no higher-density target; joined the densest cluster", fallbacks)
    return InitialClustering(labels=labels, centers=tuple(centers), roles=tuple(roles))


def select_centers(
    profile: DensityProfile,
    source: DistanceSource,
    *,
    density_fraction: float = 0.5,
    delta_fraction: float = 0.25,
) -> tuple[CriticalPoint, InitialClustering]:
    cp = critical_point(profile, density_fraction=density_fraction, delta_fraction=delta_fraction)
    roles = partition_points(profile, cp)
    clustering = assign_remaining(profile, roles, source)
    log.info(
        "Centers found: %d (outliers=%d, cp=(%.6g, %.6g))",
        clustering.n_clusters,
        int(clustering.noise.size),
        cp.x,
        cp.y,
    )
    return cp, clustering


def single_cluster(n: int, center: int = 0) -> InitialClustering:
    """Everything in one cluster; used when there are too few points to profile."""
    return InitialClustering(
        labels=np.zeros(n, dtype=np.int64),
        centers=(center,),
        roles=tuple(PointRole.CENTER if i == center else PointRole.REMAINING for i in range(n)),
    )


def relabel(
    labels: np.ndarray, centers: Sequence[int], roles: Optional[Sequence[PointRole]] = None
) -> InitialClustering:
    """Rebuild a clustering whose cluster ids follow the order of ``centers``."""
    labels = np.asarray(labels, dtype=np.int64)
    out = np.full(labels.shape[0], NOISE, dtype=np.int64)
    for new, center in enumerate(centers):
        out[labels == labels[center]] = new
    return InitialClustering(labels=out, centers=tuple(centers), roles=tuple(roles or ()))


__all__ = [
    "NOISE",
    "PointRole",
    "CriticalPoint",
    "InitialClustering",
    "critical_point",
    "partition_points",
    "assign_remaining",
    "select_centers",
    "single_cluster",
    "relabel",
]
