# -*- coding: utf-8 -*-
"""
DADC — Density engine

- KNN-distance / KNN-density per point
- domain density (KNN-density plus inverse-distance weighted neighbor densities)
- Delta distance under the (density desc, id asc) order, with witnesses
- adaptive density = domain density × delta
- CFSFDP baseline profile (cutoff-count density)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Union

import numpy as np

from .dataset import Dataset, DistanceSource, MetricSource, NeighborBackend, NeighborIndex, build_neighbor_index
from .errors import ConfigError

log = logging.getLogger("DADC.density")

EPS = 1e-12
LengthUnit = Union[float, str]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


# ===========================================================================
# SECTION 1: Profiles
# ===========================================================================


@dataclass(frozen=True)
class DensityProfile:
    """Per-point density quantities for one dataset and one k."""

    k: int
    kdist: np.ndarray
    kden: np.ndarray
    domain_density: np.ndarray
    delta: np.ndarray
    adaptive_density: np.ndarray
    witness: np.ndarray
    length_unit: float = 1.0
    degenerate: tuple[int, ...] = ()
    index: Optional[NeighborIndex] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        for name in ("kdist", "kden", "domain_density", "delta", "adaptive_density", "witness"):
            _frozen(getattr(self, name))

    @property
    def n(self) -> int:
        return int(self.kden.shape[0])

    @property
    def top(self) -> int:
        """Id of the point first in (domain density desc, id asc) order."""
        return int(density_order(self.domain_density)[0])


@dataclass(frozen=True)
class BaselineProfile:
    """CFSFDP local density (cutoff count) and delta."""

    rho: np.ndarray
    delta: np.ndarray
    witness: np.ndarray
    cutoff: float

    def __post_init__(self) -> None:
        for name in ("rho", "delta", "witness"):
            _frozen(getattr(self, name))

    @property
    def n(self) -> int:
        return int(self.rho.shape[0])


class KnnStats(NamedTuple):
    kdist: np.ndarray
    kden: np.ndarray
    clamped: tuple[int, ...]


# ===========================================================================
# SECTION 2: Building blocks
# ===========================================================================


def density_order(densities: np.ndarray) -> np.ndarray:
    """Point ids sorted by density descending; equal densities by ascending id."""
    densities = np.asarray(densities, dtype=np.float64)
    return np.lexsort((np.arange(densities.shape[0]), -densities))


def knn_stats(index: NeighborIndex) -> KnnStats:
    """Mean neighbor distance and its reciprocal; zero means are clamped to EPS and reported."""
    kdist = index.dists.mean(axis=1)
    clamped = np.flatnonzero(kdist < EPS)
    if clamped.size:
        log.warning("KNN-distance clamped to %.0e for %d coincident point(s)", EPS, clamped.size)
        kdist = np.maximum(kdist, EPS)
    return KnnStats(kdist=kdist, kden=1.0 / kdist, clamped=tuple(int(i) for i in clamped))


def resolve_length_unit(index: NeighborIndex, length_unit: LengthUnit = 1.0) -> float:
    if isinstance(length_unit, str):
        if length_unit.strip().lower() != "auto":
            raise ConfigError(f"length_unit must be a positive number or 'auto', got {length_unit!r}")
        return float(max(index.dists.mean(axis=1).mean(), EPS))
    unit = float(length_unit)
    if not unit > 0 or math.isinf(unit):
        raise ConfigError(f"length_unit must be > 0, got {length_unit!r}")
    return unit


def domain_density(index: NeighborIndex, kden: np.ndarray, length_unit: float = 1.0) -> np.ndarray:
    """kden[i] + Σ_j kden[j]·unit/d_ij over i's neighbors (d clamped at EPS)."""
    kden = np.asarray(kden, dtype=np.float64)
    weights = length_unit / np.maximum(index.dists, EPS)
    return kden + (kden[index.ids] * weights).sum(axis=1)


def delta_distances(densities: np.ndarray, source: DistanceSource) -> tuple[np.ndarray, np.ndarray]:
    """
    Distance from each point to its nearest point of higher density.

    Higher means earlier in ``density_order`` (ties go to the smaller id). The
    first point takes its largest distance to any point.

    Returns:
        (delta, witness) where ``witness[i]`` realizes ``delta[i]`` and is -1
        for the first point.
    """
    densities = np.asarray(densities, dtype=np.float64)
    n = densities.shape[0]
    if n < 2:
        raise ConfigError("delta distance needs at least 2 points")
    if source.n != n:
        raise ConfigError(f"{n} densities for a distance source over {source.n} points")

    order = density_order(densities)
    delta = np.empty(n, dtype=np.float64)
    witness = np.full(n, -1, dtype=np.int64)

    top = int(order[0])
    delta[top] = float(source.row(top).max())
    for pos in range(1, n):
        i = int(order[pos])
        higher = order[:pos]
        d = source.row(i, higher)
        j = int(np.argmin(d))
        delta[i] = d[j]
        witness[i] = higher[j]
    return delta, witness


def adaptive_densities(domain: np.ndarray, delta: np.ndarray) -> np.ndarray:
    return np.asarray(domain, dtype=np.float64) * np.asarray(delta, dtype=np.float64)


def compute_profile(
    dataset: Dataset,
    source: Optional[DistanceSource] = None,
    k: int = 5,
    *,
    length_unit: LengthUnit = 1.0,
    backend: NeighborBackend | str = NeighborBackend.AUTO,
    index: Optional[NeighborIndex] = None,
) -> DensityProfile:
    """
    Full density profile: knn stats, domain density, then every delta from
    that frozen snapshot, then the adaptive product.
    """
    source = source or MetricSource(dataset.coords)
    if index is None:
        index = build_neighbor_index(dataset, source, k, backend=backend)
    elif index.k != k:
        raise ConfigError(f"neighbor index was built with k={index.k}, profile asked for k={k}")

    stats = knn_stats(index)
    unit = resolve_length_unit(index, length_unit)
    dd = domain_density(index, stats.kden, unit)
    delta, witness = delta_distances(dd, source)
    adaptive = adaptive_densities(dd, delta)

    log.debug(
        "Profile: n=%d k=%d unit=%.6g dd_max=%.6g delta_max=%.6g",
        dataset.n,
        k,
        unit,
        float(dd.max()),
        float(delta.max()),
    )
    return DensityProfile(
        k=k,
        kdist=stats.kdist,
        kden=stats.kden,
        domain_density=dd,
        delta=delta,
        adaptive_density=adaptive,
        witness=witness,
        length_unit=unit,
        degenerate=stats.clamped,
        index=index,
    )


# ===========================================================================
# SECTION 3: CFSFDP baseline profile
# ===========================================================================


def pair_distances(source: DistanceSource, *, max_pairs: int = 2_000_000, seed: int = 0) -> np.ndarray:
    """All i<j distances, or a seeded sample of ``max_pairs`` of them."""
    n = source.n
    total = n * (n - 1) // 2
    if total == 0:
        return np.empty(0, dtype=np.float64)
    if total <= max_pairs:
        return np.concatenate([source.row(i, np.arange(i + 1, n)) for i in range(n - 1)])

    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=max_pairs)
    j = rng.integers(0, n - 1, size=max_pairs)
    j = np.where(j >= i, j + 1, j)
    out = np.empty(max_pairs, dtype=np.float64)
    for a in np.unique(i):
        mask = i == a
        out[mask] = source.row(int(a), j[mask])
    return out


def auto_cutoff(
    source: DistanceSource,
    *,
    neighbor_fraction: float = 0.02,
    max_pairs: int = 2_000_000,
    seed: int = 0,
) -> float:
    """
    Cutoff d_c giving each point on average ``neighbor_fraction·n`` neighbors.

    That is the ⌈fraction·n²/2⌉-th smallest pair distance (scaled to the sample
    when pairs are subsampled). A zero result falls back to the smallest
    positive pair distance.
    """
    n = source.n
    if n < 2:
        raise ConfigError("cutoff needs at least 2 points")
    dists = np.sort(pair_distances(source, max_pairs=max_pairs, seed=seed))
    total = n * (n - 1) // 2
    rank = max(1, math.ceil(neighbor_fraction * n * n / 2))
    rank = min(dists.shape[0], max(1, math.ceil(rank * dists.shape[0] / total)))
    cutoff = float(dists[rank - 1])
    if cutoff <= 0:
        positive = dists[dists > 0]
        cutoff = float(positive[0]) if positive.size else EPS
    log.debug("Auto cutoff: n=%d rank=%d d_c=%.6g", n, rank, cutoff)
    return cutoff


def cfsfdp_profile(dataset: Dataset, source: Optional[DistanceSource], cutoff: float) -> BaselineProfile:
    """rho[i] = #points strictly closer than ``cutoff``; delta over rho with the same tie rule."""
    if not cutoff > 0:
        raise ConfigError(f"cutoff must be > 0, got {cutoff!r}")
    source = source or MetricSource(dataset.coords)
    n = source.n
    rho = np.empty(n, dtype=np.int64)
    for i in range(n):
        # The point itself sits at distance 0 < cutoff.
        rho[i] = int(np.count_nonzero(source.row(i) < cutoff)) - 1
    delta, witness = delta_distances(rho.astype(np.float64), source)
    return BaselineProfile(rho=rho, delta=delta, witness=witness, cutoff=float(cutoff))


__all__ = [
    "EPS",
    "DensityProfile",
    "BaselineProfile",
    "KnnStats",
    "density_order",
    "knn_stats",
    "resolve_length_unit",
    "domain_density",
    "delta_distances",
    "adaptive_densities",
    "compute_profile",
    "pair_distances",
    "auto_cutoff",
    "cfsfdp_profile",
]
