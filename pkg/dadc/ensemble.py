# -*- coding: utf-8 -*-
"""
DADC — Cluster self-ensemble

Inter-cluster measures and the merge loop:
- density similarity of two clusters (mean KNN-density)
- crossing points and the crossover degree of a cluster pair
- density stability of a cluster and the stability ratio of a pair
- fusion degree: area of the triangle spanned by the three measures
- greedy highest-fusion-first merging down to a threshold
"""
from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .centers import NOISE, InitialClustering, relabel
from .dataset import NeighborIndex
from .density import EPS, DensityProfile
from .errors import ConfigError

log = logging.getLogger("DADC.ensemble")

TRIANGLE = math.sqrt(3.0) / 4.0
MAX_ROUNDS = 100_000

# ===========================================================================
# SECTION 1: Types
# ===========================================================================


@dataclass(frozen=True)
class ClusterStats:
    label: int
    members: np.ndarray
    mean_kden: float
    cds: float

    @property
    def size(self) -> int:
        return int(self.members.shape[0])


@dataclass(frozen=True)
class CrossingAnalysis:
    """Crossing points of a pair: (point id, crossover degree) for each direction."""

    a: int
    b: int
    a_to_b: tuple[tuple[int, float], ...]
    b_to_a: tuple[tuple[int, float], ...]

    @property
    def ccd(self) -> float:
        return float(sum(d for _, d in self.a_to_b) + sum(d for _, d in self.b_to_a))

    @property
    def adjacent(self) -> bool:
        return bool(self.a_to_b or self.b_to_a)


@dataclass(frozen=True, slots=True)
class FusionCandidate:
    a: int
    b: int
    ids: float
    ccd: float
    cds_ratio: float
    cfd: float


@dataclass(frozen=True, slots=True)
class TraceRow:
    round: int
    a: int
    b: int
    ids: float
    ccd: float
    cds_ratio: float
    cfd: float
    merged: bool


@dataclass(frozen=True)
class EnsembleResult:
    clustering: InitialClustering
    trace: tuple[TraceRow, ...]
    merges: int


# ===========================================================================
# SECTION 2: Measures
# ===========================================================================


def _mean_kden(members: np.ndarray, kden: np.ndarray) -> float:
    members = np.asarray(members, dtype=np.int64)
    if members.size == 0:
        raise ValueError("cluster has no members")
    return float(kden[members].mean())


def cluster_stats(label: int, members: np.ndarray, kden: np.ndarray) -> ClusterStats:
    members = np.asarray(members, dtype=np.int64)
    return ClusterStats(
        label=int(label),
        members=members,
        mean_kden=_mean_kden(members, kden),
        cds=density_stability(members, kden),
    )


def density_similarity(a: ClusterStats | float, b: ClusterStats | float) -> float:
    """2√(u·v)/(u+v) over the clusters' mean KNN-densities; in (0, 1]."""
    u = a.mean_kden if isinstance(a, ClusterStats) else float(a)
    v = b.mean_kden if isinstance(b, ClusterStats) else float(b)
    if not (u > 0 and v > 0):
        raise ValueError(f"mean densities must be > 0, got {u!r} and {v!r}")
    if u == v:
        return 1.0
    return min(1.0, 2.0 * math.sqrt(u * v) / (u + v))


def crossover_degree(n_own: int, n_other: int) -> float:
    """2√(p·q)/(p+q) for a point with p neighbors in its own cluster and q in the other."""
    if n_own < 1 or n_other < 1:
        return 0.0
    if n_own == n_other:
        return 1.0
    return 2.0 * math.sqrt(n_own * n_other) / (n_own + n_other)


def _crossings(source: int, other: int, index: NeighborIndex, labels: np.ndarray) -> tuple[tuple[int, float], ...]:
    out = []
    for i in np.flatnonzero(labels == source):
        nl = labels[index.ids[i]]
        degree = crossover_degree(int(np.count_nonzero(nl == source)), int(np.count_nonzero(nl == other)))
        if degree > 0:
            out.append((int(i), degree))
    return tuple(out)


def crossing_analysis(a: int, b: int, index: NeighborIndex, labels: np.ndarray) -> CrossingAnalysis:
    """Crossing points between clusters ``a`` and ``b``; NOISE and third clusters are ignored."""
    if a == b:
        raise ValueError("crossing analysis needs two different clusters")
    labels = np.asarray(labels, dtype=np.int64)
    return CrossingAnalysis(a=a, b=b, a_to_b=_crossings(a, b, index, labels), b_to_a=_crossings(b, a, index, labels))


def density_stability(members: np.ndarray, kden: np.ndarray) -> float:
    """log √(Σ (kden_i − mean)²), the sum floored at EPS."""
    values = np.asarray(kden, dtype=np.float64)[np.asarray(members, dtype=np.int64)]
    if values.size == 0:
        raise ValueError("cluster has no members")
    dev = float(((values - values.mean()) ** 2).sum())
    return math.log(math.sqrt(max(dev, EPS)))


def stability_ratio(a_members: np.ndarray, b_members: np.ndarray, kden: np.ndarray) -> float:
    """(d_ab/d_a)·(d_ab/d_b) after shifting the three stabilities to be ≥ 1."""
    da = density_stability(a_members, kden)
    db = density_stability(b_members, kden)
    dab = density_stability(np.concatenate([np.asarray(a_members), np.asarray(b_members)]), kden)
    return _shifted_ratio(da, db, dab)


def _shifted_ratio(da: float, db: float, dab: float) -> float:
    low = min(da, db, dab)
    if low < 1.0:
        offset = 1.0 - low
        da, db, dab = da + offset, db + offset, dab + offset
    return (dab / da) * (dab / db)


def fusion_degree(ids: float, ccd: float, cds_ratio: float) -> float:
    return TRIANGLE * (ids * ccd + ccd * cds_ratio + cds_ratio * ids)


# ===========================================================================
# SECTION 3: Candidates and merge loop
# ===========================================================================


def _pair_ccd(labels: np.ndarray, index: NeighborIndex) -> dict[tuple[int, int], float]:
    """Summed crossover degrees per unordered adjacent pair (a < b)."""
    nl = labels[index.ids]
    own = labels[:, None]
    boundary = np.flatnonzero((labels != NOISE) & np.any((nl != own) & (nl != NOISE), axis=1))
    ccd: dict[tuple[int, int], float] = defaultdict(float)
    for i in boundary:
        a = int(labels[i])
        row = nl[i]
        n_own = int(np.count_nonzero(row == a))
        if n_own == 0:
            continue
        others, counts = np.unique(row[(row != a) & (row != NOISE)], return_counts=True)
        for b, n_other in zip(others, counts):
            key = (a, int(b)) if a < b else (int(b), a)
            ccd[key] += crossover_degree(n_own, int(n_other))
    return dict(ccd)


def fusion_candidates(labels: np.ndarray, index: NeighborIndex, kden: np.ndarray) -> list[FusionCandidate]:
    """One candidate per pair of clusters sharing at least one crossing point, sorted by (a, b)."""
    labels = np.asarray(labels, dtype=np.int64)
    kden = np.asarray(kden, dtype=np.float64)
    ccd = _pair_ccd(labels, index)
    if not ccd:
        return []

    members = {int(c): np.flatnonzero(labels == c) for c in np.unique(labels[labels != NOISE])}
    stats = {c: cluster_stats(c, m, kden) for c, m in members.items()}
    out = []
    for a, b in sorted(ccd):
        sa, sb = stats[a], stats[b]
        ids = density_similarity(sa, sb)
        dab = density_stability(np.concatenate([sa.members, sb.members]), kden)
        ratio = _shifted_ratio(sa.cds, sb.cds, dab)
        c = ccd[(a, b)]
        out.append(FusionCandidate(a=a, b=b, ids=ids, ccd=c, cds_ratio=ratio, cfd=fusion_degree(ids, c, ratio)))
    return out


def run_ensemble(
    initial: InitialClustering,
    profile: DensityProfile,
    index: Optional[NeighborIndex] = None,
    threshold: float = 1.0,
) -> EnsembleResult:
    """
    Merge the pair with the highest fusion degree above ``threshold`` until
    none is left. Equal fusion degrees go to the smaller (a, b); the larger
    label joins the smaller one. Candidates are recomputed after every merge.
    """
    if not threshold > 0:
        raise ConfigError(f"fusion threshold must be > 0, got {threshold!r}")
    index = index or profile.index
    if index is None:
        raise ConfigError("self-ensemble needs the neighbor index of the profile")

    labels = np.array(initial.labels, dtype=np.int64)
    trace: list[TraceRow] = []
    merges = 0
    for rnd in range(MAX_ROUNDS):
        candidates = fusion_candidates(labels, index, profile.kden)
        eligible = [c for c in candidates if c.cfd > threshold]
        best = max(eligible, key=lambda c: (c.cfd, -c.a, -c.b)) if eligible else None
        for c in candidates:
            merged = best is not None and (c.a, c.b) == (best.a, best.b)
            trace.append(TraceRow(rnd, c.a, c.b, c.ids, c.ccd, c.cds_ratio, c.cfd, merged))
        if best is None:
            break
        log.debug("Round %d: merge %d <- %d (cfd=%.4f)", rnd, best.a, best.b, best.cfd)
        labels[labels == best.b] = best.a
        merges += 1

    # Surviving labels keep ascending order; the smaller label of a merge owns the denser center.
    survivors = [c for c in range(initial.n_clusters) if np.any(labels == c)]
    centers = [initial.centers[c] for c in survivors]
    clustering = relabel(labels, centers, initial.roles)
    log.info("Self-ensemble: %d -> %d clusters (%d merges)", initial.n_clusters, clustering.n_clusters, merges)
    return EnsembleResult(clustering=clustering, trace=tuple(trace), merges=merges)


def self_ensemble(
    initial: InitialClustering,
    profile: DensityProfile,
    index: Optional[NeighborIndex] = None,
    threshold: float = 1.0,
) -> InitialClustering:
    return run_ensemble(initial, profile, index, threshold).clustering


__all__ = [
    "ClusterStats",
    "CrossingAnalysis",
    "FusionCandidate",
    "TraceRow",
    "EnsembleResult",
    "cluster_stats",
    "density_similarity",
    "crossover_degree",
    "crossing_analysis",
    "density_stability",
    "stability_ratio",
    "fusion_degree",
    "fusion_candidates",
    "run_ensemble",
    "self_ensemble",
]
