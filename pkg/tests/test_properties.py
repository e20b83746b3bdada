from __future__ import annotations

import math

import hypothesis.strategies as st
import numpy as np
from hypothesis import HealthCheck, given, settings

from dadc.algorithm import dadc_cluster
from dadc.centers import NOISE
from dadc.config import DensityCfg, SelectionCfg
from dadc.dataset import Dataset, build_neighbor_index
from dadc.density import compute_profile, density_order, knn_stats
from dadc.ensemble import crossover_degree, density_similarity, fusion_degree, run_ensemble
from dadc.evaluation import clustering_accuracy

TRIALS = settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])

positive = st.floats(min_value=1e-6, max_value=1e6, allow_nan=False, allow_infinity=False)
unit = st.floats(min_value=0.0, max_value=10.0, allow_nan=False, allow_infinity=False)


def _point_sets(min_size: int, max_size: int):
    coords = st.tuples(st.integers(-500, 500), st.integers(-500, 500))
    return st.lists(coords, min_size=min_size, max_size=max_size, unique=True).map(
        lambda pts: Dataset(np.array(pts, dtype=np.float64))
    )


# ---------------------------------------------------------------------------
# Fusion measures
# ---------------------------------------------------------------------------


@TRIALS
@given(positive, positive)
def test_density_similarity_is_symmetric_and_bounded(u, v):
    s = density_similarity(u, v)
    assert s == density_similarity(v, u)
    assert 0.0 < s <= 1.0
    if u == v:
        assert s == 1.0
    if s == 1.0:
        assert math.isclose(u, v, rel_tol=1e-6)


@TRIALS
@given(st.integers(0, 200), st.integers(0, 200))
def test_crossover_degree_range_and_balanced_maximum(p, q):
    d = crossover_degree(p, q)
    assert 0.0 <= d <= 1.0
    assert d == crossover_degree(q, p)
    if p >= 1 and p == q:
        assert d == 1.0
    if p == 0 or q == 0:
        assert d == 0.0


@TRIALS
@given(unit, unit, unit, st.floats(min_value=0.1, max_value=10.0))
def test_fusion_degree_symmetry_and_homogeneity(s, c, d, t):
    f = fusion_degree(s, c, d)
    for perm in ((c, s, d), (d, c, s), (s, d, c)):
        assert math.isclose(fusion_degree(*perm), f, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(fusion_degree(t * s, t * c, t * d), t * t * f, rel_tol=1e-9, abs_tol=1e-9)
    assert f >= 0.0


# ---------------------------------------------------------------------------
# Clustering accuracy
# ---------------------------------------------------------------------------


@TRIALS
@given(
    st.lists(st.tuples(st.integers(-1, 5), st.integers(0, 3)), min_size=1, max_size=60),
    st.permutations(list(range(6))),
)
def test_accuracy_ignores_cluster_names(pairs, perm):
    labels = np.array([p[0] for p in pairs])
    truth = np.array([p[1] for p in pairs])
    renamed = np.array([NOISE if lab == NOISE else perm[lab] + 10 for lab in labels])
    assert clustering_accuracy(labels, truth).ca == clustering_accuracy(renamed, truth).ca
    assert 0.0 <= clustering_accuracy(labels, truth).ca <= 1.0


@TRIALS
@given(
    st.lists(st.tuples(st.integers(-1, 4), st.integers(0, 3)), min_size=1, max_size=60),
    st.integers(0, 4),
    st.integers(0, 3),
)
def test_splitting_off_one_class_never_lowers_accuracy(pairs, cluster, cls):
    labels = np.array([p[0] for p in pairs])
    truth = np.array([p[1] for p in pairs])
    split = labels.copy()
    split[(labels == cluster) & (truth == cls)] = 99
    assert clustering_accuracy(split, truth).ca >= clustering_accuracy(labels, truth).ca


# ---------------------------------------------------------------------------
# Self-ensemble
# ---------------------------------------------------------------------------


@TRIALS
@given(_point_sets(8, 40), st.floats(min_value=0.2, max_value=3.0))
def test_ensemble_terminates_and_is_idempotent(dataset, threshold):
    result = dadc_cluster(
        dataset,
        density=DensityCfg(k=3),
        selection=SelectionCfg(density_fraction=0.05, delta_fraction=0.05),
    )
    first = run_ensemble(result.initial, result.profile, threshold=threshold)
    assert first.merges <= result.initial.n_clusters - 1
    assert first.clustering.n_clusters == result.initial.n_clusters - first.merges
    again = run_ensemble(first.clustering, result.profile, threshold=threshold)
    assert again.merges == 0
    np.testing.assert_array_equal(again.clustering.labels, first.clustering.labels)


# ---------------------------------------------------------------------------
# Density ranks under scaling
# ---------------------------------------------------------------------------


@TRIALS
@given(_point_sets(7, 40), st.integers(-6, 6))
def test_density_ranks_survive_coordinate_scaling(dataset, power):
    factor = 2.0**power
    scaled = Dataset(dataset.coords * factor)
    a = compute_profile(dataset, k=5, length_unit="auto", backend="brute")
    b = compute_profile(scaled, k=5, length_unit="auto", backend="brute")
    np.testing.assert_array_equal(density_order(a.kden), density_order(b.kden))
    np.testing.assert_array_equal(density_order(a.domain_density), density_order(b.domain_density))
    np.testing.assert_array_equal(density_order(a.adaptive_density), density_order(b.adaptive_density))
    np.testing.assert_array_equal(a.witness, b.witness)


# ---------------------------------------------------------------------------
# KNN backends
# ---------------------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(64, 400), st.integers(2, 4), st.integers(1, 12), st.booleans())
def test_kdtree_equals_brute_force(seed, n, dim, k, rounded):
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, 20.0, size=(n, dim))
    if rounded:
        coords = np.round(coords)
    ds = Dataset(coords)
    tree = build_neighbor_index(ds, k=k, backend="kdtree")
    brute = build_neighbor_index(ds, k=k, backend="brute")
    np.testing.assert_array_equal(tree.ids, brute.ids)
    np.testing.assert_array_equal(tree.dists, brute.dists)
    np.testing.assert_array_equal(knn_stats(tree).kden, knn_stats(brute).kden)
