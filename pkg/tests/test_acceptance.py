"""Seed-swept reproductions of the headline behaviour. Run with ``pytest -m slow``."""
from __future__ import annotations

import numpy as np
import pytest

from dadc.algorithm import dadc_cluster
from dadc.baseline import baseline_centers, cfsfdp_cluster
from dadc.config import SelectionCfg
from dadc.dataset import Dataset, build_neighbor_index
from dadc.evaluation import clustering_accuracy, robustness_sweep
from dadc.synthgen import generate

pytestmark = pytest.mark.slow

SEEDS = range(20)


def test_heart_three_density_tiers():
    dadc_ok = baseline_single = 0
    for seed in SEEDS:
        heart = generate("heart", seed)
        result = dadc_cluster(heart)
        ca = clustering_accuracy(result.labels, heart.labels).ca
        if result.initial.n_clusters == 3 and result.final.n_clusters == 3 and ca == 1.0:
            dadc_ok += 1
        base = cfsfdp_cluster(heart)
        if len(baseline_centers(base.profile, base.critical)) == 1:
            baseline_single += 1
    assert dadc_ok >= 18
    assert baseline_single >= 18


def test_equal_density_fragments_are_fused():
    fragmenting = SelectionCfg(density_fraction=0.05, delta_fraction=0.05)
    ok = 0
    for seed in SEEDS:
        ed = generate("ed", seed)
        result = dadc_cluster(ed, selection=fragmenting)
        if result.initial.n_clusters > 2 and result.final.n_clusters == 2:
            ok += 1
    assert ok >= 18


def test_flattened_core_blobs_resolve_to_two_clusters():
    ok = 0
    for seed in SEEDS:
        mddm = generate("mddm:count=1024", seed)
        assert mddm.n == 2048
        result = dadc_cluster(mddm)
        ca = clustering_accuracy(result.labels, mddm.labels).ca
        if result.final.n_clusters == 2 and ca >= 0.99:
            ok += 1
    assert ok >= 18


@pytest.mark.parametrize("seed", range(50))
def test_kdtree_matches_the_brute_force_oracle(seed):
    rng = np.random.default_rng(1000 + seed)
    n = int(rng.integers(50, 2001))
    dim = int(rng.integers(2, 5))
    k = int(rng.integers(1, 16))
    ds = Dataset(rng.normal(0.0, 10.0, size=(n, dim)))
    tree = build_neighbor_index(ds, k=k, backend="kdtree")
    brute = build_neighbor_index(ds, k=k, backend="brute")
    np.testing.assert_array_equal(tree.ids, brute.ids)
    np.testing.assert_array_equal(tree.dists, brute.dists)


def test_dadc_is_at_least_as_robust_as_the_baseline():
    rows = robustness_sweep(generate("heart", 0), (0.01, 0.05, 0.10, 0.15), seeds=range(10))
    means = {(row.level, row.algorithm): row.mean_ca for row in rows}
    for level in (0.01, 0.05, 0.10, 0.15):
        assert means[(level, "dadc")] >= means[(level, "cfsfdp")], level


def test_dadc_accuracy_does_not_grow_with_noise():
    levels = (0.0, 0.01, 0.05, 0.10, 0.15)
    rows = robustness_sweep(generate("heart", 0), levels, seeds=range(10))
    means = [row.mean_ca for row in rows if row.algorithm == "dadc"]
    assert len(means) == len(levels)
    # adjacent levels may swap by up to 0.01
    for lower, higher in zip(means, means[1:]):
        assert higher <= lower + 0.01
    assert means[-1] <= means[0]
