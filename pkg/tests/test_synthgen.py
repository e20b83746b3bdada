from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.spatial.distance import pdist

from dadc.density import compute_profile, knn_stats
from dadc.dataset import build_neighbor_index
from dadc.errors import SpecError
from dadc.synthgen import (
    RegionSpec,
    Shape,
    ed_regions,
    generate,
    generate_ed,
    generate_mddm,
    generate_vdd,
    heart_regions,
    parse_spec,
)


def test_heart_preset(heart):
    assert heart.n == 213
    assert heart.dim == 2
    assert np.bincount(heart.labels).tolist() == [71, 71, 71]
    assert heart.name == "heart"


def test_heart_regions_follow_their_tiers(heart):
    kden = knn_stats(build_neighbor_index(heart, k=5)).kden
    means = [kden[heart.labels == r].mean() for r in range(3)]
    # sparse, dense, medium
    assert means[0] < means[2] < means[1]


def test_vdd_with_tiers_one_four_sixteen():
    regions = [
        RegionSpec.for_spacing("disk", (0.0, 0.0), 71, 40.0, density_tier=1.0),
        RegionSpec.for_spacing("disk", (2000.0, 0.0), 71, 20.0, density_tier=4.0),
        RegionSpec.for_spacing("disk", (4000.0, 0.0), 71, 10.0, density_tier=16.0),
    ]
    ds = generate_vdd(regions, seed=0)
    kden = knn_stats(build_neighbor_index(ds, k=5)).kden
    means = [kden[ds.labels == r].mean() for r in range(3)]
    assert means[1] / means[0] == pytest.approx(2.0, rel=0.15)
    assert means[2] / means[1] == pytest.approx(2.0, rel=0.15)


def test_vdd_rejects_overlap_and_bad_tiers():
    a = RegionSpec(Shape.DISK, (0.0, 0.0), 10.0, 20, density_tier=1.0)
    with pytest.raises(SpecError, match="overlap"):
        generate_vdd([a, RegionSpec(Shape.DISK, (15.0, 0.0), 10.0, 20, density_tier=2.0)])
    with pytest.raises(SpecError, match="distinct"):
        generate_vdd([a, RegionSpec(Shape.DISK, (50.0, 0.0), 10.0, 40, density_tier=1.0)])
    with pytest.raises(SpecError, match="tiers"):
        generate_vdd([a, RegionSpec(Shape.DISK, (50.0, 0.0), 10.0, 10, density_tier=2.0)])
    with pytest.raises(SpecError):
        generate_vdd([RegionSpec(Shape.DISK, (0.0, 0.0), -1.0, 20)])


def test_ring_region_leaves_its_hole_empty():
    ring = RegionSpec.for_spacing(Shape.RING, (0.0, 0.0), 120, 1.0)
    ds = generate_vdd([ring], seed=0, jitter=0.0)
    r = np.hypot(ds.coords[:, 0], ds.coords[:, 1])
    assert ds.n == 120
    assert r.min() > 0.25 * ring.extent


def test_ed_lattice(ed):
    assert np.bincount(ed.labels).tolist() == [192, 192]
    min_gap = pdist(ed.coords).min()
    assert min_gap == pytest.approx(10.0, rel=0.05)
    assert ed.coords[ed.labels == 0][:, 0].max() < ed.coords[ed.labels == 1][:, 0].min() - 30.0


def test_ed_limits():
    with pytest.raises(SpecError, match="jitter"):
        generate_ed(ed_regions(), 10.0, jitter=0.05)
    with pytest.raises(SpecError, match="too small"):
        generate_ed([RegionSpec(Shape.DISK, (0.0, 0.0), 1.0)], 10.0)
    capped = generate_ed([RegionSpec(Shape.RECTANGLE, (0.0, 0.0), 60.0, count=20)], 10.0)
    assert capped.n == 20


def test_mddm_core_is_flattened(mddm_small):
    assert mddm_small.n == 512
    for label, cx in ((0, 0.0), (1, 150_000.0)):
        pts = mddm_small.coords[mddm_small.labels == label]
        r = np.hypot(pts[:, 0] - cx, pts[:, 1])
        assert r.max() <= 2.5 * 10_000.0 + 1e-6
        core = pts[r <= 0.4 * 10_000.0]
        # lattice core: no two core points closer than half the lattice spacing
        assert pdist(core).min() > 0.3 * 10_000.0 * 0.5 * math.sqrt(math.pi / max(len(core), 1))


def _interior(ds, depth):
    keep = np.zeros(ds.n, dtype=bool)
    for label in np.unique(ds.labels):
        own = ds.labels == label
        lo, hi = ds.coords[own].min(axis=0), ds.coords[own].max(axis=0)
        inside = np.all((ds.coords >= lo + depth) & (ds.coords <= hi - depth), axis=1)
        keep |= own & inside
    return np.flatnonzero(keep)


def test_ed_interior_domain_density_is_flat():
    ds = generate_ed(ed_regions(), 10.0, seed=3, jitter=1e-5)
    dd = compute_profile(ds, k=5).domain_density
    interior = _interior(ds, 29.0)
    assert interior.size > 50
    np.testing.assert_allclose(dd[interior], dd[interior].max(), rtol=1e-3)


def test_mddm_core_has_several_near_equal_maxima():
    g = RegionSpec(Shape.GAUSSIAN, (0.0, 0.0), 10_000.0, 1024)
    ds = generate_mddm([g], seed=5)
    dd = compute_profile(ds, k=5).domain_density
    core = np.hypot(ds.coords[:, 0], ds.coords[:, 1]) <= 0.4 * 10_000.0
    top = dd[core].max()
    assert np.count_nonzero(dd[core] >= 0.99 * top) >= 2


def test_mddm_rejects_bad_core():
    g = RegionSpec(Shape.GAUSSIAN, (0.0, 0.0), 1.0, 50)
    with pytest.raises(SpecError):
        generate_mddm([g], flat_core=3.0)


def test_generators_are_seeded():
    a, b, c = generate("heart", 1), generate("heart", 1), generate("heart", 2)
    np.testing.assert_array_equal(a.coords, b.coords)
    assert not np.array_equal(a.coords, c.coords)


def test_seed_in_the_spec_wins():
    np.testing.assert_array_equal(generate("heart:seed=3", 0).coords, generate("heart", 3).coords)


def test_spec_parameters():
    assert parse_spec("Heart: count=10 , scale=2") == ("heart", {"count": "10", "scale": "2"})
    ds = generate("heart:counts=10/20/30")
    assert np.bincount(ds.labels).tolist() == [10, 20, 30]
    assert ds.name == "heart_counts_10_20_30"
    assert generate("mddm:count=32").n == 64
    assert len(heart_regions(scale=2.0)) == 3


@pytest.mark.parametrize(
    "spec",
    ["spiral", "heart:count", "heart:color=red", "heart:counts=1/2", "ed:spacing=abc", "heart:count=0"],
)
def test_invalid_specs(spec):
    with pytest.raises(SpecError):
        generate(spec)
