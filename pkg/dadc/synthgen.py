# -*- coding: utf-8 -*-
"""
DADC — Synthetic datasets

Seeded generators for three density regimes:
- varying density (VDD): regions filled at different point densities
- equilibrium (ED): regular lattices where every point has the same density
- multiple density maxima (MDDM): gaussians whose core is flattened

Presets (``heart``, ``ed``, ``mddm``) are addressed by spec strings such as
``heart:count=71`` or ``mddm:counts=512/1024,scale=0.5``.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .dataset import Dataset
from .errors import SpecError
from .utils import sanitize_filename

log = logging.getLogger("DADC.synthgen")

CLIP_SIGMAS = 2.5
FLAT_CORE = 0.5
RING_INNER = 0.5


class Shape(enum.Enum):
    DISK = "disk"
    RING = "ring"
    RECTANGLE = "rectangle"
    GAUSSIAN = "gaussian"

    @staticmethod
    def parse(val: Any) -> Shape:
        if isinstance(val, Shape):
            return val
        normalized = str(val).strip().lower()
        aliases = {
            "disk": Shape.DISK,
            "ring": Shape.RING,
            "ring-heart": Shape.RING,
            "heart": Shape.RING,
            "rectangle": Shape.RECTANGLE,
            "rect": Shape.RECTANGLE,
            "gaussian": Shape.GAUSSIAN,
        }
        if normalized in aliases:
            return aliases[normalized]
        raise SpecError(f"invalid region shape: {val!r}. Expected disk, ring, rectangle or gaussian")


@dataclass(frozen=True, slots=True)
class RegionSpec:
    """
    One generating region.

    ``extent`` is the outer radius (disk, ring), the half-width (rectangle,
    half-height = extent / aspect) or the standard deviation (gaussian).
    """

    shape: Shape
    center: tuple[float, float]
    extent: float
    count: int = 0
    density_tier: float = 1.0
    aspect: float = 1.0

    def validate(self, *, count_required: bool = True) -> RegionSpec:
        shape = Shape.parse(self.shape)
        if len(self.center) != 2:
            raise SpecError(f"region center must be a coordinate pair, got {self.center!r}")
        if not (self.extent > 0 and math.isfinite(self.extent)):
            raise SpecError(f"region extent must be > 0, got {self.extent!r}")
        if count_required and self.count < 1:
            raise SpecError(f"region count must be >= 1, got {self.count!r}")
        if self.density_tier <= 0 or self.aspect <= 0:
            raise SpecError("density_tier and aspect must be > 0")
        return replace(self, shape=shape, center=(float(self.center[0]), float(self.center[1])))

    @property
    def half_height(self) -> float:
        return self.extent / self.aspect if self.shape is Shape.RECTANGLE else self.extent

    @property
    def area(self) -> float:
        if self.shape is Shape.RECTANGLE:
            return 4.0 * self.extent * self.half_height
        if self.shape is Shape.RING:
            return math.pi * self.extent**2 * (1.0 - RING_INNER**2)
        if self.shape is Shape.DISK:
            return math.pi * self.extent**2
        return math.pi * (CLIP_SIGMAS * self.extent) ** 2

    def bounding_box(self) -> tuple[float, float, float, float]:
        half_w = CLIP_SIGMAS * self.extent if self.shape is Shape.GAUSSIAN else self.extent
        half_h = CLIP_SIGMAS * self.extent if self.shape is Shape.GAUSSIAN else self.half_height
        cx, cy = self.center
        return cx - half_w, cx + half_w, cy - half_h, cy + half_h

    @staticmethod
    def for_spacing(
        shape: Shape | str,
        center: tuple[float, float],
        count: int,
        spacing: float,
        *,
        density_tier: float = 1.0,
        aspect: float = 1.0,
    ) -> RegionSpec:
        """Region whose lattice fill of ``count`` points has the given spacing."""
        shape = Shape.parse(shape)
        area = count * spacing * spacing
        if shape is Shape.DISK:
            extent = math.sqrt(area / math.pi)
        elif shape is Shape.RING:
            extent = math.sqrt(area / (math.pi * (1.0 - RING_INNER**2)))
        elif shape is Shape.RECTANGLE:
            extent = math.sqrt(area * aspect / 4.0)
        else:
            raise SpecError("gaussian regions have no lattice spacing")
        return RegionSpec(shape, center, extent, count, density_tier, aspect)


# ===========================================================================
# SECTION 1: Geometry helpers
# ===========================================================================


def _shape_key(region: RegionSpec, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Distance-like key: smaller means more central for the region's shape."""
    if region.shape is Shape.RECTANGLE:
        return np.maximum(np.abs(x), np.abs(y) * region.aspect)
    r = np.hypot(x, y)
    if region.shape is Shape.RING:
        return np.abs(r - 0.5 * (1.0 + RING_INNER) * region.extent)
    return r


def _nearest_sites(region: RegionSpec, spacing: float, count: int) -> np.ndarray:
    """The ``count`` lattice offsets (i·s, j·s) with the smallest shape key."""
    reach = math.ceil(max(region.extent, region.half_height) / spacing) + 2
    m = max(reach, 2 * int(math.sqrt(count)) + 4)
    i, j = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="ij")
    i, j = i.ravel(), j.ravel()
    x, y = i * spacing, j * spacing
    order = np.lexsort((j, i, _shape_key(region, x, y)))[:count]
    return np.column_stack([x[order], y[order]])


def _jitter(rng: np.random.Generator, sites: np.ndarray, spacing: float, jitter: float) -> np.ndarray:
    if jitter <= 0:
        return sites
    return sites + jitter * spacing * rng.uniform(-1.0, 1.0, size=sites.shape)


def _check_disjoint(regions: Sequence[RegionSpec]) -> None:
    boxes = [r.bounding_box() for r in regions]
    for a in range(len(boxes)):
        for b in range(a + 1, len(boxes)):
            ax0, ax1, ay0, ay1 = boxes[a]
            bx0, bx1, by0, by1 = boxes[b]
            if ax0 < bx1 and bx0 < ax1 and ay0 < by1 and by0 < ay1:
                raise SpecError(f"regions {a} and {b} overlap")


def _assemble(parts: list[np.ndarray], name: str) -> Dataset:
    coords = np.vstack(parts)
    labels = np.concatenate([np.full(p.shape[0], idx, dtype=np.int64) for idx, p in enumerate(parts)])
    return Dataset(coords, labels, name=name)


# ===========================================================================
# SECTION 2: Generators
# ===========================================================================


def generate_vdd(
    regions: Sequence[RegionSpec],
    seed: int = 0,
    *,
    jitter: float = 0.02,
    name: str = "vdd",
) -> Dataset:
    """
    Fill each region with a jittered square lattice of spacing √(area/count).

    Regions must not overlap and their density tiers must be distinct and
    ordered like their realized point densities (count / area).
    """
    regions = [r.validate() for r in regions]
    if not regions:
        raise SpecError("at least one region is required")
    if any(r.shape is Shape.GAUSSIAN for r in regions):
        raise SpecError("varying-density regions must be disk, ring or rectangle")
    _check_disjoint(regions)

    if len(regions) == 1:
        log.warning("Single region: the dataset has no varying density")
    else:
        tiers = [r.density_tier for r in regions]
        if len(set(tiers)) != len(tiers):
            raise SpecError(f"density tiers must be distinct, got {tiers}")
        realized = [r.count / r.area for r in regions]
        if list(np.argsort(tiers, kind="stable")) != list(np.argsort(realized, kind="stable")):
            raise SpecError("realized region densities do not follow the density tiers")

    rng = np.random.default_rng(seed)
    parts = []
    for region in regions:
        spacing = math.sqrt(region.area / region.count)
        sites = _nearest_sites(region, spacing, region.count)
        parts.append(np.asarray(region.center) + _jitter(rng, sites, spacing, jitter))
    return _assemble(parts, name)


def generate_ed(
    regions: Sequence[RegionSpec],
    spacing: float,
    seed: int = 0,
    *,
    jitter: float = 0.01,
    name: str = "ed",
) -> Dataset:
    """
    Every lattice site of ``spacing`` inside each region, jittered by at most
    ``jitter``·spacing. Sites sit at center − extent + s/2 + i·s. A region
    with ``count`` set keeps only its ``count`` most central sites.
    """
    if not (spacing > 0 and math.isfinite(spacing)):
        raise SpecError(f"spacing must be > 0, got {spacing!r}")
    if not 0 <= jitter <= 0.01:
        raise SpecError(f"lattice jitter must be within [0, 0.01], got {jitter!r}")
    regions = [r.validate(count_required=False) for r in regions]
    if not regions:
        raise SpecError("at least one region is required")
    if any(r.shape is Shape.GAUSSIAN for r in regions):
        raise SpecError("equilibrium regions must be disk, ring or rectangle")
    _check_disjoint(regions)

    rng = np.random.default_rng(seed)
    parts = []
    for idx, region in enumerate(regions):
        nx = int(math.floor(2.0 * region.extent / spacing + 1e-9))
        ny = int(math.floor(2.0 * region.half_height / spacing + 1e-9))
        xs = -region.extent + spacing / 2.0 + spacing * np.arange(nx)
        ys = -region.half_height + spacing / 2.0 + spacing * np.arange(ny)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        gx, gy = gx.ravel(), gy.ravel()
        if region.shape is not Shape.RECTANGLE:
            r = np.hypot(gx, gy)
            inside = r <= region.extent
            if region.shape is Shape.RING:
                inside &= r >= RING_INNER * region.extent
            gx, gy = gx[inside], gy[inside]
        if gx.size == 0:
            raise SpecError(f"region {idx} is too small for one lattice cell of spacing {spacing}")
        if region.count:
            if region.count > gx.size:
                raise SpecError(f"region {idx} holds {gx.size} lattice sites, {region.count} requested")
            keep = np.lexsort((gy, gx, _shape_key(region, gx, gy)))[: region.count]
            gx, gy = gx[np.sort(keep)], gy[np.sort(keep)]
        sites = np.column_stack([gx, gy])
        parts.append(np.asarray(region.center) + _jitter(rng, sites, spacing, jitter))
    return _assemble(parts, name)


def generate_mddm(
    gaussians: Sequence[RegionSpec],
    seed: int = 0,
    *,
    flat_core: float = FLAT_CORE,
    clip: float = CLIP_SIGMAS,
    jitter: float = 0.01,
    name: str = "mddm",
) -> Dataset:
    """
    Gaussian samples clipped at ``clip``·σ whose core (r ≤ ``flat_core``·σ) is
    replaced by a jittered lattice with the same number of points, so each
    region carries many near-equal density maxima.
    """
    gaussians = [g.validate() for g in gaussians]
    if not gaussians:
        raise SpecError("at least one gaussian is required")
    if not 0 < flat_core < clip:
        raise SpecError(f"flat core must be within (0, {clip}), got {flat_core!r}")
    _check_disjoint(gaussians)

    rng = np.random.default_rng(seed)
    parts = []
    for idx, g in enumerate(gaussians):
        sigma = g.extent
        samples = np.empty((0, 2))
        while samples.shape[0] < g.count:
            draw = rng.standard_normal(size=(g.count, 2))
            draw = draw[np.hypot(draw[:, 0], draw[:, 1]) <= clip]
            samples = np.vstack([samples, draw])
        samples = samples[: g.count]

        core = np.hypot(samples[:, 0], samples[:, 1]) <= flat_core
        outer = samples[~core] * sigma
        n_core = int(core.sum())
        if n_core:
            spacing = sigma * flat_core * math.sqrt(math.pi / n_core)
            disk = RegionSpec(Shape.DISK, (0.0, 0.0), sigma * flat_core, n_core)
            lattice = _jitter(rng, _nearest_sites(disk, spacing, n_core), spacing, jitter)
            points = np.vstack([outer, lattice])
        else:
            points = outer
        points = np.asarray(g.center) + points
        if g.count > 1 and np.all(points == points[0]):
            raise SpecError(f"gaussian {idx} collapses to a single point (extent {g.extent!r})")
        parts.append(points)
    return _assemble(parts, name)


# ===========================================================================
# SECTION 3: Presets and spec strings
# ===========================================================================

HEART_SEPARATION = 24_000.0
HEART_SPACING = 200.0
HEART_TIERS = (1.0, 2.5, 1.4)
ED_SPACING = 10.0
MDDM_SIGMA = 10_000.0
MDDM_SEPARATION = 150_000.0


def _counts(params: dict[str, str], regions: int, default: int) -> list[int]:
    if "counts" in params:
        values = [int(v) for v in params["counts"].split("/")]
        if len(values) != regions:
            raise SpecError(f"counts must list {regions} values, got {len(values)}")
        return values
    return [int(params.get("count", default))] * regions


def heart_regions(counts: Sequence[int] = (71, 71, 71), scale: float = 1.0) -> list[RegionSpec]:
    """Three disks left to right: sparse, dense, medium."""
    centers = [(-HEART_SEPARATION, 0.0), (0.0, 0.0), (HEART_SEPARATION, 0.0)]
    return [
        RegionSpec.for_spacing(
            Shape.DISK,
            (cx * scale, cy * scale),
            count,
            HEART_SPACING * scale / math.sqrt(tier),
            density_tier=tier,
        )
        for (cx, cy), count, tier in zip(centers, counts, HEART_TIERS)
    ]


def ed_regions(scale: float = 1.0) -> list[RegionSpec]:
    """Two 12×16-site rectangles, 4 lattice spacings apart."""
    return [
        RegionSpec(Shape.RECTANGLE, (0.0, 0.0), 60.0 * scale, aspect=0.75),
        RegionSpec(Shape.RECTANGLE, (150.0 * scale, 0.0), 60.0 * scale, aspect=0.75),
    ]


def mddm_regions(counts: Sequence[int] = (1024, 1024), scale: float = 1.0) -> list[RegionSpec]:
    return [
        RegionSpec(Shape.GAUSSIAN, (0.0, 0.0), MDDM_SIGMA * scale, counts[0]),
        RegionSpec(Shape.GAUSSIAN, (MDDM_SEPARATION * scale, 0.0), MDDM_SIGMA * scale, counts[1]),
    ]


def _heart(params: dict[str, str], seed: int) -> Dataset:
    regions = heart_regions(_counts(params, 3, 71), float(params.get("scale", 1.0)))
    return generate_vdd(regions, seed, jitter=float(params.get("jitter", 0.02)), name="heart")


def _ed(params: dict[str, str], seed: int) -> Dataset:
    scale = float(params.get("scale", 1.0))
    spacing = float(params.get("spacing", ED_SPACING)) * scale
    return generate_ed(ed_regions(scale), spacing, seed, jitter=float(params.get("jitter", 0.01)), name="ed")


def _mddm(params: dict[str, str], seed: int) -> Dataset:
    regions = mddm_regions(_counts(params, 2, 1024), float(params.get("scale", 1.0)))
    return generate_mddm(regions, seed, name="mddm")


PRESETS: dict[str, tuple[Callable[[dict[str, str], int], Dataset], frozenset[str]]] = {
    "heart": (_heart, frozenset({"count", "counts", "scale", "jitter", "seed"})),
    "ed": (_ed, frozenset({"spacing", "scale", "jitter", "seed"})),
    "mddm": (_mddm, frozenset({"count", "counts", "scale", "seed"})),
}


def parse_spec(spec: str) -> tuple[str, dict[str, str]]:
    """``"heart:count=71,scale=2"`` → ``("heart", {"count": "71", "scale": "2"})``."""
    name, _, rest = str(spec).strip().partition(":")
    name = name.strip().lower()
    params: dict[str, str] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise SpecError(f"malformed generator parameter {item!r} in {spec!r}")
        params[key.strip().lower()] = value.strip()
    return name, params


def generate(spec: str, seed: Optional[int] = None) -> Dataset:
    """
    Build a preset dataset from a spec string. A ``seed`` parameter inside the
    spec wins over the ``seed`` argument.
    """
    name, params = parse_spec(spec)
    if name not in PRESETS:
        raise SpecError(f"unknown generator {name!r}. Expected one of {', '.join(sorted(PRESETS))}")
    builder, allowed = PRESETS[name]
    unknown = set(params) - allowed
    if unknown:
        raise SpecError(f"unknown parameter(s) for {name}: {', '.join(sorted(unknown))}")
    try:
        run_seed = int(params.get("seed", seed if seed is not None else 0))
        dataset = builder(params, run_seed)
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"invalid generator spec {spec!r}: {exc}") from exc
    log.info("Generated %s (seed=%d): n=%d", name, run_seed, dataset.n)
    return Dataset(dataset.coords, dataset.labels, name=sanitize_filename(spec))


__all__ = [
    "Shape",
    "RegionSpec",
    "generate_vdd",
    "generate_ed",
    "generate_mddm",
    "heart_regions",
    "ed_regions",
    "mddm_regions",
    "PRESETS",
    "parse_spec",
    "generate",
]
