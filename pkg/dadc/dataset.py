# -*- coding: utf-8 -*-
"""
DADC — Dataset core

- Point / Dataset containers (immutable once built)
- CSV loading for point files and distance matrices
- Distance sources: coordinates (Euclidean) or an injected matrix
- Exact K-nearest-neighbor index with a brute-force oracle
"""
from __future__ import annotations

import csv
import enum
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Iterable, Optional, Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigError, DataError, ParseError

log = logging.getLogger("DADC.dataset")

UNLABELED = -1
LABEL_COLUMN = "label"
# Below this size the tree costs more than it saves.
KDTREE_MIN_POINTS = 64

Source = Union[bytes, str, IO[str], IO[bytes]]


# ===========================================================================
# SECTION 1: Points and datasets
# ===========================================================================


@dataclass(frozen=True, slots=True)
class Point:
    """A single observation: contiguous id, coordinates and optional class."""

    id: int
    coords: tuple[float, ...]
    truth_label: Optional[int] = None

    @property
    def dim(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class Dataset:
    """
    Ordered points sharing one dimensionality.

    ``coords`` is an (n, dim) float array; ``labels`` holds the truth class per
    point with ``UNLABELED`` (-1) where none is known, or is ``None`` when the
    dataset carries no truth at all. Both arrays are made read-only.
    """

    coords: np.ndarray
    labels: Optional[np.ndarray] = None
    name: str = field(default="dataset", compare=False)

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=np.float64)
        if coords.ndim == 1 and coords.size:
            coords = coords.reshape(-1, 1)
        if coords.ndim != 2 or coords.shape[0] == 0:
            raise DataError("empty dataset")
        if coords.shape[1] == 0:
            raise DataError("dataset has no coordinate columns")
        if not np.all(np.isfinite(coords)):
            raise DataError("coordinates must be finite")
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)

        if self.labels is not None:
            labels = np.array(self.labels, dtype=np.int64).reshape(-1)
            if labels.shape[0] != coords.shape[0]:
                raise DataError(f"{labels.shape[0]} labels for {coords.shape[0]} points")
            labels.flags.writeable = False
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def dim(self) -> int:
        return int(self.coords.shape[1])

    @property
    def has_truth(self) -> bool:
        return self.labels is not None and bool(np.any(self.labels != UNLABELED))

    def point(self, i: int) -> Point:
        label = None
        if self.labels is not None and self.labels[i] != UNLABELED:
            label = int(self.labels[i])
        return Point(id=int(i), coords=tuple(float(c) for c in self.coords[i]), truth_label=label)

    @property
    def points(self) -> tuple[Point, ...]:
        return tuple(self.point(i) for i in range(self.n))

    def labeled_mask(self) -> np.ndarray:
        if self.labels is None:
            return np.zeros(self.n, dtype=bool)
        return self.labels != UNLABELED

    def subset(self, ids: Sequence[int]) -> Dataset:
        idx = np.asarray(ids, dtype=np.int64)
        labels = None if self.labels is None else self.labels[idx]
        return Dataset(self.coords[idx], labels, name=self.name)

    def appended(self, coords: np.ndarray, labels: Optional[np.ndarray] = None) -> Dataset:
        """Return a new dataset with extra points at the end (unlabeled unless given)."""
        extra = np.asarray(coords, dtype=np.float64).reshape(-1, self.dim)
        if labels is None:
            labels = np.full(extra.shape[0], UNLABELED, dtype=np.int64)
        base = self.labels if self.labels is not None else np.full(self.n, UNLABELED, dtype=np.int64)
        return Dataset(np.vstack([self.coords, extra]), np.concatenate([base, labels]), name=self.name)

    @staticmethod
    def from_points(points: Iterable[Point], name: str = "dataset") -> Dataset:
        pts = sorted(points, key=lambda p: p.id)
        if not pts:
            raise DataError("empty dataset")
        if [p.id for p in pts] != list(range(len(pts))):
            raise DataError("point ids must form the contiguous range 0..n-1")
        dims = {p.dim for p in pts}
        if len(dims) != 1:
            raise DataError(f"points disagree on dimensionality: {sorted(dims)}")
        labels = None
        if any(p.truth_label is not None for p in pts):
            labels = [UNLABELED if p.truth_label is None else p.truth_label for p in pts]
        return Dataset(np.array([p.coords for p in pts], dtype=np.float64), labels, name=name)


# ===========================================================================
# SECTION 2: CSV input
# ===========================================================================


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8-sig") if isinstance(data, bytes) else data


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _csv_rows(text: str) -> list[tuple[int, list[str]]]:
    rows = []
    for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not cells or all(c == "" for c in cells):
            continue
        rows.append((line_no, cells))
    return rows


def load_dataset(source: Source, *, header: Optional[bool] = None, name: str = "dataset") -> Dataset:
    """
    Parse a point CSV.

    Args:
        source: bytes, text or a readable stream.
        header: force header handling; ``None`` detects a non-numeric first row.
        name: label kept on the dataset for reports.

    Returns:
        Dataset whose dim is the number of coordinate columns. A trailing column
        named ``label`` in the header is parsed as integer truth labels.

    Raises:
        ParseError: non-numeric cell (message names the line).
        DataError: inconsistent column counts or empty input.
    """
    rows = _csv_rows(_read_text(source))
    if not rows:
        raise DataError("empty dataset")

    has_header = header if header is not None else not all(_is_number(c) for c in rows[0][1])
    label_col = False
    if has_header:
        names = [c.lower() for c in rows[0][1]]
        label_col = bool(names) and names[-1] == LABEL_COLUMN
        width = len(names)
        rows = rows[1:]
        if not rows:
            raise DataError("empty dataset")
    else:
        width = len(rows[0][1])

    coords: list[list[float]] = []
    labels: list[int] = []
    for line_no, cells in rows:
        if len(cells) != width:
            raise DataError(f"line {line_no}: expected {width} columns, found {len(cells)}")
        values = cells[:-1] if label_col else cells
        try:
            coords.append([float(c) for c in values])
        except ValueError as exc:
            raise ParseError(f"non-numeric coordinate in {cells!r}", line_no) from exc
        if label_col:
            raw = cells[-1]
            if raw == "":
                labels.append(UNLABELED)
                continue
            try:
                value = float(raw)
            except ValueError as exc:
                raise ParseError(f"non-numeric label {raw!r}", line_no) from exc
            if not value.is_integer():
                raise ParseError(f"label must be an integer, got {raw!r}", line_no)
            labels.append(int(value))

    dataset = Dataset(np.array(coords, dtype=np.float64), labels if label_col else None, name=name)
    log.debug("Loaded %s: n=%d dim=%d labeled=%s", name, dataset.n, dataset.dim, label_col)
    return dataset


def load_dataset_file(path: Path, *, header: Optional[bool] = None) -> Dataset:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataError(f"cannot read input file {path}: {exc.strerror or exc}") from exc
    return load_dataset(raw, header=header, name=path.stem)


def load_distance_matrix(source: Source) -> np.ndarray:
    """Parse an n×n CSV distance matrix and validate it."""
    rows = _csv_rows(_read_text(source))
    if not rows:
        raise DataError("empty distance matrix")
    values = []
    for line_no, cells in rows:
        try:
            values.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"non-numeric distance in {cells!r}", line_no) from exc
    widths = {len(r) for r in values}
    if len(widths) != 1:
        raise DataError("distance matrix rows have different lengths")
    return validate_distance_matrix(np.array(values, dtype=np.float64))


def validate_distance_matrix(matrix: np.ndarray, *, rtol: float = 1e-9) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DataError(f"distance matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DataError("distance matrix contains non-finite values")
    if np.any(m < 0):
        raise DataError("distance matrix contains negative distances")
    if np.any(np.diag(m) != 0):
        raise DataError("distance matrix diagonal must be zero")
    scale = max(float(m.max()), 1.0)
    if not np.allclose(m, m.T, rtol=0.0, atol=rtol * scale):
        raise DataError("distance matrix is not symmetric")
    out = np.array(m, copy=True)
    out.flags.writeable = False
    return out


# ===========================================================================
# SECTION 3: Distances
# ===========================================================================


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points of equal dimensionality."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} != {b.dim}")
    return math.sqrt(sum((x - y) * (x - y) for x, y in zip(a.coords, b.coords)))


def _euclidean_row(coords: np.ndarray, x: np.ndarray) -> np.ndarray:
    # Per-dimension elementwise accumulation: identical bits for any subset of rows.
    acc = np.zeros(coords.shape[0], dtype=np.float64)
    for d in range(coords.shape[1]):
        diff = coords[:, d] - x[d]
        acc += diff * diff
    return np.sqrt(acc)


class DistanceSource:
    """Read-only access to d(i, j) for a fixed set of n points."""

    mode = "abstract"

    @property
    def n(self) -> int:
        raise NotImplementedError

    def row(self, i: int, ids: Optional[np.ndarray] = None) -> np.ndarray:
        """Distances from ``i`` to ``ids`` (all points when omitted)."""
        raise NotImplementedError

    def pair(self, i: int, j: int) -> float:
        return float(self.row(i, np.array([j]))[0])

    def matrix(self) -> np.ndarray:
        return np.vstack([self.row(i) for i in range(self.n)])


class MetricSource(DistanceSource):
    """Euclidean distances computed on demand from coordinates."""

    mode = "metric"

    def __init__(self, coords: np.ndarray) -> None:
        self.coords = np.asarray(coords, dtype=np.float64)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    def row(self, i: int, ids: Optional[np.ndarray] = None) -> np.ndarray:
        block = self.coords if ids is None else self.coords[ids]
        return _euclidean_row(block, self.coords[i])


class MatrixSource(DistanceSource):
    """Externally supplied symmetric distance matrix."""

    mode = "matrix"

    def __init__(self, matrix: np.ndarray, *, validate: bool = True) -> None:
        self._m = validate_distance_matrix(matrix) if validate else np.asarray(matrix, dtype=np.float64)

    @property
    def n(self) -> int:
        return int(self._m.shape[0])

    def row(self, i: int, ids: Optional[np.ndarray] = None) -> np.ndarray:
        return self._m[i] if ids is None else self._m[i, ids]

    def matrix(self) -> np.ndarray:
        return self._m


def source_for(dataset: Dataset, matrix: Optional[np.ndarray] = None) -> DistanceSource:
    if matrix is None:
        return MetricSource(dataset.coords)
    source = MatrixSource(matrix)
    if source.n != dataset.n:
        raise DataError(f"distance matrix covers {source.n} points, dataset has {dataset.n}")
    return source


# ===========================================================================
# SECTION 4: K-nearest-neighbor index
# ===========================================================================


class NeighborBackend(enum.Enum):
    AUTO = "auto"
    BRUTE = "brute"
    KDTREE = "kdtree"

    @staticmethod
    def parse(val: Any) -> NeighborBackend:
        if isinstance(val, NeighborBackend):
            return val
        normalized = str(val).strip().lower().replace("-", "").replace("_", "")
        mapping = {"auto": NeighborBackend.AUTO, "brute": NeighborBackend.BRUTE, "kdtree": NeighborBackend.KDTREE}
        if normalized in mapping:
            return mapping[normalized]
        raise ConfigError(f"invalid neighbor backend: {val!r}. Expected auto, brute or kdtree")


@dataclass(frozen=True)
class NeighborIndex:
    """Per-point k nearest other points, sorted by (distance, id)."""

    k: int
    ids: np.ndarray
    dists: np.ndarray
    backend: str = field(default="brute", compare=False)

    def __post_init__(self) -> None:
        for arr in (self.ids, self.dists):
            arr.flags.writeable = False

    @property
    def n(self) -> int:
        return int(self.ids.shape[0])

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        return [(int(j), float(d)) for j, d in zip(self.ids[i], self.dists[i])]


def _select_k(i: int, cand: np.ndarray, dists: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    keep = cand != i
    cand, dists = cand[keep], dists[keep]
    order = np.lexsort((cand, dists))[:k]
    return cand[order], dists[order]


def _check_k(n: int, k: int) -> int:
    if isinstance(k, bool) or int(k) != k:
        raise ConfigError(f"k must be an integer, got {k!r}")
    k = int(k)
    if not 1 <= k <= n - 1:
        raise ConfigError(f"k must satisfy 1 <= k <= n-1 (n={n}), got {k}")
    return k


def brute_force_neighbors(source: DistanceSource, k: int) -> NeighborIndex:
    """O(n²) scan; the normative definition every other backend must match."""
    n = source.n
    k = _check_k(n, k)
    ids = np.empty((n, k), dtype=np.int64)
    dists = np.empty((n, k), dtype=np.float64)
    all_ids = np.arange(n)
    for i in range(n):
        ids[i], dists[i] = _select_k(i, all_ids, source.row(i), k)
    return NeighborIndex(k=k, ids=ids, dists=dists, backend="brute")


def _kdtree_neighbors(source: MetricSource, k: int) -> NeighborIndex:
    coords = source.coords
    n = coords.shape[0]
    tree = cKDTree(coords)
    kth, _ = tree.query(coords, k=k + 1)
    kth = np.asarray(kth).reshape(n, -1)[:, -1]
    # Inflated radius: a superset of the exact neighbors, re-ranked with the brute-force distances.
    radius = kth * (1.0 + 1e-9) + 1e-12
    ids = np.empty((n, k), dtype=np.int64)
    dists = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        cand = np.asarray(tree.query_ball_point(coords[i], float(radius[i])), dtype=np.int64)
        ids[i], dists[i] = _select_k(i, cand, source.row(i, cand), k)
    return NeighborIndex(k=k, ids=ids, dists=dists, backend="kdtree")


def build_neighbor_index(
    dataset: Dataset,
    source: Optional[DistanceSource] = None,
    k: int = 5,
    *,
    backend: NeighborBackend | str = NeighborBackend.AUTO,
) -> NeighborIndex:
    """
    Exact K-nearest-neighbor lists for every point.

    Ties in distance are broken by ascending point id. Matrix sources always use
    the brute-force scan; coordinate sources use a cKDTree when large enough.
    """
    source = source or MetricSource(dataset.coords)
    if source.n != dataset.n:
        raise DataError(f"distance source covers {source.n} points, dataset has {dataset.n}")
    k = _check_k(dataset.n, k)
    backend = NeighborBackend.parse(backend)

    use_tree = isinstance(source, MetricSource) and (
        backend is NeighborBackend.KDTREE or (backend is NeighborBackend.AUTO and dataset.n >= KDTREE_MIN_POINTS)
    )
    index = _kdtree_neighbors(source, k) if use_tree else brute_force_neighbors(source, k)
    log.debug("Neighbor index built: n=%d k=%d backend=%s", dataset.n, k, index.backend)
    return index


__all__ = [
    "UNLABELED",
    "Point",
    "Dataset",
    "load_dataset",
    "load_dataset_file",
    "load_distance_matrix",
    "validate_distance_matrix",
    "distance",
    "DistanceSource",
    "MetricSource",
    "MatrixSource",
    "source_for",
    "NeighborBackend",
    "NeighborIndex",
    "brute_force_neighbors",
    "build_neighbor_index",
]
