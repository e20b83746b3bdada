from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from dadc.dataset import Dataset, load_dataset_file
from dadc.synthgen import generate

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: acceptance reproductions over many seeds")


@pytest.fixture(autouse=True)
def _isolated_outputs(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("DADC_OUT", raising=False)


@pytest.fixture(scope="session")
def worked_example() -> Dataset:
    return load_dataset_file(FIXTURES / "worked_example.csv")


@pytest.fixture(scope="session")
def heart() -> Dataset:
    return generate("heart", seed=0)


@pytest.fixture(scope="session")
def ed() -> Dataset:
    return generate("ed", seed=0)


@pytest.fixture(scope="session")
def mddm_small() -> Dataset:
    return generate("mddm:count=256", seed=0)


@pytest.fixture
def two_blobs() -> Dataset:
    """Two tight, well separated 3×3 lattices."""
    grid = np.array([(x, y) for x in range(3) for y in range(3)], dtype=np.float64)
    coords = np.vstack([grid, grid + 100.0])
    labels = np.repeat([0, 1], 9)
    return Dataset(coords, labels, name="two_blobs")
