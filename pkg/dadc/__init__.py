# -*- coding: utf-8 -*-
"""
DADC — domain-adaptive density clustering

- KNN domain density, delta distances and the adaptive density decision graph
- self-identified cluster centers with outlier detection
- cluster self-ensemble of fragmented clusters
- CFSFDP baseline, clustering accuracy, noise robustness sweep
- synthetic VDD / ED / MDDM generators and CSV/SVG export
"""

from __future__ import annotations

import logging
import os

from .utils import detect_version, setup_logging

__version__ = detect_version()

__all__ = [
    # Data
    "Dataset", "Point", "load_dataset", "load_dataset_file", "build_neighbor_index",
    # Algorithm
    "DensityProfile", "compute_profile", "select_centers", "run_ensemble", "self_ensemble",
    "DadcResult", "dadc_cluster", "cfsfdp_cluster",
    # Evaluation
    "clustering_accuracy", "inject_noise", "NoiseSpec", "robustness_sweep",
    # Generators / config
    "generate", "RunConfig",
    # Errors
    "DADCError", "ConfigError", "SpecError", "DataError", "ParseError", "NoCenterError",
    "__version__",
]

from .algorithm import DadcResult, dadc_cluster  # noqa: E402
from .baseline import cfsfdp_cluster  # noqa: E402
from .centers import select_centers  # noqa: E402
from .config import RunConfig  # noqa: E402
from .dataset import Dataset, Point, build_neighbor_index, load_dataset, load_dataset_file  # noqa: E402
from .density import DensityProfile, compute_profile  # noqa: E402
from .ensemble import run_ensemble, self_ensemble  # noqa: E402
from .errors import ConfigError, DADCError, DataError, NoCenterError, ParseError, SpecError  # noqa: E402
from .evaluation import NoiseSpec, clustering_accuracy, inject_noise, robustness_sweep  # noqa: E402
from .synthgen import generate  # noqa: E402


def _bootstrap_logger() -> logging.Logger:
    try:
        return setup_logging(level=os.getenv("DADC_LOG_LEVEL"))
    except Exception:
        logging.basicConfig(level=logging.INFO, format="%(asctime)s | %(levelname)s | %(name)s | %(message)s")
        return logging.getLogger("DADC")


log = _bootstrap_logger()
log.debug("dadc imported (version=%s)", __version__)
