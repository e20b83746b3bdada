# -*- coding: utf-8 -*-
"""
DADC — Utilities

Helpers shared by every stage:
- logging setup
- output directory resolution (DADC_OUT aware, no silent fallback)
- content digests for run reports
- filename sanitising for generated artifacts
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import unicodedata
from importlib import metadata
from pathlib import Path
from typing import Any, Optional, Sequence

from .errors import DataError

# ===========================================================================
# SECTION 0: Logging setup
# ===========================================================================

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
OUT_ENV = "DADC_OUT"


def setup_logging(level_env: str = "DADC_LOG_LEVEL", level: Optional[str] = None) -> logging.Logger:
    """
    Initialize consistent logging for DADC.

    The level comes from ``level`` when given, otherwise from the environment
    variable named by ``level_env`` (default INFO). Safe to call repeatedly:
    handlers are installed only when the root logger has none.
    """
    name = (level or os.getenv(level_env, "INFO")).upper()
    lvl = getattr(logging, name, logging.INFO)

    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(level=lvl, format=LOG_FORMAT)
    else:
        root.setLevel(lvl)

    logger = logging.getLogger("DADC")
    logger.setLevel(lvl)
    return logger


log = logging.getLogger("DADC.utils")


def detect_version(pkg: str = "dadc", fallback: str = "0.0.0") -> str:
    try:
        return metadata.version(pkg)
    except Exception:
        return fallback


__all__ = [
    "LOG_FORMAT",
    "OUT_ENV",
    "setup_logging",
    "detect_version",
    "sanitize_filename",
    "ensure_outputs_dir",
    "sha256_of_files",
    "write_json",
]

# ===========================================================================
# SECTION 1: File names
# ===========================================================================

_UNSAFE_CHARS = re.compile(r"[^A-Za-z0-9._-]+")


def sanitize_filename(name: str, *, max_len: int = 120) -> str:
    """
    Turn an arbitrary label (e.g. a generator spec string) into a safe file stem.

    Examples:
        >>> sanitize_filename("heart:count=71")
        'heart_count_71'
        >>> sanitize_filename("  ")
        'dataset'
    """
    text = unicodedata.normalize("NFKD", str(name)).encode("ascii", "ignore").decode("ascii")
    text = _UNSAFE_CHARS.sub("_", text).strip("._-")
    text = re.sub(r"_+", "_", text)
    return text[:max_len] or "dataset"


# ===========================================================================
# SECTION 2: Output directories
# ===========================================================================


def _writable(candidate: Path) -> bool:
    try:
        candidate.mkdir(parents=True, exist_ok=True)
        marker = candidate / ".write_test"
        marker.write_text("ok", encoding="utf-8")
        marker.unlink(missing_ok=True)
        return True
    except OSError as exc:
        log.debug("Output dir %s not writable: %s", candidate, exc)
        return False


def ensure_outputs_dir(preferred: Optional[Path] = None) -> Path:
    """
    Return the output directory for a run.

    ``$DADC_OUT`` overrides ``preferred``; with neither, ``./outputs`` is used.
    The chosen directory is created if needed. There is no fallback: an
    unwritable directory raises DataError.
    """
    env_out = os.getenv(OUT_ENV, "").strip()
    if env_out:
        target = Path(env_out).expanduser()
    elif preferred is not None:
        target = Path(preferred).expanduser()
    else:
        target = Path("./outputs")

    if not _writable(target):
        raise DataError(f"output directory not writable: {target}")
    log.debug("Using outputs directory: %s", target)
    return target


# ===========================================================================
# SECTION 3: Digests and reports
# ===========================================================================


def sha256_of_files(paths: Sequence[Path]) -> str:
    """Deterministic SHA256 over file names and contents, in sorted name order."""
    sha = hashlib.sha256()
    for path in sorted((Path(p) for p in paths), key=lambda p: p.name):
        if not path.is_file():
            raise FileNotFoundError(f"Artifact not found: {path}")
        sha.update(path.name.encode("utf-8"))
        sha.update(b"\0")
        sha.update(path.read_bytes())
    return sha.hexdigest()


def write_json(path: Path, payload: Any) -> Path:
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
