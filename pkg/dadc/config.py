# -*- coding: utf-8 -*-
"""
DADC — Config

Run configuration:
- typed dataclass sections with validation
- enums with tolerant parsing
- I/O: JSON, YAML, dict (schema-checked)
- flag > file > default merging
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

from jsonschema import Draft7Validator

from .dataset import NeighborBackend
from .errors import ConfigError

# ===========================================================================
# SECTION 1: Enums
# ===========================================================================


class CutoffMode(enum.Enum):
    """How the baseline cutoff distance d_c is chosen."""

    AUTO = "auto"
    FIXED = "fixed"

    @staticmethod
    def parse(val: Any) -> CutoffMode:
        if isinstance(val, CutoffMode):
            return val
        normalized = str(val).strip().lower()
        if normalized == "auto":
            return CutoffMode.AUTO
        if normalized == "fixed":
            return CutoffMode.FIXED
        raise ConfigError(f"invalid cutoff mode: {val!r}. Expected auto or fixed")


class EmitTarget(enum.Enum):
    """Artifacts a run can write."""

    LABELS = "labels"
    GRAPH_CSV = "graph-csv"
    GRAPH_SVG = "graph-svg"
    PLOT = "plot"
    TRACE = "trace"

    @staticmethod
    def parse(val: Any) -> EmitTarget:
        if isinstance(val, EmitTarget):
            return val
        normalized = str(val).strip().lower().replace("_", "-")
        aliases = {
            "labels": EmitTarget.LABELS,
            "graph-csv": EmitTarget.GRAPH_CSV,
            "decision-graph": EmitTarget.GRAPH_CSV,
            "graph-svg": EmitTarget.GRAPH_SVG,
            "plot": EmitTarget.PLOT,
            "trace": EmitTarget.TRACE,
        }
        if normalized in aliases:
            return aliases[normalized]
        raise ConfigError(f"invalid emit target: {val!r}. Expected one of labels, graph-csv, graph-svg, plot, trace")

    @staticmethod
    def parse_many(val: Union[str, Iterable[Any], None]) -> frozenset[EmitTarget]:
        """Accept "labels,plot", a list of names or enum members."""
        if val is None:
            return frozenset()
        items = val.split(",") if isinstance(val, str) else list(val)
        return frozenset(EmitTarget.parse(item) for item in items if str(item).strip())


# ===========================================================================
# SECTION 2: Validation helpers
# ===========================================================================


def _validate_float_range(name: str, value: Any, min_val: float, max_val: float) -> float:
    try:
        num = float(value)
    except (ValueError, TypeError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None
    if math.isnan(num) or not (min_val <= num <= max_val):
        raise ConfigError(f"{name} out of range [{min_val}, {max_val}]: {value}")
    return num


def _validate_int_range(name: str, value: Any, min_val: int, max_val: int) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    try:
        num = int(value)
    except (ValueError, TypeError):
        raise ConfigError(f"{name} must be an integer, got {value!r}") from None
    if num != value and not isinstance(value, str):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if not (min_val <= num <= max_val):
        raise ConfigError(f"{name} out of range [{min_val}, {max_val}]: {value}")
    return num


def _validate_positive(name: str, value: Any) -> float:
    num = _validate_float_range(name, value, 0.0, math.inf)
    if num <= 0 or math.isinf(num):
        raise ConfigError(f"{name} must be a finite value > 0, got {value!r}")
    return num


def _auto_or_positive(name: str, value: Any) -> Union[float, str]:
    if isinstance(value, str) and value.strip().lower() == "auto":
        return "auto"
    return _validate_positive(name, value)


# ===========================================================================
# SECTION 3: Config sections
# ===========================================================================


@dataclass(slots=True)
class DensityCfg:
    """Neighborhood size and the length unit of the domain-density weights."""

    k: int = 5
    length_unit: Union[float, str] = 1.0
    backend: NeighborBackend = NeighborBackend.AUTO

    def validate(self) -> DensityCfg:
        self.k = _validate_int_range("density.k", self.k, 1, 100_000)
        self.length_unit = _auto_or_positive("density.length_unit", self.length_unit)
        self.backend = NeighborBackend.parse(self.backend)
        return self


@dataclass(slots=True)
class SelectionCfg:
    """Critical-point constants: fractions of the maximal adaptive density and delta."""

    density_fraction: float = 0.5
    delta_fraction: float = 0.25

    def validate(self) -> SelectionCfg:
        self.density_fraction = _validate_float_range("selection.density_fraction", self.density_fraction, 0.0, 1.0)
        self.delta_fraction = _validate_float_range("selection.delta_fraction", self.delta_fraction, 0.0, 1.0)
        if self.density_fraction == 0 or self.delta_fraction == 0:
            raise ConfigError("selection fractions must be > 0")
        return self


@dataclass(slots=True)
class EnsembleCfg:
    fusion_threshold: float = 1.0
    enabled: bool = True

    def validate(self) -> EnsembleCfg:
        self.fusion_threshold = _validate_positive("ensemble.fusion_threshold", self.fusion_threshold)
        self.enabled = bool(self.enabled)
        return self


@dataclass(slots=True)
class BaselineCfg:
    """CFSFDP comparison run; ``dc`` is "auto" or a fixed cutoff distance."""

    enabled: bool = False
    dc: Union[float, str] = "auto"

    @property
    def mode(self) -> CutoffMode:
        return CutoffMode.AUTO if self.dc == "auto" else CutoffMode.FIXED

    def validate(self) -> BaselineCfg:
        self.enabled = bool(self.enabled)
        self.dc = _auto_or_positive("baseline.dc", self.dc)
        return self


@dataclass(slots=True)
class NoiseCfg:
    """Noise injection for a single run (level) and for the robustness sweep (levels × seeds)."""

    level: float = 0.0
    levels: tuple[float, ...] = (0.01, 0.05, 0.10, 0.15)
    seeds: int = 10
    workers: int = 2

    def validate(self) -> NoiseCfg:
        self.level = _validate_float_range("noise.level", self.level, 0.0, 0.15)
        self.levels = tuple(_validate_float_range("noise.levels", lv, 0.0, 0.15) for lv in self.levels)
        if not self.levels:
            raise ConfigError("noise.levels must not be empty")
        self.seeds = _validate_int_range("noise.seeds", self.seeds, 1, 10_000)
        self.workers = _validate_int_range("noise.workers", self.workers, 1, 64)
        return self

    @property
    def seed_list(self) -> tuple[int, ...]:
        return tuple(range(self.seeds))


@dataclass(slots=True)
class ExportCfg:
    emit: frozenset[EmitTarget] = frozenset({EmitTarget.LABELS})

    def validate(self) -> ExportCfg:
        self.emit = EmitTarget.parse_many(self.emit)
        return self


# ===========================================================================
# SECTION 4: Run configuration
# ===========================================================================

_SCHEMA_PATH = Path(__file__).resolve().parent / "schemas" / "run_config.schema.json"
_CONFIG_SCHEMA = json.loads(_SCHEMA_PATH.read_text(encoding="utf-8"))
_CONFIG_VALIDATOR = Draft7Validator(_CONFIG_SCHEMA)


def validate_config_payload(payload: Any) -> None:
    """Check a config mapping against the JSON schema; errors sorted by path."""
    errors = sorted(_CONFIG_VALIDATOR.iter_errors(payload), key=lambda e: [str(p) for p in e.path])
    if not errors:
        return
    details = []
    for error in errors:
        location = "/".join(str(x) for x in error.path) or "<root>"
        details.append(f"{location}: {error.message}")
    raise ConfigError("invalid configuration: " + "; ".join(details))


_SECTIONS = {
    "density": DensityCfg,
    "selection": SelectionCfg,
    "ensemble": EnsembleCfg,
    "baseline": BaselineCfg,
    "noise": NoiseCfg,
    "export": ExportCfg,
}


@dataclass(slots=True)
class RunConfig:
    """Complete configuration of one CLI invocation."""

    input: Optional[Path] = None
    generate: Optional[str] = None
    seed: int = 0
    out: Path = Path("outputs")
    density: DensityCfg = field(default_factory=DensityCfg)
    selection: SelectionCfg = field(default_factory=SelectionCfg)
    ensemble: EnsembleCfg = field(default_factory=EnsembleCfg)
    baseline: BaselineCfg = field(default_factory=BaselineCfg)
    noise: NoiseCfg = field(default_factory=NoiseCfg)
    export: ExportCfg = field(default_factory=ExportCfg)

    def validate(self, *, require_source: bool = True) -> RunConfig:
        """
        Validate every section.

        Args:
            require_source: demand exactly one of ``input`` / ``generate``.
        """
        for name in _SECTIONS:
            getattr(self, name).validate()
        self.seed = _validate_int_range("seed", self.seed, 0, 2**32 - 1)
        self.input = Path(self.input).expanduser() if self.input else None
        self.generate = str(self.generate).strip() if self.generate else None
        self.out = Path(self.out).expanduser()
        if self.input and self.generate:
            raise ConfigError("use either input or generate, not both")
        if require_source and not (self.input or self.generate):
            raise ConfigError("one of input or generate is required")
        return self

    # -----------------------------------------------------------------------
    # I/O Methods
    # -----------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)

        def fix_value(obj: Any) -> Any:
            if isinstance(obj, Path):
                return str(obj)
            if isinstance(obj, enum.Enum):
                return obj.value
            if isinstance(obj, (frozenset, set)):
                return sorted(fix_value(v) for v in obj)
            if isinstance(obj, tuple):
                return [fix_value(v) for v in obj]
            return obj

        def walk(x: Any) -> Any:
            if isinstance(x, dict):
                return {k: walk(fix_value(v)) for k, v in x.items() if v is not None}
            if isinstance(x, list):
                return [walk(fix_value(v)) for v in x]
            return fix_value(x)

        return walk(data)

    @staticmethod
    def from_dict(data: Dict[str, Any], *, require_source: bool = False) -> RunConfig:
        validate_config_payload(data)
        sections = {}
        for name, cls in _SECTIONS.items():
            values = dict(data.get(name) or {})
            if name == "noise" and "levels" in values:
                values["levels"] = tuple(values["levels"])
            sections[name] = cls(**values)
        config = RunConfig(
            input=Path(data["input"]) if data.get("input") else None,
            generate=data.get("generate"),
            seed=data.get("seed", 0),
            out=Path(data.get("out", "outputs")),
            **sections,
        )
        return config.validate(require_source=require_source)

    @staticmethod
    def from_json(text: str) -> RunConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
        return RunConfig.from_dict(data)

    @staticmethod
    def from_yaml(text: str) -> RunConfig:
        try:
            import yaml  # type: ignore
        except ImportError as e:
            raise RuntimeError("PyYAML is not installed. Install it to read YAML: pip install pyyaml") from e
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML config: {exc}") from exc
        return RunConfig.from_dict(data if data is not None else {})

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False, sort_keys=True)

    @staticmethod
    def load_from_file(path: Path) -> RunConfig:
        """Load JSON or YAML by file suffix."""
        path = Path(path)
        try:
            content = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
        suffix = path.suffix.lower()
        if suffix in (".yaml", ".yml"):
            return RunConfig.from_yaml(content)
        if suffix == ".json":
            return RunConfig.from_json(content)
        raise ConfigError(f"unsupported config format: {path.suffix}")

    def save_to_file(self, path: Path) -> None:
        path = Path(path)
        suffix = path.suffix.lower()
        if suffix == ".json":
            path.write_text(self.to_json() + "\n", encoding="utf-8")
        elif suffix in (".yaml", ".yml"):
            try:
                import yaml  # type: ignore
            except ImportError as e:
                raise RuntimeError("PyYAML is not installed") from e
            path.write_text(yaml.safe_dump(self.to_dict(), sort_keys=True), encoding="utf-8")
        else:
            raise ConfigError(f"unsupported config format: {path.suffix}")

    def merged(self, overrides: Dict[str, Any]) -> RunConfig:
        """
        Return a copy with ``overrides`` applied on top.

        ``overrides`` mirrors :meth:`to_dict`; ``None`` values mean "not given"
        and leave the current value in place, which gives flag > file > default.
        """
        data = self.to_dict()
        for key, value in overrides.items():
            if value is None:
                continue
            if isinstance(value, dict):
                section = dict(data.get(key) or {})
                section.update({k: v for k, v in value.items() if v is not None})
                data[key] = section
            else:
                data[key] = value
        if overrides.get("input") is not None:
            data.pop("generate", None)
        if overrides.get("generate") is not None:
            data.pop("input", None)
        return RunConfig.from_dict(_plain(data))


def _plain(obj: Any) -> Any:
    """Coerce enums, paths and sets to the JSON types the schema expects."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in obj]
        return sorted(items) if isinstance(obj, (set, frozenset)) else items
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    return obj


__all__ = [
    "CutoffMode",
    "EmitTarget",
    "NeighborBackend",
    "DensityCfg",
    "SelectionCfg",
    "EnsembleCfg",
    "BaselineCfg",
    "NoiseCfg",
    "ExportCfg",
    "RunConfig",
    "validate_config_payload",
]
