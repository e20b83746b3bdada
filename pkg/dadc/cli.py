# -*- coding: utf-8 -*-
"""
DADC — Command line

Subcommands mirror the experimental steps: generate, cluster,
decision-graph, evaluate, sweep. Every flag has a config-file equivalent;
flags win over the file, the file wins over defaults.

Exit codes: 0 ok, 2 configuration error, 3 data/IO error, 4 no center found.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import typer

from .config import EmitTarget, RunConfig
from .errors import ConfigError, DADCError, exit_code_for
from .pipeline import execute
from .utils import setup_logging

log = logging.getLogger("DADC.cli")

app = typer.Typer(
    name="dadc",
    help="Domain-adaptive density clustering: generate data, cluster, inspect decision graphs, evaluate.",
    add_completion=False,
    no_args_is_help=True,
)

# ---------------------------------------------------------------------------
# Shared options
# ---------------------------------------------------------------------------

INPUT = typer.Option(None, "--input", "-i", help="Point CSV (optional header, trailing 'label' column)")
GENERATE = typer.Option(None, "--generate", "-g", help="Generator spec, e.g. heart, ed, mddm:count=512")
CONFIG = typer.Option(None, "--config", "-c", help="JSON or YAML run configuration")
K = typer.Option(None, "--k", help="Neighborhood size K (default 5)")
THRESHOLD = typer.Option(None, "--fusion-threshold", help="Merge pairs whose fusion degree exceeds this (default 1.0)")
DC = typer.Option(None, "--dc", help="Baseline cutoff distance, a number or 'auto'")
SEED = typer.Option(None, "--seed", help="Seed for generation and noise")
OUT = typer.Option(None, "--out", "-o", help="Output directory ($DADC_OUT overrides)")
EMIT = typer.Option(None, "--emit", help="Comma list of labels, graph-csv, graph-svg, plot, trace")
NOISE_LEVEL = typer.Option(None, "--noise-level", help="Fraction of uniform noise to add, within [0, 0.15]")
SEEDS = typer.Option(None, "--seeds", help="Sweep over seeds 0..N-1")
LEVELS = typer.Option(None, "--levels", help="Comma list of sweep noise levels")
BASELINE = typer.Option(None, "--baseline", help="Also run the baseline ('cfsfdp')")
LENGTH_UNIT = typer.Option(None, "--length-unit", help="Domain-density length unit, a number or 'auto'")
DENSITY_FRACTION = typer.Option(None, "--density-fraction", help="Critical point x as a fraction of the maximum")
DELTA_FRACTION = typer.Option(None, "--delta-fraction", help="Critical point y as a fraction of the maximum")
WORKERS = typer.Option(None, "--workers", help="Sweep worker threads")


def _number_or_auto(name: str, value: Optional[str]) -> Union[float, str, None]:
    if value is None:
        return None
    if value.strip().lower() == "auto":
        return "auto"
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"{name} must be a number or 'auto', got {value!r}") from None


def _levels(value: Optional[str]) -> Optional[list[float]]:
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--levels must be a comma list of numbers, got {value!r}") from None


def _overrides(**flags: Any) -> Dict[str, Any]:
    baseline = flags.get("baseline")
    if baseline is not None and baseline.strip().lower() != "cfsfdp":
        raise ConfigError(f"unknown baseline {baseline!r}. Expected cfsfdp")
    emit = flags.get("emit")
    return {
        "input": str(flags["input"]) if flags.get("input") else None,
        "generate": flags.get("generate"),
        "seed": flags.get("seed"),
        "out": str(flags["out"]) if flags.get("out") else None,
        "density": {
            "k": flags.get("k"),
            "length_unit": _number_or_auto("--length-unit", flags.get("length_unit")),
        },
        "selection": {
            "density_fraction": flags.get("density_fraction"),
            "delta_fraction": flags.get("delta_fraction"),
        },
        "ensemble": {"fusion_threshold": flags.get("fusion_threshold")},
        "baseline": {
            "enabled": True if baseline else None,
            "dc": _number_or_auto("--dc", flags.get("dc")),
        },
        "noise": {
            "level": flags.get("noise_level"),
            "levels": _levels(flags.get("levels")),
            "seeds": flags.get("seeds"),
            "workers": flags.get("workers"),
        },
        "export": {"emit": sorted(t.value for t in EmitTarget.parse_many(emit)) if emit is not None else None},
    }


def _run(command: str, config_file: Optional[Path], **flags: Any) -> None:
    setup_logging()
    try:
        base = RunConfig.load_from_file(config_file) if config_file else RunConfig()
        config = base.merged(_overrides(**flags)).validate(require_source=True)
    except DADCError as exc:
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=exit_code_for(exc))
    log.debug("Config: %s", config.to_json())
    raise typer.Exit(code=execute(config, command, echo=typer.echo))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@app.command()
def generate(
    generate: Optional[str] = GENERATE,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    noise_level: Optional[float] = NOISE_LEVEL,
    config: Optional[Path] = CONFIG,
) -> None:
    """Write a generated dataset as CSV (x,y,label)."""
    _run("generate", config, generate=generate, seed=seed, out=out, noise_level=noise_level)


@app.command()
def cluster(
    input: Optional[Path] = INPUT,
    generate: Optional[str] = GENERATE,
    k: Optional[int] = K,
    fusion_threshold: Optional[float] = THRESHOLD,
    dc: Optional[str] = DC,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    emit: Optional[str] = EMIT,
    noise_level: Optional[float] = NOISE_LEVEL,
    baseline: Optional[str] = BASELINE,
    length_unit: Optional[str] = LENGTH_UNIT,
    density_fraction: Optional[float] = DENSITY_FRACTION,
    delta_fraction: Optional[float] = DELTA_FRACTION,
    config: Optional[Path] = CONFIG,
) -> None:
    """Cluster a dataset and write the requested artifacts."""
    _run(
        "cluster",
        config,
        input=input,
        generate=generate,
        k=k,
        fusion_threshold=fusion_threshold,
        dc=dc,
        seed=seed,
        out=out,
        emit=emit,
        noise_level=noise_level,
        baseline=baseline,
        length_unit=length_unit,
        density_fraction=density_fraction,
        delta_fraction=delta_fraction,
    )


@app.command("decision-graph")
def decision_graph(
    input: Optional[Path] = INPUT,
    generate: Optional[str] = GENERATE,
    k: Optional[int] = K,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    emit: Optional[str] = EMIT,
    length_unit: Optional[str] = LENGTH_UNIT,
    density_fraction: Optional[float] = DENSITY_FRACTION,
    delta_fraction: Optional[float] = DELTA_FRACTION,
    config: Optional[Path] = CONFIG,
) -> None:
    """Write the decision graph (CSV, plus SVG with --emit graph-svg) without clustering."""
    _run(
        "decision-graph",
        config,
        input=input,
        generate=generate,
        k=k,
        seed=seed,
        out=out,
        emit=emit,
        length_unit=length_unit,
        density_fraction=density_fraction,
        delta_fraction=delta_fraction,
    )


@app.command()
def evaluate(
    input: Optional[Path] = INPUT,
    generate: Optional[str] = GENERATE,
    k: Optional[int] = K,
    fusion_threshold: Optional[float] = THRESHOLD,
    dc: Optional[str] = DC,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    noise_level: Optional[float] = NOISE_LEVEL,
    length_unit: Optional[str] = LENGTH_UNIT,
    density_fraction: Optional[float] = DENSITY_FRACTION,
    delta_fraction: Optional[float] = DELTA_FRACTION,
    config: Optional[Path] = CONFIG,
) -> None:
    """Clustering accuracy of DADC and the CFSFDP baseline on a labeled dataset."""
    _run(
        "evaluate",
        config,
        input=input,
        generate=generate,
        k=k,
        fusion_threshold=fusion_threshold,
        dc=dc,
        seed=seed,
        out=out,
        noise_level=noise_level,
        length_unit=length_unit,
        density_fraction=density_fraction,
        delta_fraction=delta_fraction,
    )


@app.command()
def sweep(
    input: Optional[Path] = INPUT,
    generate: Optional[str] = GENERATE,
    k: Optional[int] = K,
    fusion_threshold: Optional[float] = THRESHOLD,
    dc: Optional[str] = DC,
    seed: Optional[int] = SEED,
    out: Optional[Path] = OUT,
    seeds: Optional[int] = SEEDS,
    levels: Optional[str] = LEVELS,
    workers: Optional[int] = WORKERS,
    length_unit: Optional[str] = LENGTH_UNIT,
    config: Optional[Path] = CONFIG,
) -> None:
    """Mean clustering accuracy per noise level for DADC and CFSFDP."""
    _run(
        "sweep",
        config,
        input=input,
        generate=generate,
        k=k,
        fusion_threshold=fusion_threshold,
        dc=dc,
        seed=seed,
        out=out,
        seeds=seeds,
        levels=levels,
        workers=workers,
        length_unit=length_unit,
    )


def main() -> None:  # pragma: no cover - console entry point
    app()


if __name__ == "__main__":  # pragma: no cover
    main()
