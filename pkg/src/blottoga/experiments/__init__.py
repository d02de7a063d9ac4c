"""Batch experiments: configuration files, run orchestration, figure data."""

from .config import ExperimentSpec, RunSpec, derive_seed, parse_spec, parse_text
from .figures import FIGURES, emit_figure_data
from .runner import RunManifest, load_run, run_experiments

__all__ = [
    "ExperimentSpec", "RunSpec", "derive_seed", "parse_spec", "parse_text",
    "FIGURES", "emit_figure_data", "RunManifest", "load_run", "run_experiments",
]
