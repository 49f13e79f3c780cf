"""Experiment harness: configs, histogram studies, the noise grid, and
summaries."""

from noisyq.harness.config import (
    ALGORITHMS,
    ConfigError,
    ExperimentConfig,
    FeatureMapSpec,
    config_from_doc,
    load_config,
)
from noisyq.harness.grid import canonical_body_text, enumerate_cells, run_grid
from noisyq.harness.histograms import run_histograms
from noisyq.harness.summary import aggregate_cells, emit_summary

__all__ = [
    "ALGORITHMS",
    "ConfigError",
    "ExperimentConfig",
    "FeatureMapSpec",
    "aggregate_cells",
    "canonical_body_text",
    "config_from_doc",
    "emit_summary",
    "enumerate_cells",
    "load_config",
    "run_grid",
    "run_histograms",
]
