"""Hierarchical functional ANOVA decomposition of tabular data."""

import json as _json

from ._core import (  # noqa: F401
    ConfigError,
    DimensionError,
    DomainError,
    HfdError,
    IndexError,
    InputError,
    Model,
    SchemaError,
    enumerate_truncation,
    fgm_component,
    fgm_sample,
    fgm_target,
    fit,
    gauss_tanh_sample,
    gauss_tanh_target,
    lars_path,
    legendre_normalized,
    read_csv,
    reconstruction_r2,
    solve_reduced,
    truncation_count,
)

__version__ = "0.1.0"


def metrics(model, X, y, share_threshold=0.01):
    """R2, MaxCorr, cosine table and variance shares as a dict."""
    return _json.loads(model.metrics_json(X, y, share_threshold))


def export_bundle(model, X, y=None, grid_1d=200, grid_2d=50, max_rows=20):
    """Plot-data bundle as a dict (same layout as `hfd export-plotdata`)."""
    return _json.loads(model.export_bundle_json(X, y, grid_1d, grid_2d, max_rows))
