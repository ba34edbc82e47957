"""Robust curve and surface subdivision by smoothed l1 local polynomial fitting."""

import json

from ._core import (
    ConfigError,
    DomainError,
    Error,
    InputError,
    NumericalError,
    UnsupportedError,
    basic_limit,
    builtin_experiments,
    irls_fit,
    sample_function,
    subdivide,
    subdivide_surface,
    test_functions,
    torus_grid,
)
from . import _core


def experiment_manifest(name):
    """Builtin experiment manifest as a dict."""
    return json.loads(_core.experiment_manifest(name))


def run_experiment(manifest, seed=None, output=None, threads=1):
    """Run a builtin experiment by name, or a manifest dict, and return its metrics.

    With `output`, the artifacts are also written under that directory.
    """
    if isinstance(manifest, dict):
        manifest = json.dumps(manifest)
    return json.loads(_core.run_experiment(manifest, seed=seed, output=output, threads=threads))


__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "InputError",
    "NumericalError",
    "UnsupportedError",
    "basic_limit",
    "builtin_experiments",
    "experiment_manifest",
    "irls_fit",
    "run_experiment",
    "sample_function",
    "subdivide",
    "subdivide_surface",
    "test_functions",
    "torus_grid",
]
