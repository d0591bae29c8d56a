"""Topological invariants and interface spectra of magnetized cold plasma."""

import json

from ._topoplasma import (
    Error,
    InvalidParameter,
    NotApplicable,
    NumericalFailure,
    PlasmaParams,
    Regularization,
    ResolutionError,
    __version__,
    bands,
    bdi,
    classify_phase,
    curvature,
    curvature_quadrature,
    hamiltonian,
    reduce,
    table2,
    transition_frequencies,
    weyl_residual,
)
from ._topoplasma import run as _run


def run(command, settings=None, out_dir="out", threads=1, write=False):
    """Run a CLI command in-process and return its summary as a dict."""
    return json.loads(_run(command, dict(settings or {}), str(out_dir), threads, write))
