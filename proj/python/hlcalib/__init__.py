"""Calibration identities and second-variation checks on flat tori."""

import json
from fractions import Fraction

from . import _core
from ._core import GridError, KindError, compare, comass, jacobi_residual, kinds, second_variation_formula

__version__ = _core.version()


def exact_residual(identity, *vectors):
    """Residual of the Harvey-Lawson identity `identity` on integer vectors, as a Fraction."""
    return Fraction(_core.exact_residual(identity, [list(map(int, v)) for v in vectors]))


def run(command="all", seed=0, samples=50, tuples=10000, restarts=100, exact=True, phi=""):
    """Run a batch command and return the JSON report as a dict."""
    return json.loads(_core.run_json(command, seed, samples, tuples, restarts, exact, phi))


__all__ = [
    "GridError",
    "KindError",
    "comass",
    "compare",
    "exact_residual",
    "jacobi_residual",
    "kinds",
    "run",
    "second_variation_formula",
]
