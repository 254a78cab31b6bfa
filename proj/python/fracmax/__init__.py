"""Fractional maximal functions on uniform grids."""

import json

from ._fracmax import (
    FracmaxError,
    Grid,
    coarea_check,
    dyadic_max,
    fixture,
    frac_max,
    indicator,
    q_alpha,
    quantize,
    random_cells,
    read_grid,
    set_threads,
    threads,
    variation,
    verify,
    write_grid,
)
from . import _fracmax

__all__ = [
    "FracmaxError",
    "Grid",
    "coarea_check",
    "dyadic_max",
    "error_code",
    "fixture",
    "frac_max",
    "indicator",
    "q_alpha",
    "quantize",
    "random_cells",
    "read_grid",
    "select",
    "set_threads",
    "sweep",
    "threads",
    "variation",
    "verify",
    "write_grid",
]

THEOREM_IDS = ("theo_goal", "theo_mfdr", "theo_mfdrdyadic", "finitedyadiclinear", "densitylow")


def error_code(exc):
    """Code prefix of a FracmaxError message, e.g. "InvalidGrid"."""
    return str(exc).split(":", 1)[0]


def sweep(dim=1, ids=(), seeds=50, seed0=0, refine=True, endpoints=True, caps=""):
    """Ensemble sweep; returns the same document as `fracmax sweep --out`."""
    return json.loads(_fracmax._sweep_json(dim, list(ids), seeds, seed0, refine, endpoints, str(caps)))


def select(grid, alpha, beta=0.0, representatives="screened"):
    """Greedy ball selection, cube representatives and transfer audit."""
    return json.loads(_fracmax._select_json(grid, alpha, beta, representatives))
