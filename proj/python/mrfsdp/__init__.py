"""MAP inference for Potts MRFs through low-rank semidefinite relaxations."""

import json

from ._core import (
    DegenerateStepError,
    Error,
    InfeasibleError,
    InvalidInputError,
    MrfInstance,
    NumericalFailureError,
    SizeRefusalError,
    encode_pm,
    encode_zo,
    generate_grid,
    unary_argmin,
)
from ._core import solve_json as _solve_json

__all__ = [
    "DegenerateStepError",
    "Error",
    "InfeasibleError",
    "InvalidInputError",
    "MrfInstance",
    "NumericalFailureError",
    "SizeRefusalError",
    "encode_pm",
    "encode_zo",
    "generate_grid",
    "solve",
    "unary_argmin",
]


def solve(mrf, method="fuses", seed=0, warm_start=False):
    """Run one solver and return its result document as a dict."""
    return json.loads(_solve_json(mrf, method, seed, warm_start))
