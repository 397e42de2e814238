"""Heun functions: local series, continuation, connection and spectral problems."""

from .connection import ConnectionMatrix, abel_det_prediction, connection_matrix, wronskian
from .continuation import (
    ContinuationPath,
    StatePair,
    circle_loop,
    continue_along_path,
    default_path,
    monodromy_matrix,
)
from .errors import HeunError, InputError, NumericalError
from .frobenius import (
    EvalResult,
    FrobeniusSolution,
    confluent_series,
    eval_series,
    general_series,
    local_basis,
    local_solution,
)
from .params import ConfluentParams, HeunParams, classify_singularities, params_from_dict
from .spectral import Mode, RWProblem, boundary_solution, find_modes, matching_determinant, rw_to_confluent

__version__ = "0.1.0"

__all__ = [
    "ConfluentParams", "ConnectionMatrix", "ContinuationPath", "EvalResult", "FrobeniusSolution",
    "HeunError", "HeunParams", "InputError", "Mode", "NumericalError", "RWProblem", "StatePair",
    "abel_det_prediction", "boundary_solution", "circle_loop", "classify_singularities",
    "confluent_series", "connection_matrix", "continue_along_path", "default_path", "eval_series",
    "find_modes", "general_series", "local_basis", "local_solution", "matching_determinant",
    "monodromy_matrix", "params_from_dict", "rw_to_confluent", "wronskian",
]
