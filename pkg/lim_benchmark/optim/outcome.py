"""Resultado común de los tres subproblemas."""

from __future__ import annotations
from dataclasses import dataclass, field

import numpy as np

from lim_benchmark.solver.barrier import NUMERICAL_FAILURE, SolverResult
from lim_benchmark.errors import SubproblemError
from lim_benchmark.system.state import SolutionState


@dataclass
class SubproblemOutcome:
    stage: str
    sol: SolutionState  # candidato en unidades físicas
    aux: dict[str, np.ndarray]
    objective: float
    status: str
    penalty: float = 0.0
    flags: set[str] = field(default_factory=set)


def ensure_solved(stage: str, result: SolverResult) -> None:
    if result.status == NUMERICAL_FAILURE:
        raise SubproblemError(stage, result.status)
