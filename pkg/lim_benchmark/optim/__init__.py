"""Optimización alternada por aproximación convexa sucesiva."""

from .alternating import AOBlocks, AOTrace, TraceRecord, alternating_optimize
from .beamforming import solve_beamforming_subproblem
from .phase import solve_phase_subproblem
from .position import solve_position_subproblem
from .surrogates import SurrogateState, build_bilinear_sca_constraint

__all__ = [
    "AOBlocks",
    "AOTrace",
    "TraceRecord",
    "alternating_optimize",
    "solve_beamforming_subproblem",
    "solve_phase_subproblem",
    "solve_position_subproblem",
    "SurrogateState",
    "build_bilinear_sca_constraint",
]
