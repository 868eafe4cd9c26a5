"""Programas cóncavos canónicos y método de barrera."""

from .barrier import SolverResult, solve_concave_program
from .program import ConcaveProgram, LogTerm, ProgramBuilder, QuadConstraint, check_feasible, dump_program

__all__ = [
    "SolverResult",
    "solve_concave_program",
    "ConcaveProgram",
    "LogTerm",
    "ProgramBuilder",
    "QuadConstraint",
    "check_feasible",
    "dump_program",
]
