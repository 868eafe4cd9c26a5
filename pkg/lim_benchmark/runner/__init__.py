"""Runner de experimentos, agregación y guarda de fallos."""

from .runner import ExperimentPlan, ExperimentResult, ExperimentRunner, run_experiment
from .stats import ResultRow, StatsTable
from .guard import SchemeGuard

__all__ = [
    "ExperimentPlan",
    "ExperimentResult",
    "ExperimentRunner",
    "run_experiment",
    "ResultRow",
    "StatsTable",
    "SchemeGuard",
]
