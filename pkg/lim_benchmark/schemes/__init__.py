"""Esquemas comparados: propuesta y referencias."""

from .base import SCHEME_KINDS, AOScheme, BaselineSpec, BaseScheme, ProposedScheme, SchemeOutcome
from .registry import SCHEMES, get_scheme, run_baseline, run_scheme, spec_for

__all__ = [
    "SCHEME_KINDS",
    "AOScheme",
    "BaselineSpec",
    "BaseScheme",
    "ProposedScheme",
    "SchemeOutcome",
    "SCHEMES",
    "get_scheme",
    "run_baseline",
    "run_scheme",
    "spec_for",
]
