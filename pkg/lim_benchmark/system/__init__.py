"""Escenario: configuración, geometría de enlaces y estado de solución."""

from .config import (
    AOSettings,
    SolverSettings,
    SystemConfig,
    dbm_to_watts,
    desk_scale,
    dump_config,
    linear_power,
    load_and_validate_config,
    load_config,
)
from .geometry import LinkGeometry, derive_link_geometry, draw_user_positions
from .layout import grid_positions, rigid_grid
from .state import SolutionState, init_solution, initial_layout

__all__ = [
    "AOSettings",
    "SolverSettings",
    "SystemConfig",
    "dbm_to_watts",
    "desk_scale",
    "dump_config",
    "linear_power",
    "load_and_validate_config",
    "load_config",
    "LinkGeometry",
    "derive_link_geometry",
    "draw_user_positions",
    "grid_positions",
    "rigid_grid",
    "SolutionState",
    "init_solution",
    "initial_layout",
]
