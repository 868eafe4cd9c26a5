"""Esquemas de referencia."""

from .ablations import (
    LiquidSurfaceRigidArray,
    PartialConfigurability,
    RandomScheme,
    RigidArrays,
    StaticSurfaceFluidArray,
    WithoutBeamforming,
    WithoutFluidAntennas,
    WithoutLim,
    WithoutPhaseShifts,
)
from .genetic import GAConfig, GAResult, GeneticScheme, ga_optimize
from .zero_forcing import ZeroForcingScheme, regularized_zf, zf_beamforming

__all__ = [
    "LiquidSurfaceRigidArray",
    "PartialConfigurability",
    "RandomScheme",
    "RigidArrays",
    "StaticSurfaceFluidArray",
    "WithoutBeamforming",
    "WithoutFluidAntennas",
    "WithoutLim",
    "WithoutPhaseShifts",
    "GAConfig",
    "GAResult",
    "ga_optimize",
    "GeneticScheme",
    "ZeroForcingScheme",
    "regularized_zf",
    "zf_beamforming",
]
