"""
Registro de esquemas: nombre -> clase, como el mapa de agentes de la CLI.
"""

from __future__ import annotations

import numpy as np

from lim_benchmark.channel.realization import ChannelRealization
from lim_benchmark.schemes.base import BaselineSpec, BaseScheme, ProposedScheme, SchemeOutcome
from lim_benchmark.schemes.baselines import (
    GeneticScheme,
    LiquidSurfaceRigidArray,
    PartialConfigurability,
    RandomScheme,
    RigidArrays,
    StaticSurfaceFluidArray,
    WithoutBeamforming,
    WithoutFluidAntennas,
    WithoutLim,
    WithoutPhaseShifts,
    ZeroForcingScheme,
)
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import LinkGeometry
from lim_benchmark.system.state import SolutionState

SCHEMES: dict[str, type[BaseScheme]] = {
    "proposed": ProposedScheme,
    "wo_bf": WithoutBeamforming,
    "wo_theta": WithoutPhaseShifts,
    "wo_fa": WithoutFluidAntennas,
    "wo_lim": WithoutLim,
    "rigid_bs_ris": RigidArrays,
    "lim_bs": LiquidSurfaceRigidArray,
    "ris_fas": StaticSurfaceFluidArray,
    "partial_fa": PartialConfigurability,
    "partial_lm": PartialConfigurability,
    "partial_both": PartialConfigurability,
    "zf": ZeroForcingScheme,
    "ga": GeneticScheme,
    "random": RandomScheme,
}


def spec_for(kind: str, partial_fraction: float = 0.5, ga_budget: int = 256) -> BaselineSpec:
    """Spec de un esquema por nombre; los parciales toman ρ de `partial_fraction`."""
    rho_fa = partial_fraction if kind in ("partial_fa", "partial_both") else 1.0
    rho_lm = partial_fraction if kind in ("partial_lm", "partial_both") else 1.0
    return BaselineSpec(kind=kind, rho_fa=rho_fa, rho_lm=rho_lm, ga_budget=ga_budget)


def get_scheme(spec: BaselineSpec) -> BaseScheme:
    return SCHEMES[spec.kind](spec)


def run_scheme(
    spec: BaselineSpec,
    cfg: SystemConfig,
    geo: LinkGeometry,
    chan: ChannelRealization,
    rng: np.random.Generator,
) -> SchemeOutcome:
    return get_scheme(spec).run(cfg, geo, chan, rng)


def run_baseline(
    spec: BaselineSpec,
    cfg: SystemConfig,
    geo: LinkGeometry,
    chan: ChannelRealization,
    rng: np.random.Generator,
) -> tuple[SolutionState, float]:
    """Ejecuta un esquema y devuelve (solución, tasa suma)."""
    outcome = run_scheme(spec, cfg, geo, chan, rng)
    return outcome.sol, outcome.sum_rate
