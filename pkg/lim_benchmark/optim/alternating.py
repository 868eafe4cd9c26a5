"""
Optimización alternada: beamforming -> fases -> posiciones.

Cada bloque se acepta solo si la tasa suma verdadera no baja; un candidato
de beamforming o de fases que empeora se recorta sobre el segmento desde el
valor anterior (mitades sucesivas) y, si no basta, se descarta.
"""

from __future__ import annotations
import logging
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from lim_benchmark.channel.realization import ChannelRealization, assemble_at, sum_rate
from lim_benchmark.errors import LimBenchmarkError
from lim_benchmark.optim.beamforming import solve_beamforming_subproblem
from lim_benchmark.optim.outcome import SubproblemOutcome
from lim_benchmark.optim.phase import solve_phase_subproblem
from lim_benchmark.optim.position import solve_position_subproblem
from lim_benchmark.optim.surrogates import SurrogateState
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import LinkGeometry
from lim_benchmark.system.state import SolutionState

logger = logging.getLogger(__name__)


@dataclass
class TraceRecord:
    iteration: int
    stage: str  # init | beamforming | phase | position | final
    sum_rate: float
    objective: float = float("nan")
    penalty: float = 0.0
    unit_modulus_violation: float = 0.0
    violation: float = 0.0
    ms: float = 0.0
    flags: str = ""

    def to_dict(self) -> dict:
        return {
            "iter": self.iteration,
            "stage": self.stage,
            "sum_rate": self.sum_rate,
            "objective": self.objective,
            "penalty": self.penalty,
            "unit_modulus_violation": self.unit_modulus_violation,
            "violation": self.violation,
            "ms": self.ms,
            "flags": self.flags,
        }


@dataclass
class AOTrace:
    records: list[TraceRecord] = field(default_factory=list)
    failed: bool = False
    failure: str = ""

    def add(self, record: TraceRecord) -> None:
        self.records.append(record)

    @property
    def iterations(self) -> int:
        return max((r.iteration for r in self.records), default=0)

    @property
    def final_rate(self) -> float:
        return self.records[-1].sum_rate if self.records else float("nan")

    def rates(self, stage: str | None = None) -> list[float]:
        return [r.sum_rate for r in self.records if stage is None or r.stage == stage]

    def accepted_rates(self) -> list[float]:
        """Tasas tras cada subproblema, antes de la proyección final."""
        return [r.sum_rate for r in self.records if r.stage != "final"]


@dataclass(frozen=True)
class AOBlocks:
    """
    Qué bloques se optimizan. `movable_antennas` / `movable_elements` son
    índices; None significa todos.
    """
    beamforming: bool = True
    phases: bool = True
    movable_antennas: tuple[int, ...] | None = None
    movable_elements: tuple[int, ...] | None = None

    def antennas(self, cfg: SystemConfig) -> np.ndarray:
        if self.movable_antennas is None:
            return np.arange(cfg.n_antennas)
        return np.array(sorted(self.movable_antennas), dtype=int)

    def elements(self, cfg: SystemConfig) -> np.ndarray:
        if self.movable_elements is None:
            return np.arange(cfg.n_elements)
        return np.array(sorted(self.movable_elements), dtype=int)

    def positions(self, cfg: SystemConfig) -> bool:
        return bool(self.antennas(cfg).size or self.elements(cfg).size)


def safeguarded_step(
    chan: ChannelRealization,
    previous: SolutionState,
    candidate: SolutionState,
    blend: Callable[[float], SolutionState],
    prev_rate: float,
    accept_tol: float,
    max_halvings: int,
) -> tuple[SolutionState, float, bool]:
    """
    Acepta el candidato o el primer punto del segmento previous -> candidate
    (τ = 1, 1/2, 1/4, ...) que no empeore la tasa. Devuelve (sol, tasa, recortado).
    """
    rate = sum_rate(chan, candidate)
    if rate >= prev_rate - accept_tol:
        return candidate, rate, False
    tau = 1.0
    for _ in range(max_halvings):
        tau /= 2.0
        trial = blend(tau)
        rate = sum_rate(chan, trial)
        if rate >= prev_rate - accept_tol:
            return trial, rate, True
    return previous, prev_rate, True


def cut_flags(cut: bool, kept: SolutionState, previous: SolutionState) -> set[str]:
    """`halved` si se aceptó un punto recortado, `rejected` si se conservó el anterior."""
    if not cut:
        return set()
    return {"rejected"} if kept is previous else {"halved"}


def blend_phases(previous: np.ndarray, candidate: np.ndarray, tau: float) -> np.ndarray:
    """
    Punto del segmento previous -> candidate reescalado al módulo interpolado,
    para que el recorte no aleje θ de la circunferencia unidad.
    """
    mix = previous + tau * (candidate - previous)
    target = (1.0 - tau) * np.abs(previous) + tau * np.abs(candidate)
    mag = np.abs(mix)
    return np.where(mag > 0, mix / np.where(mag > 0, mag, 1.0) * target, mix)


def _record(cfg, chan, sol, iteration, stage, start, outcome: SubproblemOutcome | None = None,
            flags: set[str] | None = None) -> TraceRecord:
    report = sol.feasibility_report(cfg)
    return TraceRecord(
        iteration=iteration,
        stage=stage,
        sum_rate=sum_rate(chan, sol),
        objective=outcome.objective if outcome else float("nan"),
        penalty=outcome.penalty if outcome else 0.0,
        unit_modulus_violation=report.unit_modulus_violation,
        violation=max(report.worst(), 0.0),
        ms=(time.perf_counter() - start) * 1000.0,
        flags=",".join(sorted(flags or set())),
    )


def alternating_optimize(
    cfg: SystemConfig,
    geo: LinkGeometry,
    chan: ChannelRealization,
    sol0: SolutionState,
    blocks: AOBlocks | None = None,
) -> tuple[SolutionState, AOTrace]:
    """
    Bucle alternado hasta `cfg.i_outer` iteraciones o hasta que el cambio
    relativo de la tasa sea <= rel_tol durante `patience` iteraciones seguidas.

    Al terminar, θ se proyecta a módulo unidad (si las fases se optimizan) y
    la tasa final se evalúa con la θ proyectada.
    """
    blocks = blocks or AOBlocks()
    ao = cfg.ao
    trace = AOTrace()
    movable_p = blocks.antennas(cfg)
    movable_r = blocks.elements(cfg)
    optimize_positions = blocks.positions(cfg)

    chan = assemble_at(cfg, geo, sol0.p, sol0.r, chan.draw)
    sol = sol0
    rate = sum_rate(chan, sol)
    trace.add(_record(cfg, chan, sol, 0, "init", time.perf_counter()))
    radius = ao.trust_region_init * cfg.lambda_m
    stall = 0

    for it in range(1, cfg.i_outer + 1):
        outer_start_rate = rate
        try:
            if blocks.beamforming:
                start = time.perf_counter()
                out = solve_beamforming_subproblem(cfg, chan, sol, SurrogateState.from_solution(chan, sol))
                prev = sol
                sol, rate, cut = safeguarded_step(
                    chan, prev, out.sol,
                    lambda tau: prev.replace(w=prev.w + tau * (out.sol.w - prev.w)),
                    rate, ao.accept_tol, ao.max_halvings,
                )
                trace.add(_record(cfg, chan, sol, it, "beamforming", start, out,
                                  out.flags | cut_flags(cut, sol, prev)))

            if blocks.phases:
                start = time.perf_counter()
                out = solve_phase_subproblem(cfg, chan, sol, SurrogateState.from_solution(chan, sol))
                prev = sol
                sol, rate, cut = safeguarded_step(
                    chan, prev, out.sol,
                    lambda tau: prev.replace(theta=blend_phases(prev.theta, out.sol.theta, tau)),
                    rate, ao.accept_tol, ao.max_halvings,
                )
                trace.add(_record(cfg, chan, sol, it, "phase", start, out,
                                  out.flags | cut_flags(cut, sol, prev)))

            if optimize_positions:
                start = time.perf_counter()
                out = solve_position_subproblem(
                    cfg, chan, sol, SurrogateState.from_solution(chan, sol),
                    trust_radius=radius, movable_p=movable_p, movable_r=movable_r,
                )
                radius = out.trust_radius
                sol, chan = out.sol, out.chan
                rate = sum_rate(chan, sol)
                trace.add(_record(cfg, chan, sol, it, "position", start, out, out.flags))
        except LimBenchmarkError as e:
            logger.warning("iteración %d: fallo de subproblema (%s); se devuelve el mejor punto", it, e)
            trace.failed = True
            trace.failure = str(e)
            trace.add(_record(cfg, chan, sol, it, "failed", time.perf_counter(), flags={"failed"}))
            break

        change = abs(rate - outer_start_rate) / max(abs(outer_start_rate), 1e-12)
        stall = stall + 1 if change <= ao.rel_tol else 0
        if stall >= ao.patience:
            logger.debug("convergencia en la iteración %d (cambio relativo %.2e)", it, change)
            break

    start = time.perf_counter()
    if blocks.phases:
        sol = sol.project_unit_modulus()
    trace.add(_record(cfg, chan, sol, trace.iterations, "final", start))
    return sol, trace
