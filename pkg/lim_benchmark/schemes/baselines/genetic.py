"""
Algoritmo genético de codificación real sobre (fases, p, r).

Cada candidato se evalúa con dos pasadas SCA de beamforming partiendo del
filtro adaptado. Las restricciones se imponen por reparación: proyección a
la apertura y separación de pares demasiado cercanos.
"""

from __future__ import annotations
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from lim_benchmark.channel.realization import ChannelRealization, assemble_at, effective_channel_for, sum_rate
from lim_benchmark.errors import LimBenchmarkError
from lim_benchmark.optim.alternating import safeguarded_step
from lim_benchmark.optim.beamforming import solve_beamforming_subproblem
from lim_benchmark.schemes.base import BaseScheme, SchemeOutcome
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import LinkGeometry
from lim_benchmark.system.layout import GRID_INSET, grid_positions, min_spacing_sq
from lim_benchmark.system.state import SolutionState, init_solution, matched_filter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GAConfig:
    population: int = 32
    tournament: int = 2
    elitism: int = 2
    sca_passes: int = 2
    position_sigma: float = 0.1  # en longitudes de onda
    phase_sigma: float = 2 * math.pi / 10
    repair_rounds: int = 100


@dataclass
class Individual:
    phases: np.ndarray
    p: np.ndarray
    r: np.ndarray
    fitness: float = -math.inf
    sol: SolutionState | None = None


@dataclass
class GAResult:
    sol: SolutionState
    sum_rate: float
    evaluations: int
    generations: int
    history: list[float] = field(default_factory=list)


def _clip_to_aperture(points: np.ndarray, aperture: tuple[float, float]) -> np.ndarray:
    size = np.asarray(aperture)
    inset = GRID_INSET * size
    return np.clip(points, inset, size - inset)


def repair_positions(
    points: np.ndarray, aperture: tuple[float, float], dth: float, rounds: int = 100
) -> np.ndarray:
    """
    Proyecta a la apertura y separa pares con ‖·‖² < d_th empujando ambos
    puntos en direcciones opuestas. Si no converge, vuelve a la rejilla.
    """
    pts = _clip_to_aperture(points.copy(), aperture)
    target = math.sqrt(dth) * (1.0 + 1e-3)
    n = len(pts)
    for _ in range(rounds):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                diff = pts[i] - pts[j]
                dist = float(np.hypot(*diff))
                if dist * dist >= dth:
                    continue
                direction = diff / dist if dist > 0 else np.array([1.0, 0.0])
                push = 0.5 * (target - dist) * direction
                pts[i] += push
                pts[j] -= push
                moved = True
        pts = _clip_to_aperture(pts, aperture)
        if not moved and (n < 2 or min_spacing_sq(pts) >= dth):
            return pts
    if n >= 2 and min_spacing_sq(pts) >= dth:
        return pts
    return grid_positions(n, aperture)


def evaluate_candidate(
    cfg: SystemConfig,
    geo: LinkGeometry,
    chan: ChannelRealization,
    phases: np.ndarray,
    p: np.ndarray,
    r: np.ndarray,
    passes: int,
) -> tuple[SolutionState, float]:
    """Tasa tras `passes` pasos SCA de beamforming desde el filtro adaptado."""
    moved = assemble_at(cfg, geo, p, r, chan.draw)
    theta = np.exp(1j * phases)
    sol = SolutionState(
        w=matched_filter(effective_channel_for(moved, theta), cfg.pmax), theta=theta, p=moved.p, r=moved.r
    )
    rate = sum_rate(moved, sol)
    for _ in range(passes):
        try:
            out = solve_beamforming_subproblem(cfg, moved, sol)
        except LimBenchmarkError as e:
            logger.debug("ga: evaluación interrumpida (%s)", e)
            break
        prev = sol
        sol, rate, _ = safeguarded_step(
            moved, prev, out.sol,
            lambda tau: prev.replace(w=prev.w + tau * (out.sol.w - prev.w)),
            rate, cfg.ao.accept_tol, cfg.ao.max_halvings,
        )
    return sol, rate


def ga_optimize(
    cfg: SystemConfig,
    geo: LinkGeometry,
    chan: ChannelRealization,
    budget: int,
    rng: np.random.Generator | None = None,
    ga: GAConfig | None = None,
) -> GAResult:
    """
    GA con torneo, cruce aritmético, mutación gaussiana y elitismo.

    `budget` es el número máximo de evaluaciones de aptitud; con 0 se
    devuelve la solución inicial en rejilla.
    """
    ga = ga or GAConfig()
    rng = rng or np.random.default_rng(cfg.seed)
    if budget <= 0:
        sol = init_solution(cfg, geo, chan)
        return GAResult(sol=sol, sum_rate=sum_rate(chan, sol), evaluations=0, generations=0)

    sigma = ga.position_sigma * cfg.lambda_m
    evaluations = 0

    def evaluate(ind: Individual) -> None:
        nonlocal evaluations
        ind.sol, ind.fitness = evaluate_candidate(cfg, geo, chan, ind.phases, ind.p, ind.r, ga.sca_passes)
        evaluations += 1

    def mutate(ind: Individual) -> Individual:
        return Individual(
            phases=np.mod(ind.phases + ga.phase_sigma * rng.standard_normal(ind.phases.shape), 2 * np.pi),
            p=repair_positions(ind.p + sigma * rng.standard_normal(ind.p.shape),
                               cfg.aperture_fa, cfg.dth_fa, ga.repair_rounds),
            r=repair_positions(ind.r + sigma * rng.standard_normal(ind.r.shape),
                               cfg.aperture_lm, cfg.dth_lm, ga.repair_rounds),
        )

    seed = Individual(phases=np.zeros(cfg.n_elements), p=chan.p.copy(), r=chan.r.copy())
    population = [seed]
    while len(population) < ga.population:
        child = mutate(seed)
        child.phases = 2 * np.pi * rng.random(cfg.n_elements)
        population.append(child)

    scored: list[Individual] = []
    for ind in population:
        if evaluations >= budget:
            break
        evaluate(ind)
        scored.append(ind)

    best = max(scored, key=lambda ind: ind.fitness)
    history = [best.fitness]
    generations = 0

    def tournament() -> Individual:
        picks = rng.integers(0, len(scored), size=ga.tournament)
        return max((scored[i] for i in picks), key=lambda ind: ind.fitness)

    while evaluations < budget:
        generations += 1
        ranked = sorted(scored, key=lambda ind: ind.fitness, reverse=True)
        next_gen = ranked[: ga.elitism]
        while len(next_gen) < ga.population and evaluations < budget:
            a, b = tournament(), tournament()
            mix = rng.random()
            child = mutate(Individual(
                phases=np.angle(mix * np.exp(1j * a.phases) + (1 - mix) * np.exp(1j * b.phases)),
                p=mix * a.p + (1 - mix) * b.p,
                r=mix * a.r + (1 - mix) * b.r,
            ))
            evaluate(child)
            next_gen.append(child)
        scored = next_gen
        generation_best = max(scored, key=lambda ind: ind.fitness)
        if generation_best.fitness > best.fitness:
            best = generation_best
        history.append(best.fitness)
        logger.debug("ga: generación %d, mejor %.6f (%d evaluaciones)", generations, best.fitness, evaluations)

    return GAResult(
        sol=best.sol,
        sum_rate=best.fitness,
        evaluations=evaluations,
        generations=generations,
        history=history,
    )


class GeneticScheme(BaseScheme):
    """GA genérico; el presupuesto sale de `BaselineSpec.ga_budget`."""

    def run(self, cfg, geo, chan, rng) -> SchemeOutcome:
        result = ga_optimize(cfg, geo, chan, self.spec.ga_budget, rng)
        return SchemeOutcome(
            scheme=self.name,
            sol=result.sol,
            sum_rate=result.sum_rate,
            iterations=result.generations,
        )
