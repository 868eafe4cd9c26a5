"""
Subproblema de posiciones de antenas (FAS) y elementos (LIM).

Las ganancias g_kj se linealizan con los gradientes analíticos y las
separaciones mínimas con su expansión de primer orden, que es conservadora.
Como la linealización de g_kj solo vale localmente, el paso se limita con
una región de confianza en norma infinito y se acepta únicamente si la tasa
verdadera, con el canal reensamblado, no empeora.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass

import numpy as np

from lim_benchmark.channel.gradients import (
    EffectiveChannelJacobian,
    effective_channel_jacobian,
    gains_gradient,
)
from lim_benchmark.channel.realization import ChannelRealization, assemble_at, sum_rate
from lim_benchmark.errors import SingularDirectionError, SylvesterError
from lim_benchmark.optim.outcome import SubproblemOutcome, ensure_solved
from lim_benchmark.optim.surrogates import (
    SurrogateState,
    add_rate_terms,
    declare_auxiliary,
    slack_above,
    slack_below,
)
from lim_benchmark.solver.barrier import solve_concave_program
from lim_benchmark.solver.program import ProgramBuilder
from lim_benchmark.system.config import SolverSettings, SystemConfig
from lim_benchmark.system.state import SolutionState

logger = logging.getLogger(__name__)

STAGE = "position"

# Holgura mínima de una fila de separación que ya está justo en el umbral;
# debe superar solver.feas_margin.
SPACING_FLOOR = 2e-9


@dataclass
class PositionOutcome(SubproblemOutcome):
    chan: ChannelRealization | None = None
    trust_radius: float = 0.0
    accepted: bool = False
    halvings: int = 0


def _box(points: np.ndarray, idx: np.ndarray, aperture: tuple[float, float], radius: float):
    """Cotas de Δ: región de confianza ∩ apertura, con el 0 estrictamente dentro."""
    pts = points[idx]
    upper_edge = np.asarray(aperture)[None, :]
    lo = np.maximum(-radius, -pts)
    hi = np.minimum(radius, upper_edge - pts)
    floor = SPACING_FLOOR * radius
    lo = np.minimum(lo, -floor)
    hi = np.maximum(hi, floor)
    return lo.ravel(), hi.ravel()


def _spacing_rows(builder, sl, points, movable, dth, label):
    """−2Δ_tᵀ(Δ_n − Δ_n') <= ‖Δ_t‖² − d_th para pares con algún punto móvil."""
    position = {int(i): pos for pos, i in enumerate(movable)}
    n = len(points)
    for i in range(n):
        for j in range(i + 1, n):
            if i not in position and j not in position:
                continue
            delta = points[i] - points[j]
            row = builder.row()
            if i in position:
                base = sl.start + 2 * position[i]
                row[base : base + 2] += -2.0 * delta
            if j in position:
                base = sl.start + 2 * position[j]
                row[base : base + 2] += 2.0 * delta
            rhs = max(float(delta @ delta) - dth, SPACING_FLOOR)
            builder.add_affine(row, rhs, label=f"{label}[{i},{j}]")


def build_position_program(
    cfg: SystemConfig,
    state: SurrogateState,
    gp: np.ndarray,
    gr: np.ndarray,
    movable_p: np.ndarray,
    movable_r: np.ndarray,
    radius: float,
) -> tuple[ProgramBuilder, slice | None, slice | None]:
    """gp, gr: gradientes normalizados [k, j, índice, eje]."""
    K = state.n_users
    gains = np.abs(state.mu_kj) ** 2
    f_sig0 = np.diag(gains)
    f_int0 = gains.sum(axis=1) - f_sig0

    builder = ProgramBuilder()
    sp = sr = None
    if movable_p.size:
        lo, hi = _box(state.p_t, movable_p, cfg.aperture_fa, radius)
        sp = builder.add_block("dp", np.zeros(2 * movable_p.size), scale=radius, lower=lo, upper=hi)
    if movable_r.size:
        lo, hi = _box(state.r_t, movable_r, cfg.aperture_lm, radius)
        sr = builder.add_block("dr", np.zeros(2 * movable_r.size), scale=radius, lower=lo, upper=hi)
    aux = declare_auxiliary(builder, state, slack_below(f_sig0), slack_above(f_int0 + 1.0))
    builder.set_bounds("b", lower=1.0)

    def grad_row(k: int, j: int) -> np.ndarray:
        row = builder.row()
        if sp is not None:
            row[sp] = gp[k, j][movable_p].ravel()
        if sr is not None:
            row[sr] = gr[k, j][movable_r].ravel()
        return row

    for k in range(K):
        row = -grad_row(k, k)
        row[aux.a.start + k] = 1.0
        builder.add_affine(row, f_sig0[k], label=f"signal[{k}]")

        row = builder.row()
        for j in range(K):
            if j != k:
                row += grad_row(k, j)
        row[aux.b.start + k] = -1.0
        builder.add_affine(row, -f_int0[k] - 1.0, label=f"interference[{k}]")

    if sp is not None:
        _spacing_rows(builder, sp, state.p_t, movable_p, cfg.dth_fa, "spacing_fa")
    if sr is not None:
        _spacing_rows(builder, sr, state.r_t, movable_r, cfg.dth_lm, "spacing_lm")

    add_rate_terms(builder, state, aux)
    return builder, sp, sr


def normalized_gain_gradients(
    chan: ChannelRealization, sol: SolutionState, state: SurrogateState
) -> tuple[np.ndarray, np.ndarray]:
    jac = effective_channel_jacobian(chan, sol.theta)
    scaled = EffectiveChannelJacobian(dp=jac.dp * state.scale, dr=jac.dr * state.scale)
    return gains_gradient(state.h_eff, scaled, state.w_t)


def solve_position_subproblem(
    cfg: SystemConfig,
    chan: ChannelRealization,
    sol: SolutionState,
    state: SurrogateState | None = None,
    settings: SolverSettings | None = None,
    trust_radius: float | None = None,
    movable_p: np.ndarray | None = None,
    movable_r: np.ndarray | None = None,
) -> PositionOutcome:
    """
    Paso de posiciones con región de confianza y test de aceptación.

    Si tras `max_halvings` reducciones no hay paso aceptable, se conservan
    las posiciones anteriores (`rejected`); un paso aceptado tras alguna
    reducción lleva `halved`. Un gradiente singular también
    conserva las posiciones (`singular`).
    """
    ao = cfg.ao
    settings = settings or cfg.solver
    state = state or SurrogateState.from_solution(chan, sol)
    radius = trust_radius if trust_radius is not None else ao.trust_region_init * cfg.lambda_m
    max_radius = ao.trust_region_max * cfg.lambda_m
    movable_p = np.arange(cfg.n_antennas) if movable_p is None else np.asarray(movable_p, dtype=int)
    movable_r = np.arange(cfg.n_elements) if movable_r is None else np.asarray(movable_r, dtype=int)
    prev_rate = sum_rate(chan, sol)

    def keep(flags: set[str], halvings: int = 0, new_radius: float = radius) -> PositionOutcome:
        return PositionOutcome(
            stage=STAGE, sol=sol, aux={}, objective=float("nan"), status="kept",
            flags=flags, chan=chan, trust_radius=new_radius, accepted=False, halvings=halvings,
        )

    if movable_p.size == 0 and movable_r.size == 0:
        return keep(set())
    try:
        gp, gr = normalized_gain_gradients(chan, sol, state)
    except (SingularDirectionError, SylvesterError) as e:
        logger.info("posiciones: gradiente singular (%s), se conservan", e)
        return keep({"singular"})
    if not np.any(gp) and not np.any(gr):
        return keep(set())

    for halving in range(ao.max_halvings + 1):
        builder, sp, sr = build_position_program(cfg, state, gp, gr, movable_p, movable_r, radius)
        result = solve_concave_program(builder.build(), settings)
        ensure_solved(STAGE, result)
        x = builder.unscale(result.x_star)
        p = sol.p.copy()
        r = sol.r.copy()
        if sp is not None:
            p[movable_p] += x[sp].reshape(-1, 2)
        if sr is not None:
            r[movable_r] += x[sr].reshape(-1, 2)
        candidate = sol.replace(p=p, r=r)
        new_chan = assemble_at(cfg, chan.geo, p, r, chan.draw)
        rate = sum_rate(new_chan, candidate)
        if rate >= prev_rate - ao.accept_tol:
            parts = builder.split(x)
            return PositionOutcome(
                stage=STAGE,
                sol=candidate,
                aux={"a": parts["a"], "b": parts["b"], "gamma": parts["gamma"]},
                objective=result.objective,
                status=result.status,
                flags={"halved"} if halving else set(),
                chan=new_chan,
                trust_radius=min(radius * ao.trust_region_growth, max_radius),
                accepted=True,
                halvings=halving,
            )
        logger.info(
            "posiciones: paso rechazado (%.6f < %.6f), región de confianza %.3e -> %.3e",
            rate, prev_rate, radius, radius / 2,
        )
        radius /= 2.0

    return keep({"rejected"}, halvings=ao.max_halvings + 1, new_radius=radius)
