"""
Subproblema de beamforming.

Variables (normalizadas): w̃_k, a_k (cota inferior de la señal), b_k (cota
superior de interferencia + ruido) y γ_k. La señal |h̃_k w̃_k|² se sustituye
por su linealización en w̃_t, que la acota por debajo.
"""

from __future__ import annotations
import logging
import math

import numpy as np

from lim_benchmark.channel.realization import ChannelRealization
from lim_benchmark.optim.lifting import abs2_quad, lift, product_rows, unlift
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

STAGE = "beamforming"


def _start_point(state: SurrogateState) -> np.ndarray:
    """w̃_t reducido lo justo para que la potencia quede estrictamente dentro."""
    power = float(np.sum(np.abs(state.w_t) ** 2))
    if power <= 1.0 - 1e-6:
        return state.w_t.copy()
    return state.w_t * math.sqrt((1.0 - 1e-6) / power)


def build_beamforming_program(state: SurrogateState) -> tuple[ProgramBuilder, list[slice]]:
    h = state.h_eff  # (K, N) normalizado
    K, N = h.shape
    w0 = _start_point(state)
    gains0 = np.abs(h @ w0.T) ** 2
    s_t = np.diag(state.mu_kj)
    lin0 = 2.0 * np.real(np.conj(s_t) * np.diag(h @ w0.T)) - np.abs(s_t) ** 2
    interf0 = gains0.sum(axis=1) - np.diag(gains0)

    builder = ProgramBuilder()
    blocks = [builder.add_block(f"w{k}", lift(w0[k])) for k in range(K)]
    aux = declare_auxiliary(builder, state, slack_below(lin0), slack_above(interf0 + 1.0))
    n = builder.n_vars

    # Σ‖w_k‖² <= 1
    Q = np.zeros((n, n))
    for sl in blocks:
        Q[sl, sl] = np.eye(2 * N)
    builder.add_quad(Q, np.zeros(n), 1.0, label="power")

    for k in range(K):
        # Σ_{j≠k} |h̃_k w̃_j|² + 1 <= b_k
        Q = np.zeros((n, n))
        Qk = abs2_quad(h[k])
        for j, sl in enumerate(blocks):
            if j != k:
                Q[sl, sl] = Qk
        q = np.zeros(n)
        q[aux.b.start + k] = -1.0
        builder.add_quad(Q, q, -1.0, label=f"interference[{k}]")

        # a_k <= 2 Re{conj(s_t) h̃_k w̃_k} − |s_t|²
        r_re, _ = product_rows(np.conj(s_t[k]) * h[k])
        row = builder.row()
        row[aux.a.start + k] = 1.0
        row[blocks[k]] = -2.0 * r_re
        builder.add_affine(row, -abs(s_t[k]) ** 2, label=f"signal[{k}]")

    add_rate_terms(builder, state, aux)
    return builder, blocks


def solve_beamforming_subproblem(
    cfg: SystemConfig,
    chan: ChannelRealization,
    sol: SolutionState,
    state: SurrogateState | None = None,
    settings: SolverSettings | None = None,
) -> SubproblemOutcome:
    """
    Un paso SCA sobre los beamformers con θ y posiciones fijos.

    Raises:
        SubproblemError: el solver terminó con fallo numérico.
    """
    state = state or SurrogateState.from_solution(chan, sol)
    builder, blocks = build_beamforming_program(state)
    result = solve_concave_program(builder.build(), settings or cfg.solver)
    ensure_solved(STAGE, result)
    x = builder.unscale(result.x_star)
    parts = builder.split(x)
    w = np.array([unlift(x[sl]) for sl in blocks]) * math.sqrt(cfg.pmax)
    logger.debug("beamforming: objetivo %.6f (%s, %d Newton)", result.objective, result.status, result.newton_iters)
    return SubproblemOutcome(
        stage=STAGE,
        sol=sol.replace(w=w),
        aux={"a": parts["a"], "b": parts["b"], "gamma": parts["gamma"]},
        objective=result.objective,
        status=result.status,
    )
