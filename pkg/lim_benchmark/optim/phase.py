"""
Subproblema de fases con el procedimiento convexo-cóncavo penalizado.

La restricción |θ_m| = 1 se relaja en |θ_m|² <= 1 + c_m (convexa) y en la
linealización de |θ_m|² >= 1 − c_m alrededor de θ_t; Σ c_m se penaliza con ξ.
"""

from __future__ import annotations
import logging

import numpy as np

from lim_benchmark.channel.realization import ChannelRealization
from lim_benchmark.optim.lifting import lift, product_rows, unlift
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

STAGE = "phase"
FINAL_STEPS = 5  # pasos finales con ξ = cfg.xi


def surrogate_gains(state: SurrogateState) -> tuple[np.ndarray, np.ndarray]:
    """
    f̃_kj(θ) = lin_kj · lift(θ) + const_kj, linealización de |s_kj + θᵀv_kj|² en θ_t.

    Devuelve (lin (K, K, 2M), const (K, K)).
    """
    K = state.n_users
    M = state.theta_t.size
    lin = np.zeros((K, K, 2 * M))
    const = np.zeros((K, K))
    for k in range(K):
        for j in range(K):
            mu = state.mu_kj[k, j]
            r_re, _ = product_rows(np.conj(mu) * state.v_kj[k, j])
            lin[k, j] = 2.0 * r_re
            const[k, j] = 2.0 * np.real(np.conj(mu) * state.s_kj[k, j]) - abs(mu) ** 2
    return lin, const


def build_phase_program(state: SurrogateState, xi: float) -> tuple[ProgramBuilder, slice, slice]:
    K = state.n_users
    theta_t = state.theta_t
    M = theta_t.size
    lin, const = surrogate_gains(state)

    f_sig0 = np.abs(np.diag(state.mu_kj)) ** 2
    f_int0 = np.array([sum(abs(state.mu_kj[k, j]) ** 2 for j in range(K) if j != k) for k in range(K)])
    c0 = np.abs(np.abs(theta_t) ** 2 - 1.0) + 1e-6

    builder = ProgramBuilder()
    sth = builder.add_block("theta", lift(theta_t))
    sc = builder.add_block("c", c0, lower=0.0)
    aux = declare_auxiliary(
        builder, state, slack_below(f_sig0), slack_above(np.maximum(f_int0, 0.0) + 1.0)
    )
    # b_k >= 1 aunque la suma de surrogates afines sea negativa
    builder.set_bounds("b", lower=1.0)

    for k in range(K):
        row = builder.row()
        row[aux.a.start + k] = 1.0
        row[sth] = -lin[k, k]
        builder.add_affine(row, const[k, k], label=f"signal[{k}]")

        row = builder.row()
        rhs = -1.0
        for j in range(K):
            if j != k:
                row[sth] += lin[k, j]
                rhs -= const[k, j]
        row[aux.b.start + k] = -1.0
        builder.add_affine(row, rhs, label=f"interference[{k}]")

    n = builder.n_vars
    for m in range(M):
        ir, ii, ic = sth.start + m, sth.start + M + m, sc.start + m
        # |θ_m|² − c_m <= 1
        Q = np.zeros((n, n))
        Q[ir, ir] = Q[ii, ii] = 1.0
        q = np.zeros(n)
        q[ic] = -1.0
        builder.add_quad(Q, q, 1.0, label=f"modulus_upper[{m}]")
        # −2 Re{conj(θ_t) θ_m} − c_m <= −1 − |θ_t|²
        row = builder.row()
        row[ir] = -2.0 * theta_t[m].real
        row[ii] = -2.0 * theta_t[m].imag
        row[ic] = -1.0
        builder.add_affine(row, -1.0 - abs(theta_t[m]) ** 2, label=f"modulus_lower[{m}]")
        builder.add_linear_objective(ic, -xi)

    add_rate_terms(builder, state, aux)
    return builder, sth, sc

def _clamped_users(state: SurrogateState, x_theta: np.ndarray) -> list[int]:
    lin, const = surrogate_gains(state)
    K = state.n_users
    return [
        k for k in range(K)
        if sum(lin[k, j] @ x_theta + const[k, j] for j in range(K) if j != k) < 0.0
    ]


def pccp_step(
    state: SurrogateState, xi: float, settings: SolverSettings
) -> tuple[np.ndarray, dict[str, np.ndarray], float, str, set[str]]:
    """Un programa PCCP linealizado en state.theta_t: (θ, auxiliares, objetivo, estado, flags)."""
    builder, sth, sc = build_phase_program(state, xi)
    result = solve_concave_program(builder.build(), settings)
    ensure_solved(STAGE, result)
    x = builder.unscale(result.x_star)
    parts = builder.split(x)

    flags = set()
    clamped = _clamped_users(state, x[sth])
    if clamped:
        flags.add("clamped")
        logger.info("fase: interferencia surrogada negativa para el usuario %d, b acotado a 1", clamped[0])

    aux = {"a": parts["a"], "b": parts["b"], "gamma": parts["gamma"], "c": x[sc]}
    return unlift(x[sth]), aux, result.objective, result.status, flags


def solve_phase_subproblem(
    cfg: SystemConfig,
    chan: ChannelRealization,
    sol: SolutionState,
    state: SurrogateState | None = None,
    settings: SolverSettings | None = None,
) -> SubproblemOutcome:
    """
    PCCP sobre θ con w y posiciones fijos, iterado hasta un punto estacionario.

    ξ arranca en `ao.pccp_xi_init` y crece un factor `ao.pccp_growth` por paso
    hasta `cfg.xi`; los últimos FINAL_STEPS pasos van siempre con `cfg.xi`.
    Se para cuando ξ = cfg.xi y max|Δθ| <= `ao.pccp_tol`.

    Marca `clamped` cuando la cota b_k >= 1 es la activa para algún usuario
    en alguno de los pasos.
    """
    ao = cfg.ao
    settings = settings or cfg.solver
    state = state or SurrogateState.from_solution(chan, sol)
    xi = min(ao.pccp_xi_init, cfg.xi)
    theta = state.theta_t
    flags: set[str] = set()

    for inner in range(ao.pccp_max_inner):
        if ao.pccp_max_inner - inner <= FINAL_STEPS:
            xi = cfg.xi
        new_theta, aux, objective, status, step_flags = pccp_step(state, xi, settings)
        flags |= step_flags
        step = float(np.max(np.abs(new_theta - theta)))
        theta = new_theta
        logger.debug("fase: paso %d, ξ=%.3g, max|Δθ|=%.3g, Σc=%.3g", inner, xi, step, float(np.sum(aux["c"])))
        if xi >= cfg.xi and step <= ao.pccp_tol:
            break
        xi = min(xi * ao.pccp_growth, cfg.xi)
        state = SurrogateState.from_solution(chan, sol.replace(theta=theta))
    else:
        logger.info("fase: PCCP sin converger tras %d pasos (último max|Δθ|=%.3g)", ao.pccp_max_inner, step)

    return SubproblemOutcome(
        stage=STAGE,
        sol=sol.replace(theta=theta),
        aux=aux,
        objective=objective,
        status=status,
        penalty=float(np.sum(aux["c"])),
        flags=flags,
    )
