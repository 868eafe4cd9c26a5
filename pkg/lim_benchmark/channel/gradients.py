"""
Gradientes del canal efectivo respecto a las posiciones de antenas y elementos.

Cadena completa:
    ∂a (vectores de apuntamiento) -> ∂R (J1) -> ∂R^{1/2} (Sylvester)
    -> ∂h_k^eff (regla del producto sobre la descomposición c1..c5)
    -> ∂g_kj = 2 Re{conj(s_kj) · ∂h_k^eff w_j}

Incluye un oráculo de diferencias finitas que reensambla el canal con el
mismo sorteo de pequeña escala.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import j1

from lim_benchmark.channel.correlation import pairwise_distances
from lim_benchmark.channel.realization import (
    ChannelRealization,
    SmallScaleDraw,
    assemble_at,
    effective_channel,
)
from lim_benchmark.channel.steering import steering_phase_rate, steering_vector
from lim_benchmark.errors import SingularDirectionError, SylvesterError
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import LinkGeometry
from lim_benchmark.system.state import SolutionState

logger = logging.getLogger(__name__)

EPS_SYLV = 1e-8
# Distancia por debajo de la cual la dirección p_n − p_j no está definida.
EPS_COINCIDENT = 1e-12


@dataclass(frozen=True)
class PositionGradient:
    """Gradiente real de un escalar respecto a cada p_n (N, 2) y r_m (M, 2)."""
    d_p: np.ndarray
    d_r: np.ndarray
    target_id: tuple = ()

    def flat(self) -> np.ndarray:
        return np.concatenate([self.d_p.ravel(), self.d_r.ravel()])


@dataclass(frozen=True)
class SylvesterSolve:
    X: np.ndarray
    residual: float


def grad_steering(
    positions: np.ndarray, azimuth: float, elevation: float, lambda_m: float, index: int
) -> np.ndarray:
    """
    (∂/∂x, ∂/∂y) de la entrada `index` del vector de apuntamiento,
    respecto a la posición de ese mismo punto. Las demás entradas no dependen de él.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    a_n = steering_vector(positions[index : index + 1], azimuth, elevation, lambda_m)[0]
    return steering_phase_rate(azimuth, elevation, lambda_m) * a_n


def grad_correlation(
    positions: np.ndarray, lambda_m: float, n_index: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    (∂R/∂x_n, ∂R/∂y_n) del kernel de Jakes.

    Solo la fila y la columna n son no nulas:
        ∂R_nj = ∂R_jn = −(2π/λ) J1(2π d_nj/λ) (p_n − p_j)/d_nj.

    Raises:
        SingularDirectionError: p_n coincide con otro punto.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(positions)
    out = (np.zeros((n, n)), np.zeros((n, n)))
    if n < 2:
        return out
    d = pairwise_distances(positions)[n_index]
    others = np.arange(n) != n_index
    if np.any(d[others] < EPS_COINCIDENT):
        raise SingularDirectionError(f"el punto {n_index} coincide con otro; dirección indefinida")
    k = 2 * np.pi / lambda_m
    safe_d = np.where(others, d, 1.0)
    coef = np.where(others, -k * j1(k * d) / safe_d, 0.0)
    delta = positions[n_index] - positions
    for axis in range(2):
        row = coef * delta[:, axis]
        out[axis][n_index, :] = row
        out[axis][:, n_index] = row
    return out


def _eig_of_sqrt(sqrt_R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s, U = np.linalg.eigh(sqrt_R)
    return U, np.clip(s, 0.0, None)


def sylvester_sqrt_grad(
    sqrt_R: np.ndarray,
    dR: np.ndarray,
    eig: tuple[np.ndarray, np.ndarray] | None = None,
) -> SylvesterSolve:
    """
    Resuelve R^{1/2} X + X R^{1/2} = ∂R en la base propia:
    X̃_ij = (Uᵀ ∂R U)_ij / (√λ_i + √λ_j).

    `eig` opcional: (U, λ) de R (no de R^{1/2}) ya calculados.

    Raises:
        SylvesterError: √λ_i + √λ_j < 1e-8.
    """
    if eig is None:
        U, s = _eig_of_sqrt(sqrt_R)
    else:
        U, s = eig[0], np.sqrt(np.clip(eig[1], 0.0, None))
    denom = s[:, None] + s[None, :]
    if denom.size and denom.min() < EPS_SYLV:
        raise SylvesterError(
            f"sistema de Sylvester casi singular (√λi+√λj = {denom.min():.3e})"
        )
    X = U @ ((U.T @ dR @ U) / denom) @ U.T
    residual = float(np.linalg.norm(sqrt_R @ X + X @ sqrt_R - dR))
    return SylvesterSolve(X=X, residual=residual)


def sylvester_kronecker(sqrt_R: np.ndarray, dR: np.ndarray) -> np.ndarray:
    """vec(X) = (I ⊗ R^{1/2} + (R^{1/2})ᵀ ⊗ I)^{-1} vec(∂R), vec por columnas."""
    n = sqrt_R.shape[0]
    eye = np.eye(n)
    system = np.kron(eye, sqrt_R) + np.kron(sqrt_R.T, eye)
    x = np.linalg.solve(system, dR.reshape(-1, order="F"))
    return x.reshape((n, n), order="F")


@dataclass(frozen=True)
class EffectiveChannelJacobian:
    """
    dp[k, n, axis, :] = ∂h_k^eff/∂p_{n,axis}  (K, N, 2, N)
    dr[k, m, axis, :] = ∂h_k^eff/∂r_{m,axis}  (K, M, 2, N)
    """
    dp: np.ndarray
    dr: np.ndarray


def _sqrt_derivatives(
    positions: np.ndarray, sqrt_R: np.ndarray, eig: tuple, lambda_m: float, correlated: bool
) -> np.ndarray:
    """∂R^{1/2}/∂(coordenada) para cada punto y eje: (n, 2, n, n)."""
    n = len(positions)
    out = np.zeros((n, 2, n, n))
    if not correlated or n < 2:
        return out
    for idx in range(n):
        dRx, dRy = grad_correlation(positions, lambda_m, idx)
        out[idx, 0] = sylvester_sqrt_grad(sqrt_R, dRx, eig).X
        out[idx, 1] = sylvester_sqrt_grad(sqrt_R, dRy, eig).X
    return out


def effective_channel_jacobian(chan: ChannelRealization, theta: np.ndarray) -> EffectiveChannelJacobian:
    """
    Derivadas de h_k^eff respecto a todas las coordenadas de una vez.

    Las resoluciones de Sylvester se comparten entre usuarios.
    """
    geo, lam = chan.geo, chan.cfg.lambda_m
    sc = chan.scaling
    c1, c2, c3, c4, c5 = (v[:, None] for v in (sc.c1, sc.c2, sc.c3, sc.c4, sc.c5))
    K, N = chan.h.shape
    M = chan.g.shape[1]
    theta = np.asarray(theta)

    gl = np.conj(chan.g_los) * theta  # (K, M)
    gn = np.conj(chan.g_nlos) * theta

    dS_fa = _sqrt_derivatives(chan.p, chan.corr.sqrt_R, chan.corr.eig["fa"], lam, chan.corr.correlated)
    # R_t = R_r: una sola familia de derivadas sirve para g_N y H_N
    dS_lm = _sqrt_derivatives(chan.r, chan.corr.sqrt_R_r, chan.corr.eig["lm_r"], lam, chan.corr.correlated)

    # Antenas del FAS
    rate_fa = steering_phase_rate(*geo.fas_aod, lam)
    rate_user = np.array([steering_phase_rate(*ang, lam) for ang in geo.fas_to_user_aod_k])  # (K, 2)
    Sr_Hbar = chan.corr.sqrt_R_r @ chan.draw.Hbar
    dp = np.zeros((K, N, 2, N), dtype=complex)
    for n in range(N):
        for axis in range(2):
            dS = dS_fa[n, axis]
            # ∂h_L^H: solo la entrada n
            dhl = np.zeros((K, N), dtype=complex)
            dhl[:, n] = np.conj(rate_user[:, axis] * chan.h_los[:, n])
            dhn = np.conj(chan.draw.hbar @ dS)
            # ∂H_L = a_r ∂(a_FA)^H, solo la columna n
            dHl = np.zeros((M, N), dtype=complex)
            dHl[:, n] = chan.a_r * np.conj(rate_fa[axis] * chan.a_fa[n])
            dHn = Sr_Hbar @ dS
            dp[:, n, axis, :] = (
                c1 * dhl
                + c2 * (gl @ dHl)
                + c3 * dhn
                + c4 * (gn @ dHn)
                + c5 * (gl @ dHn + gn @ dHl)
            )

    # Elementos de la LIM
    rate_r = steering_phase_rate(*geo.lim_aoa, lam)
    rate_t = np.array([steering_phase_rate(*ang, lam) for ang in geo.lim_aod_k])  # (K, 2)
    Hbar_S = chan.draw.Hbar @ chan.corr.sqrt_R
    dr = np.zeros((K, M, 2, N), dtype=complex)
    for m in range(M):
        for axis in range(2):
            dS = dS_lm[m, axis]
            dgl = np.zeros((K, M), dtype=complex)
            dgl[:, m] = rate_t[:, axis] * chan.g_los[:, m]
            dgn = chan.draw.gbar @ dS
            dgl_t = np.conj(dgl) * theta
            dgn_t = np.conj(dgn) * theta
            dHl = np.zeros((M, N), dtype=complex)
            dHl[m, :] = rate_r[axis] * chan.a_r[m] * np.conj(chan.a_fa)
            dHn = dS @ Hbar_S
            dr[:, m, axis, :] = (
                c2 * (dgl_t @ chan.H_los + gl @ dHl)
                + c4 * (dgn_t @ chan.H_nlos + gn @ dHn)
                + c5 * (dgl_t @ chan.H_nlos + gl @ dHn + dgn_t @ chan.H_los + gn @ dHl)
            )

    return EffectiveChannelJacobian(dp=dp, dr=dr)


def grad_effective_channel(
    chan: ChannelRealization, sol: SolutionState, k: int, coordinate: tuple[str, int], axis: int
) -> np.ndarray:
    """
    ∂h_k^eff/∂coordenada. `coordinate` es ("p", n) o ("r", m); `axis` 0 = x, 1 = y.
    """
    kind, index = coordinate
    jac = effective_channel_jacobian(chan, sol.theta)
    if kind == "p":
        return jac.dp[k, index, axis]
    if kind == "r":
        return jac.dr[k, index, axis]
    raise ValueError(f"coordenada desconocida: {kind!r}")


def gains_gradient(
    h_eff: np.ndarray, jac: EffectiveChannelJacobian, w: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Gradientes de todos los g_kj = |h_k^eff w_j|².

    Devuelve (gp, gr) con formas (K, K, N, 2) y (K, K, M, 2); índice [k, j].
    """
    s = h_eff @ w.T  # (K, K)
    # ∂s_kj = ∂h_k^eff · w_j
    dsp = np.einsum("kcax,jx->kjca", jac.dp, w)
    dsr = np.einsum("kcax,jx->kjca", jac.dr, w)
    gp = 2.0 * np.real(np.conj(s)[:, :, None, None] * dsp)
    gr = 2.0 * np.real(np.conj(s)[:, :, None, None] * dsr)
    return gp, gr


def grad_g_kj(chan: ChannelRealization, sol: SolutionState, k: int, j: int) -> PositionGradient:
    """Gradiente de g_kj = |h_k^eff w_j|² respecto a todas las posiciones."""
    jac = effective_channel_jacobian(chan, sol.theta)
    gp, gr = gains_gradient(effective_channel(chan, sol), jac, sol.w)
    return PositionGradient(d_p=gp[k, j], d_r=gr[k, j], target_id=(k, j))


def finite_difference_gradient(
    scalar_function: Callable[[SolutionState], float],
    state: SolutionState,
    step: float = 1e-7,
) -> PositionGradient:
    """Diferencias centrales coordenada a coordenada sobre p y r."""
    if step <= 0:
        raise ValueError("step debe ser positivo")
    d_p = np.zeros_like(state.p, dtype=float)
    d_r = np.zeros_like(state.r, dtype=float)
    for name, grad in (("p", d_p), ("r", d_r)):
        base = getattr(state, name)
        for idx in np.ndindex(base.shape):
            plus = base.copy()
            minus = base.copy()
            plus[idx] += step
            minus[idx] -= step
            f_plus = scalar_function(state.replace(**{name: plus}))
            f_minus = scalar_function(state.replace(**{name: minus}))
            grad[idx] = (f_plus - f_minus) / (2 * step)
    return PositionGradient(d_p=d_p, d_r=d_r, target_id=("fd",))


def g_kj_function(
    cfg: SystemConfig, geo: LinkGeometry, draw: SmallScaleDraw, k: int, j: int
) -> Callable[[SolutionState], float]:
    """g_kj como función de la solución, reensamblando el canal con el mismo sorteo."""
    def fn(sol: SolutionState) -> float:
        chan = assemble_at(cfg, geo, sol.p, sol.r, draw)
        s = effective_channel(chan, sol)[k] @ sol.w[j]
        return float(np.abs(s) ** 2)

    return fn
