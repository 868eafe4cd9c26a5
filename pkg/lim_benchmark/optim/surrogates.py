"""
Anclas de la aproximación convexa sucesiva.

Todo va en unidades normalizadas por el ruido: el canal se multiplica por
√(P_max/σ²) y los beamformers se dividen entre √P_max, de modo que el ruido
vale 1 y el presupuesto de potencia también.
"""

from __future__ import annotations
import math
from dataclasses import dataclass

import numpy as np

from lim_benchmark.channel.realization import ChannelRealization, effective_channel_for, phase_matrices
from lim_benchmark.system.layout import pairwise_sq_distances
from lim_benchmark.system.state import SolutionState


def noise_normalization(chan: ChannelRealization) -> float:
    """√(P_max/σ²)."""
    return math.sqrt(chan.cfg.pmax / chan.cfg.sigma2)


@dataclass(frozen=True)
class SurrogateState:
    """
    Valores del iterado anterior (normalizados).

    s_kj = h_k^H w_j (parte directa), v_kj = D_k w_j, mu_kj = s_kj + θᵀ v_kj.
    """
    gamma_t: np.ndarray
    a_t: np.ndarray
    b_t: np.ndarray
    w_t: np.ndarray
    theta_t: np.ndarray
    p_t: np.ndarray
    r_t: np.ndarray
    h_eff: np.ndarray
    s_kj: np.ndarray
    v_kj: np.ndarray
    mu_kj: np.ndarray
    delta_nn: np.ndarray
    delta_mm: np.ndarray
    scale: float

    @classmethod
    def from_solution(cls, chan: ChannelRealization, sol: SolutionState) -> SurrogateState:
        """Anclas desde el SINR verdadero en `sol`."""
        scale = noise_normalization(chan)
        w = sol.w / math.sqrt(chan.cfg.pmax)
        direct = scale * np.conj(chan.h)  # (K, N)
        D = scale * phase_matrices(chan)  # (K, M, N)
        s_kj = direct @ w.T
        v_kj = np.einsum("kmn,jn->kjm", D, w)
        mu_kj = s_kj + v_kj @ sol.theta
        gains = np.abs(mu_kj) ** 2
        a_t = np.diag(gains).copy()
        b_t = gains.sum(axis=1) - a_t + 1.0
        return cls(
            gamma_t=a_t / b_t,
            a_t=a_t,
            b_t=b_t,
            w_t=w,
            theta_t=sol.theta.copy(),
            p_t=sol.p.copy(),
            r_t=sol.r.copy(),
            h_eff=scale * effective_channel_for(chan, sol.theta),
            s_kj=s_kj,
            v_kj=v_kj,
            mu_kj=mu_kj,
            delta_nn=sol.p[:, None, :] - sol.p[None, :, :],
            delta_mm=sol.r[:, None, :] - sol.r[None, :, :],
            scale=scale,
        )

    @property
    def n_users(self) -> int:
        return len(self.gamma_t)

    def spacing_sq(self) -> tuple[np.ndarray, np.ndarray]:
        return pairwise_sq_distances(self.p_t), pairwise_sq_distances(self.r_t)


@dataclass(frozen=True)
class BilinearRow:
    """coef_a·a_k + coef_b·b_k + coef_gamma·γ_k <= rhs."""
    coef_a: float
    coef_b: float
    coef_gamma: float
    rhs: float


def build_bilinear_sca_constraint(state: SurrogateState, k: int) -> BilinearRow:
    """
    a_k >= γ_t b_t + b_t(γ_k − γ_t) + γ_t(b_k − b_t), escrito como
    −a_k + γ_t b_k + b_t γ_k <= γ_t b_t.
    """
    g, b = float(state.gamma_t[k]), float(state.b_t[k])
    return BilinearRow(coef_a=-1.0, coef_b=g, coef_gamma=b, rhs=g * b)


def interior_gamma(row: BilinearRow, a0: float, b0: float) -> float:
    """Un γ estrictamente factible para la fila bilineal dados a0 y b0."""
    limit = (row.rhs - row.coef_a * a0 - row.coef_b * b0) / row.coef_gamma
    return limit - 1e-6 * (1.0 + abs(limit))


LOG2_COEF = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class AuxiliaryBlocks:
    """Slices de a, b, γ dentro del programa."""
    a: slice
    b: slice
    gamma: slice


def declare_auxiliary(builder, state: SurrogateState, a0: np.ndarray, b0: np.ndarray) -> AuxiliaryBlocks:
    """
    Declara a, b, γ con punto inicial interior y escalas (1+a_t, b_t, 1+γ_t).

    `a0` y `b0` ya deben dejar holgura en sus propias restricciones.
    """
    rows = [build_bilinear_sca_constraint(state, k) for k in range(state.n_users)]
    gamma0 = np.array([interior_gamma(row, a, b) for row, a, b in zip(rows, a0, b0)])
    return AuxiliaryBlocks(
        a=builder.add_block("a", a0, scale=1.0 + np.abs(state.a_t)),
        b=builder.add_block("b", b0, scale=state.b_t),
        gamma=builder.add_block("gamma", gamma0, scale=1.0 + state.gamma_t),
    )


def add_rate_terms(builder, state: SurrogateState, aux: AuxiliaryBlocks) -> None:
    """Objetivo Σ log2(1+γ_k) y filas bilineales linealizadas."""
    for k in range(state.n_users):
        ia = aux.a.start + k
        ib = aux.b.start + k
        ig = aux.gamma.start + k
        builder.add_log_term(LOG2_COEF, ig)
        row = build_bilinear_sca_constraint(state, k)
        vec = builder.row()
        vec[ia] = row.coef_a
        vec[ib] = row.coef_b
        vec[ig] = row.coef_gamma
        builder.add_affine(vec, row.rhs, label=f"bilinear[{k}]")


def slack_below(value: np.ndarray) -> np.ndarray:
    """Valor estrictamente por debajo (holgura relativa 1e-6)."""
    return value - 1e-6 * (1.0 + np.abs(value))


def slack_above(value: np.ndarray) -> np.ndarray:
    return value + 1e-6 * (1.0 + np.abs(value))
