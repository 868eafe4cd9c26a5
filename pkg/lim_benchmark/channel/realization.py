"""
Canal Rician correlado FAS -> LIM -> usuarios.

Una realización guarda los canales ensamblados junto con las piezas de
visión directa (LoS) y dispersas (NLoS) de ganancia unidad, que son las
que necesita el cálculo de gradientes.
"""

from __future__ import annotations
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from lim_benchmark.channel.correlation import CorrelationSet
from lim_benchmark.channel.steering import steering_vector
from lim_benchmark.system.config import SystemConfig
from lim_benchmark.system.geometry import LinkGeometry

if TYPE_CHECKING:
    from lim_benchmark.system.state import SolutionState


def _complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


@dataclass(frozen=True)
class SmallScaleDraw:
    """Desvanecimiento de pequeña escala, fijo durante todo un drop."""
    Hbar: np.ndarray  # (M, N)
    hbar: np.ndarray  # (K, N)
    gbar: np.ndarray  # (K, M)

    @classmethod
    def zeros(cls, cfg: SystemConfig) -> SmallScaleDraw:
        N, M, K = cfg.n_antennas, cfg.n_elements, cfg.n_users
        return cls(
            Hbar=np.zeros((M, N), dtype=complex),
            hbar=np.zeros((K, N), dtype=complex),
            gbar=np.zeros((K, M), dtype=complex),
        )


def draw_small_scale(cfg: SystemConfig, rng: np.random.Generator) -> SmallScaleDraw:
    """CN(0, 1) i.i.d.: partes real e imaginaria con varianza 1/2."""
    N, M, K = cfg.n_antennas, cfg.n_elements, cfg.n_users
    return SmallScaleDraw(
        Hbar=_complex_gaussian(rng, (M, N)),
        hbar=_complex_gaussian(rng, (K, N)),
        gbar=_complex_gaussian(rng, (K, M)),
    )


def path_scale(h0: float, distance: float, alpha: float) -> float:
    """√(h0 / d^α)."""
    return math.sqrt(h0 / distance ** alpha)


def rician_weights(kappa: float) -> tuple[float, float]:
    """(√(κ/(κ+1)), √(1/(κ+1)))."""
    return math.sqrt(kappa / (kappa + 1.0)), math.sqrt(1.0 / (kappa + 1.0))


@dataclass(frozen=True)
class RicianScaling:
    """
    Constantes c1..c5 (una por usuario) de la descomposición

        h_eff = c1 h_L^H + c2 g_L^H Θ H_L + c3 h_N^H + c4 g_N^H Θ H_N
                + c5 (g_L^H Θ H_N + g_N^H Θ H_L)

    con todas las piezas de ganancia unidad.
    """
    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray
    c4: np.ndarray
    c5: np.ndarray
    beta1: float
    beta_k: np.ndarray
    beta2_k: np.ndarray

    @classmethod
    def from_geometry(cls, cfg: SystemConfig, geo: LinkGeometry) -> RicianScaling:
        los, nlos = rician_weights(cfg.kappa)
        beta1 = path_scale(cfg.h0, geo.d1, cfg.alpha)
        beta_k = np.array([path_scale(cfg.h0, d, cfg.alpha) for d in geo.d_k])
        beta2_k = np.array([path_scale(cfg.h0, d, cfg.alpha) for d in geo.d2_k])
        cascade = beta1 * beta2_k
        return cls(
            c1=beta_k * los,
            c2=cascade * los * los,
            c3=beta_k * nlos,
            c4=cascade * nlos * nlos,
            c5=cascade * los * nlos,
            beta1=beta1,
            beta_k=beta_k,
            beta2_k=beta2_k,
        )


@dataclass(frozen=True)
class ChannelRealization:
    """
    H: (M, N) FAS -> LIM; h: (K, N) FAS -> usuarios; g: (K, M) LIM -> usuarios.

    Las piezas *_los / *_nlos son de ganancia unidad:
    h_los = a_FA(usuario k), g_los = a_LM,t(k), H_los = a_LM,r a_FA^H,
    h_nlos = R^{1/2} h̄_k, g_nlos = R_t^{1/2} ḡ_k, H_nlos = R_r^{1/2} H̄ R^{1/2}.
    """
    cfg: SystemConfig
    geo: LinkGeometry
    p: np.ndarray
    r: np.ndarray
    draw: SmallScaleDraw
    corr: CorrelationSet
    scaling: RicianScaling
    a_fa: np.ndarray  # (N,) hacia la LIM
    a_r: np.ndarray  # (M,) llegada a la LIM
    h_los: np.ndarray
    g_los: np.ndarray
    H_los: np.ndarray
    h_nlos: np.ndarray
    g_nlos: np.ndarray
    H_nlos: np.ndarray
    H: np.ndarray
    h: np.ndarray
    g: np.ndarray

    @property
    def n_users(self) -> int:
        return self.h.shape[0]

    def to_dict(self) -> dict:
        """Instantánea para depuración (complejos como [re, im])."""
        def cx(a: np.ndarray) -> list:
            return np.stack([a.real, a.imag], axis=-1).tolist()

        return {
            "geometry": self.geo.to_dict(),
            "p": self.p.tolist(),
            "r": self.r.tolist(),
            "correlated": self.corr.correlated,
            "c": {name: getattr(self.scaling, name).tolist() for name in ("c1", "c2", "c3", "c4", "c5")},
            "H": cx(self.H),
            "h": cx(self.h),
            "g": cx(self.g),
        }


def assemble_at(
    cfg: SystemConfig,
    geo: LinkGeometry,
    p: np.ndarray,
    r: np.ndarray,
    draw: SmallScaleDraw,
) -> ChannelRealization:
    """Ensambla los canales para unas posiciones dadas. Función pura."""
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    r = np.asarray(r, dtype=float).reshape(-1, 2)
    lam = cfg.lambda_m
    if cfg.correlation:
        corr = CorrelationSet.from_positions(p, r, lam)
    else:
        corr = CorrelationSet.identity(len(p), len(r))
    scaling = RicianScaling.from_geometry(cfg, geo)
    los, nlos = rician_weights(cfg.kappa)

    a_fa = steering_vector(p, *geo.fas_aod, lam)
    a_r = steering_vector(r, *geo.lim_aoa, lam)
    h_los = np.array([steering_vector(p, *ang, lam) for ang in geo.fas_to_user_aod_k])
    g_los = np.array([steering_vector(r, *ang, lam) for ang in geo.lim_aod_k])
    H_los = np.outer(a_r, np.conj(a_fa))

    # R^{1/2} es simétrica: (R^{1/2} x)ᵀ = xᵀ R^{1/2}
    h_nlos = draw.hbar @ corr.sqrt_R
    g_nlos = draw.gbar @ corr.sqrt_R_t
    H_nlos = corr.sqrt_R_r @ draw.Hbar @ corr.sqrt_R

    beta_k = scaling.beta_k[:, None]
    beta2_k = scaling.beta2_k[:, None]
    return ChannelRealization(
        cfg=cfg,
        geo=geo,
        p=p,
        r=r,
        draw=draw,
        corr=corr,
        scaling=scaling,
        a_fa=a_fa,
        a_r=a_r,
        h_los=h_los,
        g_los=g_los,
        H_los=H_los,
        h_nlos=h_nlos,
        g_nlos=g_nlos,
        H_nlos=H_nlos,
        H=scaling.beta1 * (los * H_los + nlos * H_nlos),
        h=beta_k * (los * h_los + nlos * h_nlos),
        g=beta2_k * (los * g_los + nlos * g_nlos),
    )


def assemble_channels(
    cfg: SystemConfig, geo: LinkGeometry, sol: SolutionState, draw: SmallScaleDraw
) -> ChannelRealization:
    """Canales en las posiciones de `sol`; las correlaciones se recalculan."""
    return assemble_at(cfg, geo, sol.p, sol.r, draw)


def effective_channel_for(chan: ChannelRealization, theta: np.ndarray) -> np.ndarray:
    """Filas h_k^eff = h_k^H + g_k^H diag(θ) H, forma (K, N)."""
    theta = np.asarray(theta)
    if theta.shape != (chan.H.shape[0],):
        raise ValueError(f"θ debe tener longitud {chan.H.shape[0]}, tiene forma {theta.shape}")
    return np.conj(chan.h) + (np.conj(chan.g) * theta) @ chan.H


def effective_channel(chan: ChannelRealization, sol: SolutionState) -> np.ndarray:
    return effective_channel_for(chan, sol.theta)


def phase_matrices(chan: ChannelRealization) -> np.ndarray:
    """D_k = diag(conj g_k) H, forma (K, M, N), de modo que h_eff = h^H + θᵀ D_k."""
    return np.conj(chan.g)[:, :, None] * chan.H[None, :, :]


def decompose_effective_channel(chan: ChannelRealization, theta: np.ndarray) -> np.ndarray:
    """
    h_eff evaluado término a término con las constantes c1..c5.
    Coincide con `effective_channel_for` salvo redondeo.
    """
    sc = chan.scaling
    gl = np.conj(chan.g_los) * theta
    gn = np.conj(chan.g_nlos) * theta
    return (
        sc.c1[:, None] * np.conj(chan.h_los)
        + sc.c2[:, None] * (gl @ chan.H_los)
        + sc.c3[:, None] * np.conj(chan.h_nlos)
        + sc.c4[:, None] * (gn @ chan.H_nlos)
        + sc.c5[:, None] * (gl @ chan.H_nlos + gn @ chan.H_los)
    )


def sinr_from_effective(
    h_eff: np.ndarray, w: np.ndarray, sigma2: float
) -> tuple[np.ndarray, np.ndarray, float]:
    """(γ_k, R_k, Σ R_k) a partir de h_eff (K, N) y w (K, N)."""
    gains = np.abs(h_eff @ w.T) ** 2  # [k, j] = |h_k^eff w_j|²
    signal = np.diag(gains)
    interference = gains.sum(axis=1) - signal
    gamma = signal / (interference + sigma2)
    rates = np.log2(1.0 + gamma)
    return gamma, rates, float(rates.sum())


def sinr_and_rate(
    chan: ChannelRealization, sol: SolutionState, sigma2: float
) -> tuple[np.ndarray, np.ndarray, float]:
    """SINR por usuario, tasa por usuario y tasa suma en bits/s/Hz."""
    return sinr_from_effective(effective_channel(chan, sol), sol.w, sigma2)


def sum_rate(chan: ChannelRealization, sol: SolutionState) -> float:
    return sinr_and_rate(chan, sol, chan.cfg.sigma2)[2]
