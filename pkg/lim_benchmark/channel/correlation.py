"""
Correlación espacial de Jakes y su raíz cuadrada simétrica.
"""

from __future__ import annotations
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import j0

from lim_benchmark.errors import ModelError

logger = logging.getLogger(__name__)

# Autovalores por encima de -EPS_PSD se consideran ruido numérico y se recortan a 0.
EPS_PSD = 1e-10


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    diff = positions[:, None, :] - positions[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def jakes_correlation(positions: np.ndarray, lambda_m: float) -> np.ndarray:
    """[R]_ij = J0(2π‖x_i − x_j‖/λ). Simétrica con diagonal unidad."""
    d = pairwise_distances(positions)
    R = j0(2 * np.pi * d / lambda_m)
    R = 0.5 * (R + R.T)
    np.fill_diagonal(R, 1.0)
    return R


def psd_eig(R: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Descomposición R = U Λ Uᵀ con autovalores recortados a >= 0.

    Raises:
        ModelError: algún autovalor < −EPS_PSD.
    """
    lam, U = linalg.eigh(R)
    if lam.size and lam.min() < -EPS_PSD:
        raise ModelError(
            f"matriz de correlación no semidefinida (autovalor mínimo {lam.min():.3e})"
        )
    if lam.size and lam.min() < 0:
        logger.debug("recortando autovalor %.3e a 0", lam.min())
    return U, np.clip(lam, 0.0, None)


def psd_sqrt(R: np.ndarray) -> np.ndarray:
    """Raíz simétrica U Λ₊^{1/2} Uᵀ."""
    U, lam = psd_eig(R)
    S = (U * np.sqrt(lam)) @ U.T
    return 0.5 * (S + S.T)


def _sqrt_from_eig(U: np.ndarray, lam: np.ndarray) -> np.ndarray:
    S = (U * np.sqrt(lam)) @ U.T
    return 0.5 * (S + S.T)


@dataclass(frozen=True)
class CorrelationSet:
    """
    Matrices de correlación del FAS (R) y de la LIM en salida (R_t) y llegada (R_r).

    R_t y R_r salen de las mismas posiciones de elementos pero se guardan
    por separado porque sus gradientes entran en términos distintos.
    `eig` guarda (U, Λ₊) por clave "fa", "lm_t", "lm_r".
    """
    R: np.ndarray
    R_t: np.ndarray
    R_r: np.ndarray
    sqrt_R: np.ndarray
    sqrt_R_t: np.ndarray
    sqrt_R_r: np.ndarray
    eig: dict
    correlated: bool = True

    @classmethod
    def from_positions(cls, p: np.ndarray, r: np.ndarray, lambda_m: float) -> CorrelationSet:
        R = jakes_correlation(p, lambda_m)
        R_lm = jakes_correlation(r, lambda_m)
        eig_fa = psd_eig(R)
        eig_lm = psd_eig(R_lm)
        sqrt_fa = _sqrt_from_eig(*eig_fa)
        sqrt_lm = _sqrt_from_eig(*eig_lm)
        return cls(
            R=R,
            R_t=R_lm,
            R_r=R_lm.copy(),
            sqrt_R=sqrt_fa,
            sqrt_R_t=sqrt_lm,
            sqrt_R_r=sqrt_lm.copy(),
            eig={"fa": eig_fa, "lm_t": eig_lm, "lm_r": eig_lm},
        )

    @classmethod
    def identity(cls, n: int, m: int) -> CorrelationSet:
        """Variante sin correlación: R_q = I para todo q."""
        I_n, I_m = np.eye(n), np.eye(m)
        return cls(
            R=I_n,
            R_t=I_m,
            R_r=I_m.copy(),
            sqrt_R=I_n.copy(),
            sqrt_R_t=I_m.copy(),
            sqrt_R_r=I_m.copy(),
            eig={"fa": (I_n, np.ones(n)), "lm_t": (I_m, np.ones(m)), "lm_r": (I_m, np.ones(m))},
            correlated=False,
        )
