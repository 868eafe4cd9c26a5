"""
Zero-forcing sobre el canal efectivo en el estado inicial.
"""

from __future__ import annotations
import logging
import math

import numpy as np

from lim_benchmark.channel.realization import effective_channel, sum_rate
from lim_benchmark.errors import ZeroForcingError
from lim_benchmark.schemes.base import BaseScheme, SchemeOutcome, start_state

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e10


def _equal_power_columns(W: np.ndarray, pmax: float) -> np.ndarray:
    """Columnas de W (N, K) normalizadas a P/K cada una; devuelve filas w_k."""
    K = W.shape[1]
    norms = np.linalg.norm(W, axis=0)
    norms = np.where(norms > 0, norms, 1.0)
    return (W / norms).T * math.sqrt(pmax / K)


def zf_beamforming(chan_eff: np.ndarray, pmax: float) -> np.ndarray:
    """
    w_k ∝ columna k de la pseudoinversa del canal efectivo (K, N), con P/K por usuario.

    Raises:
        ZeroForcingError: K > N o canal mal condicionado (κ > 1e10).
    """
    K, N = chan_eff.shape
    if K > N:
        raise ZeroForcingError(f"zero-forcing requiere K <= N (K={K}, N={N})")
    cond = np.linalg.cond(chan_eff)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ZeroForcingError(f"canal efectivo sin rango completo (condición {cond:.3e})")
    return _equal_power_columns(np.linalg.pinv(chan_eff), pmax)


def regularized_zf(chan_eff: np.ndarray, pmax: float) -> np.ndarray:
    """H^H (H H^H + δI)^{-1} con δ = 1e-6·traza/K."""
    K = chan_eff.shape[0]
    gram = chan_eff @ chan_eff.conj().T
    delta = 1e-6 * float(np.real(np.trace(gram))) / K
    if delta <= 0:
        delta = 1e-12
    W = chan_eff.conj().T @ np.linalg.inv(gram + delta * np.eye(K))
    return _equal_power_columns(W, pmax)


class ZeroForcingScheme(BaseScheme):
    """ZF en la rejilla inicial con θ = 1."""

    def run(self, cfg, geo, chan, rng) -> SchemeOutcome:
        sol, chan0 = start_state(cfg, geo, chan)
        h_eff = effective_channel(chan0, sol)
        flags = set()
        try:
            w = zf_beamforming(h_eff, cfg.pmax)
        except ZeroForcingError as e:
            logger.info("zf: %s; se usa la inversa regularizada", e)
            w = regularized_zf(h_eff, cfg.pmax)
            flags.add("zf_regularized")
        sol = sol.replace(w=w)
        return SchemeOutcome(scheme=self.name, sol=sol, sum_rate=sum_rate(chan0, sol), flags=flags)
