"""Paso de complejos a reales: z ∈ ℂⁿ ↔ (Re z; Im z) ∈ ℝ²ⁿ."""

from __future__ import annotations

import numpy as np


def lift(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z).reshape(-1)
    return np.concatenate([z.real, z.imag])


def unlift(x: np.ndarray) -> np.ndarray:
    n = x.size // 2
    return x[:n] + 1j * x[n:]


def product_rows(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Filas (r_re, r_im) con Re(u·z) = r_re·lift(z) e Im(u·z) = r_im·lift(z),
    donde u·z = Σ u_n z_n (sin conjugar).
    """
    u = np.asarray(u).reshape(-1)
    return np.concatenate([u.real, -u.imag]), np.concatenate([u.imag, u.real])


def abs2_quad(u: np.ndarray) -> np.ndarray:
    """Q con |u·z|² = lift(z)ᵀ Q lift(z)."""
    r_re, r_im = product_rows(u)
    return np.outer(r_re, r_re) + np.outer(r_im, r_im)
