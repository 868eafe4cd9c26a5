"""
Geometría de gran escala: distancias y ángulos entre sitios.

Las distancias se fijan en los centros de los sitios y no cambian cuando las
antenas o elementos se mueven dentro de su apertura.
"""

from __future__ import annotations
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lim_benchmark.errors import GeometryError
from lim_benchmark.system.config import SystemConfig


Angles = tuple[float, float]


def _as3(point: Sequence[float]) -> np.ndarray:
    v = np.zeros(3)
    v[: len(point)] = point
    return v


def link_angles(src: Sequence[float], dst: Sequence[float], label: str = "") -> tuple[float, Angles]:
    """
    Distancia y par (azimut, elevación) del vector src -> dst.

    Las aperturas miran hacia +x: el azimut se mide desde ese eje en el plano
    horizontal y la elevación desde el plano horizontal, atan2(dz, distancia
    horizontal). Con sitios planos (sin coordenada z) la elevación es 0, la
    fase de apuntamiento solo depende del eje x de la apertura y el eje y
    entra únicamente a través de la correlación espacial.
    """
    d = _as3(dst) - _as3(src)
    dist = float(np.linalg.norm(d))
    if not dist > 0:
        raise GeometryError(f"distancia nula en el enlace {label or 'desconocido'}")
    azimuth = math.atan2(d[1], d[0])
    elevation = math.atan2(d[2], math.hypot(d[0], d[1]))
    return dist, (azimuth, elevation)


@dataclass(frozen=True)
class LinkGeometry:
    d1: float
    d_k: tuple[float, ...]
    d2_k: tuple[float, ...]
    fas_aod: Angles
    lim_aoa: Angles
    lim_aod_k: tuple[Angles, ...]
    fas_to_user_aod_k: tuple[Angles, ...]

    @property
    def n_users(self) -> int:
        return len(self.d_k)

    def to_dict(self) -> dict:
        return {
            "d1": self.d1,
            "d_k": list(self.d_k),
            "d2_k": list(self.d2_k),
            "fas_aod": list(self.fas_aod),
            "lim_aoa": list(self.lim_aoa),
            "lim_aod_k": [list(a) for a in self.lim_aod_k],
            "fas_to_user_aod_k": [list(a) for a in self.fas_to_user_aod_k],
        }


def derive_link_geometry(cfg: SystemConfig, user_positions: Sequence[Sequence[float]]) -> LinkGeometry:
    """
    Calcula distancias y ángulos a partir de los centros de los sitios.

    - fas_aod: FAS -> LIM; lim_aoa: LIM -> FAS (llegada a la superficie).
    - lim_aod_k: LIM -> usuario k; fas_to_user_aod_k: FAS -> usuario k.
    """
    if len(user_positions) != cfg.n_users:
        raise GeometryError(
            f"se esperaban {cfg.n_users} posiciones de usuario, llegaron {len(user_positions)}"
        )
    d1, fas_aod = link_angles(cfg.fas_center, cfg.lim_center, "FAS-LIM")
    _, lim_aoa = link_angles(cfg.lim_center, cfg.fas_center, "LIM-FAS")

    d_k, d2_k, lim_aod, fas_aod_k = [], [], [], []
    for k, user in enumerate(user_positions):
        dk, ang_fu = link_angles(cfg.fas_center, user, f"FAS-usuario {k}")
        d2k, ang_lu = link_angles(cfg.lim_center, user, f"LIM-usuario {k}")
        d_k.append(dk)
        d2_k.append(d2k)
        fas_aod_k.append(ang_fu)
        lim_aod.append(ang_lu)

    return LinkGeometry(
        d1=d1,
        d_k=tuple(d_k),
        d2_k=tuple(d2_k),
        fas_aod=fas_aod,
        lim_aoa=lim_aoa,
        lim_aod_k=tuple(lim_aod),
        fas_to_user_aod_k=tuple(fas_aod_k),
    )


def draw_user_positions(cfg: SystemConfig, rng: np.random.Generator) -> list[tuple[float, ...]]:
    """K usuarios uniformes en el disco (radio·√U, 2πU), a la altura del centro."""
    center = np.asarray(cfg.user_center, dtype=float)
    radius = cfg.user_radius * np.sqrt(rng.random(cfg.n_users))
    angle = 2 * np.pi * rng.random(cfg.n_users)
    users = []
    for rad, ang in zip(radius, angle):
        point = center.copy()
        point[0] += rad * math.cos(ang)
        point[1] += rad * math.sin(ang)
        users.append(tuple(float(v) for v in point))
    return users
