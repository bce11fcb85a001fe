"""Parametric-risk-field baseline: repulsion from the riskiest obstacle.

Risk depends only on the clearance d between each obstacle's surface and the
critical region (the vehicle disk): zero at or beyond the boundary width d0,
rising along a half-cosine to 1 at contact. The force points straight away
from the argmax-risk obstacle; it is velocity-independent by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import UAVState
from .world import World


@dataclass(frozen=True)
class PrfConfig:
    d0: float = 0.5      # m, boundary width around the critical region
    k_prf: float = 3.3   # N at risk 1 (the interface's maximum force)
    f_max: float = 3.3   # N

    def __post_init__(self):
        if self.d0 <= 0 or self.k_prf <= 0:
            raise ValueError("d0 and k_prf must be positive")


@dataclass(frozen=True)
class RiskReport:
    risk: float
    direction: tuple[float, float]
    worst_obstacle: str
    distance: float


def critical_distance(state: UAVState, world: World) -> list[tuple[float, np.ndarray]]:
    """Per-obstacle (d, away): clearance from the critical-region boundary
    (the disk surface) and the unit direction pointing away from the closest
    obstacle point. Penetration clamps d to 0.
    """
    d_surf, away = kernels.surface_clearances(
        world.outer_arr, world.rects_arr, state.position[0], state.position[1]
    )
    r = world.uav_radius
    return [(max(float(d) - r, 0.0), away[i].copy()) for i, d in enumerate(d_surf)]


def risk(d: float, cfg: PrfConfig) -> float:
    """cos((d/d0)(pi/2) + pi/2) + 1 inside the boundary, 0 beyond it."""
    if d < 0:
        raise ValueError("distance must be non-negative")
    if d >= cfg.d0:
        return 0.0
    return math.cos((d / cfg.d0) * (math.pi / 2.0) + math.pi / 2.0) + 1.0


def prf_report(state: UAVState, world: World, cfg: PrfConfig) -> RiskReport:
    entries = critical_distance(state, world)
    names = world.obstacle_names()
    best_i = 0
    best_risk = -1.0
    for i, (d, _) in enumerate(entries):
        ri = risk(d, cfg)
        if ri > best_risk:
            best_risk = ri
            best_i = i
    d, away = entries[best_i]
    return RiskReport(
        risk=best_risk,
        direction=(float(away[0]), float(away[1])),
        worst_obstacle=names[best_i],
        distance=d,
    )


def prf_force(state: UAVState, world: World, cfg: PrfConfig) -> np.ndarray:
    """K_PRF · max-risk, pointing away from the argmax obstacle."""
    report = prf_report(state, world, cfg)
    if report.risk <= 0.0:
        return np.zeros(2)
    f = cfg.k_prf * report.risk * np.asarray(report.direction)
    n = float(np.hypot(f[0], f[1]))
    if n > cfg.f_max:
        f = f * (cfg.f_max / n)
    return f
