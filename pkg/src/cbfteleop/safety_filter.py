"""Safety filter: second-order barrier constraints, exact QP, feedback force.

Per tick the filter builds one inequality row per barrier, solves

    u_safe = argmin ½‖u − u_ref‖²  s.t.  b̈_i + 2p·ḃ_i + p²·b_i >= 0,

and renders the correction as a force F = K_f (u_safe − u_ref). A feasible
reference passes through bitwise untouched, so the force is exactly zero for
safe commands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .barriers import BarrierSet
from .dynamics import UAVState


@dataclass(frozen=True)
class FilterConfig:
    gain: float = 2.0          # p, 1/s: higher is more conservative
    k_f: float = 0.165         # N per m/s² of correction (saturates at u_max)
    f_max: float = 3.3         # N, interface force cap
    slack_weight: float = 1e4  # uniform relaxation penalty when infeasible

    def __post_init__(self):
        if self.gain <= 0 or self.k_f <= 0 or self.f_max <= 0:
            raise ValueError("gain, k_f and f_max must be positive")


@dataclass(frozen=True)
class ConstraintRow:
    a: tuple[float, float]
    c: float
    barrier_index: int


@dataclass
class FilterResult:
    u_safe: np.ndarray
    force: np.ndarray
    margins: np.ndarray
    active_set: tuple[int, ...]
    relaxed: bool
    slack: float


def assemble_constraints(state: UAVState, barriers: BarrierSet, gain: float) -> list[ConstraintRow]:
    """Rows a·u + c >= 0 with a = ∇b and c = vᵀHv + 2p(∇b·v) + p²b."""
    if gain <= 0:
        raise ValueError("gain must be positive")
    A, c = kernels.assemble_rows(
        barriers.params,
        state.position[0],
        state.position[1],
        state.velocity[0],
        state.velocity[1],
        gain,
    )
    return [
        ConstraintRow((float(A[i, 0]), float(A[i, 1])), float(c[i]), i)
        for i in range(len(c))
    ]


def _rows_to_arrays(rows: list[ConstraintRow]) -> tuple[np.ndarray, np.ndarray]:
    if not rows:
        return np.zeros((0, 2)), np.zeros(0)
    A = np.array([r.a for r in rows], dtype=np.float64)
    c = np.array([r.c for r in rows], dtype=np.float64)
    return A, c


def compute_force(u_safe: np.ndarray, u_ref: np.ndarray, cfg: FilterConfig) -> np.ndarray:
    """F = K_f (u_safe − u_ref), norm-capped at f_max."""
    f = cfg.k_f * (np.asarray(u_safe, dtype=np.float64) - np.asarray(u_ref, dtype=np.float64))
    n = float(np.hypot(f[0], f[1]))
    if n > cfg.f_max:
        f = f * (cfg.f_max / n)
    return f


def solve_qp(u_ref: np.ndarray, rows: list[ConstraintRow], cfg: FilterConfig) -> FilterResult:
    """Exact solution of the per-tick QP (see module docstring).

    Infeasible instances are solved with a uniform slack on every row and
    flagged ``relaxed``; the haptic loop always gets an answer.
    """
    u_ref = np.asarray(u_ref, dtype=np.float64).reshape(2)
    A, c = _rows_to_arrays(rows)
    u, margins, a0, a1, nact, relaxed, slack = kernels.filter_tick_rows(
        A, c, u_ref[0], u_ref[1], cfg.slack_weight
    )
    active = tuple(rows[i].barrier_index for i in (a0, a1)[:nact])
    return FilterResult(
        u_safe=u,
        force=compute_force(u, u_ref, cfg),
        margins=margins,
        active_set=active,
        relaxed=bool(relaxed),
        slack=float(slack),
    )


def filter_input(
    state: UAVState, u_ref: np.ndarray, barriers: BarrierSet, cfg: FilterConfig
) -> FilterResult:
    """Assemble rows for the current state, solve, and attach the force."""
    u_ref = np.asarray(u_ref, dtype=np.float64).reshape(2)
    u, margins, a0, a1, nact, relaxed, slack = kernels.filter_tick(
        barriers.params,
        state.position[0],
        state.position[1],
        state.velocity[0],
        state.velocity[1],
        u_ref[0],
        u_ref[1],
        cfg.gain,
        cfg.slack_weight,
    )
    active = tuple(i for i in (a0, a1)[:nact])
    return FilterResult(
        u_safe=u,
        force=compute_force(u, u_ref, cfg),
        margins=margins,
        active_set=active,
        relaxed=bool(relaxed),
        slack=float(slack),
    )
