"""Planar double-integrator vehicle and the rate-control stick mapping.

The operator interface displacement (cm) maps to a commanded velocity, the
velocity error over one control period gives the reference acceleration, and
the vehicle integrates acceleration exactly over each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TAU = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Wrap to (−pi, pi]."""
    w = math.remainder(a, TAU)
    if w <= -math.pi:
        w += TAU
    return w


@dataclass
class UAVState:
    position: np.ndarray
    velocity: np.ndarray
    yaw: float = 0.0
    time: float = 0.0

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=np.float64).reshape(2)
        self.velocity = np.asarray(self.velocity, dtype=np.float64).reshape(2)
        self.yaw = wrap_angle(float(self.yaw))

    def copy(self) -> "UAVState":
        return UAVState(self.position.copy(), self.velocity.copy(), self.yaw, self.time)


@dataclass(frozen=True)
class StickInput:
    """Interface displacement in cm plus the yaw rocker (−1, 0, +1)."""

    displacement: tuple[float, float] = (0.0, 0.0)
    yaw_button: int = 0


@dataclass(frozen=True)
class ControlConfig:
    k_v: float = 0.5          # (m/s) per cm of stick past the deadzone
    dt: float = 0.02          # control/logging period, s
    deadzone: float = 1.0     # cm
    yaw_rate: float = 0.038   # rad/s while a yaw button is held
    frame: str = "body"       # "body": stick forward follows the camera
    workspace: float = 8.0    # cm, interface travel limit
    u_max: float = 20.0       # m/s², reference clamp before the filter

    def __post_init__(self):
        if self.k_v <= 0 or self.dt <= 0 or self.deadzone < 0:
            raise ValueError("k_v and dt must be positive, deadzone non-negative")
        if self.frame not in ("body", "world"):
            raise ValueError(f"unknown frame {self.frame!r}")


def stick_to_velocity(stick: StickInput, cfg: ControlConfig, yaw: float) -> np.ndarray:
    """Commanded velocity: zero inside the deadzone, then k_v per cm beyond
    it along the stick direction, rotated into the world frame for the
    first-person ("body") mapping.
    """
    p = np.asarray(stick.displacement, dtype=np.float64)
    mag = float(np.hypot(p[0], p[1]))
    if mag <= cfg.deadzone:
        return np.zeros(2)
    speed = cfg.k_v * (mag - cfg.deadzone)
    direction = p / mag
    if cfg.frame == "body":
        cy, sy = math.cos(yaw), math.sin(yaw)
        direction = np.array(
            [cy * direction[0] - sy * direction[1], sy * direction[0] + cy * direction[1]]
        )
    return speed * direction


def reference_acceleration(v_c: np.ndarray, state: UAVState, dt: float) -> np.ndarray:
    """The acceleration that reaches the commanded velocity in one period."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return (np.asarray(v_c, dtype=np.float64) - state.velocity) / dt


def clamp_reference(u_ref: np.ndarray, u_max: float) -> np.ndarray:
    """Norm-clamp preserving direction."""
    if u_max <= 0:
        raise ValueError("u_max must be positive")
    u = np.asarray(u_ref, dtype=np.float64)
    n = float(np.hypot(u[0], u[1]))
    if n <= u_max:
        return u
    return u * (u_max / n)


def step(state: UAVState, u: np.ndarray, yaw_button: int, cfg: ControlConfig) -> UAVState:
    """Exact constant-acceleration step of the double integrator."""
    u = np.asarray(u, dtype=np.float64)
    dt = cfg.dt
    position = state.position + state.velocity * dt + 0.5 * u * dt * dt
    velocity = state.velocity + u * dt
    yaw = wrap_angle(state.yaw + float(yaw_button) * cfg.yaw_rate * dt)
    return UAVState(position, velocity, yaw, state.time + dt)
