"""Scripted operators standing in for human subjects.

All pilots emit interface displacements (cm). The waypoint family follows
the world's route by inverting the rate-control map; the compliant variant
additionally yields to the rendered force through a hand admittance, which
is the mechanism by which haptic guidance changes the flown path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .dynamics import ControlConfig, StickInput, UAVState
from .world import World

WAYPOINT = "waypoint"
CHARGER = "charger"
NOISY = "noisy"
COMPLIANT = "compliant"

KINDS = (WAYPOINT, CHARGER, NOISY, COMPLIANT)


@dataclass(frozen=True)
class PilotSpec:
    kind: str = WAYPOINT
    gain: float = 1.5          # 1/s, waypoint pursuit
    cruise_speed: float = 1.2  # m/s
    noise_std: float = 0.0     # cm, stationary std of the stick drift
    noise_tau: float = 1.0     # s, drift correlation time (sustained error,
                               # not per-tick jitter, is what humans add)
    noise_vel_tau: float = 0.3  # s, correlation of the drift *velocity*; the
                                # drift is smooth, white stick increments
                                # would differentiate into reference spikes
    admittance: float = 0.0     # cm/N, immediate hand yield to the force
    correction: float = 60.0    # cm/(N·s), rate at which a felt force makes
                                # the pilot unwind their own stick error
    correction_max: float = 6.0  # cm/s cap: above a barely-perceptible force
                                 # the response is cue-following (direction
                                 # matters, magnitude saturates)
    hand_tau: float = 0.15      # s, lag of the immediate yield
    hand_release: float = 0.5   # s, lag when the force recedes
    hand_slew: float = 10.0     # cm/s, max hand speed; an unconstrained hand
                                # closes an unstable force→stick→reference
                                # loop through the 1/dt rate-control gain
    hand_max: float = 4.0       # cm, max sustained yield
    stick_slew: float = 8.0     # cm/s, overall hand smoothness; rate control
                                # differentiates stick motion by 1/dt, so a
                                # jerky stick reads as huge accelerations
    seed: int = 0
    switch_radius: float = 0.2  # m, hand-off distance; below the target radius
                                # so route targets actually get inspected

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pilot kind {self.kind!r}")
        if self.admittance < 0:
            raise ValueError("admittance must be non-negative")


class Pilot:
    """Stateful route follower; deterministic given (spec.seed, history)."""

    def __init__(self, spec: PilotSpec, world: World, cfg: ControlConfig):
        self.spec = spec
        self.world = world
        self.cfg = cfg
        self.route = [np.asarray(w, dtype=np.float64) for w in (world.route or [t.center for t in world.targets])]
        self.waypoint_index = 0
        self.drift = np.zeros(2)
        self.drift_vel = np.zeros(2)
        self.hand = np.zeros(2)
        self.last_stick = np.zeros(2)

    def reset(self) -> None:
        self.waypoint_index = 0
        self.drift = np.zeros(2)
        self.drift_vel = np.zeros(2)
        self.hand = np.zeros(2)
        self.last_stick = np.zeros(2)

    def _update_drift(self, rng: np.random.Generator) -> np.ndarray:
        # leaky integrator of a velocity OU process: stationary drift std is
        # noise_std and the drift paths are smooth in velocity
        spec = self.spec
        dt = self.cfg.dt
        tau_d, tau_v = spec.noise_tau, spec.noise_vel_tau
        sigma_v = spec.noise_std / tau_d * np.sqrt((tau_v + tau_d) / tau_v)
        decay_v = np.exp(-dt / tau_v)
        kick = sigma_v * np.sqrt(1.0 - decay_v * decay_v)
        self.drift_vel = decay_v * self.drift_vel + kick * rng.standard_normal(2)
        self.drift = np.exp(-dt / tau_d) * self.drift + self.drift_vel * dt
        return self.drift

    def _update_hand(self, force) -> np.ndarray:
        # lagged, slew- and travel-limited yield toward admittance * force
        spec = self.spec
        target = spec.admittance * np.asarray(force, dtype=np.float64)
        growing = float(np.hypot(target[0], target[1])) > float(
            np.hypot(self.hand[0], self.hand[1])
        )
        tau = spec.hand_tau if growing else spec.hand_release
        blend = 1.0 - np.exp(-self.cfg.dt / tau)
        move = blend * (target - self.hand)
        max_move = spec.hand_slew * self.cfg.dt
        n = float(np.hypot(move[0], move[1]))
        if n > max_move:
            move = move * (max_move / n)
        hand = self.hand + move
        n = float(np.hypot(hand[0], hand[1]))
        if n > spec.hand_max:
            hand = hand * (spec.hand_max / n)
        self.hand = hand
        return self.hand

    def _stick_for_velocity(self, v_des: np.ndarray) -> np.ndarray:
        # inverse of the rate-control map: |p| = |v|/k_v + deadzone
        speed = float(np.hypot(v_des[0], v_des[1]))
        if speed == 0.0:
            return np.zeros(2)
        mag = speed / self.cfg.k_v + self.cfg.deadzone
        return (mag / speed) * v_des

    def _waypoint_stick(self, state: UAVState) -> np.ndarray:
        # intermediate waypoints hand off at switch_radius; the final one is
        # pursued to the point so the last target gets inspected
        while self.waypoint_index < len(self.route) - 1:
            delta = self.route[self.waypoint_index] - state.position
            if float(np.hypot(delta[0], delta[1])) > self.spec.switch_radius:
                break
            self.waypoint_index += 1
        if not self.route:
            return np.zeros(2)
        delta = self.route[self.waypoint_index] - state.position
        dist = float(np.hypot(delta[0], delta[1]))
        if dist == 0.0:
            return np.zeros(2)
        speed = min(self.spec.cruise_speed, self.spec.gain * dist)
        return self._stick_for_velocity(speed * delta / dist)

    def _charger_stick(self, state: UAVState) -> np.ndarray:
        d, away = kernels.surface_clearances(
            self.world.outer_arr,
            self.world.rects_arr,
            state.position[0],
            state.position[1],
        )
        i = int(np.argmin(d))
        return -self.cfg.workspace * away[i]

    def step(self, state: UAVState, force, rng: np.random.Generator) -> StickInput:
        spec = self.spec
        if spec.kind == CHARGER:
            stick = self._charger_stick(state)
        else:
            stick = self._waypoint_stick(state)
            if spec.kind in (NOISY, COMPLIANT) and spec.noise_std > 0:
                self._update_drift(rng)
            if spec.kind == COMPLIANT:
                stick = stick + self._update_hand(force)
                # a felt force also cues the pilot to unwind their error
                f = np.asarray(force, dtype=np.float64)
                rate = spec.correction * float(np.hypot(f[0], f[1]))
                if rate > 0.0:
                    rate = min(rate, spec.correction_max)
                    self.drift = self.drift + (rate * self.cfg.dt / np.hypot(f[0], f[1])) * f
            stick = stick + self.drift
            move = stick - self.last_stick
            max_move = spec.stick_slew * self.cfg.dt
            n = float(np.hypot(move[0], move[1]))
            if n > max_move:
                stick = self.last_stick + move * (max_move / n)
        mag = float(np.hypot(stick[0], stick[1]))
        if mag > self.cfg.workspace:
            stick = stick * (self.cfg.workspace / mag)
        self.last_stick = np.asarray(stick, dtype=np.float64).copy()
        return StickInput(displacement=(float(stick[0]), float(stick[1])))


def pilot_step(
    pilot: Pilot, state: UAVState, force, world: World, rng: np.random.Generator
) -> StickInput:
    """Functional wrapper kept for symmetry with the rest of the pipeline."""
    assert pilot.world is world
    return pilot.step(state, force, rng)
