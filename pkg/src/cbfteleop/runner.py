"""Batch trial harness: pilot → stick map → reference → condition pipeline.

Runs human-free trials under the three feedback conditions. In haptic-only
mode the raw (clamped) reference drives the vehicle and the force only
reaches the pilot model; in override mode the filtered input drives the
vehicle directly. Identical run specs produce byte-identical logs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .barriers import BarrierSet, world_to_barriers
from .dynamics import (
    ControlConfig,
    UAVState,
    clamp_reference,
    reference_acceleration,
    step,
    stick_to_velocity,
)
from .pilots import Pilot, PilotSpec
from .prf import PrfConfig, prf_force
from .safety_filter import FilterConfig, filter_input
from .trial import FAILED, IDLE, SUCCEEDED, TrialLog, TrialState, update_trial
from .world import CrashConfig, World, collision_query, load_world

CONDITION_N = "N"
CONDITION_PRF = "PRF"
CONDITION_CBF = "CBF"
CONDITIONS = (CONDITION_N, CONDITION_PRF, CONDITION_CBF)

MODE_HAPTIC = "haptic_only"
MODE_OVERRIDE = "override"
MODES = (MODE_HAPTIC, MODE_OVERRIDE)


@dataclass(frozen=True)
class RunSpec:
    world: str = "default"
    condition: str = CONDITION_CBF
    mode: str = MODE_HAPTIC
    pilot: PilotSpec = field(default_factory=PilotSpec)
    trials: int = 1
    seed: int = 0
    timeout: float = 300.0  # simulated seconds
    control: ControlConfig = field(default_factory=ControlConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    prf: PrfConfig = field(default_factory=PrfConfig)
    crash: CrashConfig = field(default_factory=CrashConfig)

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ValueError(f"unknown condition {self.condition!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_OVERRIDE and self.condition != CONDITION_CBF:
            raise ValueError("override mode requires the CBF condition")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def run_trial(
    spec: RunSpec,
    world: World,
    barriers: BarrierSet,
    seed: int,
) -> TrialLog:
    """One trial of the full pipeline; pure function of its arguments."""
    cfg = spec.control
    rng = np.random.default_rng(seed)
    pilot = Pilot(spec.pilot, world, cfg)
    state = UAVState(np.array(world.start_position), np.zeros(2), world.start_yaw, 0.0)
    trial = TrialState()
    log = TrialLog(condition=spec.condition, seed=seed)
    force = np.zeros(2)
    max_ticks = int(np.ceil(spec.timeout / cfg.dt))

    for _ in range(max_ticks):
        stick = pilot.step(state, force, rng)
        v_c = stick_to_velocity(stick, cfg, state.yaw)
        u_ref = clamp_reference(reference_acceleration(v_c, state, cfg.dt), cfg.u_max)

        if spec.condition == CONDITION_CBF:
            result = filter_input(state, u_ref, barriers, spec.filter)
            u_safe = result.u_safe
            force = result.force
        elif spec.condition == CONDITION_PRF:
            u_safe = u_ref
            force = prf_force(state, world, spec.prf)
        else:
            u_safe = u_ref
            force = np.zeros(2)

        u_applied = u_safe if spec.mode == MODE_OVERRIDE else u_ref
        state = step(state, u_applied, stick.yaw_button, cfg)
        collision = collision_query(state.position, world, spec.crash)
        input_nonzero = bool(v_c[0] != 0.0 or v_c[1] != 0.0)
        trial = update_trial(trial, state, input_nonzero, collision, world, spec.crash, cfg.dt)

        if trial.phase != IDLE:
            log.append(state, u_ref, u_safe, force, trial.contact)
        if trial.phase in (SUCCEEDED, FAILED):
            break

    if trial.phase == SUCCEEDED:
        log.finalize("success")
    elif trial.phase == FAILED:
        log.finalize("failure", trial.fail_reason)
    else:
        log.finalize("failure", "timeout")
    return log


def run_batch(spec: RunSpec) -> tuple[list[TrialLog], dict]:
    """Run ``spec.trials`` seeded trials and aggregate a summary table."""
    world = spec.world if isinstance(spec.world, World) else load_world(spec.world)
    barriers = world_to_barriers(world)
    logs = [run_trial(spec, world, barriers, spec.seed + i) for i in range(spec.trials)]
    return logs, summarize(logs, spec)


def summarize(logs: list[TrialLog], spec: RunSpec) -> dict:
    successes = [lg for lg in logs if lg.outcome == "success"]
    crashes = sum(1 for lg in logs if lg.fail_reason == "crash")
    timeouts = sum(1 for lg in logs if lg.fail_reason == "timeout")
    mean_metrics = {}
    if successes:
        keys = successes[0].metrics.keys()
        mean_metrics = {
            k: float(np.mean([lg.metrics[k] for lg in successes])) for k in keys
        }
    return {
        "condition": spec.condition,
        "mode": spec.mode,
        "pilot": spec.pilot.kind,
        "trials": len(logs),
        "successes": len(successes),
        "failures": len(logs) - len(successes),
        "crashes": crashes,
        "timeouts": timeouts,
        "mean_metrics": mean_metrics,
    }


def write_batch(logs: list[TrialLog], summary: dict, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, log in enumerate(logs):
        p = out / f"trial_{i:03d}.jsonl"
        p.write_text(log.to_jsonl())
        paths.append(p)
    sp = out / "summary.json"
    sp.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    paths.append(sp)
    return paths
