"""Trial state machine, time-series log, and the four performance metrics.

A trial idles until the first non-zero velocity command, then runs until the
final target is inspected (success), the vehicle crashes (failure), or the
harness times out. Logs sample at the control rate and serialize to JSON
lines (one record per sample plus a summary) or CSV.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import UAVState
from .world import CONTACT, CRASH, CrashConfig, World

IDLE = "Idle"
RUNNING = "Running"
SUCCEEDED = "Succeeded"
FAILED = "Failed"

CSV_COLUMNS = "t,x,y,yaw,vx,vy,urx,ury,ux,uy,fx,fy,contact,condition"


@dataclass
class TrialState:
    phase: str = IDLE
    next_target: int = 0
    contact: bool = False
    crash_timer: float = 0.0
    t_start: float = 0.0
    fail_reason: str = ""


def update_trial(
    trial: TrialState,
    state: UAVState,
    input_nonzero: bool,
    collision: tuple[str, float, int],
    world: World,
    crash_cfg: CrashConfig,
    dt: float,
) -> TrialState:
    """Advance the trial machine by one tick. Phases move monotonically
    Idle → Running → {Succeeded, Failed}; targets advance at most one per
    tick and only in order.
    """
    if trial.phase in (SUCCEEDED, FAILED):
        raise ValueError(f"trial already terminal ({trial.phase})")

    out = TrialState(**trial.__dict__)
    if out.phase == IDLE:
        if not input_nonzero:
            return out
        out.phase = RUNNING
        out.t_start = state.time

    kind, _, _ = collision
    if kind == CRASH:
        out.phase = FAILED
        out.fail_reason = "crash"
        out.contact = True
        return out
    if kind == CONTACT:
        out.contact = True
        out.crash_timer += dt
        if out.crash_timer > crash_cfg.crash_duration:
            out.phase = FAILED
            out.fail_reason = "crash"
            return out
    else:
        out.contact = False
        out.crash_timer = 0.0

    if out.next_target < len(world.targets):
        target = world.targets[out.next_target]
        dx = state.position[0] - target.center[0]
        dy = state.position[1] - target.center[1]
        if dx * dx + dy * dy <= target.radius * target.radius:
            out.next_target += 1
            if out.next_target == len(world.targets):
                out.phase = SUCCEEDED
    return out


_SAMPLE_FIELDS = ("t", "x", "y", "yaw", "vx", "vy", "urx", "ury", "ux", "uy", "fx", "fy")


@dataclass
class TrialLog:
    condition: str
    seed: int = 0
    samples: list[dict] = field(default_factory=list)
    outcome: str = ""
    fail_reason: str = ""
    metrics: dict = field(default_factory=dict)

    def append(self, state: UAVState, u_ref, u_safe, force, contact: bool) -> None:
        self.samples.append(
            {
                "t": float(state.time),
                "x": float(state.position[0]),
                "y": float(state.position[1]),
                "yaw": float(state.yaw),
                "vx": float(state.velocity[0]),
                "vy": float(state.velocity[1]),
                "urx": float(u_ref[0]),
                "ury": float(u_ref[1]),
                "ux": float(u_safe[0]),
                "uy": float(u_safe[1]),
                "fx": float(force[0]),
                "fy": float(force[1]),
                "contact": bool(contact),
                "condition": self.condition,
            }
        )

    def finalize(self, outcome: str, fail_reason: str = "") -> None:
        self.outcome = outcome
        self.fail_reason = fail_reason
        if len(self.samples) >= 2:
            self.metrics = compute_metrics(self)

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"type": "sample", **s}, sort_keys=True) for s in self.samples
        ]
        lines.append(
            json.dumps(
                {
                    "type": "summary",
                    "condition": self.condition,
                    "seed": self.seed,
                    "outcome": self.outcome,
                    "fail_reason": self.fail_reason,
                    "metrics": self.metrics,
                    "samples": len(self.samples),
                },
                sort_keys=True,
            )
        )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = [CSV_COLUMNS]
        for s in self.samples:
            cells = [repr(s[f]) for f in _SAMPLE_FIELDS]
            cells.append("1" if s["contact"] else "0")
            cells.append(s["condition"])
            rows.append(",".join(cells))
        return "\n".join(rows) + "\n"


def log_from_jsonl(text: str) -> TrialLog:
    samples = []
    summary = None
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec.get("type") == "sample":
            rec.pop("type")
            samples.append(rec)
        elif rec.get("type") == "summary":
            summary = rec
    if summary is None:
        raise ValueError("log has no summary record")
    log = TrialLog(condition=summary["condition"], seed=summary.get("seed", 0))
    log.samples = samples
    log.outcome = summary.get("outcome", "")
    log.fail_reason = summary.get("fail_reason", "")
    log.metrics = summary.get("metrics", {})
    return log


def compute_metrics(log: TrialLog) -> dict:
    """D_total = Σ‖Δposition‖, T_trial = t_end − t_start, V_avg = D/T,
    T_collision = Σ dt over contact-flagged samples.
    """
    if len(log.samples) < 2:
        raise ValueError("need at least 2 samples")
    t = np.array([s["t"] for s in log.samples])
    if np.any(np.diff(t) <= 0):
        raise ValueError("timestamps are not strictly increasing")
    x = np.array([s["x"] for s in log.samples])
    y = np.array([s["y"] for s in log.samples])
    contact = np.array([s["contact"] for s in log.samples], dtype=bool)
    d_total = float(np.sum(np.hypot(np.diff(x), np.diff(y))))
    t_trial = float(t[-1] - t[0])
    v_avg = d_total / t_trial if t_trial > 0 else 0.0
    t_collision = float(np.sum(np.diff(t)[contact[1:]]))
    return {
        "D_total": d_total,
        "T_trial": t_trial,
        "V_avg": v_avg,
        "T_collision": t_collision,
    }
