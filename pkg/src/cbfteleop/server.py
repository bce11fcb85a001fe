"""Real-time session service: WebSocket telemetry/input plus HTTP endpoints.

One session at a time owns the simulation clock; the tick loop is wall-clock
paced at the control period. Input messages land in a latest-value mailbox
(zero-order hold with a staleness cutoff), telemetry is broadcast to every
connected client each tick, and the trial log is downloadable when done.

Message types over the socket: ``input``, ``telemetry``, ``configure``,
``trial_event``, ``error``.
"""

from __future__ import annotations

import asyncio
import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .barriers import world_to_barriers
from .dynamics import (
    ControlConfig,
    StickInput,
    UAVState,
    clamp_reference,
    reference_acceleration,
    step,
    stick_to_velocity,
)
from .prf import PrfConfig, prf_force, prf_report
from .runner import CONDITION_CBF, CONDITION_PRF, CONDITIONS, MODE_HAPTIC, MODE_OVERRIDE
from .safety_filter import FilterConfig, filter_input
from .trial import FAILED, IDLE, SUCCEEDED, TrialLog, TrialState, update_trial
from .world import CrashConfig, World, builtin_worlds, collision_query, load_world
from .world import to_dict as world_to_dict

INPUT_STALE_AFTER = 0.2   # s without a fresh stick message: hold zero
CLIENT_GRACE = 2.0        # s without any client before the trial clock pauses


@dataclass
class ServerConfig:
    host: str = "127.0.0.1"
    port: int = 8750
    world: str = "default"
    condition: str = CONDITION_CBF
    mode: str = MODE_HAPTIC
    control: ControlConfig = field(default_factory=ControlConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    prf: PrfConfig = field(default_factory=PrfConfig)
    crash: CrashConfig = field(default_factory=CrashConfig)
    log_dir: str = "logs"


def load_server_config(path) -> ServerConfig:
    data = json.loads(Path(path).read_text())
    kwargs = {}
    for key in ("host", "port", "world", "condition", "mode", "log_dir"):
        if key in data:
            kwargs[key] = data[key]
    for key, cls in (
        ("control", ControlConfig),
        ("filter", FilterConfig),
        ("prf", PrfConfig),
        ("crash", CrashConfig),
    ):
        if key in data:
            kwargs[key] = cls(**data[key])
    return ServerConfig(**kwargs)


class Session:
    """Owns one simulation clock, state, trial and log."""

    def __init__(self, cfg: ServerConfig, world: World):
        self.id = uuid.uuid4().hex[:12]
        self.cfg = cfg
        self.world = world
        self.barriers = world_to_barriers(world)
        self.state = UAVState(np.array(world.start_position), np.zeros(2), world.start_yaw, 0.0)
        self.trial = TrialState()
        self.log = TrialLog(condition=cfg.condition)
        self.tick_count = 0
        self.stick = StickInput()
        self.last_input_seq = -1
        self.last_input_wall = -np.inf
        self.clients: set[asyncio.Queue] = set()
        self.last_client_wall = time.monotonic()
        self.task: asyncio.Task | None = None
        self.finished = False
        # running metrics, updated incrementally each tick
        self.d_total = 0.0
        self.t_collision = 0.0
        self.last_position = self.state.position.copy()

    # -- input ---------------------------------------------------------------

    def accept_input(self, msg: dict) -> dict | None:
        seq = int(msg.get("seq", 0))
        if seq <= self.last_input_seq:
            return None  # stale message dropped
        stick = msg.get("stick", [0.0, 0.0])
        sx, sy = float(stick[0]), float(stick[1])
        sx = min(1.0, max(-1.0, sx))
        sy = min(1.0, max(-1.0, sy))
        scale = self.cfg.control.workspace
        self.stick = StickInput(
            displacement=(sx * scale, sy * scale),
            yaw_button=int(np.sign(int(msg.get("yaw_button", 0)))),
        )
        self.last_input_seq = seq
        self.last_input_wall = time.monotonic()
        return None

    def _current_stick(self) -> StickInput:
        if time.monotonic() - self.last_input_wall > INPUT_STALE_AFTER:
            return StickInput()
        return self.stick

    # -- simulation ----------------------------------------------------------

    def tick(self) -> dict:
        cfg = self.cfg
        stick = self._current_stick()
        v_c = stick_to_velocity(stick, cfg.control, self.state.yaw)
        u_ref = clamp_reference(
            reference_acceleration(v_c, self.state, cfg.control.dt), cfg.control.u_max
        )

        risk = None
        margins: list[float] = []
        if cfg.condition == CONDITION_CBF:
            result = filter_input(self.state, u_ref, self.barriers, cfg.filter)
            u_safe = result.u_safe
            force = result.force
            margins = [float(m) for m in result.margins]
        elif cfg.condition == CONDITION_PRF:
            u_safe = u_ref
            force = prf_force(self.state, self.world, cfg.prf)
            rep = prf_report(self.state, self.world, cfg.prf)
            risk = {
                "risk": rep.risk,
                "direction": list(rep.direction),
                "worst_obstacle": rep.worst_obstacle,
                "distance": rep.distance,
            }
        else:
            u_safe = u_ref
            force = np.zeros(2)

        u_applied = u_safe if cfg.mode == MODE_OVERRIDE else u_ref
        self.state = step(self.state, u_applied, stick.yaw_button, cfg.control)
        collision = collision_query(self.state.position, self.world, cfg.crash)
        input_nonzero = bool(v_c[0] != 0.0 or v_c[1] != 0.0)
        prev_phase = self.trial.phase
        if self.trial.phase not in (SUCCEEDED, FAILED):
            self.trial = update_trial(
                self.trial, self.state, input_nonzero, collision, self.world,
                cfg.crash, cfg.control.dt,
            )
            if self.trial.phase != IDLE:
                self.log.append(self.state, u_ref, u_safe, force, self.trial.contact)
                self.d_total += float(np.hypot(*(self.state.position - self.last_position)))
                if self.trial.contact:
                    self.t_collision += cfg.control.dt
            if self.trial.phase in (SUCCEEDED, FAILED) and not self.finished:
                self.finished = True
                self.log.finalize(
                    "success" if self.trial.phase == SUCCEEDED else "failure",
                    self.trial.fail_reason,
                )
        self.last_position = self.state.position.copy()

        self.tick_count += 1
        telemetry = {
            "type": "telemetry",
            "tick": self.tick_count,
            "t": self.state.time,
            "pose": {
                "x": float(self.state.position[0]),
                "y": float(self.state.position[1]),
                "yaw": float(self.state.yaw),
            },
            "velocity": [float(self.state.velocity[0]), float(self.state.velocity[1])],
            "force": [float(force[0]), float(force[1])],
            "u_ref": [float(u_ref[0]), float(u_ref[1])],
            "u_safe": [float(u_safe[0]), float(u_safe[1])],
            "margins": margins,
            "risk": risk,
            "phase": self.trial.phase,
            "next_target": self.trial.next_target,
            "contact": bool(self.trial.contact),
            "last_input_seq": self.last_input_seq,
            "metrics_so_far": self._running_metrics(),
        }
        if self.trial.phase != prev_phase:
            telemetry["trial_event"] = {
                "type": "trial_event",
                "phase": self.trial.phase,
                "fail_reason": self.trial.fail_reason,
                "metrics": self.log.metrics or None,
            }
        return telemetry

    def _running_metrics(self) -> dict | None:
        if self.log.metrics:
            return self.log.metrics
        if self.trial.phase == IDLE:
            return None
        t_trial = self.state.time - self.trial.t_start
        return {
            "D_total": self.d_total,
            "T_trial": t_trial,
            "V_avg": self.d_total / t_trial if t_trial > 0 else 0.0,
            "T_collision": self.t_collision,
        }

    def broadcast(self, message: dict) -> None:
        for q in list(self.clients):
            if q.full():
                try:
                    q.get_nowait()
                except asyncio.QueueEmpty:
                    pass
            q.put_nowait(message)

    async def run(self) -> None:
        dt = self.cfg.control.dt
        loop = asyncio.get_running_loop()
        next_deadline = loop.time() + dt
        while True:
            paused = (
                not self.clients
                and time.monotonic() - self.last_client_wall > CLIENT_GRACE
            )
            if not paused:
                self.broadcast(self.tick())
            await asyncio.sleep(max(0.0, next_deadline - loop.time()))
            next_deadline += dt
            if next_deadline < loop.time():  # fell behind: resynchronize
                next_deadline = loop.time() + dt


def create_app(cfg: ServerConfig | None = None, ui_dir: str | None = None) -> FastAPI:
    cfg = cfg or ServerConfig()
    app = FastAPI(title="cbfteleop")
    app.state.cfg = cfg
    app.state.session = None
    app.state.finalized = {}

    def _start_session(scfg: ServerConfig) -> Session:
        old: Session | None = app.state.session
        if old is not None:
            if old.task is not None:
                old.task.cancel()
            if not old.finished and old.log.samples:
                old.log.finalize("failure", "aborted")
            app.state.finalized[old.id] = old.log
        world = load_world(scfg.world)
        session = Session(scfg, world)
        session.task = asyncio.get_running_loop().create_task(session.run())
        app.state.session = session
        return session

    @app.get("/worlds")
    def worlds():
        return {"worlds": builtin_worlds()}

    @app.get("/world/{name}")
    def world_geometry(name: str):
        try:
            return world_to_dict(load_world(name))
        except (FileNotFoundError, ValueError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=404)

    @app.post("/session")
    async def configure_session(body: dict):
        base = app.state.cfg
        try:
            scfg = ServerConfig(
                host=base.host,
                port=base.port,
                world=body.get("world", base.world),
                condition=body.get("condition", base.condition),
                mode=body.get("mode", base.mode),
                control=base.control,
                filter=base.filter,
                prf=base.prf,
                crash=base.crash,
                log_dir=base.log_dir,
            )
            if scfg.condition not in CONDITIONS:
                raise ValueError(f"unknown condition {scfg.condition!r}")
            if scfg.mode == MODE_OVERRIDE and scfg.condition != CONDITION_CBF:
                raise ValueError("override mode requires the CBF condition")
            session = _start_session(scfg)
        except (ValueError, FileNotFoundError) as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        return {
            "session_id": session.id,
            "world": scfg.world,
            "condition": scfg.condition,
            "mode": scfg.mode,
            "barriers": len(session.barriers),
        }

    @app.get("/session/{session_id}/log")
    def session_log(session_id: str):
        session: Session | None = app.state.session
        if session is not None and session.id == session_id:
            log = session.log
        elif session_id in app.state.finalized:
            log = app.state.finalized[session_id]
        else:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        return PlainTextResponse(log.to_jsonl(), media_type="application/jsonl")

    @app.websocket("/ws")
    async def websocket_endpoint(ws: WebSocket):
        await ws.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=64)
        session: Session | None = app.state.session
        if session is not None:
            session.clients.add(queue)
            session.last_client_wall = time.monotonic()

        async def sender():
            while True:
                msg = await queue.get()
                await ws.send_text(json.dumps(msg))

        send_task = asyncio.create_task(sender())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict) or "type" not in msg:
                        raise ValueError("message must be an object with a 'type'")
                except (json.JSONDecodeError, ValueError) as exc:
                    await ws.send_text(json.dumps({"type": "error", "error": str(exc)}))
                    continue
                session = app.state.session
                if msg["type"] == "input":
                    if session is not None:
                        try:
                            session.accept_input(msg)
                        except (TypeError, ValueError, IndexError) as exc:
                            await ws.send_text(
                                json.dumps({"type": "error", "error": f"bad input: {exc}"})
                            )
                    if session is not None and queue not in session.clients:
                        session.clients.add(queue)
                elif msg["type"] == "configure":
                    resp = await configure_session(msg.get("config", {}))
                    if isinstance(resp, JSONResponse):
                        await ws.send_text(
                            json.dumps({"type": "error", "error": json.loads(resp.body)["error"]})
                        )
                    else:
                        new_session: Session = app.state.session
                        new_session.clients.add(queue)
                        await ws.send_text(json.dumps({"type": "configure", **resp}))
                else:
                    await ws.send_text(
                        json.dumps({"type": "error", "error": f"unknown type {msg['type']!r}"})
                    )
        except WebSocketDisconnect:
            pass
        finally:
            send_task.cancel()
            session = app.state.session
            if session is not None:
                session.clients.discard(queue)
                session.last_client_wall = time.monotonic()

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
