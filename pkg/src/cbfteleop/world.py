"""Hallway world: geometry, JSON schema, and disk-vs-world collision query.

A world is an outer rectangle, inner rectangular obstacles, an ordered
target list, the vehicle radius and a start pose. World files are JSON with
a ``schema_version`` field; see ``worlds/default.json`` for the layout.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import kernels

SCHEMA_VERSION = 1

CLEAR = "clear"
CONTACT = "contact"
CRASH = "crash"


@dataclass(frozen=True)
class Rect:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if self.xmax <= self.xmin or self.ymax <= self.ymin:
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))

    @property
    def half_extents(self) -> tuple[float, float]:
        return (0.5 * (self.xmax - self.xmin), 0.5 * (self.ymax - self.ymin))


@dataclass(frozen=True)
class Target:
    center: tuple[float, float]
    radius: float = 0.25


@dataclass(frozen=True)
class CrashConfig:
    contact_eps: float = 1e-3   # m of overlap tolerated as numerical skin
    crash_depth: float = 0.1    # m of penetration that ends the flight
    crash_duration: float = 1.0  # s of continuous contact that ends it


@dataclass
class World:
    outer: Rect
    inner: list[Rect]
    targets: list[Target]
    uav_radius: float
    start_position: tuple[float, float]
    start_yaw: float = 0.0
    route: list[tuple[float, float]] = field(default_factory=list)
    name: str = "world"

    # packed arrays for the clearance kernels
    outer_arr: np.ndarray = field(init=False, repr=False)
    rects_arr: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.uav_radius <= 0:
            raise ValueError("uav_radius must be positive")
        o = self.outer
        self.outer_arr = np.array([o.xmin, o.ymin, o.xmax, o.ymax])
        if self.inner:
            self.rects_arr = np.array(
                [[r.xmin, r.ymin, r.xmax, r.ymax] for r in self.inner]
            )
        else:
            self.rects_arr = np.zeros((0, 4))
        for i, t in enumerate(self.targets):
            kind, _, _ = collision_query(t.center, self)
            if kind != CLEAR:
                raise ValueError(f"target {i} at {t.center} is not in free space")
        kind, _, _ = collision_query(self.start_position, self)
        if kind != CLEAR:
            raise ValueError(f"start pose {self.start_position} is not in free space")

    def obstacle_names(self) -> list[str]:
        return ["wall_left", "wall_right", "wall_bottom", "wall_top"] + [
            f"rect_{i}" for i in range(len(self.inner))
        ]


def collision_query(
    position, world: World, crash: CrashConfig = CrashConfig()
) -> tuple[str, float, int]:
    """Classify the vehicle disk at ``position`` against every obstacle.

    Returns ``(kind, depth, obstacle_index)`` where depth is the deepest
    overlap (0 when clear). Overlap within ``contact_eps`` counts as clear;
    beyond ``crash_depth`` the flight is lost. Escalation of persistent
    contact to a crash is time-based and lives in the trial update.
    """
    p = np.asarray(position, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"non-finite position {position!r}")
    pen, idx = kernels.max_penetration(
        world.outer_arr, world.rects_arr, p[0], p[1], world.uav_radius
    )
    if pen <= crash.contact_eps:
        return CLEAR, 0.0, -1
    if pen > crash.crash_depth:
        return CRASH, float(pen), int(idx)
    return CONTACT, float(pen), int(idx)


def to_dict(world: World) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "name": world.name,
        "outer": [world.outer.xmin, world.outer.ymin, world.outer.xmax, world.outer.ymax],
        "inner": [[r.xmin, r.ymin, r.xmax, r.ymax] for r in world.inner],
        "targets": [{"center": list(t.center), "radius": t.radius} for t in world.targets],
        "uav_radius": world.uav_radius,
        "start_pose": {"position": list(world.start_position), "yaw": world.start_yaw},
        "route": [list(w) for w in world.route],
    }


def from_dict(data: dict) -> World:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported world schema_version {version!r}")
    try:
        outer = Rect(*map(float, data["outer"]))
        inner = [Rect(*map(float, r)) for r in data.get("inner", [])]
        targets = [
            Target(tuple(map(float, t["center"])), float(t.get("radius", 0.25)))
            for t in data["targets"]
        ]
        pose = data["start_pose"]
        return World(
            outer=outer,
            inner=inner,
            targets=targets,
            uav_radius=float(data["uav_radius"]),
            start_position=tuple(map(float, pose["position"])),
            start_yaw=float(pose.get("yaw", 0.0)),
            route=[tuple(map(float, w)) for w in data.get("route", [])],
            name=str(data.get("name", "world")),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed world file: {exc!r}") from exc


def save_world(world: World, path) -> None:
    Path(path).write_text(json.dumps(to_dict(world), indent=2, sort_keys=True) + "\n")


def load_world(source) -> World:
    """Load a world from a file path or a built-in name like ``default``."""
    p = Path(source)
    if not p.exists():
        builtin = resources.files("cbfteleop").joinpath(f"worlds/{source}.json")
        if builtin.is_file():
            return from_dict(json.loads(builtin.read_text()))
        raise FileNotFoundError(f"world {source!r} not found")
    return from_dict(json.loads(p.read_text()))


def builtin_worlds() -> list[str]:
    folder = resources.files("cbfteleop").joinpath("worlds")
    return sorted(f.name[: -len(".json")] for f in folder.iterdir() if f.name.endswith(".json"))
