"""Barrier families: half-plane walls and superellipsoid obstacles.

Each barrier is a scalar field b(q) that is non-negative exactly on its safe
set, with analytic gradient and Hessian so the second-order safety
constraint can be assembled without numerical differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels


def _as_vec2(q) -> np.ndarray:
    v = np.asarray(q, dtype=np.float64).reshape(2)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite point {q!r}")
    return v


@dataclass(frozen=True)
class HalfPlaneBarrier:
    """b(q) = normal·q − offset; safe on the side the normal points into."""

    normal: tuple[float, float]
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=np.float64)
        if abs(np.linalg.norm(n) - 1.0) > 1e-12:
            raise ValueError(f"normal {self.normal} is not unit length")

    def pack(self) -> np.ndarray:
        return np.array(
            [kernels.HALF_PLANE, self.normal[0], self.normal[1], self.offset, 0.0, 0.0, 0.0]
        )


@dataclass(frozen=True)
class SuperEllipsoidBarrier:
    """Smooth rectangle stand-in: b(q) = (|x'|/a)^ea + (|y'|/b)^eb − 1.

    ``half_length``/``half_width`` are the semi-axes of the level set itself
    (already inflated by the vehicle radius when built from a world). The
    exponents 2a/r and 2b/r are floored at 2 so b is twice differentiable
    everywhere, including the flat center.
    """

    center: tuple[float, float]
    half_length: float
    half_width: float
    uav_radius: float

    def __post_init__(self):
        if self.half_length <= 0 or self.half_width <= 0 or self.uav_radius <= 0:
            raise ValueError("superellipsoid dimensions must be positive")

    @property
    def exponents(self) -> tuple[float, float]:
        r = self.uav_radius
        return (
            max(2.0, 2.0 * self.half_length / r),
            max(2.0, 2.0 * self.half_width / r),
        )

    def pack(self) -> np.ndarray:
        ea, eb = self.exponents
        return np.array(
            [
                kernels.SUPER_ELLIPSOID,
                self.center[0],
                self.center[1],
                self.half_length,
                self.half_width,
                ea,
                eb,
            ]
        )


Barrier = HalfPlaneBarrier | SuperEllipsoidBarrier


def barrier_value(barrier: Barrier, q) -> float:
    """b(q); >= 0 iff q is in the barrier's safe set."""
    v = _as_vec2(q)
    val, _, _ = kernels.barrier_fields(barrier.pack()[None, :], v[0], v[1])
    return float(val[0])


def barrier_gradient(barrier: Barrier, q) -> np.ndarray:
    """Analytic spatial gradient of :func:`barrier_value`."""
    v = _as_vec2(q)
    _, grad, _ = kernels.barrier_fields(barrier.pack()[None, :], v[0], v[1])
    return grad[0].copy()


def barrier_hessian(barrier: Barrier, q) -> np.ndarray:
    """Analytic 2x2 Hessian of :func:`barrier_value` (exactly symmetric)."""
    v = _as_vec2(q)
    _, _, hess = kernels.barrier_fields(barrier.pack()[None, :], v[0], v[1])
    return np.array([[hess[0, 0], hess[0, 1]], [hess[0, 1], hess[0, 2]]])


@dataclass
class BarrierSet:
    """Ordered barriers plus their packed parameter array for the kernels."""

    barriers: list[Barrier]
    params: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.barriers:
            self.params = np.stack([b.pack() for b in self.barriers])
        else:
            self.params = np.zeros((0, 7))

    def __len__(self) -> int:
        return len(self.barriers)

    def __iter__(self):
        return iter(self.barriers)

    def values(self, q) -> np.ndarray:
        v = _as_vec2(q)
        val, _, _ = kernels.barrier_fields(self.params, v[0], v[1])
        return val

    def min_value(self, q) -> float:
        vals = self.values(q)
        return float(vals.min()) if len(vals) else np.inf


def world_to_barriers(world) -> BarrierSet:
    """The world's seven constraints: four inset walls, one superellipsoid
    per inner rectangle (semi-axes = rectangle half-extent + vehicle radius).

    Rejects worlds where an inner rectangle touches the outer boundary,
    since that pinches off the corridor.
    """
    r = world.uav_radius
    o = world.outer
    out: list[Barrier] = [
        HalfPlaneBarrier((1.0, 0.0), o.xmin + r),
        HalfPlaneBarrier((-1.0, 0.0), -(o.xmax - r)),
        HalfPlaneBarrier((0.0, 1.0), o.ymin + r),
        HalfPlaneBarrier((0.0, -1.0), -(o.ymax - r)),
    ]
    for i, rect in enumerate(world.inner):
        if (
            rect.xmin <= o.xmin
            or rect.ymin <= o.ymin
            or rect.xmax >= o.xmax
            or rect.ymax >= o.ymax
        ):
            raise ValueError(f"inner rectangle {i} touches the outer boundary")
        out.append(
            SuperEllipsoidBarrier(
                center=rect.center,
                half_length=rect.half_extents[0] + r,
                half_width=rect.half_extents[1] + r,
                uav_radius=r,
            )
        )
    return BarrierSet(out)
