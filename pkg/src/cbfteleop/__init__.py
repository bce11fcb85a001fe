"""Haptic UAV teleoperation simulator with a CBF safety filter.

Pipeline: stick input → commanded velocity → reference acceleration →
safety-filter QP → nearest safe input → feedback force, over a hallway
world with ordered inspection targets and per-trial metrics.
"""

from .barriers import (
    BarrierSet,
    HalfPlaneBarrier,
    SuperEllipsoidBarrier,
    barrier_gradient,
    barrier_hessian,
    barrier_value,
    world_to_barriers,
)
from .dynamics import (
    ControlConfig,
    StickInput,
    UAVState,
    clamp_reference,
    reference_acceleration,
    step,
    stick_to_velocity,
)
from .prf import PrfConfig, RiskReport, critical_distance, prf_force, prf_report, risk
from .runner import RunSpec, run_batch, run_trial, summarize
from .safety_filter import (
    ConstraintRow,
    FilterConfig,
    FilterResult,
    assemble_constraints,
    compute_force,
    filter_input,
    solve_qp,
)
from .trial import TrialLog, TrialState, compute_metrics, update_trial
from .world import CrashConfig, Rect, Target, World, collision_query, load_world

__version__ = "0.1.0"
