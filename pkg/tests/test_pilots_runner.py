import numpy as np
import pytest

from cbfteleop import ControlConfig, RunSpec, UAVState, load_world, run_batch, world_to_barriers
from cbfteleop.pilots import Pilot, PilotSpec
from cbfteleop.runner import run_trial


WORLD = load_world("default")
BARRIERS = world_to_barriers(WORLD)


def _pilot(kind, **kw):
    return Pilot(PilotSpec(kind=kind, **kw), WORLD, ControlConfig(frame="world"))


def test_waypoint_holds_at_route_end():
    pilot = _pilot("waypoint")
    pilot.waypoint_index = len(pilot.route) - 1
    end = np.asarray(WORLD.route[-1])
    st = UAVState(end.copy(), np.zeros(2))
    stick = pilot.step(st, np.zeros(2), np.random.default_rng(0))
    assert np.allclose(stick.displacement, [0.0, 0.0])


def test_charger_aims_at_nearest_wall():
    pilot = _pilot("charger")
    st = UAVState(np.array([0.9, 4.5]), np.zeros(2))  # left wall closest
    stick = pilot.step(st, np.zeros(2), np.random.default_rng(0))
    assert stick.displacement[0] == pytest.approx(-8.0)
    assert stick.displacement[1] == pytest.approx(0.0)


def test_compliant_admittance_example():
    # nominal (3, 0) cm + 0.5 cm/N * (0, -2) N = (3, -1) cm
    pilot = _pilot(
        "compliant",
        cruise_speed=1.0,  # 1 m/s toward a distant +x waypoint: stick (3, 0)
        admittance=0.5,
        correction=0.0,
        hand_tau=1e-9,     # responsive hand: the offset settles in one tick
        hand_slew=1e9,
        stick_slew=1e9,
    )
    pilot.route = [np.array([100.0, 0.0])]
    st = UAVState(np.zeros(2), np.zeros(2))
    stick = pilot.step(st, np.array([0.0, -2.0]), np.random.default_rng(0))
    assert stick.displacement[0] == pytest.approx(3.0)
    assert stick.displacement[1] == pytest.approx(-1.0)


def test_pilot_determinism():
    def run():
        pilot = _pilot("compliant", noise_std=1.0, admittance=2.0)
        rng = np.random.default_rng(99)
        st = UAVState(np.array(WORLD.start_position), np.zeros(2))
        return [
            pilot.step(st, np.array([0.1, -0.2]), rng).displacement for _ in range(50)
        ]

    assert run() == run()


def test_unknown_pilot_kind_rejected():
    with pytest.raises(ValueError):
        PilotSpec(kind="psychic")


def test_runspec_validation():
    with pytest.raises(ValueError):
        RunSpec(condition="X")
    with pytest.raises(ValueError):
        RunSpec(condition="PRF", mode="override")
    with pytest.raises(ValueError):
        RunSpec(trials=0)


def test_charger_crashes_without_feedback():
    spec = RunSpec(condition="N", mode="haptic_only", pilot=PilotSpec(kind="charger"))
    log = run_trial(spec, WORLD, BARRIERS, 0)
    assert log.outcome == "failure" and log.fail_reason == "crash"


def test_override_charger_never_crashes_short_soak():
    spec = RunSpec(condition="CBF", mode="override", pilot=PilotSpec(kind="charger"), timeout=40.0)
    log = run_trial(spec, WORLD, BARRIERS, 0)
    assert log.fail_reason != "crash"
    assert log.metrics["T_collision"] == 0.0


def test_waypoint_pilot_completes_course_all_conditions():
    for condition, mode in [("CBF", "override"), ("CBF", "haptic_only"), ("N", "haptic_only"), ("PRF", "haptic_only")]:
        spec = RunSpec(condition=condition, mode=mode, pilot=PilotSpec(kind="waypoint"))
        log = run_trial(spec, WORLD, BARRIERS, 1)
        assert log.outcome == "success", (condition, mode, log.fail_reason)


def test_batch_determinism_byte_identical():
    spec = RunSpec(
        condition="CBF",
        mode="haptic_only",
        pilot=PilotSpec(kind="compliant", noise_std=1.2, admittance=4.0),
        trials=3,
        seed=5,
        timeout=60.0,
    )
    logs1, summary1 = run_batch(spec)
    logs2, summary2 = run_batch(spec)
    for a, b in zip(logs1, logs2):
        assert a.to_jsonl() == b.to_jsonl()
    assert summary1 == summary2


def test_batch_summary_counts():
    spec = RunSpec(condition="N", mode="haptic_only", pilot=PilotSpec(kind="waypoint"), trials=2)
    logs, summary = run_batch(spec)
    assert summary["trials"] == 2
    assert summary["successes"] + summary["failures"] == 2
    assert summary["successes"] == 2
    assert set(summary["mean_metrics"]) == {"D_total", "T_trial", "V_avg", "T_collision"}


def test_timeout_recorded_as_failure():
    # a crawling pilot cannot finish the course in 2 simulated seconds
    spec = RunSpec(
        condition="N",
        mode="haptic_only",
        pilot=PilotSpec(kind="waypoint", cruise_speed=0.01),
        timeout=2.0,
    )
    log = run_trial(spec, WORLD, BARRIERS, 0)
    assert log.outcome == "failure" and log.fail_reason == "timeout"
