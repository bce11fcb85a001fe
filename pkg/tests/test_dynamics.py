import math

import numpy as np
import pytest

from cbfteleop import (
    ControlConfig,
    StickInput,
    UAVState,
    clamp_reference,
    reference_acceleration,
    step,
    stick_to_velocity,
)


CFG = ControlConfig(frame="world")


def test_deadzone_zeroes_small_displacement():
    v = stick_to_velocity(StickInput((0.5, 0.0)), CFG, 0.0)
    assert np.allclose(v, [0.0, 0.0])
    assert np.allclose(stick_to_velocity(StickInput((0.0, 0.0)), CFG, 0.0), [0, 0])


def test_stick_scaling_past_deadzone():
    # 2 cm of displacement maps to 1 m/s, i.e. k_v = 0.5 beyond the 1 cm deadzone
    v = stick_to_velocity(StickInput((3.0, 0.0)), CFG, 0.0)
    assert np.allclose(v, [1.0, 0.0])


def test_stick_continuity_at_deadzone_edge():
    eps_speeds = []
    for eps in (1e-3, 1e-6, 1e-9):
        v = stick_to_velocity(StickInput((CFG.deadzone + eps, 0.0)), CFG, 0.0)
        eps_speeds.append(np.hypot(*v))
    assert eps_speeds[0] > eps_speeds[1] > eps_speeds[2]
    assert eps_speeds[2] < 1e-8


def test_body_frame_rotates_with_yaw():
    cfg = ControlConfig(frame="body")
    v = stick_to_velocity(StickInput((3.0, 0.0)), cfg, math.pi / 2)
    assert np.allclose(v, [0.0, 1.0], atol=1e-12)


def test_reference_acceleration_examples():
    st = UAVState(np.zeros(2), np.array([1.0, 0.0]))
    assert np.allclose(reference_acceleration(np.array([1.0, 0.0]), st, 0.02), [0, 0])
    st = UAVState(np.zeros(2), np.zeros(2))
    assert np.allclose(reference_acceleration(np.array([1.0, 0.0]), st, 0.02), [50.0, 0.0])
    st = UAVState(np.zeros(2), np.array([2.0, 0.0]))
    assert np.allclose(reference_acceleration(np.zeros(2), st, 0.02), [-100.0, 0.0])


def test_step_examples():
    cfg = ControlConfig()
    st = UAVState(np.zeros(2), np.array([1.0, 0.0]))
    nxt = step(st, np.zeros(2), 0, cfg)
    assert np.allclose(nxt.position, [0.02, 0.0])
    assert np.allclose(nxt.velocity, [1.0, 0.0])
    assert nxt.time == pytest.approx(0.02)

    st = UAVState(np.zeros(2), np.zeros(2))
    nxt = step(st, np.array([1.0, 0.0]), 0, cfg)
    assert np.allclose(nxt.position, [0.0002, 0.0])
    assert np.allclose(nxt.velocity, [0.02, 0.0])


def test_yaw_rate_integrates():
    cfg = ControlConfig()
    st = UAVState(np.zeros(2), np.zeros(2))
    for _ in range(50):  # 1 s
        st = step(st, np.zeros(2), +1, cfg)
    assert st.yaw == pytest.approx(0.038, rel=1e-12)


def test_yaw_wraps():
    st = UAVState(np.zeros(2), np.zeros(2), yaw=math.pi - 1e-6)
    cfg = ControlConfig(yaw_rate=1.0)
    nxt = step(st, np.zeros(2), +1, cfg)
    assert -math.pi < nxt.yaw <= math.pi


def test_clamp_reference():
    assert np.allclose(clamp_reference(np.array([50.0, 0.0]), 10.0), [10.0, 0.0])
    assert np.allclose(clamp_reference(np.array([3.0, 4.0]), 10.0), [3.0, 4.0])
    assert np.allclose(clamp_reference(np.array([6.0, 8.0]), 5.0), [3.0, 4.0])


def test_constant_input_matches_closed_form():
    cfg = ControlConfig()
    u = np.array([0.7, -0.3])
    x0 = np.array([1.0, 2.0])
    v0 = np.array([-0.5, 0.25])
    st = UAVState(x0.copy(), v0.copy())
    n = 500
    for _ in range(n):
        st = step(st, u, 0, cfg)
    t = n * cfg.dt
    expected = x0 + v0 * t + 0.5 * u * t * t
    assert np.allclose(st.position, expected, rtol=1e-9)
    assert np.allclose(st.velocity, v0 + u * t, rtol=1e-9)


def test_reference_acceleration_inverts_step():
    cfg = ControlConfig()
    rng = np.random.default_rng(5)
    for _ in range(200):
        st = UAVState(rng.normal(0, 5, 2), rng.normal(0, 2, 2))
        v_c = rng.normal(0, 2, 2)
        u = reference_acceleration(v_c, st, cfg.dt)
        nxt = step(st, u, 0, cfg)
        assert np.allclose(nxt.velocity, v_c, rtol=1e-12, atol=1e-14)


def test_determinism():
    cfg = ControlConfig()
    rng = np.random.default_rng(9)
    inputs = rng.normal(0, 3, size=(100, 2))

    def run():
        st = UAVState(np.zeros(2), np.zeros(2))
        out = []
        for u in inputs:
            st = step(st, u, 0, cfg)
            out.append((st.position.tobytes(), st.velocity.tobytes()))
        return out

    assert run() == run()


def test_config_validation():
    with pytest.raises(ValueError):
        ControlConfig(dt=0.0)
    with pytest.raises(ValueError):
        ControlConfig(frame="sideways")
