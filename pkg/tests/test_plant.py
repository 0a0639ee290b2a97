import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from curveswarm.plant import AgentState, Disturbance, DisturbanceConfig, clamp_norm, step
from curveswarm.quaternion import Vec3

from conftest import vec3

dts = st.floats(min_value=1e-4, max_value=1.0)


def zoh_oracle(x, v, u, dt):
    # exact discretization of [x; v]' = [[0, I], [0, 0]] [x; v] + [0; I] u via the augmented exponential
    M = np.zeros((9, 9))
    M[0:3, 3:6] = np.eye(3)
    M[3:6, 6:9] = np.eye(3)
    z = expm(M * dt) @ np.concatenate([x, v, u])
    return z[0:3], z[3:6]


def test_step_examples():
    s = step(AgentState(0, (0, 0, 0), (1, 0, 0)), (0, 0, 0), 0.5)
    assert s.x == (0.5, 0, 0) and s.v == (1, 0, 0)
    s = step(AgentState(0, (0, 0, 0), (0, 0, 0)), (2, 0, 0), 0.5)
    assert s.x == (0.25, 0, 0) and s.v == (1, 0, 0)


@pytest.mark.parametrize("dt", [0.0, -0.01])
def test_step_rejects_non_positive_dt(dt):
    with pytest.raises(ValueError):
        step(AgentState(0, (1, 2, 3)), (0, 0, 0), dt)


@given(vec3, vec3, vec3, dts)
def test_step_matches_matrix_exponential(x, v, u, dt):
    s = step(AgentState(0, x, v), u, dt)
    ex, ev = zoh_oracle(np.array(x), np.array(v), np.array(u), dt)
    assert np.array(s.x) == pytest.approx(ex, abs=1e-9)
    assert np.array(s.v) == pytest.approx(ev, abs=1e-9)


@given(vec3, vec3, vec3, dts)
def test_two_half_steps_equal_one_step(x, v, u, dt):
    a = step(AgentState(0, x, v), u, dt)
    b = step(step(AgentState(0, x, v), u, dt / 2), u, dt / 2)
    assert max(abs(p - q) for p, q in zip(a.x + a.v, b.x + b.v)) <= 1e-12


def test_non_finite_command_marks_failed():
    s0 = AgentState(3, (1, 0, 0), (0, 1, 0))
    s1 = step(s0, (math.nan, 0, 0), 0.01)
    assert s1.failed and s1.x == s0.x and s1.v == s0.v
    # a failed agent no longer moves
    assert step(s1, (1, 1, 1), 0.01) is s1


def test_disturbance_added_to_command():
    s = step(AgentState(0, (0, 0, 0)), (1, 0, 0), 1.0, w=(1, 0, -2))
    assert s.v == (2, 0, -2)


def test_disturbance_seeded_reproducible():
    cfg = DisturbanceConfig(enabled=True, sigma_a=0.1, seed=42)
    a = [Disturbance(cfg).draw() for _ in range(1)]
    d1, d2 = Disturbance(cfg), Disturbance(cfg)
    s1 = [d1.draw() for _ in range(100)]
    s2 = [d2.draw() for _ in range(100)]
    assert s1 == s2 and s1[0] == a[0]
    assert Disturbance(DisturbanceConfig(enabled=True, sigma_a=0.1, seed=43)).draw() != s1[0]


def test_disturbance_statistics():
    d = Disturbance(DisturbanceConfig(enabled=True, sigma_a=0.1, seed=1))
    w = np.array([d.draw() for _ in range(20_000)])
    assert np.abs(w.mean(axis=0)).max() < 0.005
    assert w.std(axis=0) == pytest.approx([0.1] * 3, rel=0.03)


def test_disturbance_disabled_is_zero():
    d = Disturbance(DisturbanceConfig(enabled=False, sigma_a=1.0, seed=1))
    assert d.draw() == (0, 0, 0)
    with pytest.raises(ValueError):
        DisturbanceConfig(sigma_a=-1.0)


def test_clamp_norm():
    u = Vec3(3.0, 4.0, 0.0)
    assert clamp_norm(u, None) is u
    assert clamp_norm(u, 10.0) == u
    assert clamp_norm(u, 1.0) == pytest.approx((0.6, 0.8, 0.0))
