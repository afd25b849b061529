import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import coulomb_grid_oracle, coulomb_residual_sum

from multileg import (
    BodyVelocity,
    FrictionModel,
    HomotopySchedule,
    NoConvergence,
    RobotModel,
    ShapeFrame,
    default_schedule,
    solve_coulomb,
    solve_planar,
    solve_support,
)
from multileg.coulomb import balance_residual
from multileg.support import SupportSolution, SupportState
from multileg.trajectory import HEXAPOD_HIPS


def line_instance(speeds, xs=None):
    """Equal-load feet on the body x-axis sliding along it at ``speeds``."""
    n = len(speeds)
    xs = np.linspace(-1, 1, n) if xs is None else np.asarray(xs, float)
    q = np.column_stack([xs, np.zeros(n), np.full(n, -0.5)])
    qd = np.zeros((n, 3))
    qd[:, 0] = speeds
    support = SupportSolution(SupportState(), frozenset(range(n)), np.full(n, 1.0 / n), 0)
    return RobotModel.uniform(n), ShapeFrame(q, qd), support


def hexapod_instance(seed):
    rng = np.random.default_rng(seed)
    q = HEXAPOD_HIPS + rng.uniform(-0.15, 0.15, (6, 3))
    robot = RobotModel.from_arrays(rng.uniform(5, 15, 6), rng.uniform(0.5, 1.5, 6))
    frame = ShapeFrame(q, rng.uniform(-1, 1, (6, 3)))
    return robot, frame, solve_support(robot, frame), rng.uniform(-np.pi, np.pi)


def test_default_schedule():
    s = default_schedule()
    assert (s.eps0, s.shrink, s.rel_tol, s.max_stages) == (1e-5, 0.1, 1e-3, 10)
    np.testing.assert_allclose(s.epsilons()[:3], [1e-5, 1e-6, 1e-7])
    with pytest.raises(ValueError):
        HomotopySchedule(eps0=0.0)
    with pytest.raises(ValueError):
        HomotopySchedule(shrink=1.0)


def test_median_three_legs():
    robot, frame, support = line_instance([1.0, 2.0, 4.0])
    sol = solve_coulomb(robot, frame, support)
    np.testing.assert_allclose(sol.vel.as_array(), [-2, 0, 0], atol=1e-3)
    assert sol.converged


def test_mean_three_legs_viscous():
    robot, frame, support = line_instance([1.0, 2.0, 4.0])
    planar, _ = solve_planar(robot, frame, support)
    np.testing.assert_allclose(planar.vel.as_array(), [-7 / 3, 0, 0], atol=1e-12)


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=8, unique=True).filter(lambda v: len(v) % 2 == 0))
def test_even_count_lies_between_medians(speeds):
    robot, frame, support = line_instance(speeds)
    vx = -solve_coulomb(robot, frame, support).vel.v_xy[0]
    s = np.sort(speeds)
    lo, hi = s[len(s) // 2 - 1], s[len(s) // 2]
    assert lo - 1e-3 <= vx <= hi + 1e-3


@given(st.integers(0, 10_000))
def test_residual_within_invariant(seed):
    robot, frame, support, theta = hexapod_instance(seed)
    sol = solve_coulomb(robot, frame, support, theta)
    muFz = float((robot.mu * support.normal_forces).sum())
    assert np.max(np.abs(sol.balance_residual)) <= 1e-8 * muFz
    # the reported residual is the one of the reported velocity
    r = balance_residual(robot, frame, support, theta, sol.vel, sol.epsilon)
    np.testing.assert_allclose(r, sol.balance_residual, atol=1e-12)


def test_balance_residual_viscous_limit():
    robot, frame, support, theta = hexapod_instance(3)
    planar, _ = solve_planar(robot, frame, support, theta)
    r = balance_residual(robot, frame, support, theta, planar.vel, 1e12)
    assert np.max(np.abs(r)) < 1e-9


def test_balance_residual_symmetric_rest():
    # flat body, equal loads; left/right feet mirror each other and the
    # front and middle pairs push in opposite directions
    q = HEXAPOD_HIPS.copy()
    q[:, 2] = -0.45
    qd = np.zeros_like(q)
    qd[:, 0] = [0.2, -0.2, 0.0, 0.2, -0.2, 0.0]
    qd[:, 1] = [0.1, 0.1, 0.1, -0.1, -0.1, -0.1]
    robot = RobotModel.uniform(6, 10.0)
    frame = ShapeFrame(q, qd)
    support = solve_support(robot, frame)
    r = balance_residual(robot, frame, support, 0.0, BodyVelocity(), 1e-5)
    np.testing.assert_allclose(r, 0, atol=1e-14)


@given(st.integers(0, 10_000), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(1e-8, 1))
def test_balance_residual_matches_direct_sum(seed, vx, vy, w, eps):
    robot, frame, support, theta = hexapod_instance(seed)
    idx = sorted(support.contacts)
    muFz = robot.mu[idx] * support.normal_forces[idx]
    ref = coulomb_residual_sum(np.array([vx, vy, w]), theta, frame.q[idx], frame.qdot[idx], muFz, eps)
    r = balance_residual(robot, frame, support, theta, BodyVelocity((vx, vy), w), eps)
    np.testing.assert_allclose(r, ref, atol=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_random_instance_matches_grid_oracle(seed):
    robot, frame, support, theta = hexapod_instance(seed)
    sol = solve_coulomb(robot, frame, support, theta)
    idx = sorted(support.contacts)
    muFz = robot.mu[idx] * support.normal_forces[idx]
    visc, _ = solve_planar(robot, frame, support, theta, FrictionModel.viscous())
    ref = coulomb_grid_oracle(theta, frame.q[idx], frame.qdot[idx], muFz, visc.vel.as_array())
    np.testing.assert_allclose(sol.vel.as_array(), ref, atol=1e-3)


def test_fallback_from_bad_start():
    robot, frame, support, theta = hexapod_instance(11)
    good = solve_coulomb(robot, frame, support, theta)
    bad = BodyVelocity((np.nan, 0.0), 0.0)
    sol = solve_coulomb(robot, frame, support, theta, init=bad)
    assert sol.fell_back
    np.testing.assert_allclose(sol.vel.as_array(), good.vel.as_array(), atol=1e-12)
    with pytest.raises(NoConvergence):
        solve_coulomb(robot, frame, support, theta, init=bad, fallback=False)


def test_far_start_still_converges():
    robot, frame, support, theta = hexapod_instance(11)
    good = solve_coulomb(robot, frame, support, theta)
    sol = solve_coulomb(robot, frame, support, theta, init=BodyVelocity((30, -30), 30))
    np.testing.assert_allclose(sol.vel.as_array(), good.vel.as_array(), atol=1e-3)


def test_hot_start_agrees_with_cold_start():
    robot, frame, support, theta = hexapod_instance(5)
    cold = solve_coulomb(robot, frame, support, theta)
    hot = solve_coulomb(robot, frame, support, theta, init=cold.vel)
    np.testing.assert_allclose(hot.vel.as_array(), cold.vel.as_array(), atol=1e-6)
    assert not hot.fell_back


def test_forces_are_world_frame_and_bounded():
    robot, frame, support, theta = hexapod_instance(8)
    sol = solve_coulomb(robot, frame, support, theta)
    mag = np.linalg.norm(sol.foot_forces, axis=1)
    assert np.all(mag <= robot.mu * support.normal_forces * (1 + 1e-6) + 1e-15)
    np.testing.assert_allclose(sol.foot_forces.sum(axis=0), sol.balance_residual[:2], atol=1e-12)
