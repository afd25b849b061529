import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import planar_dense, support_bruteforce

from multileg import (
    FrictionModel,
    RobotModel,
    ShapeFrame,
    SingularBalance,
    assemble_balance,
    full_frame_solve,
    solve_planar,
    solve_support,
)
from multileg.core import S
from multileg.friction import h_body
from multileg.support import SupportSolution, SupportState
from multileg.trajectory import GaitSpec, gait_trajectory, HEXAPOD_HIPS


def equal_support(n):
    return SupportSolution(SupportState(), frozenset(range(n)), np.full(n, 1.0 / n), 0)


def circle3(r=1.0):
    a = 2 * np.pi * np.arange(3) / 3
    return np.column_stack([r * np.cos(a), r * np.sin(a), np.full(3, -0.5)])


def random_instance(seed, anisotropic=True):
    rng = np.random.default_rng(seed)
    q = HEXAPOD_HIPS + rng.uniform(-0.15, 0.15, (6, 3))
    qd = rng.uniform(-1, 1, (6, 3))
    w = rng.uniform(-1, 1, (6, 2)) if anisotropic else np.zeros((6, 2))
    robot = RobotModel.from_arrays(rng.uniform(5, 15, 6), rng.uniform(0.5, 1.5, 6), w)
    return robot, ShapeFrame(q, qd), rng.uniform(-np.pi, np.pi)


def body_H(robot, support):
    return [h_body(m, w, f) for m, w, f in zip(robot.mu, robot.traction_dir, support.normal_forces)]


def test_assemble_single_contact_at_origin():
    M, B = assemble_balance([[0, 0]], [-np.eye(2)])
    np.testing.assert_allclose(M, [[-1, 0, 0], [0, -1, 0], [0, 0, 0]])
    assert B.shape == (1, 3, 2)


def test_assemble_three_on_unit_circle():
    M, _ = assemble_balance(circle3()[:, :2], [-np.eye(2)] * 3)
    np.testing.assert_allclose(M, -np.diag([3, 3, 3]), atol=1e-14)


def test_assemble_rotational_entry():
    q = np.array([[1.0, 0], [-1.0, 0]])
    M, _ = assemble_balance(q, [-np.eye(2)] * 2)
    expected = sum(qk @ S.T @ (-np.eye(2)) @ S @ qk for qk in q)
    assert M[2, 2] == pytest.approx(expected) == pytest.approx(-2)


@given(st.integers(0, 10_000))
def test_assemble_matches_jacobian_sum(seed):
    rng = np.random.default_rng(seed)
    q = rng.uniform(-1, 1, (5, 2))
    H = [-(np.eye(2) + np.outer(w, w)) for w in rng.uniform(-1, 1, (5, 2))]
    M, B = assemble_balance(q, H)
    Js = [np.column_stack([np.eye(2), S @ qk]) for qk in q]
    np.testing.assert_allclose(M, sum(J.T @ Hk @ J for J, Hk in zip(Js, H)), atol=1e-12)
    np.testing.assert_allclose(B, [J.T @ Hk for J, Hk in zip(Js, H)], atol=1e-12)


def test_rest_is_balanced():
    q = circle3()
    robot = RobotModel.uniform(3)
    planar, _ = solve_planar(robot, ShapeFrame(q, np.zeros_like(q)), equal_support(3))
    np.testing.assert_allclose(planar.vel.as_array(), 0, atol=1e-15)
    np.testing.assert_allclose(planar.foot_forces, 0, atol=1e-15)


def test_common_rotation():
    q = circle3()
    c = 0.7
    qd = np.zeros_like(q)
    qd[:, :2] = c * q[:, :2] @ S.T
    planar, _ = solve_planar(RobotModel.uniform(3), ShapeFrame(q, qd), equal_support(3))
    np.testing.assert_allclose(planar.vel.as_array(), [0, 0, -c], atol=1e-14)
    np.testing.assert_allclose(planar.foot_forces, 0, atol=1e-14)


def test_common_translation():
    q = circle3()
    qd = np.zeros_like(q)
    qd[:, 0] = 0.4
    planar, _ = solve_planar(RobotModel.uniform(3), ShapeFrame(q, qd), equal_support(3))
    np.testing.assert_allclose(planar.vel.as_array(), [-0.4, 0, 0], atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_random_anisotropic_instance_matches_dense_oracle(seed):
    robot, frame, theta = random_instance(seed)
    support = solve_support(robot, frame)
    planar, conn = solve_planar(robot, frame, support, theta, FrictionModel.anisotropic())
    idx = sorted(support.contacts)
    H = body_H(robot, support)
    ref = planar_dense(theta, frame.q[idx], frame.qdot[idx], [H[k] for k in idx])
    np.testing.assert_allclose(planar.vel.as_array(), ref, atol=1e-10)
    scale = np.abs(planar.foot_forces).sum() + 1
    assert np.max(np.abs(planar.balance_residual)) <= 1e-10 * scale
    # reconstruction identity for random shape velocities
    rng = np.random.default_rng(100 + seed)
    for _ in range(20):
        qd = rng.uniform(-1, 1, (6, 3))
        p, _ = solve_planar(robot, ShapeFrame(frame.q, qd), support, theta, FrictionModel.anisotropic())
        np.testing.assert_allclose(conn.reconstruct(qd[:, :2]), p.vel.to_body(theta), atol=1e-10)


def test_solve_planar_rejects_coulomb():
    robot, frame, _ = random_instance(0)
    with pytest.raises(ValueError):
        solve_planar(robot, frame, solve_support(robot, frame), 0.0, FrictionModel.coulomb())


def test_solve_planar_needs_contacts():
    robot = RobotModel.uniform(2)
    f = ShapeFrame(np.zeros((2, 3)), np.zeros((2, 3)))
    sup = SupportSolution(SupportState(), frozenset(), np.zeros(2), 0)
    with pytest.raises(SingularBalance):
        solve_planar(robot, f, sup)


@given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-3, 3))
def test_superposition(seed, a, b):
    robot, frame, theta = random_instance(seed)
    support = solve_support(robot, frame)
    rng = np.random.default_rng(seed + 1)
    qd1, qd2 = rng.uniform(-1, 1, (2, 6, 3))
    m = FrictionModel.anisotropic()

    def vel(qd):
        return solve_planar(robot, ShapeFrame(frame.q, qd), support, theta, m)[0].vel.as_array()

    np.testing.assert_allclose(vel(a * qd1 + b * qd2), a * vel(qd1) + b * vel(qd2), atol=1e-10)


@given(st.integers(0, 10_000), st.floats(-np.pi, np.pi))
def test_heading_equivariance(seed, dtheta):
    # body-frame velocity does not depend on the heading
    robot, frame, theta = random_instance(seed)
    support = solve_support(robot, frame)
    m = FrictionModel.anisotropic()
    a = solve_planar(robot, frame, support, theta, m)[0].vel.to_body(theta)
    b = solve_planar(robot, frame, support, theta + dtheta, m)[0].vel.to_body(theta + dtheta)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_full_frame_mirrored_tripod():
    q = HEXAPOD_HIPS.copy()
    q[:, 2] = -0.45
    qd = np.zeros_like(q)
    qd[:, 0] = [0.3, -0.2, 0.1, 0.3, -0.2, 0.1]  # left and right legs move alike
    robot = RobotModel.uniform(6, 10.0)
    _, planar, _ = full_frame_solve(robot, ShapeFrame(q, qd))
    v = planar.vel.as_array()
    assert abs(v[1]) < 1e-14 and abs(v[2]) < 1e-14


def test_full_frame_gait_cycle_is_finite():
    robot = RobotModel.uniform(6, 10.0, 1.0)
    traj = gait_trajectory(GaitSpec.tripod(), cycles=1.0, dt=0.01)
    for f in traj.frames:
        _, planar, conn = full_frame_solve(robot, f)
        assert np.all(np.isfinite(planar.vel.as_array())) and conn is not None


@pytest.mark.parametrize("seed", range(5))
def test_full_frame_equals_stage_oracles(seed):
    robot, frame, theta = random_instance(seed, anisotropic=False)
    support, planar, _ = full_frame_solve(robot, frame, theta)
    ref_s, ref_c, ref_f = support_bruteforce(frame.q, robot.stiffness)
    assert support.contacts == ref_c
    np.testing.assert_allclose(support.normal_forces, ref_f, atol=1e-9)
    idx = sorted(ref_c)
    H = [h_body(robot.mu[k], (0, 0), ref_f[k]) for k in idx]
    ref_v = planar_dense(theta, frame.q[idx], frame.qdot[idx], H)
    np.testing.assert_allclose(planar.vel.as_array(), ref_v, atol=1e-9)
