import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import height_scan_bisection, support_bruteforce

from multileg import (
    DegenerateTilt,
    NoSupport,
    RobotModel,
    ShapeFrame,
    SingularSupport,
    SupportState,
    solve_support,
)
from multileg.support import (
    balance_step,
    initial_height_scan,
    line_search_contact_change,
    max_events,
    support_residual,
    tilt_one_contact,
    tilt_two_contacts,
)


def frame(q):
    q = np.asarray(q, float)
    return ShapeFrame(q, np.zeros_like(q))


def square(z=-0.5):
    return frame([[1, 1, z], [1, -1, z], [-1, 1, z], [-1, -1, z]])


def random_robot(rng, n):
    q = np.column_stack([rng.uniform(-1, 1, n), rng.uniform(-1, 1, n), rng.uniform(-0.6, -0.4, n)])
    return RobotModel.from_arrays(rng.uniform(0.5, 2.0, n), 1.0), frame(q)


# --- height scan ------------------------------------------------------------

def test_height_scan_three_legs():
    qz = np.array([-1.0, -0.9, -0.5])
    z, contacts = initial_height_scan(RobotModel.uniform(3), frame(np.column_stack([np.zeros(3), np.arange(3), qz])))
    # frozen from the bisection oracle
    assert z == pytest.approx(height_scan_bisection(qz, np.ones(3)), abs=1e-12)
    assert z == pytest.approx(7 / 15, abs=1e-12)
    assert contacts == {0, 1, 2}


def test_height_scan_single_spring():
    z, contacts = initial_height_scan(RobotModel.uniform(1, 2.0), frame([[0, 0, -1]]))
    assert z == pytest.approx(0.5) and contacts == {0}


def test_height_scan_symmetric():
    z, contacts = initial_height_scan(RobotModel.uniform(4), square())
    assert z == pytest.approx(0.25) and contacts == {0, 1, 2, 3}


@given(st.lists(st.floats(-2, -0.1), min_size=1, max_size=12), st.floats(0.1, 5))
def test_height_scan_matches_bisection(qz, Mg):
    qz = np.array(qz)
    n = len(qz)
    robot = RobotModel.uniform(n, weight=Mg)
    q = np.column_stack([np.arange(n), np.zeros(n), qz])
    z, contacts = initial_height_scan(robot, frame(q))
    assert z == pytest.approx(height_scan_bisection(qz, np.ones(n), Mg), abs=1e-10)
    assert np.sum(np.maximum(0, -(qz + z))) == pytest.approx(Mg, rel=1e-12)


# --- balance step -------------------------------------------------------------

def test_balance_step_square():
    s = balance_step(RobotModel.uniform(4), square(), {0, 1, 2, 3})
    np.testing.assert_allclose(s.as_array(), [0, 0, 0.25], atol=1e-15)


def test_balance_step_three_legs():
    f = frame([[1, 0, -1], [-1, 1, -1], [-1, -1, -1]])
    robot = RobotModel.uniform(3)
    s = balance_step(robot, f, {0, 1, 2})
    # frozen from the brute-force enumeration oracle
    np.testing.assert_allclose(s.as_array(), [0.125, 0.0, 0.625], atol=1e-12)
    ref, _, F = support_bruteforce(f.q, np.ones(3))
    np.testing.assert_allclose(s.as_array(), ref, atol=1e-12)
    h = -s.alpha_x * f.q[:, 0] + s.alpha_y * f.q[:, 1] + f.q[:, 2] + s.z0
    F = -h
    assert abs(F.sum() - 1) < 1e-12
    assert abs((f.q[:, 0] * F).sum()) < 1e-12 and abs((f.q[:, 1] * F).sum()) < 1e-12


def test_balance_step_collinear():
    with pytest.raises(SingularSupport):
        balance_step(RobotModel.uniform(3), frame([[0, 0, -1], [1, 0, -1], [2, 0, -1]]), {0, 1, 2})


# --- line search --------------------------------------------------------------

def test_line_search_single_leg():
    r = RobotModel.uniform(1)
    hit = line_search_contact_change(r, frame([[0, 0, -0.5]]), SupportState(0, 0, 1), SupportState(0, 0, 0))
    assert hit == (pytest.approx(0.5), 0)


def test_line_search_no_crossing():
    r = RobotModel.uniform(4)
    s = SupportState(0, 0, 0.25)
    assert line_search_contact_change(r, square(), s, SupportState(0.01, 0.0, 0.25)) is None


def test_line_search_first_of_two():
    f = frame([[0, 0, -0.3], [1, 0, -0.7]])
    s0, s1 = SupportState(0, 0, 1), SupportState(0, 0, 0)
    t, leg = line_search_contact_change(RobotModel.uniform(2), f, s0, s1)
    # oracle: first sign change of sampled foot heights along the segment
    ts = np.linspace(0, 1, 100001)
    h = f.q[:, 2][None] + (1 - ts)[:, None]
    first = [ts[np.argmax(h[:, j] < 0)] for j in range(2)]
    assert leg == int(np.argmin(first))
    assert t == pytest.approx(min(first), abs=1e-5)
    assert (t, leg) == (pytest.approx(0.3), 1)


# --- tilts --------------------------------------------------------------------

def test_tilt_one_contact():
    r = RobotModel.uniform(1)
    np.testing.assert_allclose(tilt_one_contact(r, frame([[1, 0, -1]]), None, 0), [-1, 0, -1])
    np.testing.assert_allclose(tilt_one_contact(r, frame([[0, 2, -1]]), None, 0), [0, 2, -4])
    with pytest.raises(DegenerateTilt):
        tilt_one_contact(r, frame([[0, 0, -1]]), None, 0)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_tilt_one_keeps_contact_and_lowers_body(px, py):
    if px * px + py * py < 1e-6:
        return
    d = tilt_one_contact(RobotModel.uniform(1), frame([[px, py, -1]]), None, 0)
    assert -d[0] * px + d[1] * py + d[2] == pytest.approx(0, abs=1e-12)
    assert d[2] < 0


def test_tilt_two_contacts():
    f = frame([[1, 1, -1], [1, -1, -1], [1, 0, -1]])
    d = tilt_two_contacts(RobotModel.uniform(3), f, None, (0, 1))
    # closed form evaluated by hand: a=2, b=0, c=2, n=(-1, 0)
    np.testing.assert_allclose(d, [-1, 0, -1], atol=1e-15)
    # both contacts stay on the ground, the centre of mass side goes down
    dh = -d[0] * f.q[:, 0] + d[1] * f.q[:, 1] + d[2]
    np.testing.assert_allclose(dh[:2], 0, atol=1e-15)
    assert d[2] < 0
    with pytest.raises(DegenerateTilt):
        tilt_two_contacts(RobotModel.uniform(2), frame([[1, 0, -1], [-1, 0, -1]]), None, (0, 1))
    with pytest.raises(DegenerateTilt):
        tilt_two_contacts(RobotModel.uniform(2), frame([[1, 1, -1], [1, 1, -1]]), None, (0, 1))


# --- full search --------------------------------------------------------------

def test_solve_support_square():
    sol = solve_support(RobotModel.uniform(4), square())
    np.testing.assert_allclose(sol.state.as_array(), [0, 0, 0.25], atol=1e-15)
    np.testing.assert_allclose(sol.normal_forces, 0.25, atol=1e-15)
    assert sol.contacts == {0, 1, 2, 3}


def test_solve_support_random_six_legs():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 20:
        robot, f = random_robot(rng, 6)
        ref = support_bruteforce(f.q, robot.stiffness)
        if ref is None:
            with pytest.raises(NoSupport):
                solve_support(robot, f)
            continue
        sol = solve_support(robot, f)
        assert sol.contacts == ref[1]
        np.testing.assert_allclose(sol.normal_forces, ref[2], atol=1e-9)
        np.testing.assert_allclose(support_residual(robot, f, sol), 0, atol=1e-9)
        checked += 1


def test_solve_support_mirrored_2d_contact_sequence():
    # three leg pairs at y = +-0.5; the search visits four distinct states
    xs, zs = [-0.2, 0.5, 0.4], [-0.53, -0.94, -0.64]
    f = frame([[x, y, z] for x, z in zip(xs, zs) for y in (0.5, -0.5)])
    sol = solve_support(RobotModel.uniform(6), f, keep_trace=True)
    states = [sol.trace[0]]
    for s in sol.trace[1:]:
        if np.max(np.abs(s - states[-1])) > 1e-12:
            states.append(s)
    assert len(states) == 4
    np.testing.assert_allclose(np.array(states)[:, 1], 0, atol=1e-15)
    assert sol.contacts == {0, 1, 2, 3}
    np.testing.assert_allclose(sol.normal_forces, [2.5 / 7, 2.5 / 7, 1 / 7, 1 / 7, 0, 0], atol=1e-12)
    ref = support_bruteforce(f.q, np.ones(6))
    np.testing.assert_allclose(sol.state.as_array(), ref[0], atol=1e-12)


def test_solve_support_collinear_contacts_tilt_about_line():
    # the three lowest feet share a line off the centre of mass; the body
    # rolls about it onto the fourth foot
    f = frame([[-1, 0.5, -0.6], [0, 0.5, -0.6], [1, 0.5, -0.6], [0, -1, -0.4]])
    robot = RobotModel.uniform(4)
    sol = solve_support(robot, f)
    assert sol.contacts == {0, 1, 2, 3}
    np.testing.assert_allclose(support_residual(robot, f, sol), 0, atol=1e-12)
    ref = support_bruteforce(f.q, np.ones(4))
    np.testing.assert_allclose(sol.normal_forces, ref[2], atol=1e-12)


def test_solve_support_collinear_through_centre_is_degenerate():
    f = frame([[-1, 0, -0.5], [0, 0, -0.5], [1, 0, -0.5]])
    with pytest.raises(DegenerateTilt):
        solve_support(RobotModel.uniform(3), f)


def test_solve_support_topples():
    # every foot on one side of the centre of mass
    f = frame([[1, 1, -0.5], [1, -1, -0.5], [2, 0, -0.5]])
    with pytest.raises(NoSupport):
        solve_support(RobotModel.uniform(3), f)


@given(st.integers(0, 10_000), st.integers(3, 7), st.floats(-1, 1))
def test_support_vertical_shift_invariance(seed, n, dz):
    # lowering every foot by dz raises the body by dz and leaves the loads unchanged
    robot, f = random_robot(np.random.default_rng(seed), n)
    try:
        a = solve_support(robot, f)
    except NoSupport:
        return
    b = solve_support(robot, frame(f.q - [0, 0, dz]))
    assert a.contacts == b.contacts
    np.testing.assert_allclose(b.normal_forces, a.normal_forces, atol=1e-9)
    np.testing.assert_allclose(b.state.z0 - a.state.z0, dz, atol=1e-9)


@given(st.integers(0, 10_000), st.integers(3, 7), st.floats(0.2, 5))
def test_support_forces_scale_with_weight(seed, n, mg):
    robot, f = random_robot(np.random.default_rng(seed), n)
    try:
        solve_support(robot, f)
    except NoSupport:
        return
    heavy = RobotModel(robot.legs, mg)
    b = solve_support(heavy, f)
    assert abs(b.normal_forces.sum() - mg) < 1e-9 * max(1, mg)
    assert (b.normal_forces >= 0).all()


def test_event_cap():
    assert max_events(6) == 32
