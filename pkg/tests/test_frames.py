import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from contactpaint.frames import (
    IDENTITY,
    Point2,
    Pose2,
    RigidTransform2,
    body_normal,
    normalize_angle,
    rho_to_wall,
    rotation_matrix,
    wall_to_rho,
    yaw_rho_to_wall,
    yaw_wall_to_rho,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
angles = st.floats(-20.0, 20.0, allow_nan=False)


def test_wall_to_rho_pure_translation():
    p = wall_to_rho(Point2(0, 0), RigidTransform2(0.0, Point2(0, -1.1)))
    assert p == pytest.approx((0.0, 1.1), abs=1e-15)


def test_wall_to_rho_identity():
    assert wall_to_rho(Point2(1, 2), RigidTransform2(0.0, Point2(0, 0))) == (1.0, 2.0)


def test_wall_to_rho_quarter_turn():
    p = wall_to_rho(Point2(1, 0), RigidTransform2(math.pi / 2, Point2(0, 0)))
    assert p == pytest.approx((0.0, -1.0), abs=1e-15)


def test_rho_to_wall_examples():
    assert rho_to_wall(Point2(0, 1.1), RigidTransform2(0.0, Point2(0, -1.1))) == pytest.approx((0, 0), abs=1e-15)
    assert rho_to_wall(Point2(3, 4), RigidTransform2(0.0, Point2(0, 0))) == (3.0, 4.0)


def test_identity_is_exact():
    for p in [Point2(0.1, -7.3), Point2(1e3, 3e-4)]:
        assert wall_to_rho(p, IDENTITY) == p
        assert rho_to_wall(p, IDENTITY) == p


def test_round_trip_random_points():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(100):
        t = RigidTransform2(rng.uniform(-np.pi, np.pi), Point2(*rng.uniform(-5, 5, 2)))
        p = Point2(*rng.uniform(-10, 10, 2))
        q = rho_to_wall(wall_to_rho(p, t), t)
        worst = max(worst, abs(q.x - p.x), abs(q.y - p.y))
    assert worst < 1e-12


@given(finite, finite, finite, finite, finite, finite, angles)
def test_isometry(x1, y1, x2, y2, dx, dy, g):
    t = RigidTransform2(g, Point2(dx, dy))
    a, b = Point2(x1, y1), Point2(x2, y2)
    d0 = math.dist(a, b)
    d1 = math.dist(wall_to_rho(a, t), wall_to_rho(b, t))
    assert abs(d1 - d0) <= 1e-12 * max(1.0, d0) * 1e3


def test_normalize_angle_examples():
    assert normalize_angle(0.0) == 0.0
    assert normalize_angle(2 * math.pi) == 0.0
    assert normalize_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2, abs=1e-15)
    assert normalize_angle(math.pi) == math.pi
    assert normalize_angle(-math.pi) == math.pi


@given(st.floats(-1e4, 1e4, allow_nan=False))
def test_normalize_angle_range_and_multiple(a):
    r = normalize_angle(a)
    assert -math.pi < r <= math.pi
    k = (a - r) / (2 * math.pi)
    assert abs(k - round(k)) < 1e-9


def test_transform_invariants():
    t = RigidTransform2(7.0, Point2(1, 2))
    assert -math.pi < t.gamma <= math.pi
    m = np.array(t.matrix)
    assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-15)
    assert np.allclose(np.array(rotation_matrix(0.3)), [[math.cos(0.3), -math.sin(0.3)], [math.sin(0.3), math.cos(0.3)]])


def test_briefed_initial_guess():
    t = RigidTransform2.briefed(1.1)
    assert t.gamma == 0.0 and t.delta == (0.0, -1.1)


def test_pose_yaw_normalized():
    assert Pose2(Point2(0, 0), 3 * math.pi).yaw == pytest.approx(math.pi)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        Pose2(Point2(float("nan"), 0.0), 0.0)


def test_yaw_conversions_and_normal():
    t = RigidTransform2(0.2, Point2(0, 0))
    assert yaw_rho_to_wall(yaw_wall_to_rho(0.5, t), t) == pytest.approx(0.5)
    # compensated yaw points the body normal straight at the wall
    n = body_normal(-0.2)
    nw = rotation_matrix(0.2)
    v = (nw[0][0] * n.x + nw[0][1] * n.y, nw[1][0] * n.x + nw[1][1] * n.y)
    assert v == pytest.approx((0.0, 1.0), abs=1e-15)
