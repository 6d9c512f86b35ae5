import math

import numpy as np
import pytest

from robosceneforge.transforms import (
    Pose,
    matrix_to_quat,
    quat_from_axis_angle,
    quat_from_rpy,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_to_matrix,
    rotvec_from_quat,
    rpy_from_quat,
)

from helpers import quat_matrix_oracle


def test_quat_unit_norm_after_construction_and_composition():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = quat_from_rpy(rng.uniform(-np.pi, np.pi, 3))
        b = quat_from_axis_angle(rng.normal(size=3), rng.uniform(-np.pi, np.pi))
        c = quat_normalize(quat_multiply(a, b))
        for q in (a, b, c):
            assert abs(np.linalg.norm(q) - 1.0) < 1e-9


def test_rpy_quat_round_trip_preserves_rotation():
    rng = np.random.default_rng(11)
    for _ in range(300):
        rpy = rng.uniform(-np.pi, np.pi, 3)
        q = quat_from_rpy(rpy)
        back = quat_from_rpy(rpy_from_quat(q))
        assert np.max(np.abs(quat_to_matrix(q) - quat_to_matrix(back))) < 1e-9


def test_rpy_matches_fixed_axis_composition():
    rng = np.random.default_rng(13)
    for _ in range(100):
        r, p, y = rng.uniform(-np.pi, np.pi, 3)
        qx = quat_from_axis_angle([1, 0, 0], r)
        qy = quat_from_axis_angle([0, 1, 0], p)
        qz = quat_from_axis_angle([0, 0, 1], y)
        expected = quat_normalize(quat_multiply(qz, quat_multiply(qy, qx)))
        got = quat_from_rpy([r, p, y])
        assert np.max(np.abs(quat_to_matrix(expected) - quat_to_matrix(got))) < 1e-12


def test_axis_angle_half_turn_about_z():
    q = quat_from_axis_angle([0, 0, 1], math.pi)
    assert np.allclose(q, [0, 0, 0, 1], atol=1e-12)


def test_quat_rotate_matches_matrix():
    rng = np.random.default_rng(3)
    for _ in range(100):
        q = quat_from_rpy(rng.uniform(-np.pi, np.pi, 3))
        v = rng.normal(size=3)
        assert np.allclose(quat_rotate(q, v), quat_matrix_oracle(q) @ v, atol=1e-12)


def test_matrix_quat_round_trip():
    rng = np.random.default_rng(5)
    for _ in range(200):
        q = quat_from_rpy(rng.uniform(-np.pi, np.pi, 3))
        m = quat_to_matrix(q)
        q2 = matrix_to_quat(m)
        assert min(np.max(np.abs(q - q2)), np.max(np.abs(q + q2))) < 1e-9


def test_rotvec_round_trip():
    rng = np.random.default_rng(17)
    for _ in range(100):
        q = quat_from_rpy(rng.uniform(-np.pi, np.pi, 3))
        v = rotvec_from_quat(q)
        angle = np.linalg.norm(v)
        assert angle <= math.pi + 1e-12
        q2 = quat_from_axis_angle(v, angle) if angle > 1e-12 else np.array([1.0, 0, 0, 0])
        assert min(np.max(np.abs(q - q2)), np.max(np.abs(q + q2))) < 1e-9


def test_pose_compose_matches_matrix_product():
    rng = np.random.default_rng(23)
    for _ in range(100):
        a = Pose.from_rpy(rng.normal(size=3), rng.uniform(-np.pi, np.pi, 3))
        b = Pose.from_rpy(rng.normal(size=3), rng.uniform(-np.pi, np.pi, 3))
        got = a.compose(b).to_matrix()
        expected = a.to_matrix() @ b.to_matrix()
        assert np.max(np.abs(got - expected)) < 1e-12


def test_pose_inverse():
    rng = np.random.default_rng(29)
    for _ in range(50):
        p = Pose.from_rpy(rng.normal(size=3), rng.uniform(-np.pi, np.pi, 3))
        ident = p.compose(p.inverse()).to_matrix()
        assert np.max(np.abs(ident - np.eye(4))) < 1e-12


def test_pose_rejects_bad_shapes():
    with pytest.raises(ValueError):
        Pose(np.zeros(2), [1, 0, 0, 0])
    with pytest.raises(ValueError):
        Pose(np.zeros(3), [0, 0, 0, 0])


def test_pose_is_immutable():
    p = Pose.identity()
    with pytest.raises(ValueError):
        p.translation[0] = 1.0
