"""Rigid-transform math: quaternions, fixed-axis Euler angles, and poses.

Conventions: quaternions are (w, x, y, z) and kept unit-norm with w >= 0;
Euler angles are roll/pitch/yaw in radians about the fixed X, Y, Z axes
(URDF convention); lengths are meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-9


def as_vec3(value) -> np.ndarray:
    """Coerce a length-3 sequence to a float64 array."""
    v = np.asarray(value, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


def _canonical(q: np.ndarray) -> np.ndarray:
    # Resolve the q/-q ambiguity deterministically: first nonzero component > 0.
    for c in q:
        if c != 0.0:
            return -q if c < 0.0 else q
    return q


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise ValueError(f"expected a quaternion (w,x,y,z), got shape {q.shape}")
    n = math.sqrt(float(q @ q))
    if n < UNIT_TOL:
        raise ValueError("cannot normalize a near-zero quaternion")
    return _canonical(q / n)


def quat_multiply(a, b) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conjugate(q) -> np.ndarray:
    w, x, y, z = q
    return np.array([w, -x, -y, -z])


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector v by unit quaternion q."""
    w = q[0]
    u = np.asarray(q[1:], dtype=float)
    v = np.asarray(v, dtype=float)
    t = 2.0 * np.cross(u, v)
    return v + w * t + np.cross(u, t)


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
    axis = as_vec3(axis)
    n = math.sqrt(float(axis @ axis))
    if n < UNIT_TOL:
        raise ValueError("rotation axis must be nonzero")
    half = 0.5 * angle
    s = math.sin(half) / n
    return quat_normalize([math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s])


def quat_from_rpy(rpy) -> np.ndarray:
    """Quaternion for fixed-axis XYZ Euler angles (applied as Rz(y)·Ry(p)·Rx(r))."""
    roll, pitch, yaw = (float(a) for a in rpy)
    cr, sr = math.cos(0.5 * roll), math.sin(0.5 * roll)
    cp, sp = math.cos(0.5 * pitch), math.sin(0.5 * pitch)
    cy, sy = math.cos(0.5 * yaw), math.sin(0.5 * yaw)
    return quat_normalize(
        [
            cy * cp * cr + sy * sp * sr,
            cy * cp * sr - sy * sp * cr,
            cy * sp * cr + sy * cp * sr,
            sy * cp * cr - cy * sp * sr,
        ]
    )


def quat_to_matrix(q) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def matrix_to_quat(m) -> np.ndarray:
    """Convert a 3x3 rotation matrix to a unit quaternion (Shepperd's method)."""
    m = np.asarray(m, dtype=float)
    tr = m[0, 0] + m[1, 1] + m[2, 2]
    if tr > 0.0:
        s = math.sqrt(tr + 1.0) * 2.0
        q = [0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = [(m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
    elif m[1, 1] >= m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s]
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s]
    return quat_normalize(q)


def rpy_from_quat(q) -> np.ndarray:
    """Recover fixed-axis XYZ Euler angles. Angle values may alias; the rotation is preserved.

    Uses the half-angle-sum form: with A = (yaw+roll)/2 and B = (yaw-roll)/2,
    the quaternion components separate into u·(cos A, sin A) and
    v·(cos B, sin B) pairs. Unlike asin-on-matrix extraction this stays
    accurate through gimbal lock: near lock the ill-determined A only moves
    the rotation by O(u·δA), which stays at roundoff level.
    """
    w, x, y, z = quat_normalize(q)
    a = math.atan2(x + z, w - y)
    b = math.atan2(z - x, w + y)
    u = math.hypot(x + z, w - y)
    v = math.hypot(z - x, w + y)
    pitch = 0.5 * math.pi - 2.0 * math.atan2(u, v)
    roll = _wrap_angle(a - b)
    yaw = _wrap_angle(a + b)
    return np.array([roll, pitch, yaw])


def _wrap_angle(a: float) -> float:
    while a > math.pi:
        a -= 2.0 * math.pi
    while a < -math.pi:
        a += 2.0 * math.pi
    return a


def rotvec_from_quat(q) -> np.ndarray:
    """Rotation vector (axis * angle) of a unit quaternion; the log map."""
    w, x, y, z = q
    if w < 0.0:  # shortest arc
        w, x, y, z = -w, -x, -y, -z
    s = math.sqrt(x * x + y * y + z * z)
    if s < 1e-12:
        return np.array([2.0 * x, 2.0 * y, 2.0 * z])
    angle = 2.0 * math.atan2(s, w)
    return np.array([x, y, z]) * (angle / s)


def quat_from_rotvec(v) -> np.ndarray:
    v = as_vec3(v)
    angle = math.sqrt(float(v @ v))
    if angle < 1e-12:
        return quat_normalize([1.0, 0.5 * v[0], 0.5 * v[1], 0.5 * v[2]])
    return quat_from_axis_angle(v, angle)


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform: rotation (unit quaternion) followed by translation."""

    translation: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        t = as_vec3(self.translation).copy()
        r = quat_normalize(self.rotation)
        t.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "translation", t)
        object.__setattr__(self, "rotation", r)

    @staticmethod
    def identity() -> Pose:
        return Pose(np.zeros(3), np.array([1.0, 0.0, 0.0, 0.0]))

    @classmethod
    def from_rpy(cls, translation, rpy) -> Pose:
        return cls(as_vec3(translation), quat_from_rpy(rpy))

    @classmethod
    def from_matrix(cls, m) -> Pose:
        m = np.asarray(m, dtype=float)
        return cls(m[:3, 3], matrix_to_quat(m[:3, :3]))

    def to_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = quat_to_matrix(self.rotation)
        m[:3, 3] = self.translation
        return m

    def compose(self, other: Pose) -> Pose:
        """self ∘ other: apply other first, then self."""
        return Pose(
            self.translation + quat_rotate(self.rotation, other.translation),
            quat_multiply(self.rotation, other.rotation),
        )

    def inverse(self) -> Pose:
        rinv = quat_conjugate(self.rotation)
        return Pose(-quat_rotate(rinv, self.translation), rinv)

    def transform_point(self, p) -> np.ndarray:
        return self.translation + quat_rotate(self.rotation, p)

    def approx_equal(self, other: Pose, tol: float = 1e-9) -> bool:
        if np.max(np.abs(self.translation - other.translation)) > tol:
            return False
        # q and -q are the same rotation.
        d = min(
            float(np.max(np.abs(self.rotation - other.rotation))),
            float(np.max(np.abs(self.rotation + other.rotation))),
        )
        return d <= tol

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pose):
            return NotImplemented
        return np.array_equal(self.translation, other.translation) and np.array_equal(
            self.rotation, other.rotation
        )

    def __repr__(self) -> str:
        t = ", ".join(f"{v:.6g}" for v in self.translation)
        r = ", ".join(f"{v:.6g}" for v in self.rotation)
        return f"Pose(t=({t}), q=({r}))"
