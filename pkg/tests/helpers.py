"""Shared test oracles, implemented independently of the library's code paths.

The hull oracle is a brute-force half-space membership check; the kinematics
oracle is a naive homogeneous-matrix chain product built from Rodrigues
rotations; the random-chain generator fabricates descriptions directly.
"""

from __future__ import annotations

import math

import numpy as np

from robosceneforge import JointLimits, JointSpec, LinkSpec, Pose, RobotDescription


# -- convex geometry oracles -------------------------------------------------

def face_planes(mesh) -> tuple[np.ndarray, np.ndarray]:
    v, t = mesh.vertices, mesh.triangles
    a = v[t[:, 0]]
    n = np.cross(v[t[:, 1]] - a, v[t[:, 2]] - a)
    n = n / np.linalg.norm(n, axis=1, keepdims=True)
    return n, np.einsum("ij,ij->i", n, a)


def max_signed_distance(points, mesh) -> float:
    """Largest distance of any point outside any face half-space."""
    n, d = face_planes(mesh)
    return float((np.atleast_2d(points) @ n.T - d).max())


def contains_point(mesh, point, tol: float) -> bool:
    return max_signed_distance(np.asarray(point)[None, :], mesh) <= tol


# -- kinematics oracle -------------------------------------------------------

def quat_matrix_oracle(q) -> np.ndarray:
    # Deliberately re-derived here rather than importing the library version.
    w, x, y, z = q
    return np.array(
        [
            [w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z],
        ]
    )


def pose_matrix_oracle(pose: Pose) -> np.ndarray:
    m = np.eye(4)
    m[:3, :3] = quat_matrix_oracle(pose.rotation)
    m[:3, 3] = pose.translation
    return m


def rodrigues(axis, angle: float) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    k = np.array([[0, -a[2], a[1]], [a[2], 0, -a[0]], [-a[1], a[0], 0]])
    return np.eye(3) + math.sin(angle) * k + (1 - math.cos(angle)) * (k @ k)


def fk_matrix_oracle(chain, state, base: np.ndarray | None = None) -> list[np.ndarray]:
    """World 4x4 matrices per link via a plain matrix-chain product."""
    state = np.asarray(state, dtype=float)
    mats = [np.eye(4) if base is None else np.asarray(base, dtype=float)]
    for i in range(1, len(chain.links)):
        joint = chain.joints[i]
        local = pose_matrix_oracle(joint.origin)
        d = chain.dof_index[i]
        if d is not None:
            motion = np.eye(4)
            if joint.kind == "prismatic":
                motion[:3, 3] = joint.axis * state[d]
            else:
                motion[:3, :3] = rodrigues(joint.axis, state[d])
            local = local @ motion
        mats.append(mats[chain.parents[i]] @ local)
    return mats


def assert_pose_matches_matrix(pose: Pose, mat: np.ndarray, tol: float = 1e-9):
    assert np.max(np.abs(pose.translation - mat[:3, 3])) <= tol
    assert np.max(np.abs(quat_matrix_oracle(pose.rotation) - mat[:3, :3])) <= tol


# -- random chain generation --------------------------------------------------

def random_description(rng: np.random.Generator, max_joints: int = 8) -> RobotDescription:
    """Random tree-shaped robot with mixed joint kinds and random geometry."""
    n_joints = int(rng.integers(1, max_joints + 1))
    links = [LinkSpec("link0")]
    joints = []
    kinds = ["revolute", "continuous", "prismatic", "fixed"]
    for j in range(n_joints):
        parent = int(rng.integers(0, len(links)))
        child = LinkSpec(f"link{len(links)}")
        kind = kinds[int(rng.integers(0, len(kinds)))]
        axis = rng.normal(size=3)
        while np.linalg.norm(axis) < 1e-6:
            axis = rng.normal(size=3)
        origin = Pose.from_rpy(rng.uniform(-0.5, 0.5, size=3), rng.uniform(-np.pi, np.pi, size=3))
        limits = None
        if kind in ("revolute", "prismatic") and rng.random() < 0.5:
            lo = float(rng.uniform(-4.0, 0.0))
            limits = JointLimits(lo, float(rng.uniform(0.0, 4.0)))
        joints.append(
            JointSpec(
                name=f"joint{j}",
                kind=kind,
                parent_link=links[parent].name,
                child_link=child.name,
                origin=origin,
                axis=axis,
                limits=limits,
            )
        )
        links.append(child)
    return RobotDescription(
        name="random", links=tuple(links), joints=tuple(joints), root_link="link0"
    )


def random_state(rng: np.random.Generator, chain) -> np.ndarray:
    q = rng.uniform(-np.pi, np.pi, size=chain.dof)
    # Respect declared limits so FK comparisons stay warning-free.
    for i, joint in enumerate(chain.joints):
        d = chain.dof_index[i]
        if joint is not None and d is not None and joint.limits is not None:
            q[d] = rng.uniform(joint.limits.lower, joint.limits.upper)
    return q
