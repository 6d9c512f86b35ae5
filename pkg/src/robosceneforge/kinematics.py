"""Kinematic chains: ordering, DOF accounting, forward and inverse kinematics.

The chain orders links breadth-first from the root (children in declaration
order). State vectors follow joint declaration order restricted to non-fixed
joints: radians for revolute/continuous, meters for prismatic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .transforms import Pose, quat_from_axis_angle, quat_multiply, quat_rotate, rotvec_from_quat
from .urdf import JointSpec, LinkSpec, RobotDescription


class StateLengthError(ValueError):
    """Joint-state vector length does not match the chain's DOF."""

    def __init__(self, expected: int, actual: int):
        super().__init__(f"joint state has length {actual}, chain has {expected} DOF")
        self.expected = expected
        self.actual = actual


@dataclass(frozen=True)
class Chain:
    """Topologically ordered kinematic structure with a fixed DOF layout.

    links[0] is the root; joints[i] connects links[parents[i]] -> links[i]
    (joints[0] is None). dof_index[i] gives the state-vector slot consumed by
    links[i]'s parent joint, or None for fixed joints and the root.
    """

    links: tuple[LinkSpec, ...]
    joints: tuple[JointSpec | None, ...]
    parents: tuple[int, ...]
    dof_index: tuple[int | None, ...]

    @property
    def dof(self) -> int:
        return sum(1 for d in self.dof_index if d is not None)

    def link_index(self, name: str) -> int:
        for i, link in enumerate(self.links):
            if link.name == name:
                return i
        raise KeyError(f"no link named '{name}'")

    def check_state(self, state) -> np.ndarray:
        q = np.asarray(state, dtype=float).reshape(-1)
        if len(q) != self.dof:
            raise StateLengthError(self.dof, len(q))
        return q

    def joint_limit_violations(self, state) -> list[str]:
        q = self.check_state(state)
        bad = []
        for i, joint in enumerate(self.joints):
            d = self.dof_index[i]
            if joint is None or d is None or joint.limits is None:
                continue
            if not joint.limits.lower <= q[d] <= joint.limits.upper:
                bad.append(joint.name)
        return bad


def to_chain(desc: RobotDescription) -> Chain:
    """Order links breadth-first from the root, children in declaration order."""
    by_parent: dict[str, list[JointSpec]] = {}
    for j in desc.joints:
        by_parent.setdefault(j.parent_link, []).append(j)

    links: list[LinkSpec] = [desc.link(desc.root_link)]
    joints: list[JointSpec | None] = [None]
    parents: list[int] = [-1]
    queue = [0]
    while queue:
        idx = queue.pop(0)
        for j in by_parent.get(links[idx].name, ()):
            links.append(desc.link(j.child_link))
            joints.append(j)
            parents.append(idx)
            queue.append(len(links) - 1)

    # DOF slots follow joint declaration order, not traversal order.
    slot_of = {j.name: k for k, j in enumerate(jj for jj in desc.joints if jj.kind != "fixed")}
    dof_index = tuple(
        slot_of.get(j.name) if j is not None else None for j in joints
    )
    return Chain(tuple(links), tuple(joints), tuple(parents), dof_index)


def dof(chain: Chain) -> int:
    return chain.dof


def joint_motion(joint: JointSpec, q: float) -> Pose:
    """Pose contributed by a joint at value q (radians or meters)."""
    if joint.limits is not None and not joint.limits.lower <= q <= joint.limits.upper:
        warnings.warn(
            f"joint '{joint.name}' value {q:.6g} outside limits "
            f"[{joint.limits.lower:.6g}, {joint.limits.upper:.6g}]",
            stacklevel=2,
        )
    return _motion(joint, q)


def _motion(joint: JointSpec, q: float) -> Pose:
    if joint.kind == "fixed":
        return Pose.identity()
    if joint.kind == "prismatic":
        return Pose(joint.axis * q, np.array([1.0, 0.0, 0.0, 0.0]))
    return Pose(np.zeros(3), quat_from_axis_angle(joint.axis, q))


@dataclass(frozen=True)
class FkResult:
    chain: Chain
    poses: tuple[Pose, ...]

    def pose_of(self, link_name: str) -> Pose:
        return self.poses[self.chain.link_index(link_name)]


def forward_kinematics(chain: Chain, state, base: Pose = Pose.identity()) -> FkResult:
    """World pose of every link: world(child) = world(parent) ∘ origin ∘ motion."""
    q = chain.check_state(state)
    poses: list[Pose] = [base]
    for i in range(1, len(chain.links)):
        joint = chain.joints[i]
        parent = poses[chain.parents[i]]
        local = joint.origin
        d = chain.dof_index[i]
        if d is not None:
            local = local.compose(_motion(joint, q[d]))
        poses.append(parent.compose(local))
    return FkResult(chain, tuple(poses))


@dataclass(frozen=True)
class IkOptions:
    pos_tol: float = 1e-4
    rot_tol: float = 1e-3
    max_iters: int = 500
    damping: float = 0.05
    step_limit: float = 0.2  # per-joint step clamp, radians or meters
    fd_step: float = 1e-6  # central-difference step for the numerical Jacobian


@dataclass(frozen=True)
class IkReport:
    converged: bool
    iterations: int
    final_position_error: float
    final_orientation_error: float


def _pose_error(target: Pose, current: Pose) -> np.ndarray:
    """6-vector error: position residual stacked with the rotation-vector log
    of R_target · R_currentᵀ."""
    dp = target.translation - current.translation
    dq = quat_multiply(target.rotation, np.array([current.rotation[0], *(-current.rotation[1:])]))
    return np.concatenate([dp, rotvec_from_quat(dq)])


def inverse_kinematics(
    chain: Chain,
    target_link: int,
    target: Pose,
    seed,
    opts: IkOptions = IkOptions(),
    base: Pose = Pose.identity(),
) -> tuple[np.ndarray, IkReport]:
    """Damped-least-squares IK on the 6-vector pose error.

    Non-convergence is reported, never raised: unreachable targets return the
    best state found. Joint limits, when present, are enforced by projected
    clamping after each step (continuous joints are unclamped).
    """
    if not 0 <= target_link < len(chain.links):
        raise IndexError(f"target link index {target_link} out of range")
    q = chain.check_state(seed).copy()
    n = chain.dof

    lower = np.full(n, -np.inf)
    upper = np.full(n, np.inf)
    for i, joint in enumerate(chain.joints):
        d = chain.dof_index[i]
        if joint is not None and d is not None and joint.limits is not None and joint.kind != "continuous":
            lower[d], upper[d] = joint.limits.lower, joint.limits.upper

    def error_at(qv) -> np.ndarray:
        fk = forward_kinematics(chain, qv, base)
        return _pose_error(target, fk.poses[target_link])

    damping_sq = opts.damping * opts.damping
    best_q = q.copy()
    best_score = math.inf
    best_pos = best_rot = math.inf
    converged = False
    iterations = 0

    for it in range(opts.max_iters + 1):
        e = error_at(q)
        pos_err = float(np.linalg.norm(e[:3]))
        rot_err = float(np.linalg.norm(e[3:]))
        score = float(np.linalg.norm(e))
        if score < best_score:
            best_score, best_q = score, q.copy()
            best_pos, best_rot = pos_err, rot_err
        if pos_err < opts.pos_tol and rot_err < opts.rot_tol:
            converged = True
            iterations = it
            best_q, best_pos, best_rot = q.copy(), pos_err, rot_err
            break
        if it == opts.max_iters:
            iterations = it
            break

        jac = np.zeros((6, n))
        h = opts.fd_step
        for k in range(n):
            qp = q.copy()
            qm = q.copy()
            qp[k] += h
            qm[k] -= h
            jac[:, k] = (error_at(qp) - error_at(qm)) / (2.0 * h)
        # e(q + dq) ≈ e + J dq = 0  ->  damped least squares on J dq = -e
        rhs = jac @ jac.T + damping_sq * np.eye(6)
        dq = jac.T @ np.linalg.solve(rhs, -e)
        dq = np.clip(dq, -opts.step_limit, opts.step_limit)
        q = np.clip(q + dq, lower, upper)

    report = IkReport(
        converged=converged,
        iterations=iterations,
        final_position_error=best_pos,
        final_orientation_error=best_rot,
    )
    return best_q, report
