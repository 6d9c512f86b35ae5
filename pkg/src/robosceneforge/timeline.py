"""Scene graph and keyframe system: robot instances with per-link, per-layer
appearance, primitive sets, and frame-indexed evaluation.

Tracks interpolate linearly (colors, alphas, joint states, placements) or
step (visibility). Evaluation clamps outside the keyed range. Frames are
reals >= 0; exporters sample integer frames.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError
from .kinematics import Chain, forward_kinematics
from .transforms import Pose, as_vec3, quat_from_rpy
from .urdd import AppearanceLayer, AssetStore

DEFAULT_GRAY = (0.5, 0.5, 0.5, 1.0)
DEFAULT_FRAME_RATE = 24.0


class MissingAssetError(ValueError):
    """A visual-bearing link has no mesh in the asset store."""


@dataclass(frozen=True)
class Rgba:
    """RGBA color; channels clamp to [0, 1] on construction."""

    r: float
    g: float
    b: float
    a: float = 1.0

    def __post_init__(self):
        for name in ("r", "g", "b", "a"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, min(1.0, max(0.0, v)))

    @classmethod
    def coerce(cls, value) -> Rgba:
        if isinstance(value, Rgba):
            return value
        vals = [float(v) for v in value]
        if len(vals) == 3:
            vals.append(1.0)
        if len(vals) != 4:
            raise ValueError(f"expected RGB or RGBA components, got {len(vals)}")
        return cls(*vals)

    def to_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b, self.a])


class Track:
    """Keyframe track: ordered (frame, value) pairs with linear or step mode.

    Evaluation clamps before the first and after the last key; at a keyed
    frame the stored value is returned exactly. Step tracks hold the earlier
    key and are right-continuous.
    """

    __slots__ = ("mode", "_frames", "_values")

    def __init__(self, mode: str = "linear"):
        if mode not in ("linear", "step"):
            raise ValueError(f"unknown track mode '{mode}'")
        self.mode = mode
        self._frames: list[float] = []
        self._values: list = []

    def __len__(self) -> int:
        return len(self._frames)

    def __bool__(self) -> bool:
        return bool(self._frames)

    @property
    def first_frame(self) -> float:
        return self._frames[0]

    @property
    def last_frame(self) -> float:
        return self._frames[-1]

    def items(self):
        return list(zip(self._frames, self._values))

    def set_key(self, frame: float, value) -> None:
        frame = float(frame)
        if frame < 0.0:
            raise ValueError(f"keyframe frame must be >= 0, got {frame}")
        if isinstance(value, np.ndarray):
            value = value.copy()
        i = bisect.bisect_left(self._frames, frame)
        if i < len(self._frames) and self._frames[i] == frame:
            self._values[i] = value  # rekeying the same frame overwrites
        else:
            self._frames.insert(i, frame)
            self._values.insert(i, value)

    def value_at(self, frame: float):
        if not self._frames:
            raise ValueError("cannot evaluate an empty track")
        frame = float(frame)
        i = bisect.bisect_right(self._frames, frame)
        if i == 0:
            return self._values[0]
        if self._frames[i - 1] == frame or i == len(self._frames) or self.mode == "step":
            return self._values[i - 1]
        f0, f1 = self._frames[i - 1], self._frames[i]
        v0, v1 = self._values[i - 1], self._values[i]
        t = (frame - f0) / (f1 - f0)
        return v0 + (np.asarray(v1) - v0) * t if isinstance(v0, np.ndarray) else v0 + (v1 - v0) * t


@dataclass(frozen=True)
class AssetRef:
    """Snapshot mesh reference into a robot's asset store."""

    robot: str
    link: str
    layer: AppearanceLayer
    part: int = 0


@dataclass(frozen=True)
class LinePrimitive:
    length: float
    radius: float


@dataclass(frozen=True)
class CubePrimitive:
    dims: tuple[float, float, float]


@dataclass(frozen=True)
class SnapshotObject:
    id: str
    pose: Pose
    mesh: AssetRef | LinePrimitive | CubePrimitive
    color: Rgba
    alpha: float


@dataclass(frozen=True)
class SceneSnapshot:
    frame: float
    objects: tuple[SnapshotObject, ...]

    def by_id(self) -> dict[str, SnapshotObject]:
        return {o.id: o for o in self.objects}


class _LayerAppearance:
    __slots__ = ("color", "alpha", "visible", "color_track", "alpha_track", "visibility_track")

    def __init__(self, color: Rgba, visible: bool):
        self.color = color
        self.alpha = 1.0
        self.visible = visible
        self.color_track = Track("linear")
        self.alpha_track = Track("linear")
        self.visibility_track = Track("step")


class RobotInstance:
    """A posed, styled robot in a scene.

    Holds the unkeyed "current" joint state and appearance plus their keyframe
    tracks. By default the plain layer is visible and the hull/decomposition
    layers are hidden; colors come from URDF materials, else mid-gray.
    """

    def __init__(self, instance_id: str, chain: Chain, assets: AssetStore, base_pose: Pose | None = None):
        for i, link in enumerate(chain.links):
            if link.visuals and not assets.parts(link.name, AppearanceLayer.PLAIN):
                raise MissingAssetError(f"asset store has no mesh for link '{link.name}'")
        self.id = instance_id
        self.chain = chain
        self.assets = assets
        self.base_pose = base_pose if base_pose is not None else Pose.identity()
        self.current_state = np.zeros(chain.dof)
        self.state_track = Track("linear")
        self._appearance: dict[tuple[int, AppearanceLayer], _LayerAppearance] = {}
        for i, link in enumerate(chain.links):
            color = Rgba.coerce(link.base_color) if link.base_color is not None else Rgba(*DEFAULT_GRAY)
            for layer in AppearanceLayer:
                self._appearance[(i, layer)] = _LayerAppearance(
                    color, visible=(layer is AppearanceLayer.PLAIN)
                )

    # -- state ---------------------------------------------------------------

    def set_state(self, state) -> None:
        q = self.chain.check_state(state)
        violated = self.chain.joint_limit_violations(q)
        if violated:
            warnings.warn(
                f"robot '{self.id}': state exceeds joint limits on {', '.join(violated)}",
                stacklevel=2,
            )
        self.current_state = q.copy()

    def keyframe_state(self, frame: float) -> None:
        self.state_track.set_key(frame, self.current_state.copy())

    def keyframe_discrete_trajectory(self, states, start_frame: float = 1.0, stride: float = 1.0) -> None:
        """Key states sequentially at start_frame + k*stride. All-or-nothing."""
        if stride <= 0.0:
            raise ValueError(f"stride must be positive, got {stride}")
        checked = [self.chain.check_state(s) for s in states]
        for k, q in enumerate(checked):
            self.state_track.set_key(start_frame + k * stride, q.copy())

    # -- appearance ----------------------------------------------------------

    def _links_in_scope(self, link) -> list[int]:
        if link is None:
            return list(range(len(self.chain.links)))
        i = int(link)
        if not 0 <= i < len(self.chain.links):
            raise IndexError(
                f"link index {i} out of range (robot has {len(self.chain.links)} links)"
            )
        return [i]

    def set_appearance(
        self,
        layer,
        link: int | None = None,
        color=None,
        alpha: float | None = None,
        visible: bool | None = None,
    ) -> None:
        """Update current (unkeyed) appearance for one link or all links."""
        layer = AppearanceLayer.coerce(layer)
        if alpha is not None and not 0.0 <= float(alpha) <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        rgba = Rgba.coerce(color) if color is not None else None
        for i in self._links_in_scope(link):
            entry = self._appearance[(i, layer)]
            if rgba is not None:
                entry.color = rgba
            if alpha is not None:
                entry.alpha = float(alpha)
            if visible is not None:
                entry.visible = bool(visible)

    def keyframe_appearance(self, frame: float) -> None:
        """Snapshot every link/layer's current color, alpha, and visibility at frame."""
        frame = float(frame)
        if frame < 0.0:
            raise ValueError(f"keyframe frame must be >= 0, got {frame}")
        for entry in self._appearance.values():
            entry.color_track.set_key(frame, entry.color.to_array())
            entry.alpha_track.set_key(frame, entry.alpha)
            entry.visibility_track.set_key(frame, entry.visible)

    def appearance_at(self, link_index: int, layer: AppearanceLayer, frame: float) -> tuple[Rgba, float, bool]:
        entry = self._appearance[(link_index, layer)]
        color = Rgba(*entry.color_track.value_at(frame)) if entry.color_track else entry.color
        alpha = float(entry.alpha_track.value_at(frame)) if entry.alpha_track else entry.alpha
        visible = bool(entry.visibility_track.value_at(frame)) if entry.visibility_track else entry.visible
        return color, alpha, visible

    def state_at(self, frame: float) -> np.ndarray:
        if self.state_track:
            return np.asarray(self.state_track.value_at(frame), dtype=float)
        return self.current_state

    def _key_frames(self):
        if self.state_track:
            yield from (f for f, _ in self.state_track.items())
        for entry in self._appearance.values():
            for track in (entry.color_track, entry.alpha_track, entry.visibility_track):
                if track:
                    yield from (f for f, _ in track.items())


def _align_z_to(direction: np.ndarray) -> np.ndarray:
    """Shortest-arc quaternion rotating +z onto the given unit direction."""
    z = np.array([0.0, 0.0, 1.0])
    d = float(z @ direction)
    if d < -1.0 + 1e-12:
        return np.array([0.0, 1.0, 0.0, 0.0])  # 180° about x
    axis = np.cross(z, direction)
    q = np.array([1.0 + d, axis[0], axis[1], axis[2]])
    return q / math.sqrt(float(q @ q))


class PrimitiveSet:
    """Fixed-capacity set of line or cube elements keyed on the timeline.

    Elements are hidden before their first keyed frame and visible from it
    onward. Placements interpolate linearly between keys (componentwise on
    endpoints/center/orientation/dimensions/color).
    """

    def __init__(self, set_id: str, kind: str, capacity: int):
        if kind not in ("line", "cube"):
            raise ValueError(f"unknown primitive kind '{kind}'")
        if capacity < 1:
            raise ValueError("primitive set capacity must be >= 1")
        self.id = set_id
        self.kind = kind
        self.capacity = capacity
        self._placement = [Track("linear") for _ in range(capacity)]
        self._visibility = [Track("step") for _ in range(capacity)]

    def _check_index(self, index: int) -> int:
        i = int(index)
        if not 0 <= i < self.capacity:
            raise IndexError(f"element index {i} out of range (capacity {self.capacity})")
        return i

    def set_line_at_frame(
        self, index: int, start, end, frame: float, radius: float = 0.01, color=(1.0, 0.0, 0.0, 1.0)
    ) -> None:
        if self.kind != "line":
            raise ValueError(f"'{self.id}' is a {self.kind} set, not a line set")
        i = self._check_index(index)
        start = as_vec3(start)
        end = as_vec3(end)
        if float(np.linalg.norm(end - start)) <= 1e-9:
            raise GeometryError("line start and end coincide")
        if radius <= 0.0:
            raise GeometryError(f"line radius must be positive, got {radius}")
        packed = np.concatenate([start, end, [float(radius)], Rgba.coerce(color).to_array()])
        self._placement[i].set_key(frame, packed)
        self._visibility[i].set_key(frame, True)

    def set_cube_at_frame(
        self,
        index: int,
        center,
        orientation_rpy,
        dims,
        frame: float,
        color=(1.0, 0.0, 0.0, 1.0),
        alpha: float = 1.0,
    ) -> None:
        if self.kind != "cube":
            raise ValueError(f"'{self.id}' is a {self.kind} set, not a cube set")
        i = self._check_index(index)
        dims = as_vec3(dims)
        if np.any(dims <= 0.0):
            raise GeometryError(f"cube dimensions must be positive, got {dims.tolist()}")
        if not 0.0 <= float(alpha) <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        packed = np.concatenate(
            [as_vec3(center), as_vec3(orientation_rpy), dims, Rgba.coerce(color).to_array(), [float(alpha)]]
        )
        self._placement[i].set_key(frame, packed)
        self._visibility[i].set_key(frame, True)

    def element_at(self, index: int, frame: float) -> SnapshotObject | None:
        """Evaluated element, or None when hidden at this frame."""
        track = self._placement[index]
        if not track or frame < track.first_frame:
            return None
        if not bool(self._visibility[index].value_at(frame)):
            return None
        packed = np.asarray(track.value_at(frame), dtype=float)
        oid = f"{self.id}/{index}"
        if self.kind == "line":
            start, end, radius, color = packed[0:3], packed[3:6], float(packed[6]), packed[7:11]
            seg = end - start
            length = float(np.linalg.norm(seg))
            pose = Pose(start, _align_z_to(seg / length))
            return SnapshotObject(oid, pose, LinePrimitive(length, radius), Rgba(*color), 1.0)
        center, rpy, dims = packed[0:3], packed[3:6], packed[6:9]
        color, alpha = packed[9:13], float(packed[13])
        pose = Pose(center, quat_from_rpy(rpy))
        return SnapshotObject(oid, pose, CubePrimitive(tuple(dims)), Rgba(*color), alpha)

    def _key_frames(self):
        for track in self._placement:
            if track:
                yield from (f for f, _ in track.items())


class Scene:
    """Container of robot instances and primitive sets on a shared timeline."""

    def __init__(self, frame_rate: float = DEFAULT_FRAME_RATE):
        if frame_rate <= 0:
            raise ValueError("frame_rate must be positive")
        self.frame_rate = float(frame_rate)
        self.robots: list[RobotInstance] = []
        self.primitive_sets: list[PrimitiveSet] = []
        self._ids: set[str] = set()

    def _register(self, requested: str | None, prefix: str, count: int) -> str:
        name = requested if requested is not None else f"{prefix}{count}"
        if name in self._ids:
            raise ValueError(f"scene already contains an object named '{name}'")
        self._ids.add(name)
        return name

    def spawn(self, chain: Chain, assets: AssetStore, name: str | None = None) -> RobotInstance:
        """Add a robot instance at the all-zero state with default styling."""
        rid = self._register(name, "robot", len(self.robots))
        robot = RobotInstance(rid, chain, assets)
        self.robots.append(robot)
        return robot

    def add_line_set(self, capacity: int, name: str | None = None) -> PrimitiveSet:
        sid = self._register(name, "lines", len(self.primitive_sets))
        ps = PrimitiveSet(sid, "line", capacity)
        self.primitive_sets.append(ps)
        return ps

    def add_cube_set(self, capacity: int, name: str | None = None) -> PrimitiveSet:
        sid = self._register(name, "cubes", len(self.primitive_sets))
        ps = PrimitiveSet(sid, "cube", capacity)
        self.primitive_sets.append(ps)
        return ps

    def is_empty(self) -> bool:
        return not self.robots and not self.primitive_sets

    def frame_range(self) -> tuple[int, int]:
        """Integer frame span covering every key; (1, 1) for unkeyed scenes."""
        frames: list[float] = []
        for robot in self.robots:
            frames.extend(robot._key_frames())
        for ps in self.primitive_sets:
            frames.extend(ps._key_frames())
        if not frames:
            return (1, 1)
        lo = max(0, math.floor(min(frames)))
        hi = max(lo, math.ceil(max(frames)))
        return (lo, hi)

    def evaluate(self, frame: float) -> SceneSnapshot:
        """Evaluate every track at frame: a pure function of (scene, frame)."""
        if frame < 0.0:
            raise ValueError(f"frame must be >= 0, got {frame}")
        objects: list[SnapshotObject] = []
        for robot in self.robots:
            state = robot.state_at(frame)
            fk = forward_kinematics(robot.chain, state, robot.base_pose)
            for i, link in enumerate(robot.chain.links):
                for layer in AppearanceLayer:
                    parts = robot.assets.parts(link.name, layer)
                    if not parts:
                        continue
                    color, alpha, visible = robot.appearance_at(i, layer, frame)
                    if not visible:
                        continue
                    for part in range(len(parts)):
                        oid = f"{robot.id}/{link.name}/{layer.value}"
                        if layer is AppearanceLayer.CONVEX_DECOMPOSITION:
                            oid = f"{oid}/{part}"
                        objects.append(SnapshotObject(oid, fk.poses[i], AssetRef(robot.id, link.name, layer, part), color, alpha))
        for ps in self.primitive_sets:
            for i in range(ps.capacity):
                obj = ps.element_at(i, frame)
                if obj is not None:
                    objects.append(obj)
        return SceneSnapshot(float(frame), tuple(objects))

    def resolve_mesh(self, ref):
        """Materialize a snapshot mesh reference as a TriMesh."""
        from .geometry import cube_mesh, line_mesh

        if isinstance(ref, AssetRef):
            for robot in self.robots:
                if robot.id == ref.robot:
                    return robot.assets.parts(ref.link, ref.layer)[ref.part]
            raise KeyError(f"no robot '{ref.robot}' in scene")
        if isinstance(ref, LinePrimitive):
            return line_mesh((0.0, 0.0, 0.0), (0.0, 0.0, ref.length), ref.radius)
        if isinstance(ref, CubePrimitive):
            return cube_mesh((0.0, 0.0, 0.0), (0.0, 0.0, 0.0), ref.dims)
        raise TypeError(f"not a mesh reference: {ref!r}")


def evaluate(scene: Scene, frame: float) -> SceneSnapshot:
    return scene.evaluate(frame)
