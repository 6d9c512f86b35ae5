"""Scene-document loading and validation, independent of bpy.

The document contract (version 1): top-level {version, frame_rate,
frame_range, objects[]}; each object carries a mesh source ({file} or
{primitive: line|cube, params}) plus pose/color/alpha/visibility keys.
Everything here is plain data so it can be tested outside Blender.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

SUPPORTED_VERSION = 1
LINE_SEGMENTS = 16


class AdapterError(ValueError):
    """Unloadable scene document (bad version, missing assets, bad schema)."""


@dataclass(frozen=True)
class AdapterConfig:
    scene_path: Path
    collection_name: str = "robosceneforge"
    material_blend: bool = True


@dataclass
class MeshData:
    vertices: list[tuple[float, float, float]]
    faces: list[tuple[int, ...]]


@dataclass
class PlannedObject:
    name: str
    mesh: MeshData
    pose_keys: list[dict]
    color_keys: list[dict]
    alpha_keys: list[dict]
    visible_keys: list[dict]


@dataclass
class ImportPlan:
    frame_rate: float
    frame_range: tuple[int, int]
    objects: list[PlannedObject] = field(default_factory=list)

    @property
    def keyframe_count(self) -> int:
        # location+rotation per pose key, one per color/alpha key, two per
        # visibility key (render and viewport).
        return sum(
            2 * len(o.pose_keys) + len(o.color_keys) + len(o.alpha_keys) + 2 * len(o.visible_keys)
            for o in self.objects
        )


def load_document(scene_path) -> dict:
    scene_path = Path(scene_path)
    doc_file = scene_path / "scene.json" if scene_path.is_dir() else scene_path
    if not doc_file.is_file():
        raise AdapterError(f"no scene document at {doc_file}")
    try:
        doc = json.loads(doc_file.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AdapterError(f"{doc_file}: invalid JSON: {exc}") from None
    version = doc.get("version")
    if version != SUPPORTED_VERSION:
        raise AdapterError(f"unsupported scene document version {version!r}")
    for key in ("frame_rate", "frame_range", "objects"):
        if key not in doc:
            raise AdapterError(f"scene document is missing '{key}'")
    return doc


def read_obj_mesh(path: Path) -> MeshData:
    verts: list[tuple[float, float, float]] = []
    faces: list[tuple[int, ...]] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "v":
            verts.append((float(tokens[1]), float(tokens[2]), float(tokens[3])))
        elif tokens[0] == "f":
            faces.append(tuple(int(t.split("/")[0]) - 1 for t in tokens[1:]))
    if not verts:
        raise AdapterError(f"{path}: mesh has no vertices")
    return MeshData(verts, faces)


def box_mesh(dims) -> MeshData:
    hx, hy, hz = (0.5 * float(d) for d in dims)
    verts = [
        (-hx, -hy, -hz), (hx, -hy, -hz), (hx, hy, -hz), (-hx, hy, -hz),
        (-hx, -hy, hz), (hx, -hy, hz), (hx, hy, hz), (-hx, hy, hz),
    ]
    faces = [
        (0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4),
        (2, 3, 7, 6), (1, 2, 6, 5), (3, 0, 4, 7),
    ]
    return MeshData(verts, faces)


def cylinder_mesh(length: float, radius: float) -> MeshData:
    verts = []
    for z in (0.0, float(length)):
        for k in range(LINE_SEGMENTS):
            a = 2.0 * math.pi * k / LINE_SEGMENTS
            verts.append((radius * math.cos(a), radius * math.sin(a), z))
    faces = []
    n = LINE_SEGMENTS
    for i in range(n):
        j = (i + 1) % n
        faces.append((i, j, n + j, n + i))
    faces.append(tuple(range(n - 1, -1, -1)))  # bottom cap
    faces.append(tuple(range(n, 2 * n)))  # top cap
    return MeshData(verts, faces)


def _mesh_for(entry: dict, scene_dir: Path, name: str) -> MeshData:
    if "file" in entry:
        path = scene_dir / entry["file"]
        if not path.is_file():
            raise AdapterError(f"object '{name}': missing mesh file {path}")
        return read_obj_mesh(path)
    if entry.get("primitive") == "cube":
        return box_mesh(entry["params"]["dims"])
    if entry.get("primitive") == "line":
        return cylinder_mesh(entry["params"]["length"], entry["params"]["radius"])
    raise AdapterError(f"object '{name}': unrecognized mesh source {entry!r}")


def build_import_plan(config: AdapterConfig) -> ImportPlan:
    """Resolve the document into mesh data and key lists, validating assets."""
    scene_path = Path(config.scene_path)
    doc = load_document(scene_path)
    scene_dir = scene_path if scene_path.is_dir() else scene_path.parent
    fr = doc["frame_range"]
    plan = ImportPlan(frame_rate=float(doc["frame_rate"]), frame_range=(int(fr[0]), int(fr[1])))
    for entry in doc["objects"]:
        try:
            name = entry["id"]
            obj = PlannedObject(
                name=name,
                mesh=_mesh_for(entry["mesh"], scene_dir, name),
                pose_keys=list(entry.get("pose_keys", ())),
                color_keys=list(entry.get("color_keys", ())),
                alpha_keys=list(entry.get("alpha_keys", ())),
                visible_keys=list(entry.get("visible_keys", ())),
            )
        except KeyError as exc:
            raise AdapterError(f"scene object is missing field {exc}") from None
        if not obj.pose_keys:
            raise AdapterError(f"object '{name}' has no pose keys")
        plan.objects.append(obj)
    if not plan.objects:
        raise AdapterError("scene document contains no objects")
    return plan
