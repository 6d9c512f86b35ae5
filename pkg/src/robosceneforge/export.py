"""Scene serialization: a self-describing scene-document directory (the render
adapter contract) and a baked glTF 2.0 binary.

Both exporters sample integer frames through Scene.evaluate, so downstream
consumers need no kinematics. Animations are baked per frame rather than
exported as sparse keys: glTF interpolates rotations in quaternion space,
which would diverge from joint-space linear interpolation between keys.
"""

from __future__ import annotations

import json
import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .meshio import write_obj
from .timeline import AssetRef, CubePrimitive, LinePrimitive, Scene
from .transforms import Pose

SCENE_DOCUMENT_VERSION = 1
GLB_MAGIC = 0x46546C67
CHUNK_JSON = 0x4E4F534A
CHUNK_BIN = 0x004E4942


class ExportError(ValueError):
    """Unexportable scene (for example, empty)."""


@dataclass(frozen=True)
class BakeOptions:
    sample_step: int = 1
    embed_buffers: bool = True

    def __post_init__(self):
        if self.sample_step < 1:
            raise ExportError(f"sample_step must be >= 1, got {self.sample_step}")


@dataclass
class _BakedObject:
    id: str
    mesh_ref: object
    poses: list[Pose]
    colors: list[np.ndarray]  # rgba
    alphas: list[float]
    visibles: list[bool]


def bake_scene(scene: Scene, sample_step: int = 1) -> tuple[list[int], list[_BakedObject]]:
    """Evaluate the scene at integer frames and gather per-object samples.

    Objects absent from a frame's snapshot are marked invisible there; their
    pose/color samples hold the nearest evaluated value so tracks stay dense.
    """
    if scene.is_empty():
        raise ExportError("cannot export an empty scene")
    first, last = scene.frame_range()
    frames = list(range(first, last + 1, sample_step))
    snapshots = [scene.evaluate(f) for f in frames]

    order: list[str] = []
    baked: dict[str, _BakedObject] = {}
    for snap in snapshots:
        for obj in snap.objects:
            if obj.id not in baked:
                order.append(obj.id)
                baked[obj.id] = _BakedObject(obj.id, obj.mesh, [], [], [], [])

    by_frame = [snap.by_id() for snap in snapshots]
    for oid in order:
        b = baked[oid]
        for snap_map in by_frame:
            hit = snap_map.get(oid)
            if hit is None:
                b.poses.append(None)
                b.colors.append(None)
                b.alphas.append(None)
                b.visibles.append(False)
            else:
                b.poses.append(hit.pose)
                b.colors.append(hit.color.to_array())
                b.alphas.append(hit.alpha)
                b.visibles.append(True)
        _fill_gaps(b)
    return frames, [baked[oid] for oid in order]


def _fill_gaps(b: _BakedObject) -> None:
    n = len(b.poses)
    prev = next(i for i in range(n) if b.poses[i] is not None)
    for i in range(n):
        if b.poses[i] is None:
            b.poses[i] = b.poses[prev]
            b.colors[i] = b.colors[prev]
            b.alphas[i] = b.alphas[prev]
        else:
            prev = i


def _r9(x: float) -> float:
    """Round to 9 significant digits for stable document bytes."""
    return float(f"{float(x):.9g}")


def _r9_list(vals) -> list[float]:
    return [_r9(v) for v in vals]


def _safe_name(oid: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", oid)


def export_scene_document(scene: Scene, out_dir, opts: BakeOptions = BakeOptions()) -> Path:
    """Write scene.json plus a meshes/ bundle; returns the scene.json path.

    Identical scenes produce byte-identical documents: stable object order,
    floats at 9 significant digits.
    """
    frames, baked = bake_scene(scene, opts.sample_step)
    out_dir = Path(out_dir)
    mesh_dir = out_dir / "meshes"
    try:
        mesh_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ExportError(f"cannot create output directory {out_dir}: {exc}") from None

    written: dict[int, str] = {}  # id(TriMesh) -> relative path
    objects = []
    for b in baked:
        if isinstance(b.mesh_ref, LinePrimitive):
            mesh_entry = {
                "primitive": "line",
                "params": {"length": _r9(b.mesh_ref.length), "radius": _r9(b.mesh_ref.radius)},
            }
        elif isinstance(b.mesh_ref, CubePrimitive):
            mesh_entry = {"primitive": "cube", "params": {"dims": _r9_list(b.mesh_ref.dims)}}
        else:
            tri = scene.resolve_mesh(b.mesh_ref)
            rel = written.get(id(tri))
            if rel is None:
                rel = f"meshes/{_safe_name(b.id)}.obj"
                write_obj(tri, out_dir / rel)
                written[id(tri)] = rel
            mesh_entry = {"file": rel}
        quats = [p.rotation.copy() for p in b.poses]
        # q and -q are one rotation; keep consecutive samples in the same
        # hemisphere so key-to-key interpolation in the renderer stays short.
        for k in range(1, len(quats)):
            if float(quats[k] @ quats[k - 1]) < 0.0:
                quats[k] = -quats[k]
        objects.append(
            {
                "id": b.id,
                "mesh": mesh_entry,
                "pose_keys": [
                    {
                        "frame": f,
                        "t": _r9_list(p.translation),
                        "q": _r9_list(q),
                    }
                    for f, p, q in zip(frames, b.poses, quats)
                ],
                "color_keys": [
                    {"frame": f, "rgba": _r9_list(c)} for f, c in zip(frames, b.colors)
                ],
                "alpha_keys": [
                    {"frame": f, "a": _r9(a)} for f, a in zip(frames, b.alphas)
                ],
                "visible_keys": [
                    {"frame": f, "v": bool(v)} for f, v in zip(frames, b.visibles)
                ],
            }
        )

    doc = {
        "version": SCENE_DOCUMENT_VERSION,
        "frame_rate": _r9(scene.frame_rate),
        "frame_range": [frames[0], frames[-1]],
        "objects": objects,
    }
    path = out_dir / "scene.json"
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# glTF 2.0
# ---------------------------------------------------------------------------


class _GltfBuilder:
    def __init__(self):
        self.blob = bytearray()
        self.buffer_views = []
        self.accessors = []

    def _add_view(self, data: bytes, target: int | None) -> int:
        while len(self.blob) % 4:
            self.blob.append(0)
        view = {"buffer": 0, "byteOffset": len(self.blob), "byteLength": len(data)}
        if target is not None:
            view["target"] = target
        self.blob.extend(data)
        self.buffer_views.append(view)
        return len(self.buffer_views) - 1

    def add_f32(self, array: np.ndarray, acc_type: str, minmax: bool = False, target: int | None = None) -> int:
        data = np.ascontiguousarray(array, dtype="<f4")
        view = self._add_view(data.tobytes(), target)
        acc = {
            "bufferView": view,
            "componentType": 5126,  # FLOAT
            "count": int(data.shape[0]),
            "type": acc_type,
        }
        if minmax:
            flat = data.reshape(data.shape[0], -1)
            acc["min"] = [float(v) for v in flat.min(axis=0)]
            acc["max"] = [float(v) for v in flat.max(axis=0)]
        self.accessors.append(acc)
        return len(self.accessors) - 1

    def add_u32(self, array: np.ndarray, target: int | None = None) -> int:
        data = np.ascontiguousarray(array, dtype="<u4")
        view = self._add_view(data.tobytes(), target)
        self.accessors.append(
            {
                "bufferView": view,
                "componentType": 5125,  # UNSIGNED_INT
                "count": int(data.size),
                "type": "SCALAR",
            }
        )
        return len(self.accessors) - 1


def _flat_shaded(tri_mesh) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Expand to per-triangle vertices so each corner carries its face normal."""
    v = tri_mesh.vertices
    t = tri_mesh.triangles
    pos = v[t.reshape(-1)]
    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    n = np.cross(b - a, c - a)
    norms = np.linalg.norm(n, axis=1, keepdims=True)
    n = n / np.where(norms > 0, norms, 1.0)
    normals = np.repeat(n, 3, axis=0)
    indices = np.arange(len(pos), dtype=np.uint32)
    return pos, normals, indices


def _gltf_quat(q: np.ndarray) -> list[float]:
    # glTF stores quaternions as (x, y, z, w).
    return [float(q[1]), float(q[2]), float(q[3]), float(q[0])]


def export_gltf(scene: Scene, out_path, opts: BakeOptions = BakeOptions()) -> Path:
    """Bake the scene into a glTF 2.0 file (binary .glb by default).

    One node per object ever visible in the sampled range; nodes animate with
    LINEAR translation/rotation samplers at times frame/frame_rate. Visibility
    is encoded by a zero scale at hidden frames (glTF has no visibility
    animation). Materials carry the first sampled base color with alpha
    blending; color animation lives only in the scene document.
    """
    frames, baked = bake_scene(scene, opts.sample_step)
    out_path = Path(out_path)

    builder = _GltfBuilder()
    times = np.array(frames, dtype=float) / scene.frame_rate
    time_acc = builder.add_f32(times.reshape(-1, 1), "SCALAR", minmax=True)

    geom_cache: dict[int, tuple[int, int, int]] = {}
    meshes = []
    materials = []
    nodes = []
    channels = []
    samplers = []

    for b in baked:
        tri = scene.resolve_mesh(b.mesh_ref)
        cached = geom_cache.get(id(tri))
        if cached is None:
            pos, normals, indices = _flat_shaded(tri)
            pos_acc = builder.add_f32(pos, "VEC3", minmax=True, target=34962)
            norm_acc = builder.add_f32(normals, "VEC3", target=34962)
            idx_acc = builder.add_u32(indices, target=34963)
            cached = (pos_acc, norm_acc, idx_acc)
            geom_cache[id(tri)] = cached
        pos_acc, norm_acc, idx_acc = cached

        rgba = b.colors[0].copy()
        rgba[3] *= b.alphas[0]
        materials.append(
            {
                "name": f"{b.id}.material",
                "pbrMetallicRoughness": {
                    "baseColorFactor": [float(c) for c in rgba],
                    "metallicFactor": 0.0,
                    "roughnessFactor": 0.8,
                },
                "alphaMode": "BLEND",
                "doubleSided": False,
            }
        )
        meshes.append(
            {
                "name": f"{b.id}.mesh",
                "primitives": [
                    {
                        "attributes": {"POSITION": pos_acc, "NORMAL": norm_acc},
                        "indices": idx_acc,
                        "material": len(materials) - 1,
                        "mode": 4,
                    }
                ],
            }
        )

        node_index = len(nodes)
        node = {
            "name": b.id,
            "mesh": len(meshes) - 1,
            "translation": [float(x) for x in b.poses[0].translation],
            "rotation": _gltf_quat(b.poses[0].rotation),
            "scale": [1.0, 1.0, 1.0] if b.visibles[0] else [0.0, 0.0, 0.0],
        }
        nodes.append(node)

        translations = np.array([p.translation for p in b.poses])
        rotations = np.array([_gltf_quat(p.rotation) for p in b.poses])
        # Hemisphere continuity: q and -q are the same rotation, but sign flips
        # between samples would make LINEAR playback swing the long way around.
        for k in range(1, len(rotations)):
            if float(rotations[k] @ rotations[k - 1]) < 0.0:
                rotations[k] = -rotations[k]
        scales = np.array([[1.0, 1.0, 1.0] if v else [0.0, 0.0, 0.0] for v in b.visibles])
        for path, samples in (
            ("translation", translations),
            ("rotation", rotations),
            ("scale", scales),
        ):
            if len(frames) < 2 or np.allclose(samples, samples[0], atol=0.0):
                continue  # static channel: the node TRS already carries it
            out_acc = builder.add_f32(samples, "VEC4" if path == "rotation" else "VEC3")
            samplers.append({"input": time_acc, "output": out_acc, "interpolation": "LINEAR"})
            channels.append(
                {
                    "sampler": len(samplers) - 1,
                    "target": {"node": node_index, "path": path},
                }
            )

    gltf = {
        "asset": {"version": "2.0", "generator": "robosceneforge"},
        "scene": 0,
        "scenes": [{"nodes": list(range(len(nodes)))}],
        "nodes": nodes,
        "meshes": meshes,
        "materials": materials,
        "accessors": builder.accessors,
        "bufferViews": builder.buffer_views,
        "buffers": [{"byteLength": len(builder.blob)}],
    }
    if channels:
        gltf["animations"] = [{"name": "timeline", "samplers": samplers, "channels": channels}]

    out_path.parent.mkdir(parents=True, exist_ok=True)
    if opts.embed_buffers:
        _write_glb(gltf, bytes(builder.blob), out_path)
    else:
        bin_name = out_path.stem + ".bin"
        gltf["buffers"][0]["uri"] = bin_name
        (out_path.parent / bin_name).write_bytes(bytes(builder.blob))
        out_path.write_text(json.dumps(gltf, indent=2), encoding="utf-8")
    return out_path


def _write_glb(gltf: dict, blob: bytes, path: Path) -> None:
    json_bytes = json.dumps(gltf, separators=(",", ":")).encode("utf-8")
    json_bytes += b" " * (-len(json_bytes) % 4)
    blob += b"\x00" * (-len(blob) % 4)
    total = 12 + 8 + len(json_bytes) + 8 + len(blob)
    with open(path, "wb") as fh:
        fh.write(struct.pack("<III", GLB_MAGIC, 2, total))
        fh.write(struct.pack("<II", len(json_bytes), CHUNK_JSON))
        fh.write(json_bytes)
        fh.write(struct.pack("<II", len(blob), CHUNK_BIN))
        fh.write(blob)
