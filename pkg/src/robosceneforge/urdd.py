"""Universal Robot Description Directory (URDD): a self-contained bundle of a
URDF plus per-link baked meshes and derived geometry (hulls, decompositions).

Layout (format_version 1):
    <robot>/manifest.json
    <robot>/urdf/robot.urdf
    <robot>/meshes/<link>.obj
    <robot>/convex_hulls/<link>.obj
    <robot>/convex_decompositions/<link>/<part_index>.obj

Baked link meshes live in the link frame: visual origin and scale are applied
and multiple visuals are merged, so consumers need no per-visual transforms.
"""

from __future__ import annotations

import json
import shutil
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .geometry import DecompParams, TriMesh, convex_decomposition, convex_hull, merge_meshes
from .meshio import load_mesh, write_obj
from .urdf import RobotDescription, parse_urdf

FORMAT_VERSION = 1


class UrddError(ValueError):
    """Unbuildable or unloadable URDD."""


class AppearanceLayer(Enum):
    PLAIN = "plain"
    CONVEX_HULL = "convex_hull"
    CONVEX_DECOMPOSITION = "convex_decomposition"

    @classmethod
    def coerce(cls, value) -> AppearanceLayer:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            raise ValueError(
                f"unknown appearance layer '{value}' "
                f"(expected one of {[l.value for l in cls]})"
            ) from None


@dataclass(frozen=True)
class LinkAssets:
    plain_mesh: str | None = None
    hull_mesh: str | None = None
    decomp_meshes: tuple[str, ...] = ()


@dataclass(frozen=True)
class UrddManifest:
    robot_name: str
    source_urdf: str
    mesh_dir: str
    hull_dir: str
    decomp_dir: str
    links: dict[str, LinkAssets]
    format_version: int = FORMAT_VERSION
    decomp_params: DecompParams = field(default_factory=DecompParams)

    def to_json(self) -> str:
        payload = {
            "format_version": self.format_version,
            "robot_name": self.robot_name,
            "source_urdf": self.source_urdf,
            "mesh_dir": self.mesh_dir,
            "hull_dir": self.hull_dir,
            "decomp_dir": self.decomp_dir,
            "decomp_params": {
                "concavity_tol": self.decomp_params.concavity_tol,
                "max_depth": self.decomp_params.max_depth,
            },
            "links": {
                name: {
                    "plain_mesh": assets.plain_mesh,
                    "hull_mesh": assets.hull_mesh,
                    "decomp_meshes": list(assets.decomp_meshes),
                }
                for name, assets in self.links.items()
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> UrddManifest:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UrddError(f"corrupt manifest: {exc}") from None
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise UrddError(f"unsupported manifest format_version {version!r}")
        try:
            links = {
                name: LinkAssets(
                    plain_mesh=entry.get("plain_mesh"),
                    hull_mesh=entry.get("hull_mesh"),
                    decomp_meshes=tuple(entry.get("decomp_meshes", ())),
                )
                for name, entry in data["links"].items()
            }
            dp = data.get("decomp_params", {})
            return cls(
                robot_name=data["robot_name"],
                source_urdf=data["source_urdf"],
                mesh_dir=data["mesh_dir"],
                hull_dir=data["hull_dir"],
                decomp_dir=data["decomp_dir"],
                links=links,
                decomp_params=DecompParams(
                    dp.get("concavity_tol", 0.05), dp.get("max_depth", 6)
                ),
            )
        except (KeyError, TypeError) as exc:
            raise UrddError(f"corrupt manifest: missing field {exc}") from None


class AssetStore:
    """Per-link, per-layer meshes. Immutable after construction."""

    def __init__(self, meshes: dict[tuple[str, AppearanceLayer], tuple[TriMesh, ...]]):
        self._meshes = dict(meshes)

    def parts(self, link: str, layer: AppearanceLayer) -> tuple[TriMesh, ...]:
        return self._meshes.get((link, AppearanceLayer.coerce(layer)), ())

    def has_link(self, link: str) -> bool:
        return any(key[0] == link for key in self._meshes)

    @property
    def links(self) -> tuple[str, ...]:
        seen = dict.fromkeys(key[0] for key in self._meshes)
        return tuple(seen)


def _resolve_mesh(ref: str, mesh_root: Path) -> Path:
    # Accept plain relative paths and ROS-style package:// URIs.
    rel = ref
    for prefix in ("package://", "file://"):
        if rel.startswith(prefix):
            rel = rel[len(prefix):]
            rel = rel.split("/", 1)[1] if prefix == "package://" and "/" in rel else rel
            break
    for candidate in (mesh_root / rel, mesh_root / Path(rel).name):
        if candidate.is_file():
            return candidate
    raise UrddError(f"mesh reference '{ref}' not found under {mesh_root}")


def _baked_link_mesh(link, mesh_root: Path) -> TriMesh | None:
    pieces = []
    for vis in link.visuals:
        mesh = load_mesh(_resolve_mesh(vis.mesh_ref, mesh_root))
        pieces.append(mesh.scaled(vis.scale).transformed(vis.origin))
    if not pieces:
        return None
    return merge_meshes(pieces)


def build_urdd(
    urdf_path,
    mesh_root,
    out_dir,
    decomp_params: DecompParams = DecompParams(),
) -> UrddManifest:
    """Construct a URDD from a URDF, precomputing hulls and decompositions.

    Idempotent: re-running overwrites the directory contents deterministically.
    """
    urdf_path = Path(urdf_path)
    mesh_root = Path(mesh_root)
    out_dir = Path(out_dir)
    urdf_text = urdf_path.read_text(encoding="utf-8")
    desc = parse_urdf(urdf_text)

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UrddError(f"cannot create output directory {out_dir}: {exc}") from None

    (out_dir / "urdf").mkdir(exist_ok=True)
    (out_dir / "urdf" / "robot.urdf").write_text(urdf_text, encoding="utf-8")
    mesh_dir = out_dir / "meshes"
    hull_dir = out_dir / "convex_hulls"
    decomp_dir = out_dir / "convex_decompositions"
    for d in (mesh_dir, hull_dir, decomp_dir):
        if d.exists():
            shutil.rmtree(d)
        d.mkdir()

    links: dict[str, LinkAssets] = {}
    for link in desc.links:
        baked = _baked_link_mesh(link, mesh_root)
        if baked is None:
            links[link.name] = LinkAssets()
            continue
        plain_rel = f"meshes/{link.name}.obj"
        write_obj(baked, out_dir / plain_rel)
        hull = convex_hull(baked.vertices)
        hull_rel = f"convex_hulls/{link.name}.obj"
        write_obj(hull, out_dir / hull_rel)
        parts = convex_decomposition(baked, decomp_params)
        part_rels = []
        for i, part in enumerate(parts):
            rel = f"convex_decompositions/{link.name}/{i}.obj"
            write_obj(part, out_dir / rel)
            part_rels.append(rel)
        links[link.name] = LinkAssets(plain_rel, hull_rel, tuple(part_rels))

    manifest = UrddManifest(
        robot_name=desc.name,
        source_urdf="urdf/robot.urdf",
        mesh_dir="meshes",
        hull_dir="convex_hulls",
        decomp_dir="convex_decompositions",
        links=links,
        decomp_params=decomp_params,
    )
    (out_dir / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest


def load_urdd(dir_path) -> tuple[RobotDescription, AssetStore]:
    """Load a URDD: parse the stored URDF and read every mesh into an AssetStore."""
    dir_path = Path(dir_path)
    manifest_path = dir_path / "manifest.json"
    if not manifest_path.is_file():
        raise UrddError(f"missing manifest: {manifest_path}")
    manifest = UrddManifest.from_json(manifest_path.read_text(encoding="utf-8"))

    urdf_file = dir_path / manifest.source_urdf
    if not urdf_file.is_file():
        raise UrddError(f"manifest names missing URDF file: {urdf_file}")
    desc = parse_urdf(urdf_file.read_text(encoding="utf-8"))

    for link in desc.links:
        if link.name not in manifest.links:
            raise UrddError(f"manifest has no entry for link '{link.name}'")

    meshes: dict[tuple[str, AppearanceLayer], tuple[TriMesh, ...]] = {}

    def read(rel: str) -> TriMesh:
        path = dir_path / rel
        if not path.is_file():
            raise UrddError(f"manifest names missing mesh file: {path}")
        return load_mesh(path)

    for name, assets in manifest.links.items():
        if assets.plain_mesh:
            meshes[(name, AppearanceLayer.PLAIN)] = (read(assets.plain_mesh),)
        if assets.hull_mesh:
            meshes[(name, AppearanceLayer.CONVEX_HULL)] = (read(assets.hull_mesh),)
        if assets.decomp_meshes:
            meshes[(name, AppearanceLayer.CONVEX_DECOMPOSITION)] = tuple(
                read(rel) for rel in assets.decomp_meshes
            )
    return desc, AssetStore(meshes)
