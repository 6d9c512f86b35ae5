"""Mesh file I/O: OBJ read/write and STL read (ASCII and binary).

The OBJ writer emits `v`/`f` lines only, 1-based indices, triangles only.
The reader is more permissive: it skips normals/texcoords, understands
`f a/b/c` vertex references, and fan-triangulates polygon faces.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .geometry import GeometryError, TriMesh

SUPPORTED_EXTENSIONS = (".obj", ".stl")


class MeshFormatError(GeometryError):
    """Unreadable or unsupported mesh file."""


def load_mesh(path) -> TriMesh:
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".obj":
        return read_obj(path)
    if ext == ".stl":
        return read_stl(path)
    raise MeshFormatError(f"unsupported mesh file extension '{ext}' ({path})")


def read_obj(path) -> TriMesh:
    verts: list[list[float]] = []
    faces: list[tuple[int, int, int]] = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith("#"):
                continue
            tag = tokens[0]
            if tag == "v":
                if len(tokens) < 4:
                    raise MeshFormatError(f"{path}:{lineno}: malformed vertex line")
                verts.append([float(t) for t in tokens[1:4]])
            elif tag == "f":
                idx = []
                for ref in tokens[1:]:
                    first = ref.split("/")[0]
                    i = int(first)
                    idx.append(i - 1 if i > 0 else len(verts) + i)
                if len(idx) < 3:
                    raise MeshFormatError(f"{path}:{lineno}: face with fewer than 3 vertices")
                for k in range(1, len(idx) - 1):  # fan triangulation
                    faces.append((idx[0], idx[k], idx[k + 1]))
    if not verts:
        raise MeshFormatError(f"{path}: no vertices found")
    return TriMesh(np.array(verts), faces or np.zeros((0, 3), dtype=np.int64))


def write_obj(mesh: TriMesh, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
    for t in mesh.triangles:
        lines.append(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_stl(path) -> TriMesh:
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < 15:
        raise MeshFormatError(f"{path}: too short to be an STL file")
    # Binary layout: 80-byte header, uint32 count, 50 bytes per facet.
    if len(raw) >= 84:
        (count,) = struct.unpack_from("<I", raw, 80)
        if len(raw) == 84 + 50 * count:
            return _stl_from_soup(_read_stl_binary(raw, count), path)
    if raw.lstrip()[:5].lower() == b"solid":
        return _stl_from_soup(_read_stl_ascii(raw.decode("ascii", errors="replace"), path), path)
    raise MeshFormatError(f"{path}: not a valid ASCII or binary STL file")


def _read_stl_binary(raw: bytes, count: int) -> list[tuple[float, ...]]:
    tris = []
    off = 84
    for _ in range(count):
        vals = struct.unpack_from("<12f", raw, off)  # normal + 3 vertices
        tris.append(vals[3:12])
        off += 50
    return tris


def _read_stl_ascii(text: str, path: Path) -> list[tuple[float, ...]]:
    tris = []
    current: list[float] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "vertex":
            if len(tokens) < 4:
                raise MeshFormatError(f"{path}:{lineno}: malformed vertex line")
            current.extend(float(t) for t in tokens[1:4])
        elif tokens[0] == "endfacet":
            if len(current) != 9:
                raise MeshFormatError(f"{path}:{lineno}: facet without exactly 3 vertices")
            tris.append(tuple(current))
            current = []
    return tris


def _stl_from_soup(tris: list[tuple[float, ...]], path: Path) -> TriMesh:
    if not tris:
        raise MeshFormatError(f"{path}: STL file contains no facets")
    index: dict[tuple[float, float, float], int] = {}
    verts: list[tuple[float, float, float]] = []
    faces = []
    for tri in tris:
        face = []
        for k in range(3):
            key = (tri[3 * k], tri[3 * k + 1], tri[3 * k + 2])
            i = index.get(key)
            if i is None:
                i = len(verts)
                index[key] = i
                verts.append(key)
            face.append(i)
        faces.append(tuple(face))
    return TriMesh(np.array(verts), faces)
