"""Triangle-mesh utilities: convex hulls, approximate convex decomposition,
and annotation primitives (lines, cubes).

All geometry is unit-agnostic but conventionally in meters. Hull faces are
outward-oriented; the hull visibility epsilon is 1e-10, so every input point
ends up within 1e-9 of every face half-space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .transforms import Pose, as_vec3, quat_from_rpy, quat_rotate

HULL_EPS = 1e-10
AREA_TOL = 1e-12
DEGEN_TOL = 1e-9
LINE_SEGMENTS = 16


class GeometryError(ValueError):
    """Invalid or degenerate geometric input."""


class TriMesh:
    """Indexed triangle mesh.

    Construction validates indices and drops degenerate triangles (repeated
    vertex indices or area <= 1e-12), so a constructed mesh never carries them.
    """

    __slots__ = ("vertices", "triangles")

    def __init__(self, vertices, triangles):
        v = np.asarray(vertices, dtype=float).reshape(-1, 3)
        t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
        if t.size:
            if t.min() < 0 or t.max() >= len(v):
                raise GeometryError(
                    f"triangle index out of range (mesh has {len(v)} vertices)"
                )
            keep = (t[:, 0] != t[:, 1]) & (t[:, 1] != t[:, 2]) & (t[:, 0] != t[:, 2])
            t = t[keep]
            if len(t):
                a = v[t[:, 0]]
                areas = 0.5 * np.linalg.norm(
                    np.cross(v[t[:, 1]] - a, v[t[:, 2]] - a), axis=1
                )
                t = t[areas > AREA_TOL]
        v.setflags(write=False)
        t.setflags(write=False)
        self.vertices = v
        self.triangles = t

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def triangle_count(self) -> int:
        return len(self.triangles)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if not len(self.vertices):
            raise GeometryError("empty mesh has no bounding box")
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def transformed(self, pose: Pose) -> TriMesh:
        r = pose.to_matrix()[:3, :3]
        return TriMesh(self.vertices @ r.T + pose.translation, self.triangles)

    def scaled(self, scale) -> TriMesh:
        s = np.asarray(scale, dtype=float)
        return TriMesh(self.vertices * s, self.triangles)

    def __repr__(self) -> str:
        return f"TriMesh({self.vertex_count} vertices, {self.triangle_count} triangles)"


def merge_meshes(meshes) -> TriMesh:
    meshes = list(meshes)
    if not meshes:
        raise GeometryError("cannot merge zero meshes")
    verts, tris, offset = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        tris.append(m.triangles + offset)
        offset += m.vertex_count
    return TriMesh(np.vstack(verts), np.vstack(tris))


def mesh_volume(mesh: TriMesh) -> float:
    """Signed divergence-theorem volume; positive for closed outward-oriented meshes."""
    v, t = mesh.vertices, mesh.triangles
    if not len(t):
        return 0.0
    a, b, c = v[t[:, 0]], v[t[:, 1]], v[t[:, 2]]
    return float(np.einsum("ij,ij->i", a, np.cross(b, c)).sum() / 6.0)


# ---------------------------------------------------------------------------
# Convex hull (3D quickhull)
# ---------------------------------------------------------------------------


class _Face:
    __slots__ = ("verts", "normal", "offset", "outside", "alive")

    def __init__(self, verts, points):
        self.verts = verts  # (a, b, c) indices, CCW seen from outside
        a, b, c = (points[i] for i in verts)
        n = np.cross(b - a, c - a)
        norm = math.sqrt(float(n @ n))
        if norm < AREA_TOL:
            raise GeometryError("degenerate hull face")
        self.normal = n / norm
        self.offset = float(self.normal @ a)
        self.outside: list[int] = []  # conflict points assigned to this face
        self.alive = True

    def dist(self, p) -> float:
        return float(self.normal @ p) - self.offset


def _initial_simplex(points: np.ndarray) -> list[int]:
    # Extreme points along each axis give a well-spread starting pair.
    lo = points.argmin(axis=0)
    hi = points.argmax(axis=0)
    candidates = list(dict.fromkeys([*lo, *hi]))
    best, i0, i1 = -1.0, -1, -1
    for i in candidates:
        for j in candidates:
            d = float(np.sum((points[i] - points[j]) ** 2))
            if d > best:
                best, i0, i1 = d, i, j
    if best < DEGEN_TOL**2:
        raise GeometryError("degenerate input: all points coincide")
    seg = points[i1] - points[i0]
    rel = points - points[i0]
    cross = np.cross(rel, seg)
    d2_line = np.einsum("ij,ij->i", cross, cross) / float(seg @ seg)
    i2 = int(d2_line.argmax())
    if d2_line[i2] < DEGEN_TOL**2:
        raise GeometryError("degenerate input: points are collinear")
    n = np.cross(seg, points[i2] - points[i0])
    n = n / math.sqrt(float(n @ n))
    d_plane = np.abs(rel @ n)
    i3 = int(d_plane.argmax())
    if d_plane[i3] < DEGEN_TOL:
        raise GeometryError("degenerate input: points are coplanar")
    return [i0, i1, i2, i3]


def convex_hull_indices(points) -> tuple[np.ndarray, list[tuple[int, int, int]]]:
    """Quickhull. Returns (points array, outward-oriented triangles of original indices)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) < 4:
        raise GeometryError(f"convex hull needs at least 4 points, got {len(pts)}")
    i0, i1, i2, i3 = _initial_simplex(pts)
    centroid = pts[[i0, i1, i2, i3]].mean(axis=0)

    def oriented(a, b, c):
        f = _Face((a, b, c), pts)
        if f.dist(centroid) > 0.0:
            f = _Face((a, c, b), pts)
        return f

    faces = [
        oriented(i0, i1, i2),
        oriented(i0, i1, i3),
        oriented(i0, i2, i3),
        oriented(i1, i2, i3),
    ]

    simplex = {i0, i1, i2, i3}
    for idx in range(len(pts)):
        if idx in simplex:
            continue
        best_face, best_d = None, HULL_EPS
        for f in faces:
            d = f.dist(pts[idx])
            if d > best_d:
                best_face, best_d = f, d
        if best_face is not None:
            best_face.outside.append(idx)

    pending = [f for f in faces if f.outside]
    while pending:
        face = pending.pop()
        if not face.alive or not face.outside:
            continue
        apex = max(face.outside, key=lambda i: face.dist(pts[i]))
        p = pts[apex]

        visible = [f for f in faces if f.alive and f.dist(p) > HULL_EPS]
        # Horizon: directed edges of visible faces whose twin is not visible.
        edges = set()
        for f in visible:
            a, b, c = f.verts
            edges.update(((a, b), (b, c), (c, a)))
        horizon = [(u, v) for (u, v) in edges if (v, u) not in edges]

        orphans = []
        for f in visible:
            f.alive = False
            orphans.extend(f.outside)
            f.outside = []
        faces = [f for f in faces if f.alive]

        new_faces = [_Face((u, v, apex), pts) for (u, v) in horizon]
        faces.extend(new_faces)

        for idx in orphans:
            if idx == apex:
                continue
            best_face, best_d = None, HULL_EPS
            for f in new_faces:
                d = f.dist(pts[idx])
                if d > best_d:
                    best_face, best_d = f, d
            if best_face is not None:
                best_face.outside.append(idx)
        pending.extend(f for f in new_faces if f.outside)

    return pts, [f.verts for f in faces]


def convex_hull(points) -> TriMesh:
    """Convex hull of a point set as a closed, outward-oriented triangle mesh.

    Rejects degenerate input (fewer than 4 points, or coplanar/collinear
    within 1e-9) rather than perturbing it.
    """
    pts, tri_idx = convex_hull_indices(points)
    used: dict[int, int] = {}
    order: list[int] = []
    for tri in tri_idx:
        for i in tri:
            if i not in used:
                used[i] = len(order)
                order.append(i)
    verts = pts[order]
    tris = [(used[a], used[b], used[c]) for (a, b, c) in tri_idx]
    return TriMesh(verts, tris)


# ---------------------------------------------------------------------------
# Approximate convex decomposition (recursive hull splitting)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompParams:
    """Concavity tolerance is a fraction of hull volume; depth bounds the part count at 2^max_depth."""

    concavity_tol: float = 0.05
    max_depth: int = 6

    def __post_init__(self):
        if not 0.0 < self.concavity_tol <= 1.0:
            raise GeometryError("concavity_tol must be in (0, 1]")
        if self.max_depth < 0:
            raise GeometryError("max_depth must be >= 0")


def _try_hull(points: np.ndarray) -> TriMesh | None:
    if len(points) < 4:
        return None
    try:
        return convex_hull(points)
    except GeometryError:
        return None


def _decompose(points: np.ndarray, hull: TriMesh, depth: int, params: DecompParams, out: list):
    if depth >= params.max_depth:
        out.append(hull)
        return
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    axis = int(np.argmax(hi - lo))
    pivot = float(points[:, axis].mean())
    d = points[:, axis] - pivot
    neg = points[d <= 1e-12]
    pos = points[d >= -1e-12]
    hull_neg = _try_hull(neg)
    hull_pos = _try_hull(pos)
    if hull_neg is None or hull_pos is None or len(neg) == len(points) or len(pos) == len(points):
        out.append(hull)  # degenerate split: keep this node as a leaf
        return
    total = mesh_volume(hull)
    concavity = 1.0 - (mesh_volume(hull_neg) + mesh_volume(hull_pos)) / total
    if concavity <= params.concavity_tol:
        out.append(hull)
        return
    _decompose(neg, hull_neg, depth + 1, params, out)
    _decompose(pos, hull_pos, depth + 1, params, out)


def convex_decomposition(mesh: TriMesh, params: DecompParams = DecompParams()) -> list[TriMesh]:
    """Cover a mesh with convex parts by recursive hull splitting.

    Splits the vertex set through its centroid, normal to the longest
    bounding-box axis, while the sub-hull volumes reveal concavity above the
    tolerance. Every part is a convex hull of a vertex subset, so the union
    of parts contains every input vertex. Output order is deterministic
    (negative half first).
    """
    points = np.unique(np.asarray(mesh.vertices, dtype=float).reshape(-1, 3), axis=0)
    hull = _try_hull(points)
    if hull is None:
        raise GeometryError("decomposition needs a non-degenerate 3D mesh")
    out: list[TriMesh] = []
    _decompose(points, hull, 0, params, out)
    return out


# ---------------------------------------------------------------------------
# Annotation primitives
# ---------------------------------------------------------------------------


def line_mesh(start, end, radius: float = 0.01) -> TriMesh:
    """Closed capped cylinder whose axis runs start -> end."""
    start = as_vec3(start)
    end = as_vec3(end)
    axis = end - start
    length = math.sqrt(float(axis @ axis))
    if length <= 1e-9:
        raise GeometryError("line start and end coincide")
    if radius <= 0.0:
        raise GeometryError("line radius must be positive")
    w = axis / length
    ref = np.array([0.0, 0.0, 1.0]) if abs(w[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(ref, w)
    u /= math.sqrt(float(u @ u))
    v = np.cross(w, u)

    n = LINE_SEGMENTS
    ang = np.arange(n) * (2.0 * math.pi / n)
    ring = np.cos(ang)[:, None] * u * radius + np.sin(ang)[:, None] * v * radius
    verts = np.vstack([start + ring, end + ring, start[None, :], end[None, :]])
    bot, top = 2 * n, 2 * n + 1

    tris = []
    for i in range(n):
        j = (i + 1) % n
        tris.append((i, j, n + i))  # side quads
        tris.append((j, n + j, n + i))
        tris.append((bot, j, i))  # start cap faces -w
        tris.append((top, n + i, n + j))  # end cap faces +w
    return TriMesh(verts, tris)


_CUBE_CORNERS = np.array(
    [
        [-1, -1, -1],
        [+1, -1, -1],
        [+1, +1, -1],
        [-1, +1, -1],
        [-1, -1, +1],
        [+1, -1, +1],
        [+1, +1, +1],
        [-1, +1, +1],
    ],
    dtype=float,
)

_CUBE_TRIANGLES = [
    (0, 2, 1), (0, 3, 2),  # -z
    (4, 5, 6), (4, 6, 7),  # +z
    (0, 1, 5), (0, 5, 4),  # -y
    (2, 3, 7), (2, 7, 6),  # +y
    (1, 2, 6), (1, 6, 5),  # +x
    (3, 0, 4), (3, 4, 7),  # -x
]


def cube_mesh(center, orientation_rpy, dims) -> TriMesh:
    """8-vertex, 12-triangle box of extents dims, rotated about its center."""
    center = as_vec3(center)
    dims = as_vec3(dims)
    if np.any(dims <= 0.0):
        raise GeometryError(f"cube dimensions must be positive, got {dims.tolist()}")
    q = quat_from_rpy(orientation_rpy)
    corners = _CUBE_CORNERS * (0.5 * dims)
    verts = np.array([center + quat_rotate(q, c) for c in corners])
    return TriMesh(verts, _CUBE_TRIANGLES)
