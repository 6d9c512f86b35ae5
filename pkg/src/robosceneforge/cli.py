"""Command-line front end: URDD conversion, inspection, kinematics, geometry,
and animation export.

Angles on the command line are radians. Exit codes: 0 success, 1 usage error,
2 processing error (diagnostics go to stderr). The ROBOSCENE_RESOURCES
environment variable sets the default root for URDD lookups by name.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from pathlib import Path

import numpy as np

from .export import BakeOptions, export_gltf, export_scene_document
from .figures import GradientSpec, motion_gradient
from .geometry import DecompParams, convex_decomposition, convex_hull
from .kinematics import IkOptions, forward_kinematics, inverse_kinematics, to_chain
from .meshio import load_mesh, write_obj
from .timeline import Scene
from .transforms import Pose
from .urdd import build_urdd, load_urdd

RESOURCES_ENV = "ROBOSCENE_RESOURCES"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the CLI contract reserves 2 for
    # processing errors, so route usage problems through exit code 1.
    def error(self, message):
        raise _UsageError(message)


class TrajectoryError(ValueError):
    pass


def read_trajectory(path) -> list[list[float]]:
    """Read joint states from JSON (array of arrays) or CSV (one state per row)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise TrajectoryError(f"{path}: empty trajectory file")
    if text.lstrip()[0] == "[":
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TrajectoryError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(rows, list) or not rows:
            raise TrajectoryError(f"{path}: expected a non-empty array of arrays")
        states = []
        for r, row in enumerate(rows, start=1):
            if not isinstance(row, list):
                raise TrajectoryError(f"{path}: row {r} is not an array")
            try:
                states.append([float(v) for v in row])
            except (TypeError, ValueError):
                raise TrajectoryError(f"{path}: row {r} contains a non-numeric cell") from None
    else:
        states = []
        for r, row in enumerate(csv.reader(text.splitlines()), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                states.append([float(c) for c in row])
            except ValueError:
                raise TrajectoryError(f"{path}: row {r} contains a non-numeric cell") from None
        if not states:
            raise TrajectoryError(f"{path}: empty trajectory file")
    width = len(states[0])
    for r, row in enumerate(states, start=1):
        if len(row) != width:
            raise TrajectoryError(
                f"{path}: ragged trajectory, row {r} has {len(row)} values (expected {width})"
            )
    return states


def _csv_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip() != ""])
    except ValueError:
        raise _UsageError(f"expected comma-separated numbers, got '{text}'") from None


def _resolve_urdd(arg: str) -> Path:
    p = Path(arg)
    if p.is_dir():
        return p
    root = os.environ.get(RESOURCES_ENV)
    if root:
        candidate = Path(root) / arg
        if candidate.is_dir():
            return candidate
    raise FileNotFoundError(f"no URDD directory '{arg}'" + (f" (searched {root})" if root else ""))


def _fmt_pose(pose: Pose) -> str:
    t = ", ".join(f"{v:.6f}" for v in pose.translation)
    q = ", ".join(f"{v:.6f}" for v in pose.rotation)
    return f"t=({t}) q=({q})"


def _export_output(scene: Scene, out: str, sample_step: int = 1) -> Path:
    if out.endswith(".glb"):
        return export_gltf(scene, out, BakeOptions(sample_step=sample_step))
    return export_scene_document(scene, out, BakeOptions(sample_step=sample_step))


def build_parser() -> _Parser:
    parser = _Parser(prog="roboscene", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("convert", help="build a URDD from a URDF")
    p.add_argument("urdf")
    p.add_argument("--meshes", required=True, help="directory that resolves the URDF mesh refs")
    p.add_argument("-o", "--out", required=True)
    p.add_argument("--tol", type=float, default=0.05, help="decomposition concavity tolerance")
    p.add_argument("--max-depth", type=int, default=6)

    p = sub.add_parser("info", help="print URDD name, link count, and DOF")
    p.add_argument("urdd")

    p = sub.add_parser("pose", help="forward kinematics for a joint state")
    p.add_argument("urdd")
    p.add_argument("--state", required=True, help="comma-separated joint values (radians)")
    p.add_argument("--link", default=None, help="limit output to one link")

    p = sub.add_parser("ik", help="damped-least-squares inverse kinematics")
    p.add_argument("urdd")
    p.add_argument("--link", required=True)
    p.add_argument("--target", required=True, help="x,y,z,qw,qx,qy,qz")
    p.add_argument("--seed", default=None, help="comma-separated start state (default zeros)")
    p.add_argument("--pos-tol", type=float, default=1e-4)
    p.add_argument("--rot-tol", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=500)

    p = sub.add_parser("hull", help="convex hull of a mesh")
    p.add_argument("mesh")
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("decomp", help="approximate convex decomposition of a mesh")
    p.add_argument("mesh")
    p.add_argument("-o", "--out", required=True, help="output directory for part OBJs")
    p.add_argument("--tol", type=float, default=0.05)
    p.add_argument("--max-depth", type=int, default=6)

    p = sub.add_parser("animate", help="keyframe a trajectory and export the scene")
    p.add_argument("urdd")
    p.add_argument("--trajectory", required=True, help="JSON or CSV file of joint states")
    p.add_argument("-o", "--out", required=True, help=".glb file or scene-document directory")
    p.add_argument("--fps", type=float, default=24.0)
    p.add_argument("--stride", type=float, default=1.0, help="frames between trajectory states")

    p = sub.add_parser("gradient", help="motion-through-color-gradient composite")
    p.add_argument("urdd")
    p.add_argument("--start", required=True, help="start state, comma-separated radians")
    p.add_argument("--end", required=True, help="end state, comma-separated radians")
    p.add_argument("--copies", type=int, required=True)
    p.add_argument("--start-color", default="0.2,0.2,0.2,1")
    p.add_argument("--end-color", default="1,0,0,1")
    p.add_argument("-o", "--out", required=True, help=".glb file or scene-document directory")
    return parser


# Flags whose values are numeric CSV and may legitimately start with a minus
# sign, which argparse would otherwise read as an option.
_CSV_FLAGS = {"--state", "--target", "--seed", "--start", "--end", "--start-color", "--end-color"}
_NEG_CSV = re.compile(r"-[0-9.][0-9.,eE+-]*")


def _join_negative_csv(argv: list[str]) -> list[str]:
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _CSV_FLAGS and i + 1 < len(argv) and _NEG_CSV.fullmatch(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_join_negative_csv(argv))
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
    except _UsageError as exc:
        print(f"roboscene: {exc}", file=sys.stderr)
        return 1

    try:
        return _dispatch(args)
    except _UsageError as exc:
        print(f"roboscene: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # processing errors: diagnostics, exit 2
        print(f"roboscene: error: {exc}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.command == "convert":
        manifest = build_urdd(
            args.urdf, args.meshes, args.out, DecompParams(args.tol, args.max_depth)
        )
        meshed = sum(1 for a in manifest.links.values() if a.plain_mesh)
        print(f"wrote {args.out} ({meshed} meshed links)")
        return 0

    if args.command == "info":
        desc, _assets = load_urdd(_resolve_urdd(args.urdd))
        chain = to_chain(desc)
        print(f"name: {desc.name}")
        print(f"links: {len(desc.links)}")
        print(f"dof: {chain.dof}")
        return 0

    if args.command == "pose":
        desc, _assets = load_urdd(_resolve_urdd(args.urdd))
        chain = to_chain(desc)
        fk = forward_kinematics(chain, chain.check_state(_csv_floats(args.state)))
        if args.link is not None:
            print(f"{args.link}: {_fmt_pose(fk.pose_of(args.link))}")
        else:
            for link, pose in zip(chain.links, fk.poses):
                print(f"{link.name}: {_fmt_pose(pose)}")
        return 0

    if args.command == "ik":
        desc, _assets = load_urdd(_resolve_urdd(args.urdd))
        chain = to_chain(desc)
        target_vals = _csv_floats(args.target)
        if len(target_vals) != 7:
            raise _UsageError("--target needs 7 numbers: x,y,z,qw,qx,qy,qz")
        target = Pose(target_vals[:3], target_vals[3:])
        seed = _csv_floats(args.seed) if args.seed else np.zeros(chain.dof)
        opts = IkOptions(pos_tol=args.pos_tol, rot_tol=args.rot_tol, max_iters=args.max_iters)
        state, report = inverse_kinematics(chain, chain.link_index(args.link), target, seed, opts)
        print("state: " + ",".join(f"{v:.9g}" for v in state))
        print(f"converged: {str(report.converged).lower()}")
        print(f"iterations: {report.iterations}")
        print(f"position_error: {report.final_position_error:.9g}")
        print(f"orientation_error: {report.final_orientation_error:.9g}")
        return 0

    if args.command == "hull":
        mesh = load_mesh(args.mesh)
        write_obj(convex_hull(mesh.vertices), args.out)
        print(f"wrote {args.out}")
        return 0

    if args.command == "decomp":
        mesh = load_mesh(args.mesh)
        parts = convex_decomposition(mesh, DecompParams(args.tol, args.max_depth))
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i, part in enumerate(parts):
            write_obj(part, out / f"{i}.obj")
        print(f"wrote {len(parts)} parts to {args.out}")
        return 0

    if args.command == "animate":
        desc, assets = load_urdd(_resolve_urdd(args.urdd))
        chain = to_chain(desc)
        states = read_trajectory(args.trajectory)
        scene = Scene(frame_rate=args.fps)
        robot = scene.spawn(chain, assets)
        robot.keyframe_discrete_trajectory(states, start_frame=1.0, stride=args.stride)
        path = _export_output(scene, args.out)
        print(f"wrote {path}")
        return 0

    if args.command == "gradient":
        desc, assets = load_urdd(_resolve_urdd(args.urdd))
        chain = to_chain(desc)
        spec = GradientSpec(
            start_state=_csv_floats(args.start),
            end_state=_csv_floats(args.end),
            start_color=tuple(_csv_floats(args.start_color)),
            end_color=tuple(_csv_floats(args.end_color)),
            num_copies=args.copies,
        )
        scene = Scene()
        motion_gradient(scene, chain, assets, spec)
        path = _export_output(scene, args.out)
        print(f"wrote {path}")
        return 0

    raise _UsageError(f"unknown command '{args.command}'")


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
