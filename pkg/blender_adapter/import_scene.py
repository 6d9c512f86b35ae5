#!/usr/bin/env python3
"""Load a robosceneforge scene document into Blender.

Run headless:
    blender --background --python import_scene.py -- --scene <dir> [--collection name]

Pass --print-matrices 1,25,50 to evaluate those frames after import and print
each object's world matrix (used to verify transform fidelity from outside).
"""

import argparse
import sys
from pathlib import Path

# Allow running straight from a source checkout without pip-installing the
# package into Blender's interpreter.
_SRC = Path(__file__).resolve().parent / "src"
if _SRC.is_dir() and str(_SRC) not in sys.path:
    sys.path.insert(0, str(_SRC))

from roboscene_blender import AdapterConfig, import_scene  # noqa: E402


def _script_args() -> list[str]:
    argv = sys.argv
    return argv[argv.index("--") + 1 :] if "--" in argv else argv[1:]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scene", required=True, help="scene-document directory or scene.json")
    parser.add_argument("--collection", default="robosceneforge")
    parser.add_argument("--no-blend", action="store_true", help="keep materials opaque")
    parser.add_argument(
        "--print-matrices",
        default=None,
        help="comma-separated frames: print world matrices after import",
    )
    args = parser.parse_args(_script_args())

    config = AdapterConfig(
        scene_path=Path(args.scene),
        collection_name=args.collection,
        material_blend=not args.no_blend,
    )
    summary = import_scene(config)
    print(f"imported {summary['objects']} objects, {summary['keyframes']} keyframes")

    if args.print_matrices:
        import bpy

        frames = [int(f) for f in args.print_matrices.split(",")]
        collection = bpy.data.collections[args.collection]
        depsgraph = bpy.context.evaluated_depsgraph_get()
        for frame in frames:
            bpy.context.scene.frame_set(frame)
            depsgraph.update()
            for obj in collection.objects:
                flat = [f"{v:.9g}" for row in obj.matrix_world for v in row]
                print(f"MATRIX {frame} {obj.name} " + " ".join(flat))
    return 0


if __name__ == "__main__":
    sys.exit(main())
