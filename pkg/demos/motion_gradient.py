#!/usr/bin/env python3
"""Render a robot motion sweep as a single still: overlapping copies fade
from dark gray to red between a start and an end configuration.

Usage:
    python3 demos/motion_gradient.py <urdd-dir> -o out_scene [--copies 9]
"""

import argparse

import numpy as np

from robosceneforge import (
    GradientSpec,
    Scene,
    export_gltf,
    export_scene_document,
    load_urdd,
    motion_gradient,
    to_chain,
)

START_STATE = np.array([0, -np.pi / 3, np.pi / 4, 0, 0, 0])
END_STATE = np.array([-np.pi / 4, np.pi / 3, 0, 0, 0, 0])
START_COLOR = (0.2, 0.2, 0.2, 1.0)
END_COLOR = (1.0, 0.0, 0.0, 1.0)


def build_scene(urdd_dir, num_copies: int = 9) -> Scene:
    desc, assets = load_urdd(urdd_dir)
    chain = to_chain(desc)
    scene = Scene()
    spec = GradientSpec(
        start_state=START_STATE,
        end_state=END_STATE,
        start_color=START_COLOR,
        end_color=END_COLOR,
        num_copies=num_copies,
    )
    motion_gradient(scene, chain, assets, spec)
    return scene


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("urdd", help="robot description directory")
    parser.add_argument("-o", "--out", required=True, help=".glb file or scene-document directory")
    parser.add_argument("--copies", type=int, default=9)
    args = parser.parse_args()

    scene = build_scene(args.urdd, args.copies)
    if args.out.endswith(".glb"):
        path = export_gltf(scene, args.out)
    else:
        path = export_scene_document(scene, args.out)
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
