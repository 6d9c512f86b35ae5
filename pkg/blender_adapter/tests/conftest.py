from __future__ import annotations

import json
from pathlib import Path

import pytest

TRI_OBJ = """v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
f 1 2 3
f 1 2 4
f 2 3 4
f 1 3 4
"""


def make_document(scene_dir: Path, *, frames=(1, 2), version: int = 1) -> Path:
    """Two-object document: one OBJ-backed mesh, one cube primitive."""
    scene_dir.mkdir(parents=True, exist_ok=True)
    (scene_dir / "meshes").mkdir(exist_ok=True)
    (scene_dir / "meshes" / "tet.obj").write_text(TRI_OBJ)
    doc = {
        "version": version,
        "frame_rate": 24.0,
        "frame_range": [frames[0], frames[-1]],
        "objects": [
            {
                "id": "robot0/link/plain",
                "mesh": {"file": "meshes/tet.obj"},
                "pose_keys": [
                    {"frame": f, "t": [0.1 * f, 0.0, 0.0], "q": [1.0, 0.0, 0.0, 0.0]}
                    for f in frames
                ],
                "color_keys": [{"frame": frames[0], "rgba": [0.7, 0.7, 0.7, 1.0]}],
                "alpha_keys": [{"frame": frames[0], "a": 1.0}],
                "visible_keys": [{"frame": f, "v": True} for f in frames],
            },
            {
                "id": "cubes0/0",
                "mesh": {"primitive": "cube", "params": {"dims": [1.0, 2.0, 3.0]}},
                "pose_keys": [{"frame": frames[0], "t": [0, 0, 1], "q": [1, 0, 0, 0]}],
                "color_keys": [{"frame": frames[0], "rgba": [1, 0, 0, 1]}],
                "alpha_keys": [{"frame": frames[0], "a": 0.5}],
                "visible_keys": [{"frame": frames[0], "v": True}],
            },
        ],
    }
    (scene_dir / "scene.json").write_text(json.dumps(doc, indent=2))
    return scene_dir


@pytest.fixture
def sample_scene(tmp_path) -> Path:
    return make_document(tmp_path / "scene")
