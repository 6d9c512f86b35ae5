import json

import pytest

from roboscene_blender import AdapterConfig, AdapterError, build_import_plan, load_document
from roboscene_blender.document import box_mesh, cylinder_mesh

from conftest import make_document


def test_load_document_from_directory(sample_scene):
    doc = load_document(sample_scene)
    assert doc["version"] == 1
    assert len(doc["objects"]) == 2


def test_load_document_rejects_other_versions(tmp_path):
    scene = make_document(tmp_path / "v2", version=2)
    with pytest.raises(AdapterError, match="version 2"):
        load_document(scene)


def test_load_document_missing_file(tmp_path):
    with pytest.raises(AdapterError, match="no scene document"):
        load_document(tmp_path)


def test_load_document_bad_json(tmp_path):
    scene = tmp_path / "scene"
    scene.mkdir()
    (scene / "scene.json").write_text("{nope")
    with pytest.raises(AdapterError, match="invalid JSON"):
        load_document(scene)


def test_plan_resolves_meshes(sample_scene):
    plan = build_import_plan(AdapterConfig(scene_path=sample_scene))
    assert plan.frame_rate == 24.0
    assert plan.frame_range == (1, 2)
    by_name = {o.name: o for o in plan.objects}
    tet = by_name["robot0/link/plain"]
    assert len(tet.mesh.vertices) == 4
    assert len(tet.mesh.faces) == 4
    cube = by_name["cubes0/0"]
    assert len(cube.mesh.vertices) == 8
    assert len(cube.mesh.faces) == 6


def test_plan_missing_mesh_file(sample_scene):
    (sample_scene / "meshes" / "tet.obj").unlink()
    with pytest.raises(AdapterError, match="missing mesh file"):
        build_import_plan(AdapterConfig(scene_path=sample_scene))


def test_plan_document_mismatch(sample_scene):
    doc = json.loads((sample_scene / "scene.json").read_text())
    del doc["objects"][0]["pose_keys"]
    (sample_scene / "scene.json").write_text(json.dumps(doc))
    with pytest.raises(AdapterError, match="no pose keys"):
        build_import_plan(AdapterConfig(scene_path=sample_scene))


def test_keyframe_count(sample_scene):
    plan = build_import_plan(AdapterConfig(scene_path=sample_scene))
    # object 1: 2 pose keys (x2) + 1 color + 1 alpha + 2 visibility (x2) = 10
    # object 2: 1 pose (x2) + 1 color + 1 alpha + 1 visibility (x2) = 6
    assert plan.keyframe_count == 16


def test_primitive_generators_dimensions():
    cube = box_mesh([1.0, 2.0, 3.0])
    xs = [v[0] for v in cube.vertices]
    zs = [v[2] for v in cube.vertices]
    assert max(xs) - min(xs) == 1.0
    assert max(zs) - min(zs) == 3.0
    cyl = cylinder_mesh(2.0, 0.05)
    assert len(cyl.vertices) == 32
    assert max(v[2] for v in cyl.vertices) == 2.0
    assert all(abs((v[0] ** 2 + v[1] ** 2) ** 0.5 - 0.05) < 1e-12 for v in cyl.vertices)
