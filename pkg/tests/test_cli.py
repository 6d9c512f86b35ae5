import json

import numpy as np
import pytest

from robosceneforge import forward_kinematics, load_urdd, read_obj, to_chain
from robosceneforge.cli import TrajectoryError, read_trajectory, run


def test_info_prints_dof(ur5_urdd, capsys):
    assert run(["info", str(ur5_urdd)]) == 0
    out = capsys.readouterr().out
    assert "name: ur5" in out
    assert "links: 8" in out
    assert "dof: 6" in out


def test_info_resolves_via_resources_env(ur5_urdd, capsys, monkeypatch):
    monkeypatch.setenv("ROBOSCENE_RESOURCES", str(ur5_urdd.parent))
    assert run(["info", ur5_urdd.name]) == 0
    assert "dof: 6" in capsys.readouterr().out


def test_pose_matches_direct_fk(ur5_urdd, capsys):
    assert run(["pose", str(ur5_urdd), "--state", "0.1,0.2,0.3,0.4,0.5,0.6"]) == 0
    out = capsys.readouterr().out
    desc, _assets = load_urdd(ur5_urdd)
    chain = to_chain(desc)
    fk = forward_kinematics(chain, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
    tip = fk.poses[-1]
    last = [l for l in out.strip().splitlines() if l.startswith("ee_link:")][0]
    for v in tip.translation:
        assert f"{v:.6f}" in last


def test_pose_state_length_mismatch_is_processing_error(ur5_urdd, capsys):
    assert run(["pose", str(ur5_urdd), "--state", "0,0,0"]) == 2
    err = capsys.readouterr().err
    assert "length 3" in err and "6" in err


def test_usage_errors_exit_1(capsys):
    assert run(["no-such-command"]) == 1
    assert run([]) == 1
    assert run(["info"]) == 1  # missing positional


def test_ik_round_trip(ur5_urdd, capsys):
    desc, _assets = load_urdd(ur5_urdd)
    chain = to_chain(desc)
    target = forward_kinematics(chain, [0.2, -0.5, 0.4, 0.1, 0.3, -0.2]).poses[-1]
    t = ",".join(str(v) for v in [*target.translation, *target.rotation])
    code = run(
        ["ik", str(ur5_urdd), "--link", "ee_link", "--target", t, "--seed", "0.1,-0.4,0.5,0,0.4,-0.1"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "converged: true" in out


def test_hull_and_decomp_commands(tmp_path, capsys):
    from robosceneforge import convex_hull, cube_mesh, read_obj as _read, write_obj

    mesh_path = tmp_path / "cube.obj"
    write_obj(cube_mesh((0, 0, 0), (0, 0, 0), (1, 1, 1)), mesh_path)
    assert run(["hull", str(mesh_path), "-o", str(tmp_path / "hull.obj")]) == 0
    hull = read_obj(tmp_path / "hull.obj")
    assert hull.vertex_count == 8
    # The CLI is a thin wrapper: byte-identical to calling the operation directly.
    write_obj(convex_hull(_read(mesh_path).vertices), tmp_path / "direct.obj")
    assert (tmp_path / "hull.obj").read_bytes() == (tmp_path / "direct.obj").read_bytes()

    assert run(["decomp", str(mesh_path), "-o", str(tmp_path / "parts")]) == 0
    assert (tmp_path / "parts" / "0.obj").is_file()
    out = capsys.readouterr().out
    assert "1 parts" in out


def test_convert_then_info(tmp_path, ur5_urdf_path, capsys):
    out_dir = tmp_path / "built"
    code = run(
        ["convert", str(ur5_urdf_path), "--meshes", str(ur5_urdf_path.parent), "-o", str(out_dir)]
    )
    assert code == 0
    assert run(["info", str(out_dir)]) == 0
    assert "dof: 6" in capsys.readouterr().out


def test_animate_to_scene_document(tmp_path, ur5_urdd, capsys):
    traj = tmp_path / "traj.json"
    traj.write_text(json.dumps([[0] * 6, [0.5] * 6, [1] * 6]))
    out = tmp_path / "anim"
    assert run(["animate", str(ur5_urdd), "--trajectory", str(traj), "-o", str(out)]) == 0
    doc = json.loads((out / "scene.json").read_text())
    assert doc["frame_range"] == [1, 3]


def test_animate_to_glb(tmp_path, ur5_urdd):
    traj = tmp_path / "traj.csv"
    traj.write_text("\n".join(",".join(["0.1"] * 6) for _ in range(4)))
    out = tmp_path / "anim.glb"
    assert run(["animate", str(ur5_urdd), "--trajectory", str(traj), "-o", str(out)]) == 0
    assert out.read_bytes()[:4] == b"glTF"


def test_gradient_command_produces_nine_instances(tmp_path, ur5_urdd):
    out = tmp_path / "grad"
    code = run(
        [
            "gradient",
            str(ur5_urdd),
            "--start",
            "0,-1.0472,0.7854,0,0,0",
            "--end",
            "-0.7854,1.0472,0,0,0,0",
            "--copies",
            "9",
            "--start-color",
            "0.2,0.2,0.2,1",
            "--end-color",
            "1,0,0,1",
            "-o",
            str(out),
        ]
    )
    assert code == 0
    doc = json.loads((out / "scene.json").read_text())
    robots = {obj["id"].split("/")[0] for obj in doc["objects"]}
    assert len(robots) == 9


def test_stdout_determinism(ur5_urdd, capsys):
    run(["pose", str(ur5_urdd), "--state", "0.3,0.1,-0.2,0.5,0.7,-0.4"])
    first = capsys.readouterr().out
    run(["pose", str(ur5_urdd), "--state", "0.3,0.1,-0.2,0.5,0.7,-0.4"])
    second = capsys.readouterr().out
    assert first == second


# -- read_trajectory -----------------------------------------------------------

def test_read_trajectory_json(tmp_path):
    p = tmp_path / "t.json"
    p.write_text("[[0,0,0,0,0,0],[1,1,1,1,1,1]]")
    states = read_trajectory(p)
    assert len(states) == 2
    assert all(len(s) == 6 for s in states)


def test_read_trajectory_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("0,0,0\n0.5,0.5,0.5\n")
    assert read_trajectory(p) == [[0, 0, 0], [0.5, 0.5, 0.5]]


def test_read_trajectory_ragged_row_number(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("0,0,0,0,0,0\n1,1,1,1,1\n")
    with pytest.raises(TrajectoryError, match="row 2"):
        read_trajectory(p)


def test_read_trajectory_non_numeric(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("0,abc,0\n")
    with pytest.raises(TrajectoryError, match="non-numeric"):
        read_trajectory(p)


def test_read_trajectory_empty(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("")
    with pytest.raises(TrajectoryError, match="empty"):
        read_trajectory(p)
    q = tmp_path / "t.json"
    q.write_text("[]")
    with pytest.raises(TrajectoryError):
        read_trajectory(q)
