from __future__ import annotations

from pathlib import Path

import pytest

from robosceneforge import build_urdd, load_urdd, parse_urdf, to_chain

FIXTURES = Path(__file__).parent / "fixtures"
UR5_DIR = FIXTURES / "ur5"

TWO_LINK_URDF = """
<robot name="two_link">
  <link name="base"/>
  <link name="arm"/>
  <joint name="hinge" type="revolute">
    <parent link="base"/>
    <child link="arm"/>
    <origin xyz="0 0 0" rpy="0 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.1415927" upper="3.1415927"/>
  </joint>
</robot>
"""


@pytest.fixture(scope="session")
def ur5_urdf_path() -> Path:
    return UR5_DIR / "ur5.urdf"


@pytest.fixture(scope="session")
def ur5_description(ur5_urdf_path):
    return parse_urdf(ur5_urdf_path.read_text())


@pytest.fixture(scope="session")
def ur5_chain(ur5_description):
    return to_chain(ur5_description)


@pytest.fixture(scope="session")
def ur5_urdd(tmp_path_factory, ur5_urdf_path):
    out = tmp_path_factory.mktemp("urdd") / "ur5"
    build_urdd(ur5_urdf_path, UR5_DIR, out)
    return out


@pytest.fixture(scope="session")
def ur5_loaded(ur5_urdd):
    return load_urdd(ur5_urdd)
