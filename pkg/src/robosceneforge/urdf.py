"""URDF parsing into a validated robot description.

Supported subset: links, joints (revolute, continuous, prismatic, fixed),
visual meshes, and material colors. Collision elements, transmissions,
sensors, and primitive-geometry visuals are skipped with a logged warning.
Angles are radians, lengths meters (URDF convention).
"""

from __future__ import annotations

import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

from .transforms import UNIT_TOL, Pose, as_vec3

log = logging.getLogger(__name__)

JOINT_KINDS = ("revolute", "continuous", "prismatic", "fixed")
REJECTED_JOINT_KINDS = ("planar", "floating")


class UrdfError(ValueError):
    """Structurally invalid URDF; the message names the offending element."""


@dataclass(frozen=True)
class JointLimits:
    lower: float
    upper: float

    def __post_init__(self):
        if self.lower > self.upper:
            raise UrdfError(f"joint limits inverted: lower {self.lower} > upper {self.upper}")


@dataclass(frozen=True, eq=False)
class JointSpec:
    name: str
    kind: str  # one of JOINT_KINDS
    parent_link: str
    child_link: str
    origin: Pose
    axis: np.ndarray  # unit for non-fixed joints
    limits: JointLimits | None = None

    def __post_init__(self):
        if self.kind not in JOINT_KINDS:
            raise UrdfError(f"joint '{self.name}': unsupported kind '{self.kind}'")
        axis = as_vec3(self.axis).copy()
        if self.kind != "fixed":
            n = math.sqrt(float(axis @ axis))
            if n < UNIT_TOL:
                raise UrdfError(f"joint '{self.name}': axis must be nonzero")
            axis = axis / n
        axis.setflags(write=False)
        object.__setattr__(self, "axis", axis)

    def __eq__(self, other):
        if not isinstance(other, JointSpec):
            return NotImplemented
        return (
            self.name == other.name
            and self.kind == other.kind
            and self.parent_link == other.parent_link
            and self.child_link == other.child_link
            and self.origin == other.origin
            and np.array_equal(self.axis, other.axis)
            and self.limits == other.limits
        )


@dataclass(frozen=True, eq=False)
class VisualSpec:
    mesh_ref: str
    origin: Pose
    scale: np.ndarray

    def __post_init__(self):
        s = as_vec3(self.scale).copy()
        s.setflags(write=False)
        object.__setattr__(self, "scale", s)

    def __eq__(self, other):
        if not isinstance(other, VisualSpec):
            return NotImplemented
        return (
            self.mesh_ref == other.mesh_ref
            and self.origin == other.origin
            and np.array_equal(self.scale, other.scale)
        )


@dataclass(frozen=True)
class LinkSpec:
    name: str
    visuals: tuple[VisualSpec, ...] = ()
    base_color: tuple[float, float, float, float] | None = None


@dataclass(frozen=True)
class RobotDescription:
    name: str
    links: tuple[LinkSpec, ...]
    joints: tuple[JointSpec, ...]
    root_link: str = field(compare=False, default="")

    def link(self, name: str) -> LinkSpec:
        for l in self.links:
            if l.name == name:
                return l
        raise KeyError(name)


def _parse_floats(text: str | None, n: int, what: str) -> np.ndarray:
    if text is None:
        raise UrdfError(f"{what}: missing numeric attribute")
    try:
        vals = [float(t) for t in text.split()]
    except ValueError:
        raise UrdfError(f"{what}: non-numeric value in '{text}'") from None
    if len(vals) != n:
        raise UrdfError(f"{what}: expected {n} values, got {len(vals)}")
    return np.array(vals)


def _parse_origin(elem: ET.Element | None, what: str) -> Pose:
    if elem is None:
        return Pose.identity()
    xyz = elem.get("xyz")
    rpy = elem.get("rpy")
    t = _parse_floats(xyz, 3, f"{what} origin xyz") if xyz else np.zeros(3)
    r = _parse_floats(rpy, 3, f"{what} origin rpy") if rpy else np.zeros(3)
    return Pose.from_rpy(t, r)


def parse_urdf(xml_text: str) -> RobotDescription:
    """Parse URDF XML text into a validated robot description.

    Unknown elements are ignored; a missing joint origin defaults to identity
    and a missing axis to (1, 0, 0).
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise UrdfError(f"malformed XML: {exc}") from None
    if root.tag != "robot":
        raise UrdfError(f"no <robot> root element (found <{root.tag}>)")
    name = root.get("name") or "robot"

    materials: dict[str, tuple[float, float, float, float]] = {}
    for mat in root.findall("material"):
        color = mat.find("color")
        if mat.get("name") and color is not None and color.get("rgba"):
            rgba = _parse_floats(color.get("rgba"), 4, f"material '{mat.get('name')}'")
            materials[mat.get("name")] = tuple(float(np.clip(c, 0.0, 1.0)) for c in rgba)

    links: list[LinkSpec] = []
    link_names: set[str] = set()
    for link_el in root.findall("link"):
        lname = link_el.get("name")
        if not lname:
            raise UrdfError("link without a name attribute")
        if lname in link_names:
            raise UrdfError(f"duplicate link name '{lname}'")
        link_names.add(lname)
        if link_el.find("collision") is not None:
            log.warning("link '%s': collision elements are ignored", lname)

        visuals: list[VisualSpec] = []
        base_color = None
        for vis_el in link_el.findall("visual"):
            geom = vis_el.find("geometry")
            mesh = geom.find("mesh") if geom is not None else None
            mat = vis_el.find("material")
            if mat is not None:
                color_el = mat.find("color")
                if color_el is not None and color_el.get("rgba"):
                    rgba = _parse_floats(color_el.get("rgba"), 4, f"link '{lname}' material")
                    base_color = base_color or tuple(float(np.clip(c, 0.0, 1.0)) for c in rgba)
                elif mat.get("name") in materials:
                    base_color = base_color or materials[mat.get("name")]
            if mesh is None:
                if geom is not None:
                    log.warning(
                        "link '%s': non-mesh visual geometry is ignored", lname
                    )
                continue
            filename = mesh.get("filename")
            if not filename:
                raise UrdfError(f"link '{lname}': mesh visual without a filename")
            scale = (
                _parse_floats(mesh.get("scale"), 3, f"link '{lname}' mesh scale")
                if mesh.get("scale")
                else np.ones(3)
            )
            visuals.append(
                VisualSpec(
                    mesh_ref=filename,
                    origin=_parse_origin(vis_el.find("origin"), f"link '{lname}' visual"),
                    scale=scale,
                )
            )
        links.append(LinkSpec(lname, tuple(visuals), base_color))

    if not links:
        raise UrdfError("robot declares no links")

    joints: list[JointSpec] = []
    joint_names: set[str] = set()
    for joint_el in root.findall("joint"):
        jname = joint_el.get("name")
        if not jname:
            raise UrdfError("joint without a name attribute")
        if jname in joint_names:
            raise UrdfError(f"duplicate joint name '{jname}'")
        joint_names.add(jname)
        kind = joint_el.get("type")
        if kind in REJECTED_JOINT_KINDS:
            raise UrdfError(f"joint '{jname}': '{kind}' joints are not supported")
        if kind not in JOINT_KINDS:
            raise UrdfError(f"joint '{jname}': unsupported type '{kind}'")
        if joint_el.find("mimic") is not None:
            raise UrdfError(f"joint '{jname}': mimic joints are not supported")
        parent = joint_el.find("parent")
        child = joint_el.find("child")
        if parent is None or not parent.get("link"):
            raise UrdfError(f"joint '{jname}': missing <parent link=...>")
        if child is None or not child.get("link"):
            raise UrdfError(f"joint '{jname}': missing <child link=...>")

        axis_el = joint_el.find("axis")
        axis = (
            _parse_floats(axis_el.get("xyz"), 3, f"joint '{jname}' axis")
            if axis_el is not None and axis_el.get("xyz")
            else np.array([1.0, 0.0, 0.0])
        )
        limit_el = joint_el.find("limit")
        limits = None
        if limit_el is not None and limit_el.get("lower") is not None and limit_el.get("upper") is not None:
            try:
                limits = JointLimits(float(limit_el.get("lower")), float(limit_el.get("upper")))
            except UrdfError as exc:
                raise UrdfError(f"joint '{jname}': {exc}") from None
        joints.append(
            JointSpec(
                name=jname,
                kind=kind,
                parent_link=parent.get("link"),
                child_link=child.get("link"),
                origin=_parse_origin(joint_el.find("origin"), f"joint '{jname}'"),
                axis=axis,
                limits=limits,
            )
        )

    root_link = _validate_topology(name, link_names, joints)
    return RobotDescription(name=name, links=tuple(links), joints=tuple(joints), root_link=root_link)


def _validate_topology(robot_name: str, link_names: set[str], joints: list[JointSpec]) -> str:
    parent_of: dict[str, str] = {}
    for j in joints:
        for ref, role in ((j.parent_link, "parent"), (j.child_link, "child")):
            if ref not in link_names:
                raise UrdfError(f"joint '{j.name}': {role} link '{ref}' is not declared")
        if j.child_link in parent_of:
            raise UrdfError(f"link '{j.child_link}' has two parent joints")
        parent_of[j.child_link] = j.parent_link

    roots = sorted(link_names - set(parent_of))
    if not roots:
        raise UrdfError(f"robot '{robot_name}': no root link (joint graph has a cycle)")
    if len(roots) > 1:
        raise UrdfError(f"robot '{robot_name}': multiple root links: {', '.join(roots)}")
    root = roots[0]

    # Every link must reach the root; failure means a cycle off the main tree.
    for link in link_names:
        seen = set()
        cur = link
        while cur != root:
            if cur in seen:
                raise UrdfError(f"cycle detected through link '{cur}'")
            seen.add(cur)
            cur = parent_of[cur]
    return root


def descriptions_equal(a: RobotDescription, b: RobotDescription, tol: float = 1e-9) -> bool:
    """Structural equality with pose comparison up to tol.

    Serialization writes rotations as Euler angles, so re-parsed quaternions
    can differ in the last bits even though the rotation is the same.
    """
    if a.name != b.name or a.root_link != b.root_link:
        return False
    if len(a.links) != len(b.links) or len(a.joints) != len(b.joints):
        return False
    for la, lb in zip(a.links, b.links):
        if la.name != lb.name or len(la.visuals) != len(lb.visuals):
            return False
        if (la.base_color is None) != (lb.base_color is None):
            return False
        if la.base_color is not None and not np.allclose(la.base_color, lb.base_color, atol=tol):
            return False
        for va, vb in zip(la.visuals, lb.visuals):
            if va.mesh_ref != vb.mesh_ref or not np.allclose(va.scale, vb.scale, atol=tol):
                return False
            if not va.origin.approx_equal(vb.origin, tol):
                return False
    for ja, jb in zip(a.joints, b.joints):
        if (ja.name, ja.kind, ja.parent_link, ja.child_link) != (jb.name, jb.kind, jb.parent_link, jb.child_link):
            return False
        if not np.allclose(ja.axis, jb.axis, atol=tol) or not ja.origin.approx_equal(jb.origin, tol):
            return False
        if (ja.limits is None) != (jb.limits is None):
            return False
        if ja.limits is not None and (
            abs(ja.limits.lower - jb.limits.lower) > tol or abs(ja.limits.upper - jb.limits.upper) > tol
        ):
            return False
    return True


def serialize_urdf(desc: RobotDescription) -> str:
    """Serialize the supported URDF subset; parse(serialize(d)) reproduces d."""
    root = ET.Element("robot", name=desc.name)
    for link in desc.links:
        link_el = ET.SubElement(root, "link", name=link.name)
        for vis in link.visuals:
            vis_el = ET.SubElement(link_el, "visual")
            _write_origin(vis_el, vis.origin)
            geom = ET.SubElement(vis_el, "geometry")
            mesh = ET.SubElement(geom, "mesh", filename=vis.mesh_ref)
            if not np.allclose(vis.scale, 1.0):
                mesh.set("scale", _fmt_floats(vis.scale))
            if link.base_color is not None:
                mat = ET.SubElement(vis_el, "material", name=f"{link.name}_color")
                ET.SubElement(mat, "color", rgba=_fmt_floats(link.base_color))
    for joint in desc.joints:
        joint_el = ET.SubElement(root, "joint", name=joint.name, type=joint.kind)
        _write_origin(joint_el, joint.origin)
        ET.SubElement(joint_el, "parent", link=joint.parent_link)
        ET.SubElement(joint_el, "child", link=joint.child_link)
        ET.SubElement(joint_el, "axis", xyz=_fmt_floats(joint.axis))
        if joint.limits is not None:
            ET.SubElement(
                joint_el, "limit", lower=f"{joint.limits.lower:.17g}", upper=f"{joint.limits.upper:.17g}"
            )
    ET.indent(root)
    return ET.tostring(root, encoding="unicode")


def _write_origin(parent: ET.Element, pose: Pose) -> None:
    from .transforms import rpy_from_quat

    ET.SubElement(
        parent,
        "origin",
        xyz=_fmt_floats(pose.translation),
        rpy=_fmt_floats(rpy_from_quat(pose.rotation)),
    )


def _fmt_floats(vals) -> str:
    return " ".join(f"{float(v):.17g}" for v in vals)
