"""robosceneforge: a renderer-agnostic robot scene engine.

Import robots from URDF, pose and animate them with keyframed joint states
and visual attributes, derive convex geometry, and export evaluated scenes
for offline rendering.
"""

from .export import BakeOptions, ExportError, bake_scene, export_gltf, export_scene_document
from .figures import GradientSpec, motion_gradient, place_robot
from .geometry import (
    DecompParams,
    GeometryError,
    TriMesh,
    convex_decomposition,
    convex_hull,
    cube_mesh,
    line_mesh,
    merge_meshes,
    mesh_volume,
)
from .kinematics import (
    Chain,
    FkResult,
    IkOptions,
    IkReport,
    StateLengthError,
    dof,
    forward_kinematics,
    inverse_kinematics,
    joint_motion,
    to_chain,
)
from .meshio import MeshFormatError, load_mesh, read_obj, read_stl, write_obj
from .timeline import (
    AssetRef,
    CubePrimitive,
    LinePrimitive,
    MissingAssetError,
    PrimitiveSet,
    Rgba,
    RobotInstance,
    Scene,
    SceneSnapshot,
    SnapshotObject,
    Track,
    evaluate,
)
from .transforms import Pose, quat_from_rpy, rpy_from_quat
from .urdd import (
    AppearanceLayer,
    AssetStore,
    UrddError,
    UrddManifest,
    build_urdd,
    load_urdd,
)
from .urdf import (
    JointLimits,
    JointSpec,
    LinkSpec,
    RobotDescription,
    UrdfError,
    VisualSpec,
    descriptions_equal,
    parse_urdf,
    serialize_urdf,
)

__version__ = "0.1.0"

__all__ = [
    "AppearanceLayer",
    "AssetRef",
    "AssetStore",
    "BakeOptions",
    "Chain",
    "CubePrimitive",
    "DecompParams",
    "ExportError",
    "FkResult",
    "GeometryError",
    "GradientSpec",
    "IkOptions",
    "IkReport",
    "JointLimits",
    "JointSpec",
    "LinePrimitive",
    "LinkSpec",
    "MeshFormatError",
    "MissingAssetError",
    "Pose",
    "PrimitiveSet",
    "Rgba",
    "RobotDescription",
    "RobotInstance",
    "Scene",
    "SceneSnapshot",
    "SnapshotObject",
    "StateLengthError",
    "Track",
    "TriMesh",
    "UrddError",
    "UrddManifest",
    "UrdfError",
    "VisualSpec",
    "bake_scene",
    "build_urdd",
    "convex_decomposition",
    "convex_hull",
    "cube_mesh",
    "descriptions_equal",
    "dof",
    "evaluate",
    "export_gltf",
    "export_scene_document",
    "forward_kinematics",
    "inverse_kinematics",
    "joint_motion",
    "line_mesh",
    "load_mesh",
    "load_urdd",
    "merge_meshes",
    "mesh_volume",
    "motion_gradient",
    "parse_urdf",
    "place_robot",
    "quat_from_rpy",
    "read_obj",
    "read_stl",
    "rpy_from_quat",
    "serialize_urdf",
    "to_chain",
    "write_obj",
]
