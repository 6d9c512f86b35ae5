"""Blender adapter for robosceneforge scene documents."""

from .apply import import_scene
from .document import (
    AdapterConfig,
    AdapterError,
    ImportPlan,
    MeshData,
    PlannedObject,
    build_import_plan,
    load_document,
)

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig",
    "AdapterError",
    "ImportPlan",
    "MeshData",
    "PlannedObject",
    "build_import_plan",
    "import_scene",
    "load_document",
]
