"""Apply an import plan inside Blender: objects, materials, keyframes.

Everything bpy-related lives here; bpy is imported lazily so the module can
be loaded (and the planner tested) outside Blender.
"""

from __future__ import annotations

from .document import AdapterConfig, ImportPlan, build_import_plan


def import_scene(config: AdapterConfig, bpy=None) -> dict:
    """Import a scene document into the current Blender scene.

    Creates one object per document object inside a dedicated collection
    (replacing it if it already exists, so re-imports never duplicate),
    keys poses/colors/alphas/visibility with linear interpolation, and sets
    the scene frame rate and range. Returns {"objects": n, "keyframes": k}.
    """
    if bpy is None:
        import bpy  # noqa: PLC0415 - only resolvable inside Blender

    plan = build_import_plan(config)
    _replace_collection(bpy, config.collection_name)
    collection = bpy.data.collections.new(config.collection_name)
    bpy.context.scene.collection.children.link(collection)

    scene = bpy.context.scene
    scene.render.fps = int(round(plan.frame_rate))
    scene.frame_start, scene.frame_end = plan.frame_range

    keyframes = 0
    for planned in plan.objects:
        mesh = bpy.data.meshes.new(planned.name)
        mesh.from_pydata(planned.mesh.vertices, [], planned.mesh.faces)
        mesh.update()
        obj = bpy.data.objects.new(planned.name, mesh)
        collection.objects.link(obj)
        obj.rotation_mode = "QUATERNION"

        material = _make_material(bpy, planned.name, config.material_blend)
        mesh.materials.append(material)
        bsdf = material.node_tree.nodes["Principled BSDF"]

        for key in planned.pose_keys:
            frame = key["frame"]
            obj.location = tuple(key["t"])
            obj.keyframe_insert("location", frame=frame)
            obj.rotation_quaternion = tuple(key["q"])
            obj.keyframe_insert("rotation_quaternion", frame=frame)
            keyframes += 2
        for key in planned.color_keys:
            rgba = list(key["rgba"])
            bsdf.inputs["Base Color"].default_value = rgba
            bsdf.inputs["Base Color"].keyframe_insert("default_value", frame=key["frame"])
            keyframes += 1
        for key in planned.alpha_keys:
            bsdf.inputs["Alpha"].default_value = key["a"]
            bsdf.inputs["Alpha"].keyframe_insert("default_value", frame=key["frame"])
            keyframes += 1
        for key in planned.visible_keys:
            hidden = not key["v"]
            obj.hide_render = hidden
            obj.keyframe_insert("hide_render", frame=key["frame"])
            obj.hide_viewport = hidden
            obj.keyframe_insert("hide_viewport", frame=key["frame"])
            keyframes += 2

        _force_linear(obj)
        _force_linear(material.node_tree)

    return {"objects": len(plan.objects), "keyframes": keyframes}


def _replace_collection(bpy, name: str) -> None:
    existing = bpy.data.collections.get(name)
    if existing is None:
        return
    for obj in list(existing.objects):
        bpy.data.objects.remove(obj)
    bpy.data.collections.remove(existing)


def _make_material(bpy, name: str, blend: bool):
    material = bpy.data.materials.new(f"{name}.material")
    material.use_nodes = True
    if blend:
        # Older Blender exposes blend_method; 4.2+ renamed the EEVEE surface
        # controls, so treat it as best-effort.
        if hasattr(material, "blend_method"):
            material.blend_method = "BLEND"
    return material


def _force_linear(id_data) -> None:
    """Match the engine's track semantics: no Bezier easing on inserted keys."""
    anim = getattr(id_data, "animation_data", None)
    action = getattr(anim, "action", None) if anim else None
    if action is None:
        return
    for fcurve in action.fcurves:
        for point in fcurve.keyframe_points:
            point.interpolation = "LINEAR"
