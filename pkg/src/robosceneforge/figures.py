"""Figure recipes: motion-through-color-gradient composites and multi-robot
placement for schematic assembly."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import Chain
from .timeline import Rgba, RobotInstance, Scene
from .transforms import Pose
from .urdd import AppearanceLayer, AssetStore


@dataclass(frozen=True)
class GradientSpec:
    """Endpoint states and colors for a spread of interpolated robot copies."""

    start_state: np.ndarray
    end_state: np.ndarray
    start_color: Rgba
    end_color: Rgba
    num_copies: int
    alpha_profile: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "start_state", np.asarray(self.start_state, dtype=float))
        object.__setattr__(self, "end_state", np.asarray(self.end_state, dtype=float))
        object.__setattr__(self, "start_color", Rgba.coerce(self.start_color))
        object.__setattr__(self, "end_color", Rgba.coerce(self.end_color))
        if self.num_copies < 2:
            raise ValueError(f"num_copies must be >= 2, got {self.num_copies}")
        if len(self.start_state) != len(self.end_state):
            raise ValueError("start and end states must have the same length")
        if self.alpha_profile is not None:
            profile = tuple(float(a) for a in self.alpha_profile)
            if len(profile) != self.num_copies:
                raise ValueError(
                    f"alpha_profile has {len(profile)} entries for {self.num_copies} copies"
                )
            object.__setattr__(self, "alpha_profile", profile)


def motion_gradient(
    scene: Scene, chain: Chain, assets: AssetStore, spec: GradientSpec
) -> list[RobotInstance]:
    """Spawn num_copies instances sweeping state and plain-mesh color.

    Copy i sits at t = i/(num_copies-1): state and color are exact affine
    combinations of the endpoints.
    """
    chain.check_state(spec.start_state)
    start_c = spec.start_color.to_array()
    end_c = spec.end_color.to_array()
    instances = []
    for i in range(spec.num_copies):
        t = i / (spec.num_copies - 1)
        state = spec.start_state + (spec.end_state - spec.start_state) * t
        color = start_c + (end_c - start_c) * t
        robot = scene.spawn(chain, assets)
        robot.set_state(state)
        robot.set_appearance(AppearanceLayer.PLAIN, color=color)
        if spec.alpha_profile is not None:
            robot.set_appearance(AppearanceLayer.PLAIN, alpha=spec.alpha_profile[i])
        instances.append(robot)
    return instances


def place_robot(scene: Scene, instance: RobotInstance, base: Pose) -> None:
    """Set an instance's base pose; forward kinematics composes with it."""
    if instance not in scene.robots:
        raise ValueError(f"robot '{instance.id}' is not part of this scene")
    instance.base_pose = base
