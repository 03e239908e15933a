"""fractalmarch: distance-estimated ray marching of quaternion Julia sets
and the Mandelbulb, with a compiled kernel core and a pure-Python fallback.
"""

from .engine import Framebuffer, render_animation, render_frame, write_png, write_ppm
from .estimators import (
    DistanceSample,
    JuliaParams,
    MandelbulbParams,
    estimate_normal,
    julia_distance,
    mandelbulb_distance,
)
from .kernels import available_backends, default_backend_name, get_backend
from .marcher import CutPlane, HitInfo, MarchConfig, Ray, intersect_instance, raycast
from .quatmath import Quaternion, Vec3
from .scene import (
    Camera,
    Instance,
    SceneConfig,
    generate_primary_ray,
    load_scene,
    preset_scene,
    serialize_scene,
)
from .shading import ShadingParams, trace_radiance

__version__ = "0.1.0"

__all__ = [
    "Framebuffer",
    "render_animation",
    "render_frame",
    "write_png",
    "write_ppm",
    "DistanceSample",
    "JuliaParams",
    "MandelbulbParams",
    "estimate_normal",
    "julia_distance",
    "mandelbulb_distance",
    "available_backends",
    "default_backend_name",
    "get_backend",
    "CutPlane",
    "HitInfo",
    "MarchConfig",
    "Ray",
    "intersect_instance",
    "raycast",
    "Quaternion",
    "Vec3",
    "Camera",
    "Instance",
    "SceneConfig",
    "generate_primary_ray",
    "load_scene",
    "preset_scene",
    "serialize_scene",
    "ShadingParams",
    "trace_radiance",
    "__version__",
]
