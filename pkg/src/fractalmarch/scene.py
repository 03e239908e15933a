"""Scene description and parsing: fractal instances with affine transforms,
camera, lights, render and animation settings.

Scene files are JSON (UTF-8) with a mandatory integer ``schema`` version;
the full schema is documented in docs/scene_schema.md. Loading validates
every field, applies defaults, and rejects unknown keys; serialization is
canonical (all fields materialized, fixed key order), so
load -> serialize -> load is a fixed point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import DegenerateBasis, ParseError, SingularTransform, ValidationError
from .estimators import (
    DistanceSample,
    JuliaParams,
    MandelbulbParams,
    julia_distance,
    mandelbulb_distance,
)
from .marcher import CutPlane, MarchConfig, Ray
from .quatmath import Quaternion, Vec3
from .shading import ShadingParams

__all__ = [
    "Camera",
    "Instance",
    "AnimationSettings",
    "SceneConfig",
    "generate_primary_ray",
    "load_scene",
    "scene_from_dict",
    "scene_to_dict",
    "serialize_scene",
    "preset_scene",
    "PRESET_NAMES",
    "identity_transform",
]

SCHEMA_VERSION = 1

Transform = tuple[tuple[float, float, float, float], ...]  # 3 rows of 4


# ---------------------------------------------------------------------------
# Affine 3x4 transforms (column-vector convention; rows are (linear | t)).


def identity_transform() -> Transform:
    return (
        (1.0, 0.0, 0.0, 0.0),
        (0.0, 1.0, 0.0, 0.0),
        (0.0, 0.0, 1.0, 0.0),
    )


def translation(t: tuple[float, float, float]) -> Transform:
    return (
        (1.0, 0.0, 0.0, t[0]),
        (0.0, 1.0, 0.0, t[1]),
        (0.0, 0.0, 1.0, t[2]),
    )


def scaling(s: tuple[float, float, float]) -> Transform:
    return (
        (s[0], 0.0, 0.0, 0.0),
        (0.0, s[1], 0.0, 0.0),
        (0.0, 0.0, s[2], 0.0),
    )


def rotation(axis: tuple[float, float, float], degrees: float) -> Transform:
    ax, ay, az = axis
    n = math.sqrt(ax * ax + ay * ay + az * az)
    if n == 0.0:
        raise ValueError("rotation axis must be nonzero")
    ax, ay, az = ax / n, ay / n, az / n
    th = math.radians(degrees)
    c = math.cos(th)
    s = math.sin(th)
    ic = 1.0 - c
    return (
        (c + ax * ax * ic, ax * ay * ic - az * s, ax * az * ic + ay * s, 0.0),
        (ay * ax * ic + az * s, c + ay * ay * ic, ay * az * ic - ax * s, 0.0),
        (az * ax * ic - ay * s, az * ay * ic + ax * s, c + az * az * ic, 0.0),
    )


def compose(a: Transform, b: Transform) -> Transform:
    """a applied after b (matrix product a*b)."""
    rows = []
    for i in range(3):
        row = []
        for j in range(4):
            v = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j]
            if j == 3:
                v += a[i][3]
            row.append(v)
        rows.append(tuple(row))
    return tuple(rows)


def invert_transform(m: Transform) -> Transform:
    """Inverse of an affine 3x4. Raises SingularTransform when |det| < 1e-12."""
    a, b, c = m[0][0], m[0][1], m[0][2]
    d, e, f = m[1][0], m[1][1], m[1][2]
    g, h, i = m[2][0], m[2][1], m[2][2]
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if abs(det) < 1e-12:
        raise SingularTransform(f"transform determinant {det} is too close to zero")
    inv = 1.0 / det
    l00 = (e * i - f * h) * inv
    l01 = (c * h - b * i) * inv
    l02 = (b * f - c * e) * inv
    l10 = (f * g - d * i) * inv
    l11 = (a * i - c * g) * inv
    l12 = (c * d - a * f) * inv
    l20 = (d * h - e * g) * inv
    l21 = (b * g - a * h) * inv
    l22 = (a * e - b * d) * inv
    tx, ty, tz = m[0][3], m[1][3], m[2][3]
    return (
        (l00, l01, l02, -(l00 * tx + l01 * ty + l02 * tz)),
        (l10, l11, l12, -(l10 * tx + l11 * ty + l12 * tz)),
        (l20, l21, l22, -(l20 * tx + l21 * ty + l22 * tz)),
    )


def apply_point(m: Transform, p: Vec3) -> Vec3:
    return Vec3(
        m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z + m[0][3],
        m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z + m[1][3],
        m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z + m[2][3],
    )


# ---------------------------------------------------------------------------
# Domain types.


@dataclass(frozen=True)
class Camera:
    """Pinhole camera. The pixel grid has its origin at the top-left; rays
    pass through pixel centers."""

    position: Vec3
    target: Vec3
    up: Vec3 = Vec3(0.0, 1.0, 0.0)
    fov: float = 60.0  # vertical, degrees
    width: int = 512
    height: int = 512

    def __post_init__(self):
        if not 0.0 < self.fov < 180.0:
            raise ValueError("fov must be within (0, 180) degrees")
        if self.width < 1 or self.height < 1:
            raise ValueError("width and height must be >= 1")
        p, t = self.position, self.target
        fx, fy, fz = t.x - p.x, t.y - p.y, t.z - p.z
        fl = math.sqrt(fx * fx + fy * fy + fz * fz)
        if fl == 0.0:
            raise ValueError("camera position and target must differ")
        fx, fy, fz = fx / fl, fy / fl, fz / fl
        # right = up x forward, up' = forward x right: (right, up', forward)
        # is right-handed and screen-right maps to +right.
        u = self.up
        cx = u.y * fz - u.z * fy
        cy = u.z * fx - u.x * fz
        cz = u.x * fy - u.y * fx
        cl = math.sqrt(cx * cx + cy * cy + cz * cz)
        if cl < 1e-12:
            raise DegenerateBasis("camera up vector is parallel to the view direction")
        rx, ry, rz = cx / cl, cy / cl, cz / cl
        ux = fy * rz - fz * ry
        uy = fz * rx - fx * rz
        uz = fx * ry - fy * rx
        half_h = math.tan(math.radians(self.fov) * 0.5)
        half_w = half_h * (self.width / self.height)
        object.__setattr__(self, "forward", Vec3(fx, fy, fz))
        object.__setattr__(self, "right", Vec3(rx, ry, rz))
        object.__setattr__(self, "up_vec", Vec3(ux, uy, uz))
        object.__setattr__(self, "half_w", half_w)
        object.__setattr__(self, "half_h", half_h)


def generate_primary_ray(camera: Camera, pixel_x: int, pixel_y: int) -> Ray:
    """Ray through the center of pixel (pixel_x, pixel_y)."""
    if not (0 <= pixel_x < camera.width and 0 <= pixel_y < camera.height):
        raise ValueError(f"pixel ({pixel_x}, {pixel_y}) outside the image")
    sx = (2.0 * (pixel_x + 0.5) / camera.width - 1.0) * camera.half_w
    sy = (1.0 - 2.0 * (pixel_y + 0.5) / camera.height) * camera.half_h
    f = camera.forward
    r = camera.right
    u = camera.up_vec
    dx = f.x + sx * r.x + sy * u.x
    dy = f.y + sx * r.y + sy * u.y
    dz = f.z + sx * r.z + sy * u.z
    dl = math.sqrt(dx * dx + dy * dy + dz * dz)
    return Ray(camera.position, Vec3(dx / dl, dy / dl, dz / dl))


@dataclass(frozen=True)
class Instance:
    """One fractal in the scene: estimator parameters, an object-to-world
    transform, marching settings, and resolved shading constants."""

    kind: str
    params: JuliaParams | MandelbulbParams
    object_to_world: Transform = field(default_factory=identity_transform)
    march: MarchConfig = field(default_factory=MarchConfig)
    shading: ShadingParams = field(default_factory=ShadingParams)

    def __post_init__(self):
        if self.kind == "julia":
            if not isinstance(self.params, JuliaParams):
                raise ValueError("julia instance requires JuliaParams")
        elif self.kind == "mandelbulb":
            if not isinstance(self.params, MandelbulbParams):
                raise ValueError("mandelbulb instance requires MandelbulbParams")
        else:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        object.__setattr__(self, "world_to_object", invert_transform(self.object_to_world))

    def sample(self, p: Vec3) -> DistanceSample:
        if self.kind == "julia":
            return julia_distance(p, self.params)
        return mandelbulb_distance(p, self.params)


@dataclass(frozen=True)
class AnimationSettings:
    frame_count: int
    iterations_start: int
    iterations_end: int
    c_path: Optional[tuple[Quaternion, ...]] = None

    def __post_init__(self):
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")
        if self.iterations_start < 1 or self.iterations_end < 1:
            raise ValueError("iteration bounds must be >= 1")
        if self.c_path is not None and len(self.c_path) < 1:
            raise ValueError("c_path must hold at least one keyframe")


@dataclass(frozen=True)
class SceneConfig:
    instances: tuple[Instance, ...]
    camera: Camera
    shading: ShadingParams = field(default_factory=ShadingParams)
    animation: Optional[AnimationSettings] = None

    def __post_init__(self):
        if self.animation is not None and self.instances:
            cap = max(inst.params.max_iterations for inst in self.instances)
            a = self.animation
            if a.iterations_start > cap or a.iterations_end > cap:
                raise ValueError(
                    f"animation iteration bounds must lie within [1, {cap}]"
                )


# ---------------------------------------------------------------------------
# Parsing and validation.


def _check_keys(obj: dict, path: str, allowed: set[str], required: set[str]) -> None:
    if not isinstance(obj, dict):
        raise ValidationError(path, f"expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in allowed:
            raise ValidationError(f"{path}.{key}" if path else key, "unknown key")
    for key in required:
        if key not in obj:
            raise ValidationError(path or key, f"missing required key {key!r}")


def _number(v, path: str, minimum=None, maximum=None, exclusive_minimum=None) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(path, f"expected a number, got {type(v).__name__}")
    v = float(v)
    if not math.isfinite(v):
        raise ValidationError(path, "must be finite")
    if minimum is not None and v < minimum:
        raise ValidationError(path, f"must be >= {minimum}")
    if maximum is not None and v > maximum:
        raise ValidationError(path, f"must be <= {maximum}")
    if exclusive_minimum is not None and v <= exclusive_minimum:
        raise ValidationError(path, f"must be > {exclusive_minimum}")
    return v


def _integer(v, path: str, minimum=None, maximum=None) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(path, f"expected an integer, got {type(v).__name__}")
    if minimum is not None and v < minimum:
        raise ValidationError(path, f"must be >= {minimum}")
    if maximum is not None and v > maximum:
        raise ValidationError(path, f"must be <= {maximum}")
    return v


def _floats(v, path: str, count: int) -> tuple[float, ...]:
    if not isinstance(v, list) or len(v) != count:
        raise ValidationError(path, f"expected a list of {count} numbers")
    return tuple(_number(x, f"{path}[{i}]") for i, x in enumerate(v))


def _vec3(v, path: str) -> Vec3:
    x, y, z = _floats(v, path, 3)
    return Vec3(x, y, z)


def _rgb(v, path: str) -> tuple[float, float, float]:
    return _floats(v, path, 3)  # type: ignore[return-value]


def _quat(v, path: str) -> Quaternion:
    w, x, y, z = _floats(v, path, 4)
    return Quaternion(w, x, y, z)


def _parse_transform(obj, path: str) -> Transform:
    if obj is None:
        return identity_transform()
    _check_keys(obj, path, {"matrix", "translate", "scale", "rotate"}, set())
    if "matrix" in obj:
        if len(obj) != 1:
            raise ValidationError(path, "matrix cannot be combined with other transform keys")
        rows = obj["matrix"]
        if not isinstance(rows, list) or len(rows) != 3:
            raise ValidationError(f"{path}.matrix", "expected 3 rows of 4 numbers")
        return tuple(_floats(row, f"{path}.matrix[{i}]", 4) for i, row in enumerate(rows))
    m = identity_transform()
    if "scale" in obj:
        s = obj["scale"]
        if isinstance(s, (int, float)) and not isinstance(s, bool):
            sv = (float(s),) * 3
        else:
            sv = _floats(s, f"{path}.scale", 3)
        m = compose(scaling(sv), m)
    if "rotate" in obj:
        r = obj["rotate"]
        _check_keys(r, f"{path}.rotate", {"axis", "degrees"}, {"axis", "degrees"})
        axis = _floats(r["axis"], f"{path}.rotate.axis", 3)
        degrees = _number(r["degrees"], f"{path}.rotate.degrees")
        if axis == (0.0, 0.0, 0.0):
            raise ValidationError(f"{path}.rotate.axis", "must be nonzero")
        m = compose(rotation(axis, degrees), m)
    if "translate" in obj:
        m = compose(translation(_floats(obj["translate"], f"{path}.translate", 3)), m)
    return m


def _parse_cut_plane(obj, path: str) -> CutPlane:
    _check_keys(obj, path, {"point", "normal"}, {"point", "normal"})
    normal = _vec3(obj["normal"], f"{path}.normal")
    if normal.x == 0.0 and normal.y == 0.0 and normal.z == 0.0:
        raise ValidationError(f"{path}.normal", "must be nonzero")
    return CutPlane(_vec3(obj["point"], f"{path}.point"), normal)


_MARCH_KEYS = {
    "precis",
    "t_max",
    "max_steps",
    "step_clamp",
    "bounding_sphere_radius",
    "cut_planes",
}


def _parse_march(obj, path: str, default_radius: float) -> MarchConfig:
    if obj is None:
        return MarchConfig(bounding_sphere_radius=default_radius)
    _check_keys(obj, path, _MARCH_KEYS, set())
    planes: tuple[CutPlane, ...] = ()
    if "cut_planes" in obj:
        raw = obj["cut_planes"]
        if not isinstance(raw, list):
            raise ValidationError(f"{path}.cut_planes", "expected a list")
        planes = tuple(
            _parse_cut_plane(p, f"{path}.cut_planes[{i}]") for i, p in enumerate(raw)
        )
    precis = _number(obj.get("precis", 2.5e-4), f"{path}.precis", exclusive_minimum=0.0)
    return MarchConfig(
        precis=precis,
        t_max=_number(obj.get("t_max", 7000.0), f"{path}.t_max", exclusive_minimum=precis),
        max_steps=_integer(obj.get("max_steps", 1024), f"{path}.max_steps", minimum=1),
        step_clamp=_number(
            obj.get("step_clamp", 0.2), f"{path}.step_clamp", exclusive_minimum=0.0
        ),
        bounding_sphere_radius=_number(
            obj.get("bounding_sphere_radius", default_radius),
            f"{path}.bounding_sphere_radius",
            exclusive_minimum=0.0,
        ),
        cut_planes=planes,
    )


_SHADING_GLOBAL_KEYS = {
    "reflectance",
    "max_recursion_depth",
    "light_direction",
    "light_color",
    "ambient",
    "background_top",
    "background_bottom",
    "albedo_scale",
    "max_depth_boost",
    "specular_exponent",
    "julia_palette_a",
    "julia_palette_b",
    "bulb_color_a",
    "bulb_color_b",
    "bulb_color_c",
}

# Per-instance overrides are restricted to surface appearance.
_SHADING_INSTANCE_KEYS = {
    "reflectance",
    "albedo_scale",
    "max_depth_boost",
    "julia_palette_a",
    "julia_palette_b",
    "bulb_color_a",
    "bulb_color_b",
    "bulb_color_c",
}


def _parse_shading(obj, path: str, base: ShadingParams, allowed: set[str]) -> ShadingParams:
    if obj is None:
        return base
    _check_keys(obj, path, allowed, set())
    kwargs = {}
    if "reflectance" in obj:
        kwargs["reflectance"] = _number(
            obj["reflectance"], f"{path}.reflectance", minimum=0.0, maximum=1.0
        )
    if "max_recursion_depth" in obj:
        kwargs["max_recursion_depth"] = _integer(
            obj["max_recursion_depth"], f"{path}.max_recursion_depth", minimum=1, maximum=16
        )
    if "light_direction" in obj:
        v = _vec3(obj["light_direction"], f"{path}.light_direction")
        if v.x == 0.0 and v.y == 0.0 and v.z == 0.0:
            raise ValidationError(f"{path}.light_direction", "must be nonzero")
        kwargs["light_direction"] = v
    for key in ("light_color", "ambient", "background_top", "background_bottom",
                "julia_palette_a", "julia_palette_b",
                "bulb_color_a", "bulb_color_b", "bulb_color_c"):
        if key in obj and key in allowed:
            kwargs[key] = _rgb(obj[key], f"{path}.{key}")
    if "albedo_scale" in obj:
        kwargs["albedo_scale"] = _number(obj["albedo_scale"], f"{path}.albedo_scale", minimum=0.0)
    if "max_depth_boost" in obj:
        kwargs["max_depth_boost"] = _number(
            obj["max_depth_boost"], f"{path}.max_depth_boost", minimum=0.0
        )
    if "specular_exponent" in obj:
        kwargs["specular_exponent"] = _number(
            obj["specular_exponent"], f"{path}.specular_exponent", exclusive_minimum=0.0
        )
    return replace(base, **kwargs)


_INSTANCE_KEYS = {
    "kind",
    "c",
    "degree",
    "power",
    "max_iterations",
    "escape_radius_sq",
    "transform",
    "march",
    "shading",
}


def _parse_instance(obj, path: str, scene_shading: ShadingParams) -> Instance:
    _check_keys(obj, path, _INSTANCE_KEYS, {"kind"})
    kind = obj["kind"]
    if kind not in ("julia", "mandelbulb"):
        raise ValidationError(f"{path}.kind", "must be 'julia' or 'mandelbulb'")
    escape = _number(
        obj.get("escape_radius_sq", 256.0), f"{path}.escape_radius_sq", exclusive_minimum=1.0
    )
    if kind == "julia":
        if "power" in obj:
            raise ValidationError(f"{path}.power", "not valid for a julia instance")
        degree = _integer(obj.get("degree", 3), f"{path}.degree")
        if degree not in (2, 3):
            raise ValidationError(f"{path}.degree", "must be 2 or 3")
        params: JuliaParams | MandelbulbParams = JuliaParams(
            c=_quat(obj.get("c", [0.0, 0.0, 0.0, 0.0]), f"{path}.c"),
            degree=degree,
            max_iterations=_integer(
                obj.get("max_iterations", 200), f"{path}.max_iterations", minimum=1
            ),
            escape_radius_sq=escape,
        )
        default_radius = 2.0
    else:
        for bad in ("c", "degree"):
            if bad in obj:
                raise ValidationError(f"{path}.{bad}", "not valid for a mandelbulb instance")
        params = MandelbulbParams(
            power=_integer(obj.get("power", 8), f"{path}.power", minimum=2),
            max_iterations=_integer(
                obj.get("max_iterations", 4), f"{path}.max_iterations", minimum=1
            ),
            escape_radius_sq=escape,
        )
        default_radius = 1.5
    transform = _parse_transform(obj.get("transform"), f"{path}.transform")
    try:
        world_to_object = invert_transform(transform)
    except SingularTransform:
        raise SingularTransform(f"{path}.transform is singular") from None
    del world_to_object  # computed again by Instance; this was the early check
    march = _parse_march(obj.get("march"), f"{path}.march", default_radius)
    shading = _parse_shading(
        obj.get("shading"), f"{path}.shading", scene_shading, _SHADING_INSTANCE_KEYS
    )
    return Instance(kind=kind, params=params, object_to_world=transform, march=march, shading=shading)


def scene_from_dict(doc) -> SceneConfig:
    _check_keys(doc, "", {"schema", "camera", "instances", "shading", "animation"},
                {"schema", "camera"})
    version = _integer(doc["schema"], "schema")
    if version != SCHEMA_VERSION:
        raise ValidationError("schema", f"unsupported version {version} (expected {SCHEMA_VERSION})")
    cam_obj = doc["camera"]
    _check_keys(cam_obj, "camera", {"position", "target", "up", "fov", "width", "height"},
                {"position", "target"})
    position = _vec3(cam_obj["position"], "camera.position")
    target = _vec3(cam_obj["target"], "camera.target")
    if position == target:
        raise ValidationError("camera.target", "must differ from camera.position")
    try:
        camera = Camera(
            position=position,
            target=target,
            up=_vec3(cam_obj.get("up", [0.0, 1.0, 0.0]), "camera.up"),
            fov=_number(cam_obj.get("fov", 60.0), "camera.fov", exclusive_minimum=0.0, maximum=179.9),
            width=_integer(cam_obj.get("width", 512), "camera.width", minimum=1, maximum=16384),
            height=_integer(cam_obj.get("height", 512), "camera.height", minimum=1, maximum=16384),
        )
    except DegenerateBasis:
        raise ValidationError("camera.up", "parallel to the view direction") from None
    shading = _parse_shading(doc.get("shading"), "shading", ShadingParams(), _SHADING_GLOBAL_KEYS)
    raw_instances = doc.get("instances", [])
    if not isinstance(raw_instances, list):
        raise ValidationError("instances", "expected a list")
    instances = tuple(
        _parse_instance(obj, f"instances[{i}]", shading) for i, obj in enumerate(raw_instances)
    )
    animation = None
    if doc.get("animation") is not None:
        a = doc["animation"]
        _check_keys(a, "animation",
                    {"frame_count", "iterations_start", "iterations_end", "c_path"},
                    {"frame_count", "iterations_start", "iterations_end"})
        c_path = None
        if a.get("c_path") is not None:
            raw = a["c_path"]
            if not isinstance(raw, list) or not raw:
                raise ValidationError("animation.c_path", "expected a non-empty list")
            c_path = tuple(_quat(q, f"animation.c_path[{i}]") for i, q in enumerate(raw))
        cap = max((inst.params.max_iterations for inst in instances), default=None)
        start = _integer(a["iterations_start"], "animation.iterations_start", minimum=1)
        end = _integer(a["iterations_end"], "animation.iterations_end", minimum=1)
        if cap is not None:
            if start > cap:
                raise ValidationError("animation.iterations_start", f"must be within [1, {cap}]")
            if end > cap:
                raise ValidationError("animation.iterations_end", f"must be within [1, {cap}]")
        animation = AnimationSettings(
            frame_count=_integer(a["frame_count"], "animation.frame_count", minimum=1),
            iterations_start=start,
            iterations_end=end,
            c_path=c_path,
        )
    return SceneConfig(instances=instances, camera=camera, shading=shading, animation=animation)


def load_scene(text: str) -> SceneConfig:
    """Parse and validate a scene document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno) from None
    return scene_from_dict(doc)


# ---------------------------------------------------------------------------
# Canonical serialization.


def _vec3_list(v: Vec3) -> list[float]:
    return [v.x, v.y, v.z]


def _shading_dict(s: ShadingParams) -> dict:
    return {
        "reflectance": s.reflectance,
        "max_recursion_depth": s.max_recursion_depth,
        "light_direction": _vec3_list(s.light_direction),
        "light_color": list(s.light_color),
        "ambient": list(s.ambient),
        "background_top": list(s.background_top),
        "background_bottom": list(s.background_bottom),
        "albedo_scale": s.albedo_scale,
        "max_depth_boost": s.max_depth_boost,
        "specular_exponent": s.specular_exponent,
        "julia_palette_a": list(s.julia_palette_a),
        "julia_palette_b": list(s.julia_palette_b),
        "bulb_color_a": list(s.bulb_color_a),
        "bulb_color_b": list(s.bulb_color_b),
        "bulb_color_c": list(s.bulb_color_c),
    }


def _instance_shading_dict(inst: ShadingParams, base: ShadingParams) -> dict:
    full = _shading_dict(inst)
    ref = _shading_dict(base)
    keys = _SHADING_INSTANCE_KEYS
    return {k: full[k] for k in sorted(keys) if full[k] != ref[k]}


def scene_to_dict(scene: SceneConfig) -> dict:
    instances = []
    for inst in scene.instances:
        d: dict = {"kind": inst.kind}
        if inst.kind == "julia":
            p = inst.params
            d["c"] = [p.c.w, p.c.x, p.c.y, p.c.z]
            d["degree"] = p.degree
        else:
            d["power"] = inst.params.power
        d["max_iterations"] = inst.params.max_iterations
        d["escape_radius_sq"] = inst.params.escape_radius_sq
        d["transform"] = {"matrix": [list(row) for row in inst.object_to_world]}
        m = inst.march
        d["march"] = {
            "precis": m.precis,
            "t_max": m.t_max,
            "max_steps": m.max_steps,
            "step_clamp": m.step_clamp,
            "bounding_sphere_radius": m.bounding_sphere_radius,
            "cut_planes": [
                {"point": _vec3_list(p.point), "normal": _vec3_list(p.normal)}
                for p in m.cut_planes
            ],
        }
        overrides = _instance_shading_dict(inst.shading, scene.shading)
        if overrides:
            d["shading"] = overrides
        instances.append(d)
    doc = {
        "schema": SCHEMA_VERSION,
        "camera": {
            "position": _vec3_list(scene.camera.position),
            "target": _vec3_list(scene.camera.target),
            "up": _vec3_list(scene.camera.up),
            "fov": scene.camera.fov,
            "width": scene.camera.width,
            "height": scene.camera.height,
        },
        "shading": _shading_dict(scene.shading),
        "instances": instances,
    }
    if scene.animation is not None:
        a = scene.animation
        anim: dict = {
            "frame_count": a.frame_count,
            "iterations_start": a.iterations_start,
            "iterations_end": a.iterations_end,
        }
        if a.c_path is not None:
            anim["c_path"] = [[q.w, q.x, q.y, q.z] for q in a.c_path]
        doc["animation"] = anim
    return doc


def serialize_scene(scene: SceneConfig) -> str:
    return json.dumps(scene_to_dict(scene), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Presets. The constants behind published renders of these fractals are not
# public; these scenes are this project's own framing choices.


def _preset_julia_c0() -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "camera": {"position": [0.0, 0.0, -3.0], "target": [0.0, 0.0, 0.0], "fov": 60.0},
        "instances": [{"kind": "julia", "c": [0.0, 0.0, 0.0, 0.0], "degree": 3}],
    }


# A cubic Julia constant that produces a richly lobed set.
_JULIA_C = [-0.090909090909090912, 0.27272727272727271, 0.68181818181818177, -0.27272727272727271]


def _preset_julia_cut() -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "camera": {"position": [-1.8, 1.35, -2.4], "target": [0.0, 0.0, 0.0], "fov": 55.0},
        "instances": [
            {
                "kind": "julia",
                "c": list(_JULIA_C),
                "degree": 3,
                "march": {
                    "cut_planes": [
                        {"point": [0.0, 0.25, 0.0], "normal": [0.0, 1.0, 0.0]},
                        {"point": [0.0, 0.0, 0.55], "normal": [0.35, 0.0, 1.0]},
                    ]
                },
            }
        ],
    }


def _preset_mandelbulb8() -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "camera": {"position": [1.45, 1.1, -1.8], "target": [0.0, 0.0, 0.0], "fov": 50.0},
        "instances": [{"kind": "mandelbulb", "power": 8}],
    }


def _preset_combo() -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "camera": {"position": [0.0, 0.85, -3.4], "target": [0.0, 0.0, 0.0], "fov": 55.0},
        "instances": [
            {
                "kind": "julia",
                "c": list(_JULIA_C),
                "degree": 3,
                "transform": {"translate": [-1.15, 0.1, 0.0], "scale": 0.85},
            },
            {
                "kind": "mandelbulb",
                "power": 8,
                "transform": {"translate": [1.15, 0.0, 0.0]},
            },
        ],
    }


_PRESETS = {
    "julia-c0": _preset_julia_c0,
    "julia-cut": _preset_julia_cut,
    "mandelbulb8": _preset_mandelbulb8,
    "combo": _preset_combo,
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_scene(name: str) -> SceneConfig:
    """Built-in scene by name; see PRESET_NAMES."""
    try:
        builder = _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}") from None
    return scene_from_dict(builder())
