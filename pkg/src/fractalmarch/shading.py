"""Radiance computation: Phong lighting with a Schlick-Fresnel-weighted
reflection lobe, fractal-driven albedos, and a vertical-gradient miss color.

All colors are linear RGBA 4-tuples until the engine's final gamma encode.
Alpha rides along the same arithmetic as the color channels (light and
ambient alphas are 1), which keeps the math uniform; it clamps to 1 in the
framebuffer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .marcher import Ray, _intersect_instance_steps
from .quatmath import Vec3

__all__ = [
    "ShadingParams",
    "RGBA",
    "reflect",
    "schlick_fresnel",
    "phong",
    "julia_albedo",
    "mandelbulb_albedo",
    "background",
    "trace_radiance",
]

RGB = tuple[float, float, float]
RGBA = tuple[float, float, float, float]

# Iteration count at which the Julia palette reaches its halfway blend.
JULIA_PALETTE_FALLOFF = 8.0
# Height-tint applied to the Julia albedo: base weight plus span by object y.
JULIA_TINT_BASE = 0.85
JULIA_TINT_SPAN = 0.15
# Mandelbulb palette: second blend uses half the clamped trap-z weight.
BULB_SECOND_MIX = 0.5
# Reflection rays start this many precision units along the normal, so the
# first march sample clears the surface it just hit.
REFLECT_OFFSET_SCALE = 10.0

_DEF_LIGHT_LEN = math.sqrt(0.5 * 0.5 + 0.8 * 0.8 + 0.6 * 0.6)


@dataclass(frozen=True, slots=True)
class ShadingParams:
    """Lighting and palette constants.

    A scene carries one global set (lights, background, recursion budget);
    each instance carries a resolved copy whose albedo-related fields may be
    overridden per instance.
    """

    reflectance: float = 0.1
    max_recursion_depth: int = 3
    light_direction: Vec3 = Vec3(-0.5 / _DEF_LIGHT_LEN, 0.8 / _DEF_LIGHT_LEN, -0.6 / _DEF_LIGHT_LEN)
    light_color: RGB = (1.0, 1.0, 1.0)
    ambient: RGB = (0.12, 0.12, 0.12)
    background_top: RGB = (0.55, 0.65, 0.85)
    background_bottom: RGB = (0.08, 0.08, 0.12)
    albedo_scale: float = 3.5
    max_depth_boost: float = 1.65
    specular_exponent: float = 32.0
    julia_palette_a: RGB = (0.10, 0.08, 0.22)
    julia_palette_b: RGB = (0.95, 0.70, 0.30)
    bulb_color_a: RGB = (0.22, 0.10, 0.06)
    bulb_color_b: RGB = (0.95, 0.62, 0.25)
    bulb_color_c: RGB = (0.32, 0.58, 0.86)

    def __post_init__(self):
        if not 0.0 <= self.reflectance <= 1.0:
            raise ValueError("reflectance must be within [0, 1]")
        if self.max_recursion_depth < 1:
            raise ValueError("max_recursion_depth must be >= 1")
        d = self.light_direction
        n2 = d.x * d.x + d.y * d.y + d.z * d.z
        if n2 == 0.0:
            raise ValueError("light_direction must be nonzero")
        if abs(n2 - 1.0) > 1e-9:
            inv = 1.0 / math.sqrt(n2)
            object.__setattr__(self, "light_direction", Vec3(d.x * inv, d.y * inv, d.z * inv))


def reflect(d: Vec3, n: Vec3) -> Vec3:
    """Mirror d about the plane with unit normal n: d - 2<d,n>n."""
    k = 2.0 * (d.x * n.x + d.y * n.y + d.z * n.z)
    return Vec3(d.x - k * n.x, d.y - k * n.y, d.z - k * n.z)


def schlick_fresnel(incident: Vec3, normal: Vec3, f0: RGB) -> RGB:
    """Schlick's approximation f0 + (1-f0)(1-cos)^5.

    ``incident`` points into the surface; cos is clamped to [0, 1] so
    back-facing numerics cannot push the result outside the blend.
    """
    cos = -(incident.x * normal.x + incident.y * normal.y + incident.z * normal.z)
    if cos < 0.0:
        cos = 0.0
    elif cos > 1.0:
        cos = 1.0
    k = math.pow(1.0 - cos, 5.0)
    return (
        f0[0] + (1.0 - f0[0]) * k,
        f0[1] + (1.0 - f0[1]) * k,
        f0[2] + (1.0 - f0[2]) * k,
    )


def phong(albedo: RGBA, normal: Vec3, view_dir: Vec3, params: ShadingParams) -> RGBA:
    """One directional light: ambient + diffuse + specular (exponent 32).

    ``view_dir`` points from the surface toward the viewer. Components are
    clamped at zero.
    """
    l = params.light_direction
    ndotl = normal.x * l.x + normal.y * l.y + normal.z * l.z
    if ndotl < 0.0:
        ndotl = 0.0
    # Light reflected about the normal: 2<n,l>n - l.
    k = 2.0 * (normal.x * l.x + normal.y * l.y + normal.z * l.z)
    rx = k * normal.x - l.x
    ry = k * normal.y - l.y
    rz = k * normal.z - l.z
    rdotv = rx * view_dir.x + ry * view_dir.y + rz * view_dir.z
    if rdotv < 0.0:
        rdotv = 0.0
    spec = math.pow(rdotv, params.specular_exponent)
    amb = params.ambient
    lc = params.light_color
    out = [0.0, 0.0, 0.0, 0.0]
    for i in range(4):
        a = amb[i] if i < 3 else 1.0
        c = lc[i] if i < 3 else 1.0
        v = a * albedo[i] + ndotl * albedo[i] * c + spec * c
        if v < 0.0:
            v = 0.0
        out[i] = v
    return (out[0], out[1], out[2], out[3])


def julia_albedo(object_pos: Vec3, aux: tuple, depth: int, params: ShadingParams) -> RGBA:
    """Two-color palette keyed on the escape iteration count, with a mild
    height tint; boosted at the deepest shaded recursion level."""
    n = aux[0]
    s = n / (n + JULIA_PALETTE_FALLOFF)
    ty = 0.5 * (object_pos.y + 1.0)
    if ty < 0.0:
        ty = 0.0
    elif ty > 1.0:
        ty = 1.0
    tint = JULIA_TINT_BASE + JULIA_TINT_SPAN * ty
    pa = params.julia_palette_a
    pb = params.julia_palette_b
    scale = params.albedo_scale
    r = scale * (pa[0] + s * (pb[0] - pa[0])) * tint
    g = scale * (pa[1] + s * (pb[1] - pa[1])) * tint
    b = scale * (pa[2] + s * (pb[2] - pa[2])) * tint
    a = 1.0
    if depth == params.max_recursion_depth - 1:
        boost = params.max_depth_boost
        r = r + boost
        g = g + boost
        b = b + boost
        a = a + boost
    return (r, g, b, a)


def mandelbulb_albedo(aux: tuple, params: ShadingParams) -> RGBA:
    """Three base colors blended by the clamped orbit-trap components."""
    ty = aux[1]
    tz = aux[2]
    if ty < 0.0:
        ty = 0.0
    elif ty > 1.0:
        ty = 1.0
    if tz < 0.0:
        tz = 0.0
    elif tz > 1.0:
        tz = 1.0
    ca = params.bulb_color_a
    cb = params.bulb_color_b
    cc = params.bulb_color_c
    w = BULB_SECOND_MIX * tz
    r = ca[0] + ty * (cb[0] - ca[0])
    g = ca[1] + ty * (cb[1] - ca[1])
    b = ca[2] + ty * (cb[2] - ca[2])
    r = r + w * (cc[0] - r)
    g = g + w * (cc[1] - g)
    b = b + w * (cc[2] - b)
    return (r, g, b, 1.0)


def background(direction: Vec3, params: ShadingParams) -> RGBA:
    """Vertical two-color gradient used for misses."""
    t = 0.5 * (direction.y + 1.0)
    bot = params.background_bottom
    top = params.background_top
    return (
        bot[0] + t * (top[0] - bot[0]),
        bot[1] + t * (top[1] - bot[1]),
        bot[2] + t * (top[2] - bot[2]),
        1.0,
    )


def trace_radiance(ray: Ray, depth: int, scene, params: ShadingParams) -> RGBA:
    """Radiance along a ray: nearest instance hit shaded by Phong plus a
    Fresnel-weighted reflection bounce, or the background on a miss.

    At depth == max_recursion_depth no geometry is traced at all; the
    background is returned, which is what a reflection cast from the last
    shaded level receives.
    """
    color, _, _ = _trace(ray, depth, scene, params)
    return color


def _trace(ray: Ray, depth: int, scene, params: ShadingParams):
    """trace_radiance plus (hit world t or -1, total march steps)."""
    if depth >= params.max_recursion_depth:
        return background(ray.dir, params), -1.0, 0
    best = None
    best_inst = None
    steps_total = 0
    best_t = math.inf
    for inst in scene.instances:
        hit, steps = _intersect_instance_steps(ray, inst, best_t)
        steps_total += steps
        if hit is not None:
            best = hit
            best_inst = inst
            best_t = hit.t
    if best is None:
        return background(ray.dir, params), -1.0, steps_total
    o = ray.origin
    d = ray.dir
    hx = o.x + best.t * d.x
    hy = o.y + best.t * d.y
    hz = o.z + best.t * d.z
    n = best.normal
    inst_sh = best_inst.shading
    if best_inst.kind == "julia":
        m = best_inst.world_to_object
        px = m[0][0] * hx + m[0][1] * hy + m[0][2] * hz + m[0][3]
        py = m[1][0] * hx + m[1][1] * hy + m[1][2] * hz + m[1][3]
        pz = m[2][0] * hx + m[2][1] * hy + m[2][2] * hz + m[2][3]
        albedo = julia_albedo(Vec3(px, py, pz), best.aux, depth, inst_sh)
    else:
        albedo = mandelbulb_albedo(best.aux, inst_sh)
    view = Vec3(-d.x, -d.y, -d.z)
    color = phong(albedo, n, view, params)
    refl = inst_sh.reflectance
    if refl != 0.0:
        offset = REFLECT_OFFSET_SCALE * best_inst.march.precis
        rd = reflect(d, n)
        refl_ray = Ray(
            Vec3(hx + offset * n.x, hy + offset * n.y, hz + offset * n.z), rd
        )
        refl_color = trace_radiance(refl_ray, depth + 1, scene, params)
        fr = schlick_fresnel(d, n, (albedo[0], albedo[1], albedo[2]))
        color = (
            color[0] + refl * fr[0] * refl_color[0],
            color[1] + refl * fr[1] * refl_color[1],
            color[2] + refl * fr[2] * refl_color[2],
            color[3] + refl * 1.0 * refl_color[3],
        )
    return color, best.t, steps_total
