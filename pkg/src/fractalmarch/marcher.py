"""Sphere tracing against a distance field, with bounding-sphere and
cut-plane interval clipping and instance-transform handling.

The march advances by the estimated distance, clamped to a fixed maximum
step: distance estimates for the iterated fractals are bounds derived from a
truncated limit, and the clamp is a safety factor against the truncation
overshooting near the surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import DegenerateGradient
from .estimators import DistanceSample, estimate_normal
from .quatmath import Vec3

__all__ = [
    "Ray",
    "CutPlane",
    "MarchConfig",
    "HitInfo",
    "intersect_bounding_sphere",
    "clip_by_planes",
    "raycast",
    "intersect_instance",
]


@dataclass(frozen=True, slots=True)
class Ray:
    """Origin and unit direction, in whatever space the caller is working."""

    origin: Vec3
    dir: Vec3

    def __post_init__(self):
        n2 = self.dir.x * self.dir.x + self.dir.y * self.dir.y + self.dir.z * self.dir.z
        if abs(n2 - 1.0) > 2e-9:
            raise ValueError(f"ray direction must be unit length, |d|^2 = {n2}")


@dataclass(frozen=True, slots=True)
class CutPlane:
    """Half-space clip: keeps points q with <q - point, normal> <= 0,
    i.e. the side the normal points away from."""

    point: Vec3
    normal: Vec3

    def __post_init__(self):
        n = self.normal
        if n.x * n.x + n.y * n.y + n.z * n.z == 0.0:
            raise ValueError("cut plane normal must be nonzero")


@dataclass(frozen=True, slots=True)
class MarchConfig:
    precis: float = 2.5e-4
    t_max: float = 7000.0
    max_steps: int = 1024
    step_clamp: float = 0.2
    bounding_sphere_radius: float = 2.0
    cut_planes: tuple[CutPlane, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not self.precis > 0.0:
            raise ValueError("precis must be > 0")
        if not self.t_max > self.precis:
            raise ValueError("t_max must exceed precis")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")
        if not self.step_clamp > 0.0:
            raise ValueError("step_clamp must be > 0")
        if not self.bounding_sphere_radius > 0.0:
            raise ValueError("bounding_sphere_radius must be > 0")


@dataclass(frozen=True, slots=True)
class HitInfo:
    """March result. ``normal`` is filled by intersect_instance (the bare
    raycast leaves it None); ``aux`` is copied from the final field sample."""

    t: float
    steps: int
    aux: tuple[float, float, float, float]
    normal: Optional[Vec3] = None


def intersect_bounding_sphere(ray: Ray, radius: float) -> Optional[tuple[float, float]]:
    """Parametric overlap of the ray with the solid origin-centered sphere,
    clipped to t >= 0. None when the ray misses entirely."""
    o = ray.origin
    d = ray.dir
    b = o.x * d.x + o.y * d.y + o.z * d.z
    c = o.x * o.x + o.y * o.y + o.z * o.z - radius * radius
    disc = b * b - c
    if disc < 0.0:
        return None
    s = math.sqrt(disc)
    t_enter = -b - s
    t_exit = -b + s
    if t_exit < 0.0:
        return None
    if t_enter < 0.0:
        t_enter = 0.0
    return (t_enter, t_exit)


def clip_by_planes(
    interval: tuple[float, float], ray: Ray, cut_planes: tuple[CutPlane, ...]
) -> Optional[tuple[float, float]]:
    """Intersect a parametric interval with each half-space's admissible
    range along the ray. None when the result is empty."""
    t0, t1 = interval
    o = ray.origin
    d = ray.dir
    for plane in cut_planes:
        p = plane.point
        n = plane.normal
        num = (o.x - p.x) * n.x + (o.y - p.y) * n.y + (o.z - p.z) * n.z
        den = d.x * n.x + d.y * n.y + d.z * n.z
        if den > 0.0:
            tp = -num / den
            if tp < t1:
                t1 = tp
        elif den < 0.0:
            tp = -num / den
            if tp > t0:
                t0 = tp
        elif num > 0.0:
            return None
    if t0 > t1:
        return None
    return (t0, t1)


def raycast(
    ray: Ray,
    field_fn: Callable[[Vec3], DistanceSample],
    config: MarchConfig,
    t_limit: float = math.inf,
) -> Optional[HitInfo]:
    """Sphere-trace the field along the ray.

    The march interval is the bounding sphere clipped by the cut planes and
    [precis, t_max] (and the optional t_limit, used to stop early once a
    closer hit is already known). A hit is the first sample with
    d < precis; running out of interval or steps is a miss.
    """
    hit, _ = _raycast_steps(ray, field_fn, config, t_limit)
    return hit


def _raycast_steps(
    ray: Ray,
    field_fn: Callable[[Vec3], DistanceSample],
    config: MarchConfig,
    t_limit: float = math.inf,
) -> tuple[Optional[HitInfo], int]:
    """raycast plus the number of field evaluations spent (misses included)."""
    interval = intersect_bounding_sphere(ray, config.bounding_sphere_radius)
    if interval is None:
        return None, 0
    t0, t1 = interval
    if t0 < config.precis:
        t0 = config.precis
    if t1 > config.t_max:
        t1 = config.t_max
    if t1 > t_limit:
        t1 = t_limit
    clipped = clip_by_planes((t0, t1), ray, config.cut_planes)
    if clipped is None:
        return None, 0
    t0, t1 = clipped
    o = ray.origin
    d = ray.dir
    precis = config.precis
    clamp = config.step_clamp
    t = t0
    steps = 0
    while steps < config.max_steps:
        sample = field_fn(Vec3(o.x + t * d.x, o.y + t * d.y, o.z + t * d.z))
        steps += 1
        if sample.d < precis:
            return HitInfo(t=t, steps=steps, aux=sample.aux), steps
        t = t + (sample.d if sample.d < clamp else clamp)
        if t > t1:
            break
    return None, steps


def intersect_instance(world_ray: Ray, instance, best_t: float = math.inf) -> Optional[HitInfo]:
    """March one transformed instance; returns a world-space hit.

    The ray is mapped to object space, marched there, and the result mapped
    back: t by the object-direction length (the object ray is renormalized),
    the normal by the inverse-transpose rule. Hits at or beyond ``best_t``
    (world units) are rejected, so callers can fold over instances keeping
    the nearest.

    ``instance`` provides world_to_object (3 rows of 4), sample(p) ->
    DistanceSample, and march (MarchConfig).
    """
    hit, _ = _intersect_instance_steps(world_ray, instance, best_t)
    return hit


def _intersect_instance_steps(
    world_ray: Ray, instance, best_t: float = math.inf
) -> tuple[Optional[HitInfo], int]:
    m = instance.world_to_object
    o = world_ray.origin
    d = world_ray.dir
    ox = m[0][0] * o.x + m[0][1] * o.y + m[0][2] * o.z + m[0][3]
    oy = m[1][0] * o.x + m[1][1] * o.y + m[1][2] * o.z + m[1][3]
    oz = m[2][0] * o.x + m[2][1] * o.y + m[2][2] * o.z + m[2][3]
    dx = m[0][0] * d.x + m[0][1] * d.y + m[0][2] * d.z
    dy = m[1][0] * d.x + m[1][1] * d.y + m[1][2] * d.z
    dz = m[2][0] * d.x + m[2][1] * d.y + m[2][2] * d.z
    dir_len = math.sqrt(dx * dx + dy * dy + dz * dz)
    obj_ray = Ray(Vec3(ox, oy, oz), Vec3(dx / dir_len, dy / dir_len, dz / dir_len))
    t_limit = best_t * dir_len if math.isfinite(best_t) else math.inf
    config = instance.march
    hit, steps = _raycast_steps(obj_ray, instance.sample, config, t_limit)
    if hit is None:
        return None, steps
    px = obj_ray.origin.x + hit.t * obj_ray.dir.x
    py = obj_ray.origin.y + hit.t * obj_ray.dir.y
    pz = obj_ray.origin.z + hit.t * obj_ray.dir.z
    try:
        n = estimate_normal(
            lambda q: instance.sample(q).d, Vec3(px, py, pz), config.precis
        )
    except DegenerateGradient:
        # Flat field at the hit (e.g. deep inside a cut face): fall back to
        # facing the ray.
        n = Vec3(-obj_ray.dir.x, -obj_ray.dir.y, -obj_ray.dir.z)
    # Normals map by the transpose of world->object (inverse-transpose of
    # object->world), then renormalize.
    nx = m[0][0] * n.x + m[1][0] * n.y + m[2][0] * n.z
    ny = m[0][1] * n.x + m[1][1] * n.y + m[2][1] * n.z
    nz = m[0][2] * n.x + m[1][2] * n.y + m[2][2] * n.z
    nl = math.sqrt(nx * nx + ny * ny + nz * nz)
    t_world = hit.t / dir_len
    if t_world >= best_t:
        return None, steps
    return (
        HitInfo(
            t=t_world,
            steps=hit.steps,
            aux=hit.aux,
            normal=Vec3(nx / nl, ny / nl, nz / nl),
        ),
        steps,
    )
