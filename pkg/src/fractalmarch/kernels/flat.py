"""Flattened scene representation consumed by the compiled kernel.

Every number is copied verbatim from the rich scene objects (the camera
basis and inverse transforms are computed once, at scene/instance
construction), so the compiled and pure-Python paths run from identical
inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..estimators import NORMAL_STEP_SCALE
from ..shading import (
    BULB_SECOND_MIX,
    JULIA_PALETTE_FALLOFF,
    JULIA_TINT_BASE,
    JULIA_TINT_SPAN,
    REFLECT_OFFSET_SCALE,
)

GAMMA = 2.2
GAMMA_EXP = 1.0 / GAMMA

KIND_JULIA = 0
KIND_MANDELBULB = 1


@dataclass
class FlatScene:
    width: int
    height: int
    cam_pos: np.ndarray
    cam_right: np.ndarray
    cam_up: np.ndarray
    cam_forward: np.ndarray
    half_w: float
    half_h: float
    kind: np.ndarray  # int32[n]
    qc: np.ndarray  # f64[n,4] julia constant (w,x,y,z)
    ipow: np.ndarray  # int32[n] degree or power
    max_iter: np.ndarray  # int32[n]
    escape: np.ndarray  # f64[n]
    o2w: np.ndarray  # f64[n,3,4]
    w2o: np.ndarray  # f64[n,3,4]
    precis: np.ndarray  # f64[n]
    t_max: np.ndarray  # f64[n]
    step_clamp: np.ndarray  # f64[n]
    bound: np.ndarray  # f64[n]
    max_steps: np.ndarray  # int32[n]
    plane_start: np.ndarray  # int32[n+1]
    planes: np.ndarray  # f64[total,6] point xyz, normal xyz
    reflectance: np.ndarray  # f64[n]
    albedo_scale: np.ndarray  # f64[n]
    boost: np.ndarray  # f64[n]
    jpal: np.ndarray  # f64[n,6]
    bpal: np.ndarray  # f64[n,9]
    light_dir: np.ndarray  # f64[3]
    light_color: np.ndarray  # f64[3]
    ambient: np.ndarray  # f64[3]
    bg_top: np.ndarray  # f64[3]
    bg_bottom: np.ndarray  # f64[3]
    specular_exponent: float
    max_depth: int
    gamma_exp: float
    julia_falloff: float
    julia_tint_base: float
    julia_tint_span: float
    bulb_second_mix: float
    reflect_offset_scale: float
    normal_step_scale: float


def _v3(v) -> np.ndarray:
    return np.array([v.x, v.y, v.z], dtype=np.float64)


def flatten_scene(scene) -> FlatScene:
    n = len(scene.instances)
    kind = np.zeros(n, dtype=np.int32)
    qc = np.zeros((n, 4), dtype=np.float64)
    ipow = np.zeros(n, dtype=np.int32)
    max_iter = np.zeros(n, dtype=np.int32)
    escape = np.zeros(n, dtype=np.float64)
    o2w = np.zeros((n, 3, 4), dtype=np.float64)
    w2o = np.zeros((n, 3, 4), dtype=np.float64)
    precis = np.zeros(n, dtype=np.float64)
    t_max = np.zeros(n, dtype=np.float64)
    step_clamp = np.zeros(n, dtype=np.float64)
    bound = np.zeros(n, dtype=np.float64)
    max_steps = np.zeros(n, dtype=np.int32)
    plane_start = np.zeros(n + 1, dtype=np.int32)
    plane_rows = []
    reflectance = np.zeros(n, dtype=np.float64)
    albedo_scale = np.zeros(n, dtype=np.float64)
    boost = np.zeros(n, dtype=np.float64)
    jpal = np.zeros((n, 6), dtype=np.float64)
    bpal = np.zeros((n, 9), dtype=np.float64)
    for i, inst in enumerate(scene.instances):
        p = inst.params
        if inst.kind == "julia":
            kind[i] = KIND_JULIA
            qc[i] = (p.c.w, p.c.x, p.c.y, p.c.z)
            ipow[i] = p.degree
        else:
            kind[i] = KIND_MANDELBULB
            ipow[i] = p.power
        max_iter[i] = p.max_iterations
        escape[i] = p.escape_radius_sq
        o2w[i] = inst.object_to_world
        w2o[i] = inst.world_to_object
        m = inst.march
        precis[i] = m.precis
        t_max[i] = m.t_max
        step_clamp[i] = m.step_clamp
        bound[i] = m.bounding_sphere_radius
        max_steps[i] = m.max_steps
        for plane in m.cut_planes:
            plane_rows.append(
                (plane.point.x, plane.point.y, plane.point.z,
                 plane.normal.x, plane.normal.y, plane.normal.z)
            )
        plane_start[i + 1] = len(plane_rows)
        sh = inst.shading
        reflectance[i] = sh.reflectance
        albedo_scale[i] = sh.albedo_scale
        boost[i] = sh.max_depth_boost
        jpal[i, 0:3] = sh.julia_palette_a
        jpal[i, 3:6] = sh.julia_palette_b
        bpal[i, 0:3] = sh.bulb_color_a
        bpal[i, 3:6] = sh.bulb_color_b
        bpal[i, 6:9] = sh.bulb_color_c
    planes = np.array(plane_rows, dtype=np.float64).reshape(len(plane_rows), 6)
    cam = scene.camera
    sh = scene.shading
    return FlatScene(
        width=cam.width,
        height=cam.height,
        cam_pos=_v3(cam.position),
        cam_right=_v3(cam.right),
        cam_up=_v3(cam.up_vec),
        cam_forward=_v3(cam.forward),
        half_w=cam.half_w,
        half_h=cam.half_h,
        kind=kind,
        qc=qc,
        ipow=ipow,
        max_iter=max_iter,
        escape=escape,
        o2w=np.ascontiguousarray(o2w),
        w2o=np.ascontiguousarray(w2o),
        precis=precis,
        t_max=t_max,
        step_clamp=step_clamp,
        bound=bound,
        max_steps=max_steps,
        plane_start=plane_start,
        planes=np.ascontiguousarray(planes),
        reflectance=reflectance,
        albedo_scale=albedo_scale,
        boost=boost,
        jpal=np.ascontiguousarray(jpal),
        bpal=np.ascontiguousarray(bpal),
        light_dir=_v3(sh.light_direction),
        light_color=np.array(sh.light_color, dtype=np.float64),
        ambient=np.array(sh.ambient, dtype=np.float64),
        bg_top=np.array(sh.background_top, dtype=np.float64),
        bg_bottom=np.array(sh.background_bottom, dtype=np.float64),
        specular_exponent=sh.specular_exponent,
        max_depth=sh.max_recursion_depth,
        gamma_exp=GAMMA_EXP,
        julia_falloff=JULIA_PALETTE_FALLOFF,
        julia_tint_base=JULIA_TINT_BASE,
        julia_tint_span=JULIA_TINT_SPAN,
        bulb_second_mix=BULB_SECOND_MIX,
        reflect_offset_scale=REFLECT_OFFSET_SCALE,
        normal_step_scale=NORMAL_STEP_SCALE,
    )
