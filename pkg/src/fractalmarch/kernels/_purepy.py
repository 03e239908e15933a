"""Pure-Python rendering backend.

This is the reference path: it drives the public marcher/shading functions
pixel by pixel. The compiled backend transcribes the same arithmetic in the
same order and must produce bit-identical framebuffers.
"""

from __future__ import annotations

import math

from ..scene import generate_primary_ray
from ..shading import _trace
from .flat import GAMMA_EXP

NAME = "python"


def prepare(scene):
    """The pure path renders straight from the rich scene objects."""
    return scene


def _encode(v: float, gamma_exp: float) -> int:
    # NaN fails the first comparison and lands on 0.
    if not v > 0.0:
        v = 0.0
    elif v > 1.0:
        v = 1.0
    v = math.pow(v, gamma_exp)
    return int(v * 255.0 + 0.5)


def _encode_linear(v: float) -> int:
    if not v > 0.0:
        v = 0.0
    elif v > 1.0:
        v = 1.0
    return int(v * 255.0 + 0.5)


def render_tile(scene, x0, y0, tw, th, out, hit_t=None, steps=None, linear=None) -> int:
    """Render one tile into row-major RGBA8 ``out``; returns the number of
    non-finite color channels encountered (they encode to 0)."""
    camera = scene.camera
    params = scene.shading
    nonfinite = 0
    for y in range(y0, y0 + th):
        for x in range(x0, x0 + tw):
            ray = generate_primary_ray(camera, x, y)
            color, t, nsteps = _trace(ray, 0, scene, params)
            if hit_t is not None:
                hit_t[y, x] = t
            if steps is not None:
                steps[y, x] = nsteps
            if linear is not None:
                linear[y, x, 0] = color[0]
                linear[y, x, 1] = color[1]
                linear[y, x, 2] = color[2]
                linear[y, x, 3] = color[3]
            for ch in range(4):
                v = color[ch]
                if not math.isfinite(v):
                    nonfinite += 1
            out[y, x, 0] = _encode(color[0], GAMMA_EXP)
            out[y, x, 1] = _encode(color[1], GAMMA_EXP)
            out[y, x, 2] = _encode(color[2], GAMMA_EXP)
            out[y, x, 3] = _encode_linear(color[3])
    return nonfinite
