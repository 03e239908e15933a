"""Deterministic tile-parallel frame rendering, animation sequencing, and
image encoding.

Work is split into tiles served from a shared queue; each tile is written
by exactly one worker into a disjoint region of a preallocated buffer, so
the output is a pure function of the scene regardless of thread count or
tile schedule.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import IoError
from .quatmath import Quaternion
from .scene import SceneConfig
from . import kernels

__all__ = [
    "Framebuffer",
    "Tile",
    "RenderStats",
    "make_tiles",
    "render_frame",
    "render_animation",
    "frame_scene",
    "write_ppm",
    "write_png",
    "write_image",
    "DEFAULT_TILE_SIZE",
]

DEFAULT_TILE_SIZE = 32


@dataclass(frozen=True)
class Tile:
    x0: int
    y0: int
    width: int
    height: int


@dataclass
class Framebuffer:
    """Gamma-encoded 8-bit RGBA pixels, row-major, top-left origin."""

    width: int
    height: int
    pixels: np.ndarray  # uint8, shape (height, width, 4)

    def rgb_bytes(self) -> bytes:
        return self.pixels[:, :, :3].tobytes()


@dataclass
class RenderStats:
    """Per-pixel diagnostics collected alongside a render.

    hit_t holds the world-space ray parameter of the nearest primary hit
    (-1 for misses); steps holds the total march iterations spent on the
    primary ray across all instances; nonfinite counts color channels that
    were not finite before encoding (always 0 for healthy scenes).
    """

    hit_t: np.ndarray
    steps: np.ndarray
    nonfinite: int = 0


def make_tiles(width: int, height: int, tile_size: int = DEFAULT_TILE_SIZE) -> list[Tile]:
    """Partition a width x height image into tiles; verifies the partition
    is disjoint and covering before anything is rendered."""
    tiles = []
    area = 0
    for y0 in range(0, height, tile_size):
        th = min(tile_size, height - y0)
        for x0 in range(0, width, tile_size):
            tw = min(tile_size, width - x0)
            tiles.append(Tile(x0, y0, tw, th))
            area += tw * th
    assert area == width * height, "tiles do not partition the framebuffer"
    return tiles


def render_frame(
    scene: SceneConfig,
    thread_count: int = 1,
    backend: str | None = None,
    tile_size: int = DEFAULT_TILE_SIZE,
    return_stats: bool = False,
):
    """Render one frame. Output is byte-identical for any thread_count,
    tile_size, and backend."""
    if thread_count < 1:
        raise ValueError("thread_count must be >= 1")
    impl = kernels.get_backend(backend)
    width = scene.camera.width
    height = scene.camera.height
    out = np.zeros((height, width, 4), dtype=np.uint8)
    hit_t = steps = None
    if return_stats:
        hit_t = np.full((height, width), -1.0, dtype=np.float64)
        steps = np.zeros((height, width), dtype=np.int32)
    ctx = impl.prepare(scene)
    tiles = make_tiles(width, height, tile_size)

    def run(tile: Tile) -> int:
        return impl.render_tile(
            ctx, tile.x0, tile.y0, tile.width, tile.height, out, hit_t, steps, None
        )

    if thread_count == 1:
        nonfinite = sum(run(t) for t in tiles)
    else:
        with ThreadPoolExecutor(max_workers=thread_count) as pool:
            nonfinite = sum(pool.map(run, tiles))
    fb = Framebuffer(width, height, out)
    if return_stats:
        return fb, RenderStats(hit_t=hit_t, steps=steps, nonfinite=nonfinite)
    return fb


def _lerp_quat(a: Quaternion, b: Quaternion, f: float) -> Quaternion:
    return Quaternion(
        a.w + f * (b.w - a.w),
        a.x + f * (b.x - a.x),
        a.y + f * (b.y - a.y),
        a.z + f * (b.z - a.z),
    )


def frame_scene(scene: SceneConfig, frame: int) -> SceneConfig:
    """Scene for animation frame ``frame``: iteration count interpolated
    linearly (rounded) and the Julia constant moved along c_path."""
    a = scene.animation
    if a is None:
        raise ValueError("scene has no animation settings")
    if not 0 <= frame < a.frame_count:
        raise ValueError(f"frame {frame} outside [0, {a.frame_count})")
    u = 0.0 if a.frame_count == 1 else frame / (a.frame_count - 1)
    iters = int(math.floor(a.iterations_start + u * (a.iterations_end - a.iterations_start) + 0.5))
    c = None
    if a.c_path is not None:
        path = a.c_path
        if len(path) == 1:
            c = path[0]
        else:
            s = u * (len(path) - 1)
            i = min(int(math.floor(s)), len(path) - 2)
            c = _lerp_quat(path[i], path[i + 1], s - i)
    instances = []
    for inst in scene.instances:
        params = replace(inst.params, max_iterations=iters)
        if inst.kind == "julia" and c is not None:
            params = replace(params, c=c)
        instances.append(replace(inst, params=params))
    return replace(scene, instances=tuple(instances), animation=None)


def render_animation(
    scene: SceneConfig,
    output_pattern: str | Path,
    thread_count: int = 1,
    backend: str | None = None,
) -> list[Path]:
    """Render scene.animation.frame_count frames to files named
    ``{stem}_{frame:04d}{ext}``. Frames written before a failure stay on
    disk."""
    if scene.animation is None:
        raise ValueError("scene has no animation settings")
    pattern = Path(output_pattern)
    if not pattern.suffix:
        raise ValueError("output pattern needs a file extension, e.g. frames.png")
    paths = []
    for k in range(scene.animation.frame_count):
        fb = render_frame(frame_scene(scene, k), thread_count=thread_count, backend=backend)
        path = pattern.with_name(f"{pattern.stem}_{k:04d}{pattern.suffix}")
        write_image(fb, path)
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# Image output.


def write_ppm(fb: Framebuffer, sink) -> None:
    """Binary PPM (P6, maxval 255); alpha is dropped."""
    header = f"P6\n{fb.width} {fb.height}\n255\n".encode("ascii")
    payload = header + fb.rgb_bytes()
    try:
        if hasattr(sink, "write"):
            sink.write(payload)
        else:
            with open(sink, "wb") as f:
                f.write(payload)
    except OSError as e:
        raise IoError(f"cannot write PPM: {e}") from e


def write_png(fb: Framebuffer, sink) -> None:
    """8-bit RGBA PNG."""
    from PIL import Image

    img = Image.fromarray(fb.pixels, mode="RGBA")
    try:
        if hasattr(sink, "write"):
            img.save(sink, format="PNG")
        else:
            with open(sink, "wb") as f:
                img.save(f, format="PNG")
    except OSError as e:
        raise IoError(f"cannot write PNG: {e}") from e


def write_image(fb: Framebuffer, path: str | Path) -> None:
    """Write by extension: .ppm or .png."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".ppm":
        write_ppm(fb, path)
    elif ext == ".png":
        write_png(fb, path)
    else:
        raise ValueError(f"unsupported image extension {ext!r} (use .ppm or .png)")


def default_thread_count() -> int:
    env = os.environ.get("FRACTALMARCH_THREADS", "").strip()
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"FRACTALMARCH_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ValueError("FRACTALMARCH_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1
