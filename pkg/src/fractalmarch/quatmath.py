"""Quaternion and triplex ("nth power") arithmetic for the distance estimators.

Quaternions are stored as (w, x, y, z) with w the scalar part. The triplex
power uses spherical coordinates with +y as the polar axis: for a point w
with r = |w|, the angles are b = n*acos(w.y/r) (polar) and
a = n*atan2(w.x, w.z) (azimuth, measured in the x-z plane from +z), and

    w^n = r^n * (sin b * sin a, cos b, sin b * cos a)

Everything here is double precision: the iterated maps downstream amplify
rounding error exponentially, so the scalar core stays in doubles even when
the framebuffer is eventually quantized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateOrigin

__all__ = [
    "Quaternion",
    "Vec3",
    "qmul",
    "qsquare",
    "qcube",
    "qlength2",
    "triplex_pow_add",
]


@dataclass(frozen=True, slots=True)
class Quaternion:
    """A quaternion w + x*i + y*j + z*k. Components must be finite."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (
            math.isfinite(self.w)
            and math.isfinite(self.x)
            and math.isfinite(self.y)
            and math.isfinite(self.z)
        ):
            raise ValueError(f"quaternion components must be finite, got {self!r}")


@dataclass(frozen=True, slots=True)
class Vec3:
    """A point or direction in scene units. Components must be finite."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"vector components must be finite, got {self!r}")


IDENTITY = Quaternion(1.0, 0.0, 0.0, 0.0)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product a*b."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def qsquare(q: Quaternion) -> Quaternion:
    """q*q in closed form: (w^2 - x^2 - y^2 - z^2, 2wx, 2wy, 2wz)."""
    return Quaternion(
        q.w * q.w - q.x * q.x - q.y * q.y - q.z * q.z,
        2.0 * q.w * q.x,
        2.0 * q.w * q.y,
        2.0 * q.w * q.z,
    )


def qcube(q: Quaternion) -> Quaternion:
    """q*q*q in closed form.

    With q = (a, v): q^3 = (a*(a^2 - 3|v|^2), v*(3a^2 - |v|^2)).
    """
    m = q.x * q.x + q.y * q.y + q.z * q.z
    a2 = q.w * q.w
    s = 3.0 * a2 - m
    return Quaternion(q.w * (a2 - 3.0 * m), q.x * s, q.y * s, q.z * s)


def qlength2(q: Quaternion) -> float:
    """Squared norm w^2 + x^2 + y^2 + z^2."""
    return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z


def triplex_pow_add(w: Vec3, n: int, c: Vec3) -> Vec3:
    """w^n + c with the spherical-coordinate power described in the module doc.

    Raises DegenerateOrigin when |w| = 0: the angles are undefined there and
    the caller owns the convention (the estimators substitute the zero
    vector, the continuous limit of r^n times a unit vector as r -> 0).
    """
    if n < 2:
        raise ValueError(f"power must be >= 2, got {n}")
    r2 = w.x * w.x + w.y * w.y + w.z * w.z
    r = math.sqrt(r2)
    if r == 0.0:
        raise DegenerateOrigin("triplex power undefined at the origin")
    fn = float(n)
    # The ratio can leave [-1, 1] by one ulp; acos would reject that.
    ratio = w.y / r
    if ratio > 1.0:
        ratio = 1.0
    elif ratio < -1.0:
        ratio = -1.0
    b = fn * math.acos(ratio)
    a = fn * math.atan2(w.x, w.z)
    rn = math.pow(r, fn)
    sb = math.sin(b)
    cb = math.cos(b)
    sa = math.sin(a)
    ca = math.cos(a)
    return Vec3(rn * sb * sa + c.x, rn * cb + c.y, rn * sb * ca + c.z)
