"""Distance estimators for the quaternion Julia set and the Mandelbulb.

Both estimators derive from the escape-rate potential of f(z) = z^p + c,

    G(z) = lim  log|f^n(z)| / p^n,

the log-magnitude of the Boettcher coordinate that conjugates f to z -> z^p
far from the set. G is smooth, vanishes exactly on the filled set, and tends
to log|z| far away. A distance bound follows from the first-order Taylor
expansion of G at z: if z + e is the closest set point then
0 = G(z+e) ~ G(z) + <grad G(z), e>, and the triangle plus Cauchy-Schwarz
inequalities turn that into |e| >= |G(z)| / |grad G(z)|. Substituting the
limit definition of G and its gradient gives the computable form

    d(z) = lim  |f^n(z)| * log|f^n(z)| / |(f^n)'(z)|,

which the loops below evaluate by iterating the value and derivative
recursions  f^(n+1) = (f^n)^p + c  and  (f^(n+1))' = p * (f^n)^(p-1) * (f^n)'
with (f^0)' = 1 until the orbit escapes. The potential itself is never
materialized; only the quotient above is.

Everything is double precision and allocation-light: these functions run
millions of times per frame on the fallback path and are transcribed
statement-for-statement into the compiled kernel, which must produce
bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DegenerateGradient
from .quatmath import Quaternion, Vec3, qcube, qlength2, qsquare

__all__ = [
    "JuliaParams",
    "MandelbulbParams",
    "DistanceSample",
    "julia_distance",
    "mandelbulb_distance",
    "estimate_normal",
    "NORMAL_STEP_SCALE",
]

# Step used by the tetrahedral gradient, as a fraction of marching precision
# (about 1/sqrt(3) so the four offset points sit at distance ~precis).
NORMAL_STEP_SCALE = 0.5773


@dataclass(frozen=True, slots=True)
class JuliaParams:
    """Parameters of the iteration z <- z^degree + c over the quaternions.

    The in-loop derivative factor is degree^2 (9.0 for the default cubic),
    applied to the squared derivative magnitude each iteration.
    """

    c: Quaternion
    degree: int = 3
    max_iterations: int = 200
    escape_radius_sq: float = 256.0

    def __post_init__(self):
        if self.degree not in (2, 3):
            raise ValueError(f"degree must be 2 or 3, got {self.degree}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.escape_radius_sq > 1.0:
            raise ValueError("escape_radius_sq must be > 1")


@dataclass(frozen=True, slots=True)
class MandelbulbParams:
    """Parameters of the iteration w <- w^power + p over triplex space."""

    power: int = 8
    max_iterations: int = 4
    escape_radius_sq: float = 256.0

    def __post_init__(self):
        if self.power < 2:
            raise ValueError(f"power must be >= 2, got {self.power}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.escape_radius_sq > 1.0:
            raise ValueError("escape_radius_sq must be > 1")


@dataclass(frozen=True, slots=True)
class DistanceSample:
    """Distance estimate plus shading data.

    aux[0] is the completed iteration count for the Julia set; for the
    Mandelbulb aux is (final |w|^2, orbit-trap y, orbit-trap z,
    orbit-trap |w|^2). d can be <= 0 inside the set; hit/miss against the
    marching precision is the marcher's call, not ours.
    """

    d: float
    aux: tuple[float, float, float, float]


def julia_distance(p: Vec3, params: JuliaParams) -> DistanceSample:
    """Distance estimate from p to the Julia set of z^degree + c.

    p embeds into the 3D slice of quaternion space as (p.x, p.y, p.z, 0),
    with p.x the scalar part.
    """
    c = params.c
    escape = params.escape_radius_sq
    cubic = params.degree == 3
    z = Quaternion(p.x, p.y, p.z, 0.0)
    dz2 = 1.0  # squared derivative magnitude, (f^0)' = 1
    m2 = 0.0
    n = 0
    for _ in range(params.max_iterations):
        # Derivative first, from the pre-update iterate:
        # |f'(z)|^2 = degree^2 * |z^(degree-1)|^2.
        if cubic:
            dz2 = dz2 * (9.0 * qlength2(qsquare(z)))
            z = qcube(z)
        else:
            dz2 = dz2 * (4.0 * qlength2(z))
            z = qsquare(z)
        z = Quaternion(z.w + c.w, z.x + c.x, z.y + c.y, z.z + c.z)
        m2 = qlength2(z)
        if m2 > escape:
            break
        n += 1
    if m2 == 0.0 or dz2 == 0.0:
        # Orbit collapsed onto the critical point (or the derivative
        # underflowed); the quotient is undefined, treat as on the set.
        d = 0.0
    else:
        d = 0.25 * math.log(m2) * math.sqrt(m2 / dz2)
    return DistanceSample(d, (float(n), 0.0, 0.0, 0.0))


def mandelbulb_distance(p: Vec3, params: MandelbulbParams) -> DistanceSample:
    """Distance estimate from p to the Mandelbulb of w^power + p.

    Also accumulates the orbit trap: the componentwise minimum over
    iterations of (|w.x|, |w.y|, |w.z|, |w|^2), sampled with the freshly
    updated w but the previous |w|^2 (the reference loop interleaves the
    two updates that way, and shading is tuned against it).
    """
    x = p.x
    y = p.y
    z = p.z
    escape = params.escape_radius_sq
    fp = float(params.power)
    wx = x
    wy = y
    wz = z
    m = wx * wx + wy * wy + wz * wz
    tx = abs(wx)
    ty = abs(wy)
    tz = abs(wz)
    tw = m
    dz = 1.0
    for _ in range(params.max_iterations):
        r = math.sqrt(m)
        dz = fp * math.pow(r, fp - 1.0) * dz + 1.0
        if r == 0.0:
            # r^power of the origin is the zero vector (continuity as r->0),
            # so the iterate becomes just the added constant.
            wx = x
            wy = y
            wz = z
        else:
            ratio = wy / r
            if ratio > 1.0:
                ratio = 1.0
            elif ratio < -1.0:
                ratio = -1.0
            b = fp * math.acos(ratio)
            a = fp * math.atan2(wx, wz)
            rn = math.pow(r, fp)
            sb = math.sin(b)
            cb = math.cos(b)
            sa = math.sin(a)
            ca = math.cos(a)
            wx = rn * sb * sa + x
            wy = rn * cb + y
            wz = rn * sb * ca + z
        ax = abs(wx)
        ay = abs(wy)
        az = abs(wz)
        if ax < tx:
            tx = ax
        if ay < ty:
            ty = ay
        if az < tz:
            tz = az
        if m < tw:
            tw = m
        m = wx * wx + wy * wy + wz * wz
        if m > escape:
            break
    if m == 0.0:
        d = 0.0
    else:
        d = 0.25 * math.log(m) * math.sqrt(m) / dz
    return DistanceSample(d, (m, ty, tz, tw))


# Tetrahedron vertices of the gradient stencil, in evaluation order.
TETRAHEDRON = (
    (1.0, -1.0, -1.0),
    (-1.0, -1.0, 1.0),
    (-1.0, 1.0, -1.0),
    (1.0, 1.0, 1.0),
)


def estimate_normal(field: Callable[[Vec3], float], p: Vec3, precis: float) -> Vec3:
    """Unit gradient direction of a scalar field at p.

    Four field evaluations at the vertices of a tetrahedron of radius
    h = 0.5773 * precis; the vertex-weighted sum is proportional to the
    gradient (exactly so for linear and quadratic fields, since the
    vertices sum to zero and their outer products sum to 4*I).

    Raises DegenerateGradient when the pre-normalization vector is shorter
    than 1e-20; callers substitute the inverse ray direction.
    """
    h = NORMAL_STEP_SCALE * precis
    f0 = field(Vec3(p.x + h, p.y - h, p.z - h))
    f1 = field(Vec3(p.x - h, p.y - h, p.z + h))
    f2 = field(Vec3(p.x - h, p.y + h, p.z - h))
    f3 = field(Vec3(p.x + h, p.y + h, p.z + h))
    mx = f0 - f1 - f2 + f3
    my = -f0 - f1 + f2 + f3
    mz = -f0 + f1 - f2 + f3
    length = math.sqrt(mx * mx + my * my + mz * mz)
    if length < 1e-20:
        raise DegenerateGradient("flat field, no gradient direction")
    return Vec3(mx / length, my / length, mz / length)
