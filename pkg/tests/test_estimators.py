import math
import random

import pytest

from fractalmarch.errors import DegenerateGradient
from fractalmarch.estimators import (
    JuliaParams,
    MandelbulbParams,
    estimate_normal,
    julia_distance,
    mandelbulb_distance,
)
from fractalmarch.quatmath import Quaternion, Vec3

C0 = Quaternion(0.0, 0.0, 0.0, 0.0)
CUBIC_C0 = JuliaParams(c=C0, degree=3)


def _unit(rng):
    while True:
        v = (rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1))
        n = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
        if n > 1e-6:
            return Vec3(v[0] / n, v[1] / n, v[2] / n)


class TestJuliaDistance:
    def test_hand_trace_at_two(self):
        # c=0, degree 3, p=(2,0,0):
        #   i=0: dz2 = 9*|z^2|^2 = 9*16 = 144; z = 8; m2 = 64 <= 256, n=1
        #   i=1: dz2 *= 9*4096 -> 5308416; z = 512; m2 = 262144 > 256, break
        #   d = 0.25*ln(262144)*sqrt(262144/5308416) = 0.25*18ln2*(2/9) = ln 2
        for p in (Vec3(2, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 2),
                  Vec3(-2, 0, 0), Vec3(0, -2, 0), Vec3(0, 0, -2)):
            sample = julia_distance(p, CUBIC_C0)
            assert abs(sample.d - math.log(2.0)) < 1e-9
            assert sample.aux == (1.0, 0.0, 0.0, 0.0)

    def test_far_field_analytic(self):
        # For c=0 the escape-rate potential is exactly log|p|, so the
        # estimator approaches 0.5*|p|*log|p|.
        sample = julia_distance(Vec3(10.0, 0.0, 0.0), CUBIC_C0)
        assert abs(sample.d / (0.5 * 10.0 * math.log(10.0)) - 1.0) < 1e-9

    def test_far_field_ratio_random(self):
        rng = random.Random(101)
        for _ in range(1000):
            r = rng.uniform(2.0, 20.0)
            u = _unit(rng)
            p = Vec3(u.x * r, u.y * r, u.z * r)
            d = julia_distance(p, CUBIC_C0).d
            ratio = d / (0.5 * r * math.log(r))
            assert 0.99 <= ratio <= 1.01

    def test_lower_bound_near_unit_sphere(self):
        # The c=0 cubic Julia set is the unit sphere. Near it the estimate
        # never exceeds the true distance |p| - 1; the far-field value
        # 0.5*|p|*ln|p| overtakes |p| - 1 beyond |p| ~ 4.92, so the pure
        # lower-bound region ends there.
        rng = random.Random(103)
        for _ in range(1000):
            r = rng.uniform(1.1, 4.5)
            u = _unit(rng)
            p = Vec3(u.x * r, u.y * r, u.z * r)
            d = julia_distance(p, CUBIC_C0).d
            assert d <= (r - 1.0) * (1.0 + 1e-6)

    def test_clamped_step_never_overshoots(self):
        # What sphere tracing actually relies on: the marching step
        # min(d, step_clamp) never crosses the surface.
        rng = random.Random(104)
        clamp = 0.2
        for _ in range(1000):
            r = rng.uniform(1.1, 20.0)
            u = _unit(rng)
            p = Vec3(u.x * r, u.y * r, u.z * r)
            d = julia_distance(p, CUBIC_C0).d
            assert min(d, clamp) <= (r - 1.0) * (1.0 + 1e-6)

    def test_on_unit_sphere(self):
        # |z| stays 1 forever; the estimate sits at or below any marching
        # precision. (For inexact unit vectors the orbit drifts off 1 in
        # the last ulp and may escape late, still yielding a tiny d.)
        exact = julia_distance(Vec3(1.0, 0.0, 0.0), CUBIC_C0)
        assert exact.d == 0.0
        assert exact.aux[0] == 200.0
        rng = random.Random(107)
        for _ in range(50):
            p = _unit(rng)
            sample = julia_distance(p, CUBIC_C0)
            assert sample.d < 2.5e-4

    def test_degree_two_matches_scalar_recursion(self):
        # Real starting point and real c stay on the real line, where the
        # quaternion loop reduces to a scalar one.
        c = Quaternion(-1.0, 0.0, 0.0, 0.0)
        params = JuliaParams(c=c, degree=2)
        z = 2.0
        dz2 = 1.0
        m2 = 0.0
        n = 0
        for _ in range(200):
            dz2 *= 4.0 * z * z
            z = z * z - 1.0
            m2 = z * z
            if m2 > 256.0:
                break
            n += 1
        expected = 0.25 * math.log(m2) * math.sqrt(m2 / dz2)
        sample = julia_distance(Vec3(2.0, 0.0, 0.0), params)
        assert abs(sample.d - expected) < 1e-12
        assert sample.aux[0] == float(n)

    def test_inside_signalling_is_raw(self):
        # Inside the set the formula may go non-positive; it is returned
        # as-is (hit/miss is the marcher's decision).
        d = julia_distance(Vec3(0.2, 0.1, 0.0), CUBIC_C0).d
        assert d <= 0.0

    def test_deterministic(self):
        p = Vec3(0.7, -0.3, 1.1)
        c = Quaternion(-0.2, 0.5, 0.1, -0.4)
        params = JuliaParams(c=c, degree=3, max_iterations=50)
        a = julia_distance(p, params)
        b = julia_distance(p, params)
        assert a.d == b.d and a.aux == b.aux

    def test_param_validation(self):
        with pytest.raises(ValueError):
            JuliaParams(c=C0, degree=5)
        with pytest.raises(ValueError):
            JuliaParams(c=C0, max_iterations=0)
        with pytest.raises(ValueError):
            JuliaParams(c=C0, escape_radius_sq=1.0)


class TestMandelbulbDistance:
    def test_hand_trace_z_axis(self):
        # p=(0,0,2): m=4; dz = 8*2^7+1 = 1025; b=4pi, a=0 so w=(0,256,2);
        # m=65540 > 256; d = 0.25*ln(65540)*sqrt(65540)/1025.
        expected = 0.25 * math.log(65540.0) * math.sqrt(65540.0) / 1025.0
        sample = mandelbulb_distance(Vec3(0.0, 0.0, 2.0), MandelbulbParams())
        assert abs(sample.d - expected) < 1e-12
        assert abs(sample.d - 0.6925) < 1e-3
        assert sample.aux[0] == 65540.0

    def test_hand_trace_polar_axis(self):
        # p=(0,2,0): the first iterate also has r=2, but +c now lands along
        # the pole: w=(0,256,0)+(0,2,0)=(0,258,0), m=66564, giving a nearby
        # but distinct value (the +c direction matters).
        expected = 0.25 * math.log(66564.0) * math.sqrt(66564.0) / 1025.0
        sample = mandelbulb_distance(Vec3(0.0, 2.0, 0.0), MandelbulbParams())
        assert abs(sample.d - expected) < 1e-12

    def test_origin_and_deep_inside(self):
        params = MandelbulbParams()
        assert mandelbulb_distance(Vec3(0.0, 0.0, 0.0), params).d == 0.0
        rng = random.Random(109)
        for _ in range(100):
            u = _unit(rng)
            r = rng.uniform(0.0, 0.05)
            d = mandelbulb_distance(Vec3(u.x * r, u.y * r, u.z * r), params).d
            assert d <= 2.5e-4

    def test_bounded_within_radius(self):
        # Dense sampling outside radius 1.5 never reports inside/at-set.
        rng = random.Random(113)
        params = MandelbulbParams()
        for _ in range(100_000):
            u = _unit(rng)
            r = rng.uniform(1.5, 6.0)
            d = mandelbulb_distance(Vec3(u.x * r, u.y * r, u.z * r), params).d
            assert d > 0.0

    def test_orbit_trap_non_increasing(self):
        rng = random.Random(127)
        for _ in range(200):
            p = Vec3(rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2))
            prev = None
            for k in range(1, 7):
                aux = mandelbulb_distance(p, MandelbulbParams(max_iterations=k)).aux
                trap = aux[1:]
                if prev is not None:
                    assert all(t <= pt + 1e-15 for t, pt in zip(trap, prev))
                prev = trap

    def test_aux_layout(self):
        # aux = (final |w|^2, trap.y, trap.z, trap |w|^2-min)
        p = Vec3(0.3, 0.4, 0.5)
        aux = mandelbulb_distance(p, MandelbulbParams()).aux
        assert len(aux) == 4
        assert aux[3] <= p.x * p.x + p.y * p.y + p.z * p.z + 1e-15

    def test_deterministic(self):
        p = Vec3(0.9, -0.2, 0.4)
        a = mandelbulb_distance(p, MandelbulbParams())
        b = mandelbulb_distance(p, MandelbulbParams())
        assert a.d == b.d and a.aux == b.aux

    def test_param_validation(self):
        with pytest.raises(ValueError):
            MandelbulbParams(power=1)
        with pytest.raises(ValueError):
            MandelbulbParams(max_iterations=0)


class TestEstimateNormal:
    def test_linear_field_exact(self):
        n = estimate_normal(lambda q: q.x, Vec3(0.3, -0.7, 2.0), 2.5e-4)
        assert abs(n.x - 1.0) < 1e-12
        assert abs(n.y) < 1e-12 and abs(n.z) < 1e-12

    def test_sphere_field(self):
        def sphere(q):
            return math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z) - 1.0

        n = estimate_normal(sphere, Vec3(0.0, 0.0, 2.0), 2.5e-4)
        assert abs(n.x) < 1e-6 and abs(n.y) < 1e-6 and abs(n.z - 1.0) < 1e-6

    def test_quadratic_field_exact_direction(self):
        # The stencil is exact for quadratics: gradient of |q|^2 at (1,2,3)
        # is (2,4,6); expect its direction up to normalization.
        def field(q):
            return q.x * q.x + q.y * q.y + q.z * q.z

        n = estimate_normal(field, Vec3(1.0, 2.0, 3.0), 2.5e-4)
        g = math.sqrt(4.0 + 16.0 + 36.0)
        assert abs(n.x - 2.0 / g) < 1e-9
        assert abs(n.y - 4.0 / g) < 1e-9
        assert abs(n.z - 6.0 / g) < 1e-9

    def test_flat_field_raises(self):
        with pytest.raises(DegenerateGradient):
            estimate_normal(lambda q: 3.0, Vec3(0.0, 0.0, 0.0), 2.5e-4)

    def _central_difference(self, field, p, h):
        gx = (field(Vec3(p.x + h, p.y, p.z)) - field(Vec3(p.x - h, p.y, p.z))) / (2 * h)
        gy = (field(Vec3(p.x, p.y + h, p.z)) - field(Vec3(p.x, p.y - h, p.z))) / (2 * h)
        gz = (field(Vec3(p.x, p.y, p.z + h)) - field(Vec3(p.x, p.y, p.z - h))) / (2 * h)
        n = math.sqrt(gx * gx + gy * gy + gz * gz)
        return Vec3(gx / n, gy / n, gz / n)

    @pytest.mark.parametrize("kind", ["julia", "mandelbulb"])
    def test_matches_central_differences(self, kind):
        # Strict comparison on shells where the fields are smooth, the
        # precondition both stencils share: c=0 Julia (exactly 0.5*r*ln r
        # outside the unit sphere) and the Mandelbulb beyond ~2^(1/2),
        # where every orbit escapes on the first iteration.
        precis = 2.5e-4
        h = 0.5773 * precis
        if kind == "julia":
            field = lambda q: julia_distance(q, CUBIC_C0).d
            shell = (1.1, 1.9)
        else:
            params = MandelbulbParams()
            field = lambda q: mandelbulb_distance(q, params).d
            shell = (1.45, 1.8)
        rng = random.Random(131)
        checked = 0
        while checked < 100:
            u = _unit(rng)
            r = rng.uniform(*shell)
            p = Vec3(u.x * r, u.y * r, u.z * r)
            if abs(field(p)) <= 10 * h:
                continue
            n = estimate_normal(field, p, precis)
            ref = self._central_difference(field, p, h / 10.0)
            dot = max(-1.0, min(1.0, n.x * ref.x + n.y * ref.y + n.z * ref.z))
            assert math.degrees(math.acos(dot)) < 0.5
            checked += 1

    def test_central_difference_statistics_wide_shell(self):
        # Where the fields carry escape-count seams and triplex pole
        # passes they are only piecewise smooth; there both stencils
        # degrade together. Statistically the agreement stays tight.
        precis = 2.5e-4
        h = 0.5773 * precis
        params = MandelbulbParams()
        field = lambda q: mandelbulb_distance(q, params).d
        rng = random.Random(137)
        errs = []
        while len(errs) < 500:
            u = _unit(rng)
            r = rng.uniform(1.05, 1.8)
            p = Vec3(u.x * r, u.y * r, u.z * r)
            if abs(field(p)) <= 10 * h:
                continue
            n = estimate_normal(field, p, precis)
            ref = self._central_difference(field, p, h / 10.0)
            dot = max(-1.0, min(1.0, n.x * ref.x + n.y * ref.y + n.z * ref.z))
            errs.append(math.degrees(math.acos(dot)))
        errs.sort()
        assert errs[len(errs) // 2] < 0.01  # median
        assert sum(e < 0.5 for e in errs) >= int(0.98 * len(errs))
