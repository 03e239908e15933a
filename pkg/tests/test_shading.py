import math
import random

import pytest

import fractalmarch.shading as shading
from fractalmarch.marcher import Ray, intersect_instance
from fractalmarch.quatmath import Vec3
from fractalmarch.scene import scene_from_dict
from fractalmarch.shading import (
    ShadingParams,
    background,
    julia_albedo,
    mandelbulb_albedo,
    phong,
    reflect,
    schlick_fresnel,
    trace_radiance,
)


def _unit(rng):
    while True:
        v = (rng.gauss(0, 1), rng.gauss(0, 1), rng.gauss(0, 1))
        n = math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2)
        if n > 1e-6:
            return Vec3(v[0] / n, v[1] / n, v[2] / n)


def _sphere_scene(extra_instances=(), **shading_overrides):
    doc = {
        "schema": 1,
        "camera": {"position": [0, 0, -3], "target": [0, 0, 0],
                   "width": 16, "height": 16},
        "shading": shading_overrides,
        "instances": [
            {"kind": "julia", "c": [0, 0, 0, 0], "degree": 3},
            *extra_instances,
        ],
    }
    return scene_from_dict(doc)


class TestSchlickFresnel:
    def test_normal_incidence_returns_f0(self):
        f0 = (0.04, 0.1, 0.5)
        out = schlick_fresnel(Vec3(0, 0, 1), Vec3(0, 0, -1), f0)
        assert out == f0

    def test_grazing_incidence_returns_one(self):
        out = schlick_fresnel(Vec3(1, 0, 0), Vec3(0, 0, -1), (0.04, 0.04, 0.04))
        for c in out:
            assert abs(c - 1.0) < 1e-12

    def test_half_cosine_value(self):
        # cos = 0.5: f = 0.04 + 0.96 * 0.5^5 = 0.07
        incident = Vec3(0.0, math.sin(math.pi / 3), -0.5)  # -<i,n> = 0.5 for n=(0,0,-1)...
        # build explicitly: choose n = (0,0,1), incident with i.z = -0.5
        s = math.sqrt(1 - 0.25)
        incident = Vec3(s, 0.0, -0.5)
        out = schlick_fresnel(incident, Vec3(0, 0, 1), (0.04, 0.04, 0.04))
        for c in out:
            assert abs(c - 0.07) < 1e-12

    def test_monotone_in_one_minus_cos(self):
        rng = random.Random(31)
        for _ in range(50):
            f0 = tuple(rng.uniform(0.0, 1.0) for _ in range(3))
            prev = None
            for cos in (1.0, 0.8, 0.6, 0.4, 0.2, 0.0):
                s = math.sqrt(1.0 - cos * cos)
                out = schlick_fresnel(Vec3(s, 0.0, -cos), Vec3(0, 0, 1), f0)
                if prev is not None:
                    assert all(a >= b - 1e-15 for a, b in zip(out, prev))
                prev = out


class TestPhong:
    def test_light_perpendicular_gives_ambient_only(self):
        params = ShadingParams(light_direction=Vec3(1, 0, 0))
        albedo = (0.5, 0.25, 0.125, 1.0)
        # view along the light so the specular reflection points away
        out = phong(albedo, Vec3(0, 0, 1), Vec3(1, 0, 0), params)
        amb = params.ambient
        for i in range(3):
            assert abs(out[i] - amb[i] * albedo[i]) < 1e-12

    def test_aligned_light_and_view(self):
        params = ShadingParams(light_direction=Vec3(0, 0, 1))
        albedo = (0.5, 0.25, 0.125, 1.0)
        out = phong(albedo, Vec3(0, 0, 1), Vec3(0, 0, 1), params)
        amb = params.ambient
        lc = params.light_color
        for i in range(3):
            expected = amb[i] * albedo[i] + 1.0 * albedo[i] * lc[i] + 1.0 * lc[i]
            assert abs(out[i] - expected) < 1e-12

    def test_black_albedo_leaves_pure_specular(self):
        params = ShadingParams(light_direction=Vec3(0, 0, 1))
        out = phong((0.0, 0.0, 0.0, 0.0), Vec3(0, 0, 1), Vec3(0, 0, 1), params)
        for i in range(3):
            assert abs(out[i] - params.light_color[i]) < 1e-12


class TestReflect:
    def test_mirror_law(self):
        rng = random.Random(37)
        for _ in range(200):
            d = _unit(rng)
            n = _unit(rng)
            r = reflect(d, n)
            rn = r.x * n.x + r.y * n.y + r.z * n.z
            dn = d.x * n.x + d.y * n.y + d.z * n.z
            assert abs(rn + dn) < 1e-9
            # unit preserved
            assert abs(r.x**2 + r.y**2 + r.z**2 - 1.0) < 1e-9


class TestAlbedos:
    def test_julia_palette_base_at_zero_iterations(self):
        params = ShadingParams()
        pos = Vec3(0.0, -1.0, 0.0)  # tint factor is exactly the base there
        out = julia_albedo(pos, (0.0, 0, 0, 0), 0, params)
        for i in range(3):
            expected = params.albedo_scale * params.julia_palette_a[i] * 0.85
            assert abs(out[i] - expected) < 1e-12
        assert out[3] == 1.0

    def test_julia_palette_monotone_in_iterations(self):
        params = ShadingParams()
        pos = Vec3(0.0, 0.0, 0.0)
        values = [julia_albedo(pos, (float(n), 0, 0, 0), 0, params) for n in range(6)]
        for a, b in zip(values, values[1:]):
            assert a != b

    def test_julia_boost_at_last_shaded_depth(self):
        params = ShadingParams()
        pos = Vec3(0.2, 0.3, 0.1)
        aux = (3.0, 0, 0, 0)
        plain = julia_albedo(pos, aux, 0, params)
        boosted = julia_albedo(pos, aux, params.max_recursion_depth - 1, params)
        for i in range(4):
            assert boosted[i] >= plain[i] + params.max_depth_boost * (1 - 1e-9)

    def test_bulb_trap_zero_gives_first_color(self):
        params = ShadingParams()
        out = mandelbulb_albedo((123.0, 0.0, 0.0, 0.0), params)
        assert out[:3] == params.bulb_color_a
        assert out[3] == 1.0

    def test_bulb_trap_one_gives_saturated_mix(self):
        params = ShadingParams()
        out = mandelbulb_albedo((123.0, 1.0, 1.0, 1.0), params)
        for i in range(3):
            expected = params.bulb_color_b[i] + 0.5 * (params.bulb_color_c[i] - params.bulb_color_b[i])
            assert abs(out[i] - expected) < 1e-12

    def test_bulb_intermediate_is_convex_combination(self):
        params = ShadingParams()
        ty, tz = 0.3, 0.8
        out = mandelbulb_albedo((1.0, ty, tz, 0.5), params)
        for i in range(3):
            mix1 = params.bulb_color_a[i] + ty * (params.bulb_color_b[i] - params.bulb_color_a[i])
            expected = mix1 + 0.5 * tz * (params.bulb_color_c[i] - mix1)
            assert abs(out[i] - expected) < 1e-12
            lo = min(params.bulb_color_a[i], params.bulb_color_b[i], params.bulb_color_c[i])
            hi = max(params.bulb_color_a[i], params.bulb_color_b[i], params.bulb_color_c[i])
            assert lo - 1e-12 <= out[i] <= hi + 1e-12


class TestBackground:
    def test_vertical_gradient_endpoints(self):
        params = ShadingParams()
        top = background(Vec3(0, 1, 0), params)
        bottom = background(Vec3(0, -1, 0), params)
        assert top[:3] == params.background_top
        assert bottom[:3] == params.background_bottom


class TestTraceRadiance:
    def test_miss_returns_background(self):
        scene = scene_from_dict({
            "schema": 1,
            "camera": {"position": [0, 0, -3], "target": [0, 0, 0]},
            "instances": [],
        })
        ray = Ray(Vec3(0, 0, -3), Vec3(0, 0, 1))
        out = trace_radiance(ray, 0, scene, scene.shading)
        assert out == background(ray.dir, scene.shading)

    def test_depth_budget_exhausted_returns_background(self):
        scene = _sphere_scene()
        ray = Ray(Vec3(0, 0, -3), Vec3(0, 0, 1))
        out = trace_radiance(ray, scene.shading.max_recursion_depth, scene, scene.shading)
        assert out == background(ray.dir, scene.shading)

    def test_zero_reflectance_is_pure_phong(self):
        scene = _sphere_scene(reflectance=0.0, max_depth_boost=0.0)
        inst = scene.instances[0]
        ray = Ray(Vec3(0, 0, -3), Vec3(0, 0, 1))
        out = trace_radiance(ray, 0, scene, scene.shading)
        hit = intersect_instance(ray, inst)
        pos = Vec3(0.0, 0.0, -3.0 + hit.t)
        albedo = julia_albedo(pos, hit.aux, 0, inst.shading)
        expected = phong(albedo, hit.normal, Vec3(0, 0, -1), scene.shading)
        assert out == expected

    def test_depth_budget_difference_is_weighted_secondary_term(self):
        # Sphere A at the origin; sphere B placed along the reflection of
        # the chosen primary ray so deeper budgets see it.
        extra = [{"kind": "julia", "c": [0, 0, 0, 0], "degree": 3,
                  "transform": {"translate": [0.0, 2.23, -1.87]}}]
        ray = Ray(Vec3(0, 0.5, -3), Vec3(0, 0, 1))
        scene1 = _sphere_scene(extra, max_recursion_depth=1, max_depth_boost=0.0)
        scene2 = _sphere_scene(extra, max_recursion_depth=2, max_depth_boost=0.0)
        c1 = trace_radiance(ray, 0, scene1, scene1.shading)
        c2 = trace_radiance(ray, 0, scene2, scene2.shading)
        assert c1 != c2
        # reconstruct the weighted secondary difference
        inst = scene1.instances[0]
        hit = intersect_instance(ray, inst)
        hx, hy, hz = 0.0, 0.5, -3.0 + hit.t
        albedo = julia_albedo(Vec3(hx, hy, hz), hit.aux, 0, inst.shading)
        n = hit.normal
        rd = reflect(ray.dir, n)
        offset = 10.0 * inst.march.precis
        refl_ray = Ray(Vec3(hx + offset * n.x, hy + offset * n.y, hz + offset * n.z), rd)
        fr = schlick_fresnel(ray.dir, n, (albedo[0], albedo[1], albedo[2]))
        sec1 = trace_radiance(refl_ray, 1, scene1, scene1.shading)
        sec2 = trace_radiance(refl_ray, 1, scene2, scene2.shading)
        refl = inst.shading.reflectance
        for i in range(3):
            expected = refl * fr[i] * (sec2[i] - sec1[i])
            assert abs((c2[i] - c1[i]) - expected) < 1e-12

    def test_recursion_depth_never_exceeds_budget(self, monkeypatch):
        scene = _sphere_scene()
        depths = []
        original = shading.trace_radiance

        def probe(ray, depth, sc, params):
            depths.append(depth)
            return original(ray, depth, sc, params)

        monkeypatch.setattr(shading, "trace_radiance", probe)
        ray = Ray(Vec3(0, 0.5, -3), Vec3(0, 0, 1))
        probe(ray, 0, scene, scene.shading)
        assert max(depths) <= scene.shading.max_recursion_depth

    def test_energy_stays_bounded(self):
        scene = _sphere_scene()
        params = scene.shading
        # conservative ceiling: brightest albedo, full diffuse+specular,
        # then the geometric series of reflection bounces
        albedo_max = params.albedo_scale * max(params.julia_palette_b) + params.max_depth_boost
        phong_max = max(params.ambient) * albedo_max + albedo_max + 1.0
        rho_f = params.reflectance * max(1.0, albedo_max)
        assert rho_f < 1.0
        bound = phong_max / (1.0 - rho_f)
        rng = random.Random(41)
        for _ in range(100):
            d = _unit(rng)
            ray = Ray(Vec3(0, 0, -3), d)
            out = trace_radiance(ray, 0, scene, params)
            for c in out:
                assert math.isfinite(c)
                assert 0.0 <= c < bound


class TestShadingParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ShadingParams(reflectance=1.5)
        with pytest.raises(ValueError):
            ShadingParams(max_recursion_depth=0)
        with pytest.raises(ValueError):
            ShadingParams(light_direction=Vec3(0, 0, 0))

    def test_light_direction_normalized(self):
        p = ShadingParams(light_direction=Vec3(0, 3, 0))
        assert p.light_direction == Vec3(0, 1, 0)
