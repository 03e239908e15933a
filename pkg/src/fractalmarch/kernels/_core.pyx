# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled rendering kernel.

A transcription of the pure-Python path (estimators, marcher, shading,
primary-ray generation) into C, preserving the exact order of floating
point operations so both backends produce bit-identical framebuffers.
The build pins -ffp-contract=off for the same reason. When editing, change
the Python reference first and mirror it here.
"""

from libc.math cimport acos, atan2, cos, fabs, isfinite, log, pow, sin, sqrt, INFINITY
from libc.stdlib cimport free, malloc

from .flat import flatten_scene

NAME = "cython"


def prepare(scene):
    return flatten_scene(scene)


cdef struct InstC:
    int kind            # 0 julia, 1 mandelbulb
    int ipow            # degree or power
    int max_iter
    int max_steps
    int plane0
    int plane1
    double cw, cx, cy, cz
    double escape
    double precis
    double tmax
    double clamp
    double bound
    double w2o[12]
    double refl
    double ascale
    double boost
    double jpal[6]
    double bpal[9]


cdef struct CtxC:
    int n
    InstC* inst
    const double* planes
    double light[3]
    double lcol[3]
    double amb[3]
    double bgt[3]
    double bgb[3]
    double spec_exp
    double gamma_exp
    int max_depth
    double cpos[3]
    double cr[3]
    double cu[3]
    double cf[3]
    double half_w
    double half_h
    int width
    int height
    double julia_falloff
    double tint_base
    double tint_span
    double bulb_mix
    double refl_offset
    double normal_scale


cdef struct HitC:
    double t
    int steps
    double aux[4]
    double nx, ny, nz


# ---------------------------------------------------------------------------
# Distance estimators (see estimators.py for the derivation).


cdef double julia_dist_c(const InstC* inst, double px, double py, double pz,
                         double* aux) noexcept nogil:
    cdef double zw = px
    cdef double zx = py
    cdef double zy = pz
    cdef double zz = 0.0
    cdef double dz2 = 1.0
    cdef double m2 = 0.0
    cdef double escape = inst.escape
    cdef bint cubic = inst.ipow == 3
    cdef int n = 0
    cdef int it
    cdef double sw, sx, sy, sz, mm, a2, s3, d
    for it in range(inst.max_iter):
        if cubic:
            # qsquare(z), then its squared norm for the derivative factor
            sw = zw * zw - zx * zx - zy * zy - zz * zz
            sx = 2.0 * zw * zx
            sy = 2.0 * zw * zy
            sz = 2.0 * zw * zz
            dz2 = dz2 * (9.0 * (sw * sw + sx * sx + sy * sy + sz * sz))
            # qcube(z) in closed form
            mm = zx * zx + zy * zy + zz * zz
            a2 = zw * zw
            s3 = 3.0 * a2 - mm
            zw = zw * (a2 - 3.0 * mm)
            zx = zx * s3
            zy = zy * s3
            zz = zz * s3
        else:
            dz2 = dz2 * (4.0 * (zw * zw + zx * zx + zy * zy + zz * zz))
            sw = zw * zw - zx * zx - zy * zy - zz * zz
            sx = 2.0 * zw * zx
            sy = 2.0 * zw * zy
            sz = 2.0 * zw * zz
            zw = sw
            zx = sx
            zy = sy
            zz = sz
        zw = zw + inst.cw
        zx = zx + inst.cx
        zy = zy + inst.cy
        zz = zz + inst.cz
        m2 = zw * zw + zx * zx + zy * zy + zz * zz
        if m2 > escape:
            break
        n += 1
    if m2 == 0.0 or dz2 == 0.0:
        d = 0.0
    else:
        d = 0.25 * log(m2) * sqrt(m2 / dz2)
    aux[0] = <double>n
    aux[1] = 0.0
    aux[2] = 0.0
    aux[3] = 0.0
    return d


cdef double bulb_dist_c(const InstC* inst, double px, double py, double pz,
                        double* aux) noexcept nogil:
    cdef double x = px
    cdef double y = py
    cdef double z = pz
    cdef double escape = inst.escape
    cdef double fp = <double>inst.ipow
    cdef double wx = x
    cdef double wy = y
    cdef double wz = z
    cdef double m = wx * wx + wy * wy + wz * wz
    cdef double tx = fabs(wx)
    cdef double ty = fabs(wy)
    cdef double tz = fabs(wz)
    cdef double tw = m
    cdef double dz = 1.0
    cdef int it
    cdef double r, ratio, b, a, rn, sb, cb, sa, ca, ax, ay, az, d
    for it in range(inst.max_iter):
        r = sqrt(m)
        dz = fp * pow(r, fp - 1.0) * dz + 1.0
        if r == 0.0:
            wx = x
            wy = y
            wz = z
        else:
            ratio = wy / r
            if ratio > 1.0:
                ratio = 1.0
            elif ratio < -1.0:
                ratio = -1.0
            b = fp * acos(ratio)
            a = fp * atan2(wx, wz)
            rn = pow(r, fp)
            sb = sin(b)
            cb = cos(b)
            sa = sin(a)
            ca = cos(a)
            wx = rn * sb * sa + x
            wy = rn * cb + y
            wz = rn * sb * ca + z
        ax = fabs(wx)
        ay = fabs(wy)
        az = fabs(wz)
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
        d = 0.25 * log(m) * sqrt(m) / dz
    aux[0] = m
    aux[1] = ty
    aux[2] = tz
    aux[3] = tw
    return d


cdef inline double dist_c(const InstC* inst, double px, double py, double pz,
                          double* aux) noexcept nogil:
    if inst.kind == 0:
        return julia_dist_c(inst, px, py, pz, aux)
    return bulb_dist_c(inst, px, py, pz, aux)


cdef bint normal_c(const CtxC* ctx, const InstC* inst, double px, double py, double pz,
                   double* nx, double* ny, double* nz) noexcept nogil:
    cdef double h = ctx.normal_scale * inst.precis
    cdef double scratch[4]
    cdef double f0 = dist_c(inst, px + h, py - h, pz - h, scratch)
    cdef double f1 = dist_c(inst, px - h, py - h, pz + h, scratch)
    cdef double f2 = dist_c(inst, px - h, py + h, pz - h, scratch)
    cdef double f3 = dist_c(inst, px + h, py + h, pz + h, scratch)
    cdef double mx = f0 - f1 - f2 + f3
    cdef double my = -f0 - f1 + f2 + f3
    cdef double mz = -f0 + f1 - f2 + f3
    cdef double length = sqrt(mx * mx + my * my + mz * mz)
    if length < 1e-20:
        return 0
    nx[0] = mx / length
    ny[0] = my / length
    nz[0] = mz / length
    return 1


# ---------------------------------------------------------------------------
# Marching.


cdef bint raycast_c(const CtxC* ctx, const InstC* inst,
                    double ox, double oy, double oz,
                    double dx, double dy, double dz,
                    double t_limit,
                    double* t_out, double* aux_out, int* hit_steps,
                    int* steps_out) noexcept nogil:
    cdef double b = ox * dx + oy * dy + oz * dz
    cdef double c = ox * ox + oy * oy + oz * oz - inst.bound * inst.bound
    cdef double disc = b * b - c
    steps_out[0] = 0
    if disc < 0.0:
        return 0
    cdef double s = sqrt(disc)
    cdef double t_enter = -b - s
    cdef double t_exit = -b + s
    if t_exit < 0.0:
        return 0
    if t_enter < 0.0:
        t_enter = 0.0
    cdef double t0 = t_enter
    cdef double t1 = t_exit
    if t0 < inst.precis:
        t0 = inst.precis
    if t1 > inst.tmax:
        t1 = inst.tmax
    if t1 > t_limit:
        t1 = t_limit
    cdef int pi
    cdef const double* pl
    cdef double num, den, tp
    for pi in range(inst.plane0, inst.plane1):
        pl = ctx.planes + pi * 6
        num = (ox - pl[0]) * pl[3] + (oy - pl[1]) * pl[4] + (oz - pl[2]) * pl[5]
        den = dx * pl[3] + dy * pl[4] + dz * pl[5]
        if den > 0.0:
            tp = -num / den
            if tp < t1:
                t1 = tp
        elif den < 0.0:
            tp = -num / den
            if tp > t0:
                t0 = tp
        elif num > 0.0:
            return 0
    if t0 > t1:
        return 0
    cdef double precis = inst.precis
    cdef double clamp = inst.clamp
    cdef double t = t0
    cdef int steps = 0
    cdef double d
    while steps < inst.max_steps:
        d = dist_c(inst, ox + t * dx, oy + t * dy, oz + t * dz, aux_out)
        steps += 1
        if d < precis:
            t_out[0] = t
            hit_steps[0] = steps
            steps_out[0] = steps
            return 1
        t = t + (d if d < clamp else clamp)
        if t > t1:
            break
    steps_out[0] = steps
    return 0


cdef bint intersect_instance_c(const CtxC* ctx, const InstC* inst,
                               double ox, double oy, double oz,
                               double dx, double dy, double dz,
                               double best_t, HitC* out, int* steps_out) noexcept nogil:
    cdef const double* m = inst.w2o
    cdef double ox2 = m[0] * ox + m[1] * oy + m[2] * oz + m[3]
    cdef double oy2 = m[4] * ox + m[5] * oy + m[6] * oz + m[7]
    cdef double oz2 = m[8] * ox + m[9] * oy + m[10] * oz + m[11]
    cdef double dx2 = m[0] * dx + m[1] * dy + m[2] * dz
    cdef double dy2 = m[4] * dx + m[5] * dy + m[6] * dz
    cdef double dz2 = m[8] * dx + m[9] * dy + m[10] * dz
    cdef double dir_len = sqrt(dx2 * dx2 + dy2 * dy2 + dz2 * dz2)
    cdef double ux = dx2 / dir_len
    cdef double uy = dy2 / dir_len
    cdef double uz = dz2 / dir_len
    cdef double t_limit
    if isfinite(best_t):
        t_limit = best_t * dir_len
    else:
        t_limit = INFINITY
    cdef double t_obj
    cdef double aux[4]
    cdef int hit_steps
    if not raycast_c(ctx, inst, ox2, oy2, oz2, ux, uy, uz, t_limit,
                     &t_obj, aux, &hit_steps, steps_out):
        return 0
    cdef double px = ox2 + t_obj * ux
    cdef double py = oy2 + t_obj * uy
    cdef double pz = oz2 + t_obj * uz
    cdef double nox, noy, noz
    if not normal_c(ctx, inst, px, py, pz, &nox, &noy, &noz):
        # flat field at the hit: face the ray
        nox = -ux
        noy = -uy
        noz = -uz
    # normals map by the transpose of world->object
    cdef double nx = m[0] * nox + m[4] * noy + m[8] * noz
    cdef double ny = m[1] * nox + m[5] * noy + m[9] * noz
    cdef double nz = m[2] * nox + m[6] * noy + m[10] * noz
    cdef double nl = sqrt(nx * nx + ny * ny + nz * nz)
    cdef double t_world = t_obj / dir_len
    if t_world >= best_t:
        return 0
    out.t = t_world
    out.steps = hit_steps
    out.aux[0] = aux[0]
    out.aux[1] = aux[1]
    out.aux[2] = aux[2]
    out.aux[3] = aux[3]
    out.nx = nx / nl
    out.ny = ny / nl
    out.nz = nz / nl
    return 1


# ---------------------------------------------------------------------------
# Shading.


cdef void background_c(const CtxC* ctx, double dy, double* out) noexcept nogil:
    cdef double t = 0.5 * (dy + 1.0)
    out[0] = ctx.bgb[0] + t * (ctx.bgt[0] - ctx.bgb[0])
    out[1] = ctx.bgb[1] + t * (ctx.bgt[1] - ctx.bgb[1])
    out[2] = ctx.bgb[2] + t * (ctx.bgt[2] - ctx.bgb[2])
    out[3] = 1.0


cdef void julia_albedo_c(const CtxC* ctx, const InstC* inst,
                         double py, double aux0, int depth, double* out) noexcept nogil:
    cdef double n = aux0
    cdef double s = n / (n + ctx.julia_falloff)
    cdef double ty = 0.5 * (py + 1.0)
    if ty < 0.0:
        ty = 0.0
    elif ty > 1.0:
        ty = 1.0
    cdef double tint = ctx.tint_base + ctx.tint_span * ty
    cdef double scale = inst.ascale
    cdef const double* pal = inst.jpal
    out[0] = scale * (pal[0] + s * (pal[3] - pal[0])) * tint
    out[1] = scale * (pal[1] + s * (pal[4] - pal[1])) * tint
    out[2] = scale * (pal[2] + s * (pal[5] - pal[2])) * tint
    out[3] = 1.0
    cdef double boost
    if depth == ctx.max_depth - 1:
        boost = inst.boost
        out[0] = out[0] + boost
        out[1] = out[1] + boost
        out[2] = out[2] + boost
        out[3] = out[3] + boost


cdef void bulb_albedo_c(const InstC* inst, const double* aux, double mix,
                        double* out) noexcept nogil:
    cdef double ty = aux[1]
    cdef double tz = aux[2]
    if ty < 0.0:
        ty = 0.0
    elif ty > 1.0:
        ty = 1.0
    if tz < 0.0:
        tz = 0.0
    elif tz > 1.0:
        tz = 1.0
    cdef const double* pal = inst.bpal
    cdef double w = mix * tz
    cdef double r = pal[0] + ty * (pal[3] - pal[0])
    cdef double g = pal[1] + ty * (pal[4] - pal[1])
    cdef double b = pal[2] + ty * (pal[5] - pal[2])
    r = r + w * (pal[6] - r)
    g = g + w * (pal[7] - g)
    b = b + w * (pal[8] - b)
    out[0] = r
    out[1] = g
    out[2] = b
    out[3] = 1.0


cdef void phong_c(const CtxC* ctx, const double* albedo,
                  double nx, double ny, double nz,
                  double vx, double vy, double vz, double* out) noexcept nogil:
    cdef double lx = ctx.light[0]
    cdef double ly = ctx.light[1]
    cdef double lz = ctx.light[2]
    cdef double ndotl = nx * lx + ny * ly + nz * lz
    if ndotl < 0.0:
        ndotl = 0.0
    cdef double k = 2.0 * (nx * lx + ny * ly + nz * lz)
    cdef double rx = k * nx - lx
    cdef double ry = k * ny - ly
    cdef double rz = k * nz - lz
    cdef double rdotv = rx * vx + ry * vy + rz * vz
    if rdotv < 0.0:
        rdotv = 0.0
    cdef double spec = pow(rdotv, ctx.spec_exp)
    cdef int i
    cdef double a, c, v
    for i in range(4):
        a = ctx.amb[i] if i < 3 else 1.0
        c = ctx.lcol[i] if i < 3 else 1.0
        v = a * albedo[i] + ndotl * albedo[i] * c + spec * c
        if v < 0.0:
            v = 0.0
        out[i] = v


cdef void trace_c(const CtxC* ctx,
                  double ox, double oy, double oz,
                  double dx, double dy, double dz,
                  int depth, double* out,
                  double* prim_t, long* prim_steps) noexcept nogil:
    if depth >= ctx.max_depth:
        background_c(ctx, dy, out)
        if prim_t != NULL:
            prim_t[0] = -1.0
        if prim_steps != NULL:
            prim_steps[0] = 0
        return
    cdef HitC best
    cdef HitC hit
    cdef int best_idx = -1
    cdef long steps_total = 0
    cdef double best_t = INFINITY
    cdef int i, steps
    for i in range(ctx.n):
        if intersect_instance_c(ctx, &ctx.inst[i], ox, oy, oz, dx, dy, dz,
                                best_t, &hit, &steps):
            best = hit
            best_idx = i
            best_t = hit.t
        steps_total += steps
    if prim_steps != NULL:
        prim_steps[0] = steps_total
    if best_idx < 0:
        background_c(ctx, dy, out)
        if prim_t != NULL:
            prim_t[0] = -1.0
        return
    if prim_t != NULL:
        prim_t[0] = best.t
    cdef double hx = ox + best.t * dx
    cdef double hy = oy + best.t * dy
    cdef double hz = oz + best.t * dz
    cdef const InstC* inst = &ctx.inst[best_idx]
    cdef const double* m = inst.w2o
    cdef double albedo[4]
    cdef double py
    if inst.kind == 0:
        py = m[4] * hx + m[5] * hy + m[6] * hz + m[7]
        julia_albedo_c(ctx, inst, py, best.aux[0], depth, albedo)
    else:
        bulb_albedo_c(inst, best.aux, ctx.bulb_mix, albedo)
    cdef double color[4]
    phong_c(ctx, albedo, best.nx, best.ny, best.nz, -dx, -dy, -dz, color)
    cdef double refl = inst.refl
    cdef double offset, kk, rdx, rdy, rdz, cosv, fr5
    cdef double refl_color[4]
    cdef double fr[3]
    if refl != 0.0:
        offset = ctx.refl_offset * inst.precis
        kk = 2.0 * (dx * best.nx + dy * best.ny + dz * best.nz)
        rdx = dx - kk * best.nx
        rdy = dy - kk * best.ny
        rdz = dz - kk * best.nz
        trace_c(ctx,
                hx + offset * best.nx, hy + offset * best.ny, hz + offset * best.nz,
                rdx, rdy, rdz, depth + 1, refl_color, NULL, NULL)
        cosv = -(dx * best.nx + dy * best.ny + dz * best.nz)
        if cosv < 0.0:
            cosv = 0.0
        elif cosv > 1.0:
            cosv = 1.0
        fr5 = pow(1.0 - cosv, 5.0)
        fr[0] = albedo[0] + (1.0 - albedo[0]) * fr5
        fr[1] = albedo[1] + (1.0 - albedo[1]) * fr5
        fr[2] = albedo[2] + (1.0 - albedo[2]) * fr5
        color[0] = color[0] + refl * fr[0] * refl_color[0]
        color[1] = color[1] + refl * fr[1] * refl_color[1]
        color[2] = color[2] + refl * fr[2] * refl_color[2]
        color[3] = color[3] + refl * 1.0 * refl_color[3]
    out[0] = color[0]
    out[1] = color[1]
    out[2] = color[2]
    out[3] = color[3]


cdef inline unsigned char encode_c(double v, double gamma_exp) noexcept nogil:
    # NaN fails the first comparison and lands on 0.
    if not (v > 0.0):
        v = 0.0
    elif v > 1.0:
        v = 1.0
    v = pow(v, gamma_exp)
    return <unsigned char>(<int>(v * 255.0 + 0.5))


cdef inline unsigned char encode_linear_c(double v) noexcept nogil:
    if not (v > 0.0):
        v = 0.0
    elif v > 1.0:
        v = 1.0
    return <unsigned char>(<int>(v * 255.0 + 0.5))


# ---------------------------------------------------------------------------
# Scalar probes (used by the parity tests).


def julia_distance_scalar(double px, double py, double pz,
                          double cw, double cx, double cy, double cz,
                          int degree, int max_iter, double escape):
    """(d, aux) of the Julia estimator, straight from the compiled loop."""
    cdef InstC inst
    inst.kind = 0
    inst.ipow = degree
    inst.max_iter = max_iter
    inst.escape = escape
    inst.cw = cw
    inst.cx = cx
    inst.cy = cy
    inst.cz = cz
    cdef double aux[4]
    cdef double d = julia_dist_c(&inst, px, py, pz, aux)
    return d, (aux[0], aux[1], aux[2], aux[3])


def mandelbulb_distance_scalar(double px, double py, double pz,
                               int power, int max_iter, double escape):
    """(d, aux) of the Mandelbulb estimator, straight from the compiled loop."""
    cdef InstC inst
    inst.kind = 1
    inst.ipow = power
    inst.max_iter = max_iter
    inst.escape = escape
    cdef double aux[4]
    cdef double d = bulb_dist_c(&inst, px, py, pz, aux)
    return d, (aux[0], aux[1], aux[2], aux[3])


# ---------------------------------------------------------------------------
# Tile rendering.


def render_tile(flat, int x0, int y0, int tw, int th,
                unsigned char[:, :, ::1] out,
                hit_t=None, steps=None, linear=None):
    """Render a tile of the flattened scene; returns the count of
    non-finite color channels (encoded as 0)."""
    cdef CtxC ctx
    cdef int n = flat.kind.shape[0]
    cdef int i, j
    ctx.n = n
    ctx.inst = <InstC*>malloc(n * sizeof(InstC)) if n > 0 else NULL

    cdef int[::1] kind = flat.kind
    cdef double[:, ::1] qc = flat.qc
    cdef int[::1] ipow = flat.ipow
    cdef int[::1] max_iter = flat.max_iter
    cdef double[::1] escape = flat.escape
    cdef double[:, :, ::1] w2o = flat.w2o
    cdef double[::1] precis = flat.precis
    cdef double[::1] t_max = flat.t_max
    cdef double[::1] step_clamp = flat.step_clamp
    cdef double[::1] bound = flat.bound
    cdef int[::1] max_steps = flat.max_steps
    cdef int[::1] plane_start = flat.plane_start
    cdef double[:, ::1] planes = flat.planes
    cdef double[::1] reflectance = flat.reflectance
    cdef double[::1] albedo_scale = flat.albedo_scale
    cdef double[::1] boost = flat.boost
    cdef double[:, ::1] jpal = flat.jpal
    cdef double[:, ::1] bpal = flat.bpal

    cdef double[:, ::1] hit_mv
    cdef double* hit_ptr = NULL
    cdef int[:, ::1] steps_mv
    cdef int* steps_ptr = NULL
    cdef double[:, :, ::1] linear_mv
    cdef double* linear_ptr = NULL
    cdef unsigned char* out_ptr
    cdef long nonfinite = 0
    cdef int width, height
    cdef int x, y, ch
    cdef double sx, sy, dxr, dyr, dzr, dl
    cdef double rgba[4]
    cdef double prim_t
    cdef long prim_steps
    cdef long pix

    try:
        for i in range(n):
            ctx.inst[i].kind = kind[i]
            ctx.inst[i].ipow = ipow[i]
            ctx.inst[i].max_iter = max_iter[i]
            ctx.inst[i].max_steps = max_steps[i]
            ctx.inst[i].plane0 = plane_start[i]
            ctx.inst[i].plane1 = plane_start[i + 1]
            ctx.inst[i].cw = qc[i, 0]
            ctx.inst[i].cx = qc[i, 1]
            ctx.inst[i].cy = qc[i, 2]
            ctx.inst[i].cz = qc[i, 3]
            ctx.inst[i].escape = escape[i]
            ctx.inst[i].precis = precis[i]
            ctx.inst[i].tmax = t_max[i]
            ctx.inst[i].clamp = step_clamp[i]
            ctx.inst[i].bound = bound[i]
            for j in range(12):
                ctx.inst[i].w2o[j] = w2o[i, j // 4, j % 4]
            ctx.inst[i].refl = reflectance[i]
            ctx.inst[i].ascale = albedo_scale[i]
            ctx.inst[i].boost = boost[i]
            for j in range(6):
                ctx.inst[i].jpal[j] = jpal[i, j]
            for j in range(9):
                ctx.inst[i].bpal[j] = bpal[i, j]
        if planes.shape[0] > 0:
            ctx.planes = &planes[0, 0]
        else:
            ctx.planes = NULL
        for j in range(3):
            ctx.light[j] = flat.light_dir[j]
            ctx.lcol[j] = flat.light_color[j]
            ctx.amb[j] = flat.ambient[j]
            ctx.bgt[j] = flat.bg_top[j]
            ctx.bgb[j] = flat.bg_bottom[j]
            ctx.cpos[j] = flat.cam_pos[j]
            ctx.cr[j] = flat.cam_right[j]
            ctx.cu[j] = flat.cam_up[j]
            ctx.cf[j] = flat.cam_forward[j]
        ctx.spec_exp = flat.specular_exponent
        ctx.gamma_exp = flat.gamma_exp
        ctx.max_depth = flat.max_depth
        ctx.half_w = flat.half_w
        ctx.half_h = flat.half_h
        ctx.width = flat.width
        ctx.height = flat.height
        ctx.julia_falloff = flat.julia_falloff
        ctx.tint_base = flat.julia_tint_base
        ctx.tint_span = flat.julia_tint_span
        ctx.bulb_mix = flat.bulb_second_mix
        ctx.refl_offset = flat.reflect_offset_scale
        ctx.normal_scale = flat.normal_step_scale

        if hit_t is not None:
            hit_mv = hit_t
            hit_ptr = &hit_mv[0, 0]
        if steps is not None:
            steps_mv = steps
            steps_ptr = &steps_mv[0, 0]
        if linear is not None:
            linear_mv = linear
            linear_ptr = &linear_mv[0, 0, 0]
        out_ptr = &out[0, 0, 0]
        width = ctx.width
        height = ctx.height
        with nogil:
            for y in range(y0, y0 + th):
                for x in range(x0, x0 + tw):
                    sx = (2.0 * (x + 0.5) / width - 1.0) * ctx.half_w
                    sy = (1.0 - 2.0 * (y + 0.5) / height) * ctx.half_h
                    dxr = ctx.cf[0] + sx * ctx.cr[0] + sy * ctx.cu[0]
                    dyr = ctx.cf[1] + sx * ctx.cr[1] + sy * ctx.cu[1]
                    dzr = ctx.cf[2] + sx * ctx.cr[2] + sy * ctx.cu[2]
                    dl = sqrt(dxr * dxr + dyr * dyr + dzr * dzr)
                    trace_c(&ctx, ctx.cpos[0], ctx.cpos[1], ctx.cpos[2],
                            dxr / dl, dyr / dl, dzr / dl,
                            0, rgba, &prim_t, &prim_steps)
                    pix = (<long>y) * width + x
                    if hit_ptr != NULL:
                        hit_ptr[pix] = prim_t
                    if steps_ptr != NULL:
                        steps_ptr[pix] = <int>prim_steps
                    if linear_ptr != NULL:
                        linear_ptr[pix * 4 + 0] = rgba[0]
                        linear_ptr[pix * 4 + 1] = rgba[1]
                        linear_ptr[pix * 4 + 2] = rgba[2]
                        linear_ptr[pix * 4 + 3] = rgba[3]
                    for ch in range(4):
                        if not isfinite(rgba[ch]):
                            nonfinite += 1
                    out_ptr[pix * 4 + 0] = encode_c(rgba[0], ctx.gamma_exp)
                    out_ptr[pix * 4 + 1] = encode_c(rgba[1], ctx.gamma_exp)
                    out_ptr[pix * 4 + 2] = encode_c(rgba[2], ctx.gamma_exp)
                    out_ptr[pix * 4 + 3] = encode_linear_c(rgba[3])
        return nonfinite
    finally:
        if ctx.inst != NULL:
            free(ctx.inst)
