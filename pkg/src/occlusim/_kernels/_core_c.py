# cython: boundscheck=False, wraparound=False, cdivision=True
"""Hot kernels: camera column renderer, IR proximity scan, and physics step.

Written in Cython pure-Python mode: the module runs unmodified under the
interpreter (fallback backend) and compiles to a C extension for speed. All
state lives in caller-provided numpy arrays; nothing is allocated here.

Conventions:
  body index >= 0  -> robot
  body index == -1 -> the transported object
  body index == -2 -> static geometry (walls)
Contact normals point from body A toward body B.
"""

import cython
import numpy as np
from math import sin, cos, atan, asin, atan2, sqrt, floor, ceil, fmod, pi

COMPILED = cython.compiled

# pixel classes, kept in sync with constants.ColorClass
_FLOOR = 0
_SKY = 5

_FOCAL = 32.0
_HALF = 31.5
_CAM_H = 0.09
_MAX_HITS = 16


# ---------------------------------------------------------------------------
# primitive intersection helpers

@cython.cfunc
@cython.inline
def _ray_seg(ox: cython.double, oy: cython.double, dx: cython.double,
             dy: cython.double, ax: cython.double, ay: cython.double,
             bx: cython.double, by: cython.double) -> cython.double:
    ex: cython.double = bx - ax
    ey: cython.double = by - ay
    denom: cython.double = dx * ey - dy * ex
    if denom < 1e-15 and denom > -1e-15:
        return -1.0
    t: cython.double = ((ax - ox) * ey - (ay - oy) * ex) / denom
    s: cython.double = ((ax - ox) * dy - (ay - oy) * dx) / denom
    if t < 0.0 or s < 0.0 or s > 1.0:
        return -1.0
    return t


@cython.cfunc
@cython.inline
def _ray_circle(ox: cython.double, oy: cython.double, dx: cython.double,
                dy: cython.double, cx: cython.double, cy: cython.double,
                r: cython.double) -> cython.double:
    fx: cython.double = ox - cx
    fy: cython.double = oy - cy
    b: cython.double = fx * dx + fy * dy
    c: cython.double = fx * fx + fy * fy - r * r
    if c <= 0.0:
        return 0.0  # origin inside
    disc: cython.double = b * b - c
    if disc < 0.0:
        return -1.0
    t: cython.double = -b - sqrt(disc)
    if t < 0.0:
        return -1.0
    return t


@cython.cfunc
@cython.inline
def _wrap(a: cython.double) -> cython.double:
    a = fmod(a, 2.0 * pi)
    if a <= -pi:
        a += 2.0 * pi
    elif a > pi:
        a -= 2.0 * pi
    return a


# ---------------------------------------------------------------------------
# camera rig renderer

@cython.cfunc
def _push_hit(hit_t: cython.double[:, :], hit_h: cython.double[:, :],
              hit_c: cython.uchar[:, :], hit_n: cython.int[:],
              t_block: cython.double[:],
              k: cython.int, t: cython.double, h: cython.double,
              cls: cython.uchar) -> cython.void:
    # anything beyond the nearest full-height hit in this column is hidden
    if t > t_block[k]:
        return
    if h >= 0.199 and t < t_block[k]:
        t_block[k] = t
    m: cython.int = hit_n[k]
    j: cython.int
    worst: cython.int
    if m < _MAX_HITS:
        hit_t[k, m] = t
        hit_h[k, m] = h
        hit_c[k, m] = cls
        hit_n[k] = m + 1
        return
    worst = 0
    for j in range(1, _MAX_HITS):
        if hit_t[k, j] > hit_t[k, worst]:
            worst = j
    if t < hit_t[k, worst]:
        hit_t[k, worst] = t
        hit_h[k, worst] = h
        hit_c[k, worst] = cls


@cython.cfunc
def _cols_for_interval(lo: cython.double, width: cython.double,
                       heading: cython.double, cam: cython.int,
                       out_lo: cython.int[:], out_hi: cython.int[:]) -> cython.int:
    """Map a world-azimuth interval [lo, lo+width] to column ranges of one camera.

    Returns the number of ranges written (0..2); columns are padded by one on
    each side so boundary columns get an exact test.
    """
    g: cython.double = _wrap(lo - heading - cam * (pi / 2.0))
    nseg: cython.int = 0
    shift: cython.int
    a0: cython.double
    a1: cython.double
    ov0: cython.double
    ov1: cython.double
    c0: cython.double
    c1: cython.double
    quarter: cython.double = pi / 4.0
    for shift in range(2):
        a0 = g - shift * 2.0 * pi
        a1 = a0 + width
        ov0 = a0 if a0 > -quarter else -quarter
        ov1 = a1 if a1 < quarter else quarter
        if ov0 <= ov1:
            c0 = _HALF - _FOCAL * _tan(ov1)
            c1 = _HALF - _FOCAL * _tan(ov0)
            ilo: cython.int = cython.cast(cython.int, floor(c0)) - 1
            ihi: cython.int = cython.cast(cython.int, ceil(c1)) + 1
            if ilo < 0:
                ilo = 0
            if ihi > 63:
                ihi = 63
            if ilo <= ihi:
                out_lo[nseg] = ilo
                out_hi[nseg] = ihi
                nseg += 1
    return nseg


@cython.cfunc
@cython.inline
def _tan(a: cython.double) -> cython.double:
    return sin(a) / cos(a)


def render_all(rx: cython.double[:], ry: cython.double[:], rth: cython.double[:],
               n: cython.int,
               ccx: cython.double[:], ccy: cython.double[:], ccr: cython.double[:],
               cch: cython.double[:], ccls: cython.uchar[:], cown: cython.int[:],
               nc: cython.int,
               sx1: cython.double[:], sy1: cython.double[:],
               sx2: cython.double[:], sy2: cython.double[:],
               sh: cython.double[:], scls: cython.uchar[:], ns: cython.int,
               colang: cython.double[:], colcos: cython.double[:],
               frames: cython.uchar[:, :, :, :],
               colstats: cython.short[:, :, :],
               hit_t: cython.double[:, :], hit_h: cython.double[:, :],
               hit_c: cython.uchar[:, :], hit_n: cython.int[:],
               write_frames: cython.int) -> cython.void:
    """Render the four 64x64 camera frames for every robot.

    Circles carry an owner index (cown) so a robot never renders itself.
    Segments are one-sided: rendered only when the robot is on the left of
    a->b (quad edges must be emitted clockwise so exteriors face out).
    colang/colcos are the per-global-column relative azimuth (camera yaw plus
    pinhole column angle) and axis-cosine tables. colstats (n, 256, 6) gets
    per-column [red, blue, green, black, bottom_red_row, bottom_blue_row]
    with -1 for absent rows, so perception can skip the raw frames. With
    write_frames=0 only colstats is produced and frames is left untouched
    (it may be a dummy array in that mode).
    """
    i: cython.int
    k: cython.int
    p: cython.int
    cam: cython.int
    seg_lo: cython.int[:] = np.zeros(4, dtype=np.intc)
    seg_hi: cython.int[:] = np.zeros(4, dtype=np.intc)
    order: cython.int[:] = np.zeros(_MAX_HITS, dtype=np.intc)
    dirx: cython.double[:] = np.zeros(256)
    diry: cython.double[:] = np.zeros(256)
    t_block: cython.double[:] = np.zeros(256)

    for i in range(n):
        px: cython.double = rx[i]
        py: cython.double = ry[i]
        heading: cython.double = rth[i]
        for k in range(256):
            hit_n[k] = 0
            t_block[k] = 1e30
            a0_: cython.double = heading + colang[k]
            dirx[k] = cos(a0_)
            diry[k] = sin(a0_)

        # circles
        for p in range(nc):
            if cown[p] == i:
                continue
            dx: cython.double = ccx[p] - px
            dy: cython.double = ccy[p] - py
            dist: cython.double = sqrt(dx * dx + dy * dy)
            r: cython.double = ccr[p]
            full: cython.int = 0
            lo: cython.double = 0.0
            width: cython.double = 0.0
            if dist <= r * 1.0000001:
                full = 1
            else:
                half: cython.double = asin(r / dist)
                lo = atan2(dy, dx) - half
                width = 2.0 * half
            for cam in range(4):
                if full:
                    nseg: cython.int = 1
                    seg_lo[0] = 0
                    seg_hi[0] = 63
                else:
                    nseg = _cols_for_interval(lo, width, heading, cam, seg_lo, seg_hi)
                sidx: cython.int
                for sidx in range(nseg):
                    col: cython.int
                    for col in range(seg_lo[sidx], seg_hi[sidx] + 1):
                        k = cam * 64 + col
                        t: cython.double = _ray_circle(px, py, dirx[k], diry[k],
                                                       ccx[p], ccy[p], r)
                        if t >= 0.0:
                            _push_hit(hit_t, hit_h, hit_c, hit_n, t_block,
                                      k, t, cch[p], ccls[p])

        # segments (one-sided: skip when the robot is on the back side)
        for p in range(ns):
            if (sx2[p] - sx1[p]) * (py - sy1[p]) - (sy2[p] - sy1[p]) * (px - sx1[p]) <= 0.0:
                continue
            a1: cython.double = atan2(sy1[p] - py, sx1[p] - px)
            a2: cython.double = atan2(sy2[p] - py, sx2[p] - px)
            d12: cython.double = _wrap(a2 - a1)
            if d12 >= 0.0:
                lo = a1
                width = d12
            else:
                lo = a2
                width = -d12
            for cam in range(4):
                nseg = _cols_for_interval(lo, width, heading, cam, seg_lo, seg_hi)
                for sidx in range(nseg):
                    for col in range(seg_lo[sidx], seg_hi[sidx] + 1):
                        k = cam * 64 + col
                        t = _ray_seg(px, py, dirx[k], diry[k],
                                     sx1[p], sy1[p], sx2[p], sy2[p])
                        if t >= 1e-9:
                            _push_hit(hit_t, hit_h, hit_c, hit_n, t_block,
                                      k, t, sh[p], scls[p])

        _paint(frames, colstats, i, hit_t, hit_h, hit_c, hit_n, colcos, order,
               write_frames)


@cython.cfunc
def _paint(frames: cython.uchar[:, :, :, :], colstats: cython.short[:, :, :],
           i: cython.int,
           hit_t: cython.double[:, :], hit_h: cython.double[:, :],
           hit_c: cython.uchar[:, :], hit_n: cython.int[:],
           colcos: cython.double[:], order: cython.int[:],
           write_frames: cython.int) -> cython.void:
    k: cython.int
    cam: cython.int
    col: cython.int
    r: cython.int
    j: cython.int
    m: cython.int

    for k in range(256):
        cam = k >> 6
        col = k & 63
        m = hit_n[k]
        # insertion sort, nearest first
        for j in range(m):
            order[j] = j
        for j in range(1, m):
            oj: cython.int = order[j]
            tj: cython.double = hit_t[k, oj]
            w: cython.int = j - 1
            while w >= 0 and hit_t[k, order[w]] > tj:
                order[w + 1] = order[w]
                w -= 1
            order[w + 1] = oj
        # paint nearest-first; a 64-bit mask tracks already-covered rows
        mask: cython.ulonglong = 0
        nred: cython.short = 0
        nblue: cython.short = 0
        ngreen: cython.short = 0
        nblack: cython.short = 0
        bred: cython.short = -1
        bblue: cython.short = -1
        for j in range(m):
            idx: cython.int = order[j]
            t: cython.double = hit_t[k, idx]
            dperp: cython.double = t * colcos[k]
            if dperp < 1e-6:
                dperp = 1e-6
            rtop: cython.double = 32.0 - _FOCAL * (hit_h[k, idx] - _CAM_H) / dperp
            rbot: cython.double = 32.0 + _FOCAL * _CAM_H / dperp
            lo: cython.int = cython.cast(cython.int, ceil(rtop - 0.5))
            hi: cython.int = cython.cast(cython.int, floor(rbot - 0.5))
            if lo < 0:
                lo = 0
            if hi > 63:
                hi = 63
            cls: cython.uchar = hit_c[k, idx]
            for r in range(lo, hi + 1):
                bit: cython.ulonglong = cython.cast(cython.ulonglong, 1) << r
                if mask & bit:
                    continue
                mask |= bit
                if cls == 4:
                    nred += 1
                    if r > bred:
                        bred = r
                elif cls == 2:
                    nblue += 1
                    if r > bblue:
                        bblue = r
                elif cls == 3:
                    ngreen += 1
                elif cls == 1:
                    nblack += 1
                if write_frames:
                    frames[i, cam, r, col] = cls
        if write_frames:
            for r in range(64):
                bit = cython.cast(cython.ulonglong, 1) << r
                if not (mask & bit):
                    frames[i, cam, r, col] = _SKY if r < 32 else _FLOOR
        colstats[i, k, 0] = nred
        colstats[i, k, 1] = nblue
        colstats[i, k, 2] = ngreen
        colstats[i, k, 3] = nblack
        colstats[i, k, 4] = bred
        colstats[i, k, 5] = bblue


# ---------------------------------------------------------------------------
# IR proximity ring

def ir_scan(rx: cython.double[:], ry: cython.double[:], rth: cython.double[:],
            n: cython.int, robot_radius: cython.double,
            ccx: cython.double[:], ccy: cython.double[:], ccr: cython.double[:],
            cown: cython.int[:], nc: cython.int,
            sx1: cython.double[:], sy1: cython.double[:],
            sx2: cython.double[:], sy2: cython.double[:], ns: cython.int,
            max_range: cython.double, out: cython.double[:, :]) -> cython.void:
    """8-way IR ring per robot; readings are surface distances, capped at max_range."""
    i: cython.int
    k: cython.int
    p: cython.int
    cull: cython.double = max_range + robot_radius
    for i in range(n):
        cx: cython.double = rx[i]
        cy: cython.double = ry[i]
        for k in range(8):
            a: cython.double = rth[i] + k * (pi / 4.0)
            dx: cython.double = cos(a)
            dy: cython.double = sin(a)
            ox: cython.double = cx + robot_radius * dx
            oy: cython.double = cy + robot_radius * dy
            best: cython.double = max_range
            for p in range(nc):
                if cown[p] == i:
                    continue
                ex: cython.double = ccx[p] - ox
                ey: cython.double = ccy[p] - oy
                reach: cython.double = cull + ccr[p]
                if ex * ex + ey * ey > reach * reach:
                    continue
                t: cython.double = _ray_circle(ox, oy, dx, dy, ccx[p], ccy[p], ccr[p])
                if t >= 0.0 and t < best:
                    best = t
            for p in range(ns):
                qx: cython.double
                qy: cython.double
                qx, qy = 0.0, 0.0
                # quick reject on point-segment distance
                ax: cython.double = sx1[p]
                ay: cython.double = sy1[p]
                bx: cython.double = sx2[p]
                by: cython.double = sy2[p]
                ux: cython.double = bx - ax
                uy: cython.double = by - ay
                ln2: cython.double = ux * ux + uy * uy
                tt: cython.double = 0.0
                if ln2 > 0.0:
                    tt = ((ox - ax) * ux + (oy - ay) * uy) / ln2
                    if tt < 0.0:
                        tt = 0.0
                    elif tt > 1.0:
                        tt = 1.0
                qx = ax + tt * ux - ox
                qy = ay + tt * uy - oy
                if qx * qx + qy * qy > cull * cull:
                    continue
                t = _ray_seg(ox, oy, dx, dy, ax, ay, bx, by)
                if t >= 0.0 and t < best:
                    best = t
            out[i, k] = best


# ---------------------------------------------------------------------------
# physics step

@cython.cfunc
@cython.inline
def _clamp(v: cython.double, lo: cython.double, hi: cython.double) -> cython.double:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


@cython.cfunc
def _object_world_verts(ox: cython.double, oy: cython.double, oth: cython.double,
                        parts: cython.double[:, :, :], part_nv: cython.int[:],
                        nparts: cython.int, wv: cython.double[:, :, :]) -> cython.void:
    c: cython.double = cos(oth)
    s: cython.double = sin(oth)
    p: cython.int
    v: cython.int
    for p in range(nparts):
        for v in range(part_nv[p]):
            lx: cython.double = parts[p, v, 0]
            ly: cython.double = parts[p, v, 1]
            wv[p, v, 0] = ox + c * lx - s * ly
            wv[p, v, 1] = oy + s * lx + c * ly


@cython.cfunc
def _circle_poly(cx: cython.double, cy: cython.double, r: cython.double,
                 verts: cython.double[:, :], nv: cython.int,
                 res: cython.double[:]) -> cython.int:
    """Signed penetration of a circle against a convex CCW polygon.

    res <- [depth, nx, ny, px, py]; normal points from polygon toward circle.
    Returns 1 when depth > -margin is possible (caller filters); 0 when the
    center is far outside.
    """
    inside: cython.int = 1
    best_sep: cython.double = -1e30
    bi: cython.int = 0
    i: cython.int
    for i in range(nv):
        ax: cython.double = verts[i, 0]
        ay: cython.double = verts[i, 1]
        bx: cython.double = verts[(i + 1) % nv, 0]
        by: cython.double = verts[(i + 1) % nv, 1]
        ex: cython.double = bx - ax
        ey: cython.double = by - ay
        ln: cython.double = sqrt(ex * ex + ey * ey)
        nx: cython.double = ey / ln
        ny: cython.double = -ex / ln
        sep: cython.double = (cx - ax) * nx + (cy - ay) * ny
        if sep > best_sep:
            best_sep = sep
            bi = i
        if sep > 0.0:
            inside = 0
    if inside:
        ax = verts[bi, 0]
        ay = verts[bi, 1]
        bx = verts[(bi + 1) % nv, 0]
        by = verts[(bi + 1) % nv, 1]
        ex = bx - ax
        ey = by - ay
        ln = sqrt(ex * ex + ey * ey)
        res[0] = r - best_sep  # best_sep <= 0 here
        res[1] = ey / ln
        res[2] = -ex / ln
        res[3] = cx - res[1] * r
        res[4] = cy - res[2] * r
        return 1
    # outside: closest point on boundary
    best_d: cython.double = 1e30
    qx: cython.double = 0.0
    qy: cython.double = 0.0
    for i in range(nv):
        ax = verts[i, 0]
        ay = verts[i, 1]
        bx = verts[(i + 1) % nv, 0]
        by = verts[(i + 1) % nv, 1]
        ex = bx - ax
        ey = by - ay
        ln2: cython.double = ex * ex + ey * ey
        t: cython.double = 0.0
        if ln2 > 0.0:
            t = _clamp(((cx - ax) * ex + (cy - ay) * ey) / ln2, 0.0, 1.0)
        hx: cython.double = ax + t * ex
        hy: cython.double = ay + t * ey
        d: cython.double = sqrt((cx - hx) * (cx - hx) + (cy - hy) * (cy - hy))
        if d < best_d:
            best_d = d
            qx = hx
            qy = hy
    if best_d > r + 0.05:
        return 0
    if best_d < 1e-12:
        return 0
    res[0] = r - best_d
    res[1] = (cx - qx) / best_d
    res[2] = (cy - qy) / best_d
    res[3] = qx
    res[4] = qy
    return 1


@cython.cfunc
@cython.inline
def _poly_vertex_depth(vx: cython.double, vy: cython.double,
                       verts: cython.double[:, :], nv: cython.int,
                       res: cython.double[:]) -> cython.int:
    """Signed distance of a point to a convex polygon via face planes.

    res <- [sdist, nx, ny] with the maximizing face's outward normal.
    """
    best: cython.double = -1e30
    bnx: cython.double = 0.0
    bny: cython.double = 0.0
    i: cython.int
    for i in range(nv):
        ax: cython.double = verts[i, 0]
        ay: cython.double = verts[i, 1]
        bx: cython.double = verts[(i + 1) % nv, 0]
        by: cython.double = verts[(i + 1) % nv, 1]
        ex: cython.double = bx - ax
        ey: cython.double = by - ay
        ln: cython.double = sqrt(ex * ex + ey * ey)
        nx: cython.double = ey / ln
        ny: cython.double = -ex / ln
        sep: cython.double = (vx - ax) * nx + (vy - ay) * ny
        if sep > best:
            best = sep
            bnx = nx
            bny = ny
    res[0] = best
    res[1] = bnx
    res[2] = bny
    return 1


@cython.cfunc
def _gen_contacts(n: cython.int, rx: cython.double[:], ry: cython.double[:],
                  robot_radius: cython.double,
                  obj: cython.double[:], obj_is_circle: cython.int,
                  obj_r: cython.double,
                  parts: cython.double[:, :, :], part_nv: cython.int[:],
                  nparts: cython.int, wv: cython.double[:, :, :],
                  walls: cython.double[:, :, :], nwalls: cython.int,
                  margin: cython.double,
                  cia: cython.int[:], cib: cython.int[:],
                  cpx: cython.double[:], cpy: cython.double[:],
                  cnx: cython.double[:], cny: cython.double[:],
                  cd: cython.double[:], scratch: cython.double[:]) -> cython.int:
    m: cython.int = 0
    cap: cython.int = cia.shape[0]
    i: cython.int
    j: cython.int
    w: cython.int
    p: cython.int
    v: cython.int

    _object_world_verts(obj[0], obj[1], obj[2], parts, part_nv, nparts, wv)

    # robot-robot
    for i in range(n):
        for j in range(i + 1, n):
            dx: cython.double = rx[j] - rx[i]
            dy: cython.double = ry[j] - ry[i]
            rsum: cython.double = 2.0 * robot_radius
            d2: cython.double = dx * dx + dy * dy
            lim: cython.double = rsum + margin
            if d2 < lim * lim and m < cap:
                d: cython.double = sqrt(d2)
                if d < 1e-9:
                    dx, dy, d = 1.0, 0.0, 1.0
                cia[m] = i
                cib[m] = j
                cnx[m] = dx / d
                cny[m] = dy / d
                cpx[m] = rx[i] + dx * 0.5
                cpy[m] = ry[i] + dy * 0.5
                cd[m] = rsum - d
                m += 1

    # robot-wall (A = static, B = robot)
    for i in range(n):
        for w in range(nwalls):
            if m >= cap:
                break
            ok: cython.int = _circle_poly(rx[i], ry[i], robot_radius,
                                          walls[w], 4, scratch)
            if ok and scratch[0] > -margin:
                cia[m] = -2
                cib[m] = i
                cd[m] = scratch[0]
                cnx[m] = scratch[1]
                cny[m] = scratch[2]
                cpx[m] = scratch[3]
                cpy[m] = scratch[4]
                m += 1

    # robot-object (A = object, B = robot)
    for i in range(n):
        if obj_is_circle:
            dx = rx[i] - obj[0]
            dy = ry[i] - obj[1]
            d2 = dx * dx + dy * dy
            rsum = obj_r + robot_radius
            lim = rsum + margin
            if d2 < lim * lim and m < cap:
                d = sqrt(d2)
                if d < 1e-9:
                    dx, dy, d = 1.0, 0.0, 1.0
                cia[m] = -1
                cib[m] = i
                cnx[m] = dx / d
                cny[m] = dy / d
                cpx[m] = obj[0] + dx / d * obj_r
                cpy[m] = obj[1] + dy / d * obj_r
                cd[m] = rsum - d
                m += 1
        else:
            for p in range(nparts):
                if m >= cap:
                    break
                ok = _circle_poly(rx[i], ry[i], robot_radius, wv[p],
                                  part_nv[p], scratch)
                if ok and scratch[0] > -margin:
                    cia[m] = -1
                    cib[m] = i
                    cd[m] = scratch[0]
                    cnx[m] = scratch[1]
                    cny[m] = scratch[2]
                    cpx[m] = scratch[3]
                    cpy[m] = scratch[4]
                    m += 1

    # object-wall (A = static, B = object)
    for w in range(nwalls):
        if obj_is_circle:
            if m >= cap:
                break
            ok = _circle_poly(obj[0], obj[1], obj_r, walls[w], 4, scratch)
            if ok and scratch[0] > -margin:
                cia[m] = -2
                cib[m] = -1
                cd[m] = scratch[0]
                cnx[m] = scratch[1]
                cny[m] = scratch[2]
                cpx[m] = scratch[3]
                cpy[m] = scratch[4]
                m += 1
        else:
            for p in range(nparts):
                # object part vertices inside the wall
                for v in range(part_nv[p]):
                    if m >= cap:
                        break
                    _poly_vertex_depth(wv[p, v, 0], wv[p, v, 1], walls[w], 4, scratch)
                    if scratch[0] < margin:
                        cia[m] = -2
                        cib[m] = -1
                        cd[m] = -scratch[0]
                        cnx[m] = scratch[1]
                        cny[m] = scratch[2]
                        cpx[m] = wv[p, v, 0]
                        cpy[m] = wv[p, v, 1]
                        m += 1
                # wall vertices inside the object part
                for v in range(4):
                    if m >= cap:
                        break
                    _poly_vertex_depth(walls[w, v, 0], walls[w, v, 1],
                                       wv[p], part_nv[p], scratch)
                    if scratch[0] < margin:
                        cia[m] = -2
                        cib[m] = -1
                        cd[m] = -scratch[0]
                        # normal must point wall -> object: flip the object
                        # part's outward normal
                        cnx[m] = -scratch[1]
                        cny[m] = -scratch[2]
                        cpx[m] = walls[w, v, 0]
                        cpy[m] = walls[w, v, 1]
                        m += 1
    return m


def step_world(n: cython.int,
               rx: cython.double[:], ry: cython.double[:], rth: cython.double[:],
               rvx: cython.double[:], rvy: cython.double[:],
               cmd_vl: cython.double[:], cmd_vr: cython.double[:],
               obj: cython.double[:],  # x, y, th, vx, vy, w
               obj_is_circle: cython.int, obj_r: cython.double,
               parts: cython.double[:, :, :], part_nv: cython.int[:],
               nparts: cython.int, wv: cython.double[:, :, :],
               walls: cython.double[:, :, :], nwalls: cython.int,
               dt: cython.double, robot_radius: cython.double,
               robot_inv_mass: cython.double, robot_dv_max: cython.double,
               obj_inv_mass: cython.double, obj_inv_inertia: cython.double,
               wheel_sep: cython.double, wheel_max: cython.double,
               fric_force: cython.double, fric_visc: cython.double,
               fric_torque: cython.double, fric_visc_ang: cython.double,
               cia: cython.int[:], cib: cython.int[:],
               cpx: cython.double[:], cpy: cython.double[:],
               cnx: cython.double[:], cny: cython.double[:],
               cd: cython.double[:], cacc: cython.double[:],
               scratch: cython.double[:]) -> cython.void:
    """One fixed 10 ms step: drive, contacts, impulses, friction, integration.

    Robots are force-capped velocity followers with a kinematic heading; the
    object is a full planar rigid body with dry + viscous ground friction;
    walls are immovable. Deterministic for identical inputs.
    """
    i: cython.int
    k: cython.int
    it: cython.int

    # differential drive: heading integrates kinematically, velocity follows
    # the wheel command subject to the traction force cap
    for i in range(n):
        vl: cython.double = _clamp(cmd_vl[i], -wheel_max, wheel_max)
        vr: cython.double = _clamp(cmd_vr[i], -wheel_max, wheel_max)
        yaw: cython.double = (vr - vl) / wheel_sep
        rth[i] = _wrap(rth[i] + yaw * dt)
        fwd: cython.double = 0.5 * (vl + vr)
        dvx: cython.double = fwd * cos(rth[i]) - rvx[i]
        dvy: cython.double = fwd * sin(rth[i]) - rvy[i]
        dv: cython.double = sqrt(dvx * dvx + dvy * dvy)
        if dv > robot_dv_max:
            dvx *= robot_dv_max / dv
            dvy *= robot_dv_max / dv
        rvx[i] += dvx
        rvy[i] += dvy

    m: cython.int = _gen_contacts(n, rx, ry, robot_radius, obj, obj_is_circle,
                                  obj_r, parts, part_nv, nparts, wv,
                                  walls, nwalls, 0.006,
                                  cia, cib, cpx, cpy, cnx, cny, cd, scratch)

    for k in range(m):
        cacc[k] = 0.0

    # sequential impulses, restitution 0; separated (speculative) contacts may
    # close their gap within one step but not faster
    for it in range(10):
        for k in range(m):
            ia: cython.int = cia[k]
            ib: cython.int = cib[k]
            nx: cython.double = cnx[k]
            ny: cython.double = cny[k]
            vax: cython.double = 0.0
            vay: cython.double = 0.0
            vbx: cython.double = 0.0
            vby: cython.double = 0.0
            inv_a: cython.double = 0.0
            inv_b: cython.double = 0.0
            rax: cython.double = 0.0
            ray_: cython.double = 0.0
            rbx: cython.double = 0.0
            rby: cython.double = 0.0
            ang_a: cython.double = 0.0
            ang_b: cython.double = 0.0
            if ia >= 0:
                vax = rvx[ia]
                vay = rvy[ia]
                inv_a = robot_inv_mass
            elif ia == -1:
                rax = cpx[k] - obj[0]
                ray_ = cpy[k] - obj[1]
                vax = obj[3] - obj[5] * ray_
                vay = obj[4] + obj[5] * rax
                inv_a = obj_inv_mass
                crs_a: cython.double = rax * ny - ray_ * nx
                ang_a = crs_a * crs_a * obj_inv_inertia
            if ib >= 0:
                vbx = rvx[ib]
                vby = rvy[ib]
                inv_b = robot_inv_mass
            elif ib == -1:
                rbx = cpx[k] - obj[0]
                rby = cpy[k] - obj[1]
                vbx = obj[3] - obj[5] * rby
                vby = obj[4] + obj[5] * rbx
                inv_b = obj_inv_mass
                crs_b: cython.double = rbx * ny - rby * nx
                ang_b = crs_b * crs_b * obj_inv_inertia
            kmass: cython.double = inv_a + inv_b + ang_a + ang_b
            if kmass <= 0.0:
                continue
            vn: cython.double = (vbx - vax) * nx + (vby - vay) * ny
            allowed: cython.double = 0.0
            if cd[k] < 0.0:
                allowed = -cd[k] / dt  # may close the remaining gap this step
            lam: cython.double = -(vn + allowed) / kmass
            new_acc: cython.double = cacc[k] + lam
            if new_acc < 0.0:
                new_acc = 0.0
            dlam: cython.double = new_acc - cacc[k]
            cacc[k] = new_acc
            if dlam == 0.0:
                continue
            pxi: cython.double = dlam * nx
            pyi: cython.double = dlam * ny
            if ia >= 0:
                rvx[ia] -= pxi * robot_inv_mass
                rvy[ia] -= pyi * robot_inv_mass
            elif ia == -1:
                obj[3] -= pxi * obj_inv_mass
                obj[4] -= pyi * obj_inv_mass
                obj[5] -= (rax * pyi - ray_ * pxi) * obj_inv_inertia
            if ib >= 0:
                rvx[ib] += pxi * robot_inv_mass
                rvy[ib] += pyi * robot_inv_mass
            elif ib == -1:
                obj[3] += pxi * obj_inv_mass
                obj[4] += pyi * obj_inv_mass
                obj[5] += (rbx * pyi - rby * pxi) * obj_inv_inertia

    # object ground friction: dry threshold + viscous drag, linear and angular
    sp: cython.double = sqrt(obj[3] * obj[3] + obj[4] * obj[4])
    if sp > 0.0:
        dec: cython.double = (fric_force + fric_visc * sp) * dt * obj_inv_mass
        if sp <= dec:
            obj[3] = 0.0
            obj[4] = 0.0
        else:
            sc: cython.double = (sp - dec) / sp
            obj[3] *= sc
            obj[4] *= sc
    wabs: cython.double = obj[5] if obj[5] >= 0.0 else -obj[5]
    if wabs > 0.0:
        deca: cython.double = (fric_torque + fric_visc_ang * wabs) * dt * obj_inv_inertia
        if wabs <= deca:
            obj[5] = 0.0
        elif obj[5] > 0.0:
            obj[5] -= deca
        else:
            obj[5] += deca

    # integrate
    for i in range(n):
        rx[i] += rvx[i] * dt
        ry[i] += rvy[i] * dt
    obj[0] += obj[3] * dt
    obj[1] += obj[4] * dt
    obj[2] = _wrap(obj[2] + obj[5] * dt)

    # positional correction on residual penetration; the object is only
    # repositioned against walls so that ground friction cannot be bypassed
    # by robots ratcheting it forward through push-out
    for it in range(2):
        m = _gen_contacts(n, rx, ry, robot_radius, obj, obj_is_circle,
                          obj_r, parts, part_nv, nparts, wv,
                          walls, nwalls, 0.0,
                          cia, cib, cpx, cpy, cnx, cny, cd, scratch)
        moved: cython.int = 0
        for k in range(m):
            pen: cython.double = cd[k] - 0.0002
            if pen <= 0.0:
                continue
            corr: cython.double = 0.9 * pen
            ia = cia[k]
            ib = cib[k]
            nx = cnx[k]
            ny = cny[k]
            if ia >= 0 and ib >= 0:
                rx[ia] -= 0.5 * corr * nx
                ry[ia] -= 0.5 * corr * ny
                rx[ib] += 0.5 * corr * nx
                ry[ib] += 0.5 * corr * ny
            elif ia == -2 and ib >= 0:
                rx[ib] += corr * nx
                ry[ib] += corr * ny
            elif ia == -1 and ib >= 0:
                rx[ib] += corr * nx
                ry[ib] += corr * ny
            elif ia == -2 and ib == -1:
                obj[0] += corr * nx
                obj[1] += corr * ny
            moved = 1
        if not moved:
            break
