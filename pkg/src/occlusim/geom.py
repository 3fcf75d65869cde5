"""Planar geometry kernel: shapes, poses, ray casting, containment and overlap.

Pure value semantics throughout; safe to share across concurrent trial workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from shapely.geometry import Point, Polygon
from shapely.ops import unary_union

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __add__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x + o.x, self.y + o.y)

    def __sub__(self, o: "Vec2") -> "Vec2":
        return Vec2(self.x - o.x, self.y - o.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def dot(self, o: "Vec2") -> float:
        return self.x * o.x + self.y * o.y

    def cross(self, o: "Vec2") -> float:
        return self.x * o.y - self.y * o.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize zero vector")
        return Vec2(self.x / n, self.y / n)

    def perp(self) -> "Vec2":
        """Rotate by +90 degrees."""
        return Vec2(-self.y, self.x)

    def rotated(self, angle: float) -> "Vec2":
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class Pose:
    position: Vec2
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    def to_world(self, p: Vec2) -> Vec2:
        return self.position + p.rotated(self.heading)

    def to_local(self, p: Vec2) -> Vec2:
        return (p - self.position).rotated(-self.heading)


class ConfigError(ValueError):
    """Raised for rejected configurations (unknown shapes, impossible layouts)."""


# ---------------------------------------------------------------------------
# Shape catalogue

OBJECT_KINDS = ("square", "circle", "rectangle", "triangle", "plus", "l", "h")


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    height: float
    mass: float
    # dims meaning depends on kind: circle -> (diameter,), square -> (side, side),
    # rectangle -> (length, width), triangle -> side lengths, plus/l/h -> (span, arm)
    dims: tuple = ()

    @property
    def bounding_box(self) -> tuple:
        """(width, depth) of the axis-aligned bounding box in shape-local frame."""
        k = self.kind
        if k == "circle":
            return (self.dims[0], self.dims[0])
        if k == "square" or k in ("plus", "l", "h"):
            return (0.40, 0.40)
        if k == "rectangle":
            return (0.60, 0.15)
        if k == "triangle":
            return (0.40, 0.30)
        if k == "goal-disc":
            return (0.40, 0.40)
        if k == "robot-disc":
            return (0.08, 0.08)
        raise ConfigError(f"unknown shape kind: {k!r}")


_CATALOGUE = {
    "square": ShapeSpec("square", height=0.20, mass=5.0, dims=(0.40, 0.40)),
    "circle": ShapeSpec("circle", height=0.20, mass=5.0, dims=(0.40,)),
    "rectangle": ShapeSpec("rectangle", height=0.20, mass=5.0, dims=(0.60, 0.15)),
    "triangle": ShapeSpec("triangle", height=0.20, mass=5.0, dims=(0.30, 0.40, 0.50)),
    "plus": ShapeSpec("plus", height=0.20, mass=5.0, dims=(0.40, 0.10)),
    "l": ShapeSpec("l", height=0.20, mass=5.0, dims=(0.40, 0.10)),
    "h": ShapeSpec("h", height=0.20, mass=5.0, dims=(0.40, 0.10)),
    "goal-disc": ShapeSpec("goal-disc", height=0.20, mass=0.0, dims=(0.40,)),
    "robot-disc": ShapeSpec("robot-disc", height=0.06, mass=0.300, dims=(0.08,)),
}


def shape_spec(kind: str) -> ShapeSpec:
    try:
        return _CATALOGUE[kind.lower()]
    except KeyError:
        raise ConfigError(f"unknown shape kind: {kind!r}") from None


@dataclass(frozen=True)
class Footprint:
    """Either a disc or a union of convex CCW polygon parts, centroid at origin."""

    circle_radius: float | None = None
    parts: tuple = ()  # tuple of (k, 2) float arrays, CCW

    @property
    def is_circle(self) -> bool:
        return self.circle_radius is not None

    def area(self) -> float:
        if self.is_circle:
            return math.pi * self.circle_radius**2
        return sum(polygon_area(p) for p in self.parts)

    def union_polygon(self) -> Polygon:
        if self.is_circle:
            return Point(0, 0).buffer(self.circle_radius, quad_segs=256)
        return unary_union([Polygon(p) for p in self.parts])

    def circumradius(self) -> float:
        if self.is_circle:
            return self.circle_radius
        return max(float(np.hypot(v[0], v[1])) for p in self.parts for v in p)

    def contains_local(self, p: Vec2, tol: float = 0.0) -> bool:
        if self.is_circle:
            return math.hypot(p.x, p.y) <= self.circle_radius + tol
        for part in self.parts:
            if _convex_contains(part, p.x, p.y, tol):
                return True
        return False


def _rect(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def polygon_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_centroid(verts: np.ndarray) -> np.ndarray:
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    a = 0.5 * float(np.sum(cr))
    cx = float(np.sum((x + xn) * cr)) / (6.0 * a)
    cy = float(np.sum((y + yn) * cr)) / (6.0 * a)
    return np.array([cx, cy])


def polygon_inertia_per_density(verts: np.ndarray) -> float:
    """Second moment of area about the origin (multiply by density for inertia)."""
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    return float(np.sum(cr * (x * x + x * xn + xn * xn + y * y + y * yn + yn * yn))) / 12.0


def footprint_inertia(fp: Footprint, mass: float) -> float:
    """Moment of inertia about the centroid assuming uniform density."""
    if fp.is_circle:
        return 0.5 * mass * fp.circle_radius**2
    area = fp.area()
    density = mass / area
    return density * sum(polygon_inertia_per_density(p) for p in fp.parts)


def build_footprint(spec: ShapeSpec) -> Footprint:
    """Centroid-centered footprint for a catalogued shape.

    Concave shapes (plus, L, H) are stored as unions of non-overlapping
    axis-aligned rectangles. The triangle has its right angle implied by the
    30-40-50 sides; legs are placed along the local axes, then recentered.
    """
    k = spec.kind
    if k in ("circle", "goal-disc", "robot-disc"):
        return Footprint(circle_radius=spec.dims[0] / 2.0)
    if k == "square":
        return Footprint(parts=(_rect(-0.2, -0.2, 0.2, 0.2),))
    if k == "rectangle":
        return Footprint(parts=(_rect(-0.3, -0.075, 0.3, 0.075),))
    if k == "triangle":
        verts = np.array([[0.0, 0.0], [0.4, 0.0], [0.0, 0.3]])
        return Footprint(parts=(verts - polygon_centroid(verts),))
    if k == "plus":
        parts = (
            _rect(-0.05, -0.2, 0.05, 0.2),
            _rect(-0.2, -0.05, -0.05, 0.05),
            _rect(0.05, -0.05, 0.2, 0.05),
        )
        return Footprint(parts=parts)
    if k == "l":
        parts = [_rect(-0.2, -0.2, -0.1, 0.2), _rect(-0.1, -0.2, 0.2, -0.1)]
        c = _union_centroid(parts)
        return Footprint(parts=tuple(p - c for p in parts))
    if k == "h":
        parts = (
            _rect(-0.2, -0.2, -0.1, 0.2),
            _rect(0.1, -0.2, 0.2, 0.2),
            _rect(-0.1, -0.05, 0.1, 0.05),
        )
        return Footprint(parts=parts)
    raise ConfigError(f"unknown shape kind: {k!r}")


def _union_centroid(parts) -> np.ndarray:
    total = sum(polygon_area(p) for p in parts)
    c = sum(polygon_area(p) * polygon_centroid(p) for p in parts)
    return c / total


def min_support_radius(fp: Footprint) -> float:
    """Minimum distance from the footprint centroid to its boundary.

    Governs how close the shape's centroid can pass to wall corners when the
    shape is rotated against them (narrower shapes trace closer).
    """
    if fp.is_circle:
        return fp.circle_radius
    boundary = fp.union_polygon().boundary
    return float(Point(0.0, 0.0).distance(boundary))


# ---------------------------------------------------------------------------
# Ray casting

@dataclass(frozen=True)
class Segment:
    a: Vec2
    b: Vec2


@dataclass(frozen=True)
class RayHit:
    entity_id: object
    distance: float
    normal: Vec2


def _ray_segment(ox, oy, dx, dy, ax, ay, bx, by):
    """Return (t, nx, ny) for ray/segment intersection, or None."""
    ex, ey = bx - ax, by - ay
    denom = dx * ey - dy * ex
    if abs(denom) < 1e-15:
        return None
    t = ((ax - ox) * ey - (ay - oy) * ex) / denom
    s = ((ax - ox) * dy - (ay - oy) * dx) / denom
    if t < 0.0 or s < 0.0 or s > 1.0:
        return None
    # normal perpendicular to the segment, opposing the ray
    nx, ny = ey, -ex
    ln = math.hypot(nx, ny)
    nx, ny = nx / ln, ny / ln
    if nx * dx + ny * dy > 0.0:
        nx, ny = -nx, -ny
    return t, nx, ny


def _ray_circle(ox, oy, dx, dy, cx, cy, r):
    """Return (t, nx, ny) for the nearest non-negative ray/circle hit, or None."""
    fx, fy = ox - cx, oy - cy
    b = fx * dx + fy * dy
    c = fx * fx + fy * fy - r * r
    disc = b * b - c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    t = -b - sq
    if t < 0.0:
        t = -b + sq
        if t < 0.0:
            return None
    px, py = ox + t * dx - cx, oy + t * dy - cy
    ln = math.hypot(px, py)
    if ln == 0.0:
        return None
    return t, px / ln, py / ln


def _entity_nearest_hit(geometry, ox, oy, dx, dy):
    if isinstance(geometry, Segment):
        return _ray_segment(ox, oy, dx, dy, geometry.a.x, geometry.a.y,
                            geometry.b.x, geometry.b.y)
    fp, pose = geometry
    if fp.is_circle:
        return _ray_circle(ox, oy, dx, dy, pose.position.x, pose.position.y,
                           fp.circle_radius)
    best = None
    for part in fp.parts:
        world = _transform_part(part, pose)
        n = len(world)
        for i in range(n):
            ax, ay = world[i]
            bx, by = world[(i + 1) % n]
            hit = _ray_segment(ox, oy, dx, dy, ax, ay, bx, by)
            if hit is not None and (best is None or hit[0] < best[0]):
                best = hit
    return best


def _transform_part(part: np.ndarray, pose: Pose) -> np.ndarray:
    c, s = math.cos(pose.heading), math.sin(pose.heading)
    rot = np.array([[c, -s], [s, c]])
    return part @ rot.T + np.array([pose.position.x, pose.position.y])


def ray_cast(entities, origin: Vec2, direction: Vec2, max_range: float) -> list:
    """Cast a ray against segments and posed footprints.

    ``entities`` is an iterable of (entity_id, geometry) where geometry is a
    ``Segment`` or a ``(Footprint, Pose)`` pair. Returns at most one hit per
    entity (its nearest surface), sorted ascending by distance; only hits
    within ``max_range`` are reported.
    """
    if max_range <= 0.0:
        raise ValueError("max_range must be positive")
    d = direction.normalized()
    hits = []
    for eid, geometry in entities:
        res = _entity_nearest_hit(geometry, origin.x, origin.y, d.x, d.y)
        if res is not None and res[0] <= max_range:
            hits.append(RayHit(eid, res[0], Vec2(res[1], res[2])))
    hits.sort(key=lambda h: h.distance)
    return hits


# ---------------------------------------------------------------------------
# Overlap / penetration

def _convex_contains(verts: np.ndarray, px: float, py: float, tol: float = 0.0) -> bool:
    n = len(verts)
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        if (bx - ax) * (py - ay) - (by - ay) * (px - ax) < -tol:
            return False
    return True


def _closest_on_segment(px, py, ax, ay, bx, by):
    ex, ey = bx - ax, by - ay
    ln2 = ex * ex + ey * ey
    t = 0.0 if ln2 == 0 else max(0.0, min(1.0, ((px - ax) * ex + (py - ay) * ey) / ln2))
    return ax + t * ex, ay + t * ey


def _circle_poly_pen(cx, cy, r, verts):
    """(depth, nx, ny) with normal pointing from polygon toward circle, or None."""
    n = len(verts)
    if _convex_contains(verts, cx, cy):
        # inside: push out through the nearest edge
        best = None
        for i in range(n):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % n]
            qx, qy = _closest_on_segment(cx, cy, ax, ay, bx, by)
            d = math.hypot(cx - qx, cy - qy)
            ex, ey = bx - ax, by - ay
            ln = math.hypot(ex, ey)
            nx, ny = ey / ln, -ex / ln  # outward for CCW
            if best is None or d < best[0]:
                best = (d, nx, ny)
        d, nx, ny = best
        return r + d, nx, ny
    best = None
    for i in range(n):
        ax, ay = verts[i]
        bx, by = verts[(i + 1) % n]
        qx, qy = _closest_on_segment(cx, cy, ax, ay, bx, by)
        d = math.hypot(cx - qx, cy - qy)
        if best is None or d < best[0]:
            best = (d, qx, qy)
    d, qx, qy = best
    if d >= r or d == 0.0:
        return None
    return r - d, (cx - qx) / d, (cy - qy) / d


def _sat_poly_poly(va: np.ndarray, vb: np.ndarray):
    """Min-penetration SAT for convex CCW polygons; (depth, nx, ny) from A to B."""
    best = None
    for verts, sign in ((va, 1.0), (vb, -1.0)):
        other = vb if sign > 0 else va
        n = len(verts)
        for i in range(n):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % n]
            ex, ey = bx - ax, by - ay
            ln = math.hypot(ex, ey)
            nx, ny = ey / ln, -ex / ln  # outward normal
            own_max = max(v[0] * nx + v[1] * ny for v in verts)
            other_min = min(v[0] * nx + v[1] * ny for v in other)
            pen = own_max - other_min
            if pen <= 0.0:
                return None
            if best is None or pen < best[0]:
                best = (pen, sign * nx, sign * ny)
    return best


@dataclass(frozen=True)
class Overlap:
    overlapping: bool
    depth: float = 0.0
    normal: Vec2 = field(default_factory=lambda: Vec2(0.0, 0.0))  # from A toward B


def overlap(fp_a: Footprint, pose_a: Pose, fp_b: Footprint, pose_b: Pose) -> Overlap:
    """Deepest penetration between two posed footprints."""
    best = None

    def consider(depth, nx, ny):
        nonlocal best
        if best is None or depth > best[0]:
            best = (depth, nx, ny)

    if fp_a.is_circle and fp_b.is_circle:
        dx = pose_b.position.x - pose_a.position.x
        dy = pose_b.position.y - pose_a.position.y
        dist = math.hypot(dx, dy)
        rsum = fp_a.circle_radius + fp_b.circle_radius
        if dist < rsum:
            if dist == 0.0:
                consider(rsum, 1.0, 0.0)
            else:
                consider(rsum - dist, dx / dist, dy / dist)
    elif fp_a.is_circle or fp_b.is_circle:
        circ_first = fp_a.is_circle
        cf, cp = (fp_a, pose_a) if circ_first else (fp_b, pose_b)
        pf, pp = (fp_b, pose_b) if circ_first else (fp_a, pose_a)
        for part in pf.parts:
            world = _transform_part(part, pp)
            res = _circle_poly_pen(cp.position.x, cp.position.y, cf.circle_radius, world)
            if res is not None:
                depth, nx, ny = res
                if circ_first:
                    nx, ny = -nx, -ny  # from A (circle) toward B (polygon)
                consider(depth, nx, ny)
    else:
        for pa in fp_a.parts:
            wa = _transform_part(pa, pose_a)
            for pb in fp_b.parts:
                wb = _transform_part(pb, pose_b)
                res = _sat_poly_poly(wa, wb)
                if res is not None:
                    consider(*res)

    if best is None:
        return Overlap(False)
    depth, nx, ny = best
    return Overlap(True, depth, Vec2(nx, ny))
