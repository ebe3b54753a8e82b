"""Geometry kernel: 3D vectors, convex primitives, and distance queries.

All positions are meters in a right-handed frame with z up.  Points are
plain ``(x, y, z)`` tuples rather than numpy arrays: the simulation loop
calls these routines per frame and per element, where tuple math is both
faster and trivially deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random
from typing import Sequence

Vec3 = tuple[float, float, float]


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(a: Vec3, s: float) -> Vec3:
    return (a[0] * s, a[1] * s, a[2] * s)


def vdot(a: Vec3, b: Vec3) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def vcross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vnorm(a: Vec3) -> float:
    return math.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])


def vunit(a: Vec3) -> Vec3:
    n = vnorm(a)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return (a[0] / n, a[1] / n, a[2] / n)


def dist(a: Vec3, b: Vec3) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz)


def dist_sq(a: Vec3, b: Vec3) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    dz = a[2] - b[2]
    return dx * dx + dy * dy + dz * dz


def point_segment_distance(p: Vec3, a: Vec3, b: Vec3) -> float:
    """Distance from ``p`` to the closed segment ``[a, b]``.

    A degenerate segment (a == b) collapses to point distance.
    """
    ab = vsub(b, a)
    denom = vdot(ab, ab)
    if denom == 0.0:
        return dist(p, a)
    t = vdot(vsub(p, a), ab) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    closest = (a[0] + ab[0] * t, a[1] + ab[1] * t, a[2] + ab[2] * t)
    return dist(p, closest)


def point_polyline_distance(p: Vec3, points: Sequence[Vec3]) -> float:
    """Exact minimum distance from ``p`` to a polyline (all segments)."""
    if len(points) == 1:
        return dist(p, points[0])
    best = math.inf
    for a, b in zip(points, points[1:]):
        d = point_segment_distance(p, a, b)
        if d < best:
            best = d
    return best


def polyline_length(points: Sequence[Vec3]) -> float:
    return sum(dist(a, b) for a, b in zip(points, points[1:]))


def point_on_polyline(points: Sequence[Vec3], s: float) -> Vec3:
    """Point at arc length ``s`` from the start (clamped to the ends)."""
    if s <= 0.0:
        return points[0]
    for a, b in zip(points, points[1:]):
        seg = dist(a, b)
        if s <= seg:
            if seg == 0.0:
                return a
            t = s / seg
            return (
                a[0] + (b[0] - a[0]) * t,
                a[1] + (b[1] - a[1]) * t,
                a[2] + (b[2] - a[2]) * t,
            )
        s -= seg
    return points[-1]


def point_triangle_distance(p: Vec3, a: Vec3, b: Vec3, c: Vec3) -> float:
    """Distance from ``p`` to the closed triangle ``abc``.

    Region-based closest-point computation (Ericson, Real-Time Collision
    Detection, 5.1.5).
    """
    ab = vsub(b, a)
    ac = vsub(c, a)
    ap = vsub(p, a)
    d1 = vdot(ab, ap)
    d2 = vdot(ac, ap)
    if d1 <= 0.0 and d2 <= 0.0:
        return dist(p, a)

    bp = vsub(p, b)
    d3 = vdot(ab, bp)
    d4 = vdot(ac, bp)
    if d3 >= 0.0 and d4 <= d3:
        return dist(p, b)

    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 and d1 >= 0.0 and d3 <= 0.0:
        t = d1 / (d1 - d3)
        return dist(p, vadd(a, vscale(ab, t)))

    cp = vsub(p, c)
    d5 = vdot(ab, cp)
    d6 = vdot(ac, cp)
    if d6 >= 0.0 and d5 <= d6:
        return dist(p, c)

    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 and d2 >= 0.0 and d6 <= 0.0:
        t = d2 / (d2 - d6)
        return dist(p, vadd(a, vscale(ac, t)))

    va = d3 * d6 - d5 * d4
    if va <= 0.0 and (d4 - d3) >= 0.0 and (d5 - d6) >= 0.0:
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return dist(p, vadd(b, vscale(vsub(c, b), t)))

    denom = 1.0 / (va + vb + vc)
    v = vb * denom
    w = vc * denom
    closest = vadd(a, vadd(vscale(ab, v), vscale(ac, w)))
    return dist(p, closest)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by its min/max corners."""

    min_corner: Vec3
    max_corner: Vec3

    def __post_init__(self) -> None:
        for lo, hi in zip(self.min_corner, self.max_corner):
            if hi <= lo:
                raise ValueError("box must have positive extent on every axis")

    def contains(self, p: Vec3) -> bool:
        lo, hi = self.min_corner, self.max_corner
        return all(lo[k] <= p[k] <= hi[k] for k in range(3))

    def distance_to_solid(self, p: Vec3) -> float:
        """Distance to the filled box; 0 for interior points."""
        lo, hi = self.min_corner, self.max_corner
        s = 0.0
        for k in range(3):
            d = max(lo[k] - p[k], 0.0, p[k] - hi[k])
            s += d * d
        return math.sqrt(s)

    def distance_to_surface(self, p: Vec3) -> float:
        """Distance to the box boundary; positive inside too."""
        outside = self.distance_to_solid(p)
        if outside > 0.0:
            return outside
        lo, hi = self.min_corner, self.max_corner
        return min(min(p[k] - lo[k], hi[k] - p[k]) for k in range(3))

    @property
    def volume(self) -> float:
        lo, hi = self.min_corner, self.max_corner
        return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2])

    @property
    def surface_area(self) -> float:
        lo, hi = self.min_corner, self.max_corner
        dx, dy, dz = hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]
        return 2.0 * (dx * dy + dy * dz + dx * dz)

    def sample_surface(self, rng: Random) -> Vec3:
        """Uniform point on the boundary (face picked by area)."""
        lo, hi = self.min_corner, self.max_corner
        dx, dy, dz = hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]
        areas = [dy * dz, dy * dz, dx * dz, dx * dz, dx * dy, dx * dy]
        r = rng.uniform(0.0, sum(areas))
        face = 0
        for face, a in enumerate(areas):
            if r <= a:
                break
            r -= a
        u, v = rng.random(), rng.random()
        if face == 0:
            return (lo[0], lo[1] + u * dy, lo[2] + v * dz)
        if face == 1:
            return (hi[0], lo[1] + u * dy, lo[2] + v * dz)
        if face == 2:
            return (lo[0] + u * dx, lo[1], lo[2] + v * dz)
        if face == 3:
            return (lo[0] + u * dx, hi[1], lo[2] + v * dz)
        if face == 4:
            return (lo[0] + u * dx, lo[1] + v * dy, lo[2])
        return (lo[0] + u * dx, lo[1] + v * dy, hi[2])

    @property
    def aabb(self) -> tuple[Vec3, Vec3]:
        return (self.min_corner, self.max_corner)


@dataclass(frozen=True)
class VerticalCylinder:
    """Capped cylinder with a vertical axis."""

    center_xy: tuple[float, float]
    z_range: tuple[float, float]
    radius: float

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValueError("cylinder radius must be positive")
        if self.z_range[1] <= self.z_range[0]:
            raise ValueError("cylinder must have positive height")

    def _radial(self, p: Vec3) -> float:
        dx = p[0] - self.center_xy[0]
        dy = p[1] - self.center_xy[1]
        return math.sqrt(dx * dx + dy * dy)

    def contains(self, p: Vec3) -> bool:
        z0, z1 = self.z_range
        return z0 <= p[2] <= z1 and self._radial(p) <= self.radius

    def distance_to_solid(self, p: Vec3) -> float:
        z0, z1 = self.z_range
        dr = max(self._radial(p) - self.radius, 0.0)
        dz = max(z0 - p[2], 0.0, p[2] - z1)
        return math.sqrt(dr * dr + dz * dz)

    def distance_to_surface(self, p: Vec3) -> float:
        outside = self.distance_to_solid(p)
        if outside > 0.0:
            return outside
        z0, z1 = self.z_range
        return min(self.radius - self._radial(p), p[2] - z0, z1 - p[2])

    @property
    def volume(self) -> float:
        z0, z1 = self.z_range
        return math.pi * self.radius**2 * (z1 - z0)

    @property
    def surface_area(self) -> float:
        z0, z1 = self.z_range
        side = 2.0 * math.pi * self.radius * (z1 - z0)
        caps = 2.0 * math.pi * self.radius**2
        return side + caps

    def sample_surface(self, rng: Random) -> Vec3:
        z0, z1 = self.z_range
        side = 2.0 * math.pi * self.radius * (z1 - z0)
        cap = math.pi * self.radius**2
        r = rng.uniform(0.0, side + 2.0 * cap)
        cx, cy = self.center_xy
        if r <= side:
            theta = rng.uniform(0.0, 2.0 * math.pi)
            z = rng.uniform(z0, z1)
            return (cx + self.radius * math.cos(theta), cy + self.radius * math.sin(theta), z)
        theta = rng.uniform(0.0, 2.0 * math.pi)
        rad = self.radius * math.sqrt(rng.random())
        z = z0 if r <= side + cap else z1
        return (cx + rad * math.cos(theta), cy + rad * math.sin(theta), z)

    @property
    def aabb(self) -> tuple[Vec3, Vec3]:
        cx, cy = self.center_xy
        z0, z1 = self.z_range
        r = self.radius
        return ((cx - r, cy - r, z0), (cx + r, cy + r, z1))


@dataclass(frozen=True)
class MeshPatch:
    """Open triangle-mesh surface patch (e.g. an arch soffit).

    A patch has zero enclosed volume; "solid" distance and surface distance
    coincide, and containment means lying on the surface.
    """

    vertices: tuple[Vec3, ...]
    triangles: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if not self.triangles:
            raise ValueError("mesh patch needs at least one triangle")
        n = len(self.vertices)
        for tri in self.triangles:
            if any(i < 0 or i >= n for i in tri):
                raise ValueError("triangle index out of range")

    def _tri(self, idx: int) -> tuple[Vec3, Vec3, Vec3]:
        a, b, c = self.triangles[idx]
        return self.vertices[a], self.vertices[b], self.vertices[c]

    def distance_to_solid(self, p: Vec3) -> float:
        return min(
            point_triangle_distance(p, *self._tri(i)) for i in range(len(self.triangles))
        )

    distance_to_surface = distance_to_solid

    def contains(self, p: Vec3) -> bool:
        return self.distance_to_solid(p) <= 1e-9

    def _areas(self) -> list[float]:
        out = []
        for i in range(len(self.triangles)):
            a, b, c = self._tri(i)
            out.append(0.5 * vnorm(vcross(vsub(b, a), vsub(c, a))))
        return out

    @property
    def surface_area(self) -> float:
        return sum(self._areas())

    @property
    def volume(self) -> float:
        # Patches are thin shells; report area as the "positive volume" proxy
        # so the shape-validity check (volume > 0) still applies.
        return self.surface_area

    def sample_surface(self, rng: Random) -> Vec3:
        areas = self._areas()
        r = rng.uniform(0.0, sum(areas))
        idx = 0
        for idx, area in enumerate(areas):
            if r <= area:
                break
            r -= area
        a, b, c = self._tri(idx)
        u, v = rng.random(), rng.random()
        if u + v > 1.0:
            u, v = 1.0 - u, 1.0 - v
        ab = vsub(b, a)
        ac = vsub(c, a)
        return vadd(a, vadd(vscale(ab, u), vscale(ac, v)))

    @property
    def aabb(self) -> tuple[Vec3, Vec3]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        zs = [v[2] for v in self.vertices]
        return ((min(xs), min(ys), min(zs)), (max(xs), max(ys), max(zs)))


Primitive = Box | VerticalCylinder | MeshPatch
