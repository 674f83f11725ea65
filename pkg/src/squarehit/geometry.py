"""Rotated closed squares in the plane and the predicates the solvers rely on.

A square is stored as (centre, side, rot) with ``rot`` normalised into
[0, pi/2).  Vertex ``k`` sits at ``centre + side/sqrt(2) * e(rot + pi/4 + k*pi/2)``
so the vertices come out counter-clockwise.  All predicates treat squares
as closed sets; anything within ``eps`` of the boundary counts as inside.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import PreconditionViolated

HALF_PI = math.pi / 2
SQRT2 = math.sqrt(2.0)
DEFAULT_EPS = 1e-9


class Point(namedtuple("_Point", "x y")):
    __slots__ = ()

    def __new__(cls, x, y):
        x = float(x)
        y = float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise PreconditionViolated(f"non-finite point ({x}, {y})")
        return super().__new__(cls, x, y)

    def __add__(self, other):
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def __mul__(self, k):
        return Point(self.x * k, self.y * k)

    __rmul__ = __mul__

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])


def midpoint(p, q) -> Point:
    return Point((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)


def rotate(p, angle: float, about=(0.0, 0.0)) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    dx, dy = p[0] - about[0], p[1] - about[1]
    return Point(about[0] + c * dx - s * dy, about[1] + s * dx + c * dy)


def cross(o, a, b) -> float:
    """z-component of (a - o) x (b - o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class Tolerance:
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not (0 < self.eps < 1e-3):
            raise PreconditionViolated(f"tolerance must lie in (0, 1e-3), got {self.eps}")


TolLike = Union[Tolerance, float, None]


def _eps(tol: TolLike) -> float:
    if tol is None:
        return DEFAULT_EPS
    if isinstance(tol, Tolerance):
        return tol.eps
    return float(tol)


@dataclass(frozen=True)
class Square:
    centre: Point
    side: float
    rot: float = 0.0

    def __post_init__(self):
        c = self.centre if isinstance(self.centre, Point) else Point(*self.centre)
        object.__setattr__(self, "centre", c)
        side = float(self.side)
        if not (math.isfinite(side) and side > 0):
            raise PreconditionViolated(f"side must be positive, got {self.side}")
        object.__setattr__(self, "side", side)
        rot = float(self.rot)
        if not math.isfinite(rot):
            raise PreconditionViolated("rotation must be finite")
        rot = math.fmod(rot, HALF_PI)
        if rot < 0:
            rot += HALF_PI
        # fmod can return HALF_PI - tiny for inputs like -1e-18
        if rot >= HALF_PI or HALF_PI - rot < 1e-15:
            rot = 0.0
        object.__setattr__(self, "rot", rot)

    @classmethod
    def from_vertex_angle(cls, centre, side: float, angle: float) -> "Square":
        """Build from the direction of the first-quadrant vertex."""
        return cls(centre, side, angle - math.pi / 4)

    @property
    def vertex_angle(self) -> float:
        """Angle in [0, pi/2) of the vertex in the quadrant x > 0, y >= 0."""
        a = math.fmod(self.rot + math.pi / 4, HALF_PI)
        return a + HALF_PI if a < 0 else a

    @property
    def half(self) -> float:
        return self.side / 2

    def translated(self, dx: float, dy: float) -> "Square":
        return Square(Point(self.centre.x + dx, self.centre.y + dy), self.side, self.rot)

    def scaled(self, k: float, about=(0.0, 0.0)) -> "Square":
        c = Point(about[0] + k * (self.centre.x - about[0]), about[1] + k * (self.centre.y - about[1]))
        return Square(c, self.side * k, self.rot)

    def rotated(self, angle: float, about=(0.0, 0.0)) -> "Square":
        return Square(rotate(self.centre, angle, about), self.side, self.rot + angle)

    def to_local(self, p) -> tuple[float, float]:
        c, s = math.cos(self.rot), math.sin(self.rot)
        dx, dy = p[0] - self.centre.x, p[1] - self.centre.y
        return (c * dx + s * dy, -s * dx + c * dy)

    def to_world(self, lx: float, ly: float) -> Point:
        c, s = math.cos(self.rot), math.sin(self.rot)
        return Point(self.centre.x + c * lx - s * ly, self.centre.y + s * lx + c * ly)

    def axes(self) -> tuple[tuple[float, float], tuple[float, float]]:
        c, s = math.cos(self.rot), math.sin(self.rot)
        return (c, s), (-s, c)


def vertices(s: Square) -> list[Point]:
    """The four vertices, counter-clockwise, starting from angle rot + pi/4."""
    r = s.side / SQRT2
    out = []
    for k in range(4):
        a = s.rot + math.pi / 4 + k * HALF_PI
        out.append(Point(s.centre.x + r * math.cos(a), s.centre.y + r * math.sin(a)))
    return out


def edges(s: Square) -> list[tuple[Point, Point]]:
    vs = vertices(s)
    return [(vs[k], vs[(k + 1) % 4]) for k in range(4)]


def contains_point(s: Square, p, tol: TolLike = None) -> bool:
    eps = _eps(tol)
    lx, ly = s.to_local(p)
    h = s.half + eps
    return abs(lx) <= h and abs(ly) <= h


def dist_point_square(p, s: Square) -> float:
    lx, ly = s.to_local(p)
    dx = max(abs(lx) - s.half, 0.0)
    dy = max(abs(ly) - s.half, 0.0)
    return math.hypot(dx, dy)


def _project(poly: Sequence, axis) -> tuple[float, float]:
    vals = [v[0] * axis[0] + v[1] * axis[1] for v in poly]
    return min(vals), max(vals)


def _polygon_axes(poly: Sequence) -> list[tuple[float, float]]:
    out = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        ln = math.hypot(ex, ey)
        if ln > 0:
            out.append((-ey / ln, ex / ln))
    return out


def separation_margin(poly_a: Sequence, poly_b: Sequence) -> float:
    """Signed separating-axis margin of two convex polygons.

    Positive: the polygons overlap by at least this much along every edge
    normal (penetration depth).  Negative: some edge normal separates them
    by ``-margin``.
    """
    best = math.inf
    for axis in _polygon_axes(poly_a) + _polygon_axes(poly_b):
        amin, amax = _project(poly_a, axis)
        bmin, bmax = _project(poly_b, axis)
        best = min(best, min(amax, bmax) - max(amin, bmin))
    return best


def squares_intersect(a: Square, b: Square, tol: TolLike = None) -> bool:
    return separation_margin(vertices(a), vertices(b)) >= -_eps(tol)


def squares_cross(a: Square, b: Square, tol: TolLike = None) -> bool:
    """Intersecting, yet no vertex of either square lies in the other."""
    if not squares_intersect(a, b, tol):
        return False
    if any(contains_point(b, v, tol) for v in vertices(a)):
        return False
    return not any(contains_point(a, v, tol) for v in vertices(b))


def _segment_intersections(p, p2, q, q2, eps: float) -> list[Point]:
    rx, ry = p2[0] - p[0], p2[1] - p[1]
    sx, sy = q2[0] - q[0], q2[1] - q[1]
    rlen = math.hypot(rx, ry)
    slen = math.hypot(sx, sy)
    denom = rx * sy - ry * sx
    qpx, qpy = q[0] - p[0], q[1] - p[1]
    if abs(denom) <= 1e-12 * rlen * slen:
        # parallel: only collinear overlaps contribute
        if abs(qpx * ry - qpy * rx) / rlen > eps:
            return []
        t0 = (qpx * rx + qpy * ry) / rlen**2
        t1 = ((q2[0] - p[0]) * rx + (q2[1] - p[1]) * ry) / rlen**2
        lo = max(0.0, min(t0, t1))
        hi = min(1.0, max(t0, t1))
        if lo > hi + eps / rlen:
            return []
        hi = max(lo, hi)
        return [Point(p[0] + lo * rx, p[1] + lo * ry), Point(p[0] + hi * rx, p[1] + hi * ry)]
    t = (qpx * sy - qpy * sx) / denom
    u = (qpx * ry - qpy * rx) / denom
    et, eu = eps / rlen, eps / slen
    if -et <= t <= 1 + et and -eu <= u <= 1 + eu:
        t = min(1.0, max(0.0, t))
        return [Point(p[0] + t * rx, p[1] + t * ry)]
    return []


def dedup_points(points: Iterable, eps: float) -> list[Point]:
    out: list[Point] = []
    for p in points:
        if all(dist(p, q) > eps for q in out):
            out.append(Point(*p))
    return out


def boundary_intersections(a: Square, b: Square, tol: TolLike = None) -> list[Point]:
    eps = _eps(tol)
    if not squares_intersect(a, b, tol):
        return []
    found = []
    for p, p2 in edges(a):
        for q, q2 in edges(b):
            found.extend(_segment_intersections(p, p2, q, q2, eps))
    return dedup_points(found, eps)


def segment_meets_square(p, q, s: Square, tol: TolLike = None) -> bool:
    """Whether the closed segment [p, q] meets the closed square (Liang-Barsky)."""
    eps = _eps(tol)
    ax, ay = s.to_local(p)
    bx, by = s.to_local(q)
    h = s.half + eps
    t0, t1 = 0.0, 1.0
    for d, lo_val in ((bx - ax, ax), (by - ay, ay)):
        for sign in (1.0, -1.0):
            # constraint: sign * (lo_val + t*d) <= h
            num = h - sign * lo_val
            den = sign * d
            if den == 0:
                if num < 0:
                    return False
            elif den > 0:
                t1 = min(t1, num / den)
            else:
                t0 = max(t0, num / den)
    return t0 <= t1


def inner_outer_disk(s: Square) -> tuple[Point, float, float]:
    return s.centre, s.side / 2, s.side * SQRT2 / 2


def clip_convex(subject: Sequence, clip: Sequence) -> list[Point]:
    """Sutherland-Hodgman intersection of two counter-clockwise convex polygons."""
    out = [Point(*p) for p in subject]
    n = len(clip)
    for i in range(n):
        a, b = clip[i], clip[(i + 1) % n]
        if not out:
            break
        inp, out = out, []
        for j in range(len(inp)):
            cur, prev = inp[j], inp[j - 1]
            cin = cross(a, b, cur) >= 0
            pin = cross(a, b, prev) >= 0
            if cin:
                if not pin:
                    out.append(_line_cross(prev, cur, a, b))
                out.append(cur)
            elif pin:
                out.append(_line_cross(prev, cur, a, b))
    return out


def _line_cross(p, q, a, b) -> Point:
    d1 = cross(a, b, p)
    d2 = cross(a, b, q)
    t = d1 / (d1 - d2)
    return Point(p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def intersection_polygon(a: Square, b: Square) -> list[Point]:
    return clip_convex(vertices(a), vertices(b))


def point_in_convex_polygon(p, poly: Sequence, tol: TolLike = None) -> bool:
    """Counter-clockwise polygon, closed, tolerance measured as distance to edge lines."""
    eps = _eps(tol)
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ln = dist(a, b)
        if ln == 0:
            continue
        if cross(a, b, p) / ln < -eps:
            return False
    return True


# vectorised helpers used by the Monte-Carlo checks and the falsifier


def contains_points(s: Square, pts, tol: TolLike = None) -> np.ndarray:
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    c, sn = math.cos(s.rot), math.sin(s.rot)
    dx = pts[:, 0] - s.centre.x
    dy = pts[:, 1] - s.centre.y
    lx = c * dx + sn * dy
    ly = -sn * dx + c * dy
    h = s.half + _eps(tol)
    return (np.abs(lx) <= h) & (np.abs(ly) <= h)


def batch_contains(centres, sides, rots, pts, tol: TolLike = None) -> np.ndarray:
    """(N, K) matrix: square i (given by arrays) contains point k."""
    centres = np.asarray(centres, dtype=float).reshape(-1, 2)
    sides = np.broadcast_to(np.asarray(sides, dtype=float), (len(centres),))
    rots = np.broadcast_to(np.asarray(rots, dtype=float), (len(centres),))
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    c = np.cos(rots)[:, None]
    s = np.sin(rots)[:, None]
    dx = pts[None, :, 0] - centres[:, 0:1]
    dy = pts[None, :, 1] - centres[:, 1:2]
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    h = sides[:, None] / 2 + _eps(tol)
    return (np.abs(lx) <= h) & (np.abs(ly) <= h)


def batch_intersect(centres, sides, rots, other: Square, tol: TolLike = None) -> np.ndarray:
    """Vectorised separating-axis test of N squares against one square."""
    centres = np.asarray(centres, dtype=float).reshape(-1, 2)
    n = len(centres)
    sides = np.broadcast_to(np.asarray(sides, dtype=float), (n,))
    rots = np.broadcast_to(np.asarray(rots, dtype=float), (n,))
    eps = _eps(tol)
    d = centres - np.array(other.centre)
    ok = np.ones(n, dtype=bool)
    # half-extent of a square of half-side h rotated by phi relative to the axis:
    # h * (|cos phi| + |sin phi|)
    for ax_angle in (other.rot, other.rot + HALF_PI):
        ax = np.array([math.cos(ax_angle), math.sin(ax_angle)])
        proj = np.abs(d @ ax)
        phi = rots - ax_angle
        ext = sides / 2 * (np.abs(np.cos(phi)) + np.abs(np.sin(phi)))
        ok &= proj <= ext + other.side / 2 + eps
    for k in (0, 1):
        ang = rots + k * HALF_PI
        ax = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        proj = np.abs(np.sum(d * ax, axis=1))
        phi = other.rot - ang
        ext = other.side / 2 * (np.abs(np.cos(phi)) + np.abs(np.sin(phi)))
        ok &= proj <= ext + sides / 2 + eps
    return ok


@dataclass(frozen=True)
class SquareFamily:
    squares: tuple = ()
    tol: Tolerance = field(default_factory=Tolerance)

    def __post_init__(self):
        object.__setattr__(self, "squares", tuple(self.squares))
        if not isinstance(self.tol, Tolerance):
            object.__setattr__(self, "tol", Tolerance(float(self.tol)))

    def __len__(self) -> int:
        return len(self.squares)

    def __iter__(self) -> Iterator[Square]:
        return iter(self.squares)

    def __getitem__(self, i) -> Square:
        return self.squares[i]

    @property
    def eps(self) -> float:
        return self.tol.eps

    def subfamily(self, indices: Iterable[int]) -> "SquareFamily":
        return SquareFamily(tuple(self.squares[i] for i in indices), self.tol)

    def extended(self, more: Iterable[Square]) -> "SquareFamily":
        return SquareFamily(self.squares + tuple(more), self.tol)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        cs = np.array([s.centre for s in self.squares], dtype=float).reshape(-1, 2)
        sides = np.array([s.side for s in self.squares], dtype=float)
        rots = np.array([s.rot for s in self.squares], dtype=float)
        return cs, sides, rots

    def is_unit(self) -> bool:
        if not self.squares:
            return True
        s0 = self.squares[0].side
        return all(abs(s.side - s0) <= self.eps for s in self.squares)


def family(squares: Iterable[Square], eps: float = DEFAULT_EPS) -> SquareFamily:
    return SquareFamily(tuple(squares), Tolerance(eps))
