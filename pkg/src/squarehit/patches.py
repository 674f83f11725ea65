"""Patch certificates: small point sets that provably hit every large square
whose centre falls in some region (triangle, disk, or a convex polygon
around a target set)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import LemmaViolation, MalformedPolygon, PreconditionViolated, ResolutionTooCoarse
from .geometry import (
    SQRT2,
    Point,
    Square,
    TolLike,
    _eps,
    contains_point,
    cross,
    dist,
    dist_point_square,
    midpoint,
    point_in_convex_polygon,
    segment_meets_square,
    vertices,
)

TRIANGLE = "Triangle"
THALES = "Thales"
CIRCULAR = "Circular"
POLYGON = "Polygon"

UNCONDITIONAL = "unconditional"
SEPARATED_ONLY = "separated-only"


@dataclass(frozen=True)
class SweptSquare:
    """All squares of a fixed centre and side whose vertex angle runs over [lo, hi]."""

    angle_lo: float
    angle_hi: float
    side: float
    centre: Point = Point(0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "centre", Point(*self.centre))
        if not (0 <= self.angle_lo <= self.angle_hi < math.pi / 2):
            raise PreconditionViolated(
                f"need 0 <= lo <= hi < pi/2, got [{self.angle_lo}, {self.angle_hi}]"
            )
        if not self.side > 0:
            raise PreconditionViolated("side must be positive")

    def at(self, angle: float) -> Square:
        return Square.from_vertex_angle(self.centre, self.side, angle)


Target = Union[Square, SweptSquare]


@dataclass(frozen=True)
class PatchCertificate:
    kind: str
    anchor_points: tuple
    region: dict
    min_side: float = 1.0
    margin: float = 0.0
    slacks: dict = field(default_factory=dict)
    mode: str = UNCONDITIONAL
    conditional_sides: tuple = ()
    ok: bool = True

    def __post_init__(self):
        if not self.anchor_points:
            raise PreconditionViolated("certificate needs at least one anchor point")

    def guarantees(self, s: Square, tol: TolLike = None) -> bool:
        """Whether this certificate promises that ``s`` contains an anchor point."""
        eps = _eps(tol)
        if self.kind == TRIANGLE:
            if s.side < self.min_side - eps:
                return False
            a, b, c = self.region["triangle"]
            if cross(a, b, c) < 0:
                b, c = c, b
            if abs(cross(a, b, c)) <= eps * eps:
                # degenerate triangle: centre must lie on the hull segment
                return _on_hull_of_collinear(s.centre, (a, b, c), eps)
            return point_in_convex_polygon(s.centre, (a, b, c), 0.0)
        if self.kind == CIRCULAR:
            if s.side < self.min_side - eps:
                return False
            return dist(s.centre, self.region["centre"]) <= self.region["radius"]
        if self.kind == POLYGON:
            if abs(s.side - 1.0) > eps:
                return False
            target = self.region["target"]
            if isinstance(target, SweptSquare):
                raise PreconditionViolated("pick a concrete square from the swept family first")
            from .geometry import squares_intersect

            if not squares_intersect(s, target, tol):
                return False
            ring = self.region["ring"]
            for i in self.conditional_sides:
                a, b = ring[i], ring[(i + 1) % len(ring)]
                if cross(a, b, s.centre) < 0:
                    return False
            return True
        return False


@dataclass(frozen=True)
class PolygonFailure:
    """Returned by :func:`polygon_hitter_certify` when a condition fails."""

    condition: str
    index: int
    slack: float
    slacks: dict
    ok: bool = False

    @property
    def margin(self) -> float:
        return self.slack


def _on_hull_of_collinear(p, pts, eps) -> bool:
    pa = max(((x, y) for x in pts for y in pts), key=lambda t: dist(*t))
    a, b = pa
    ln = dist(a, b)
    if ln == 0:
        return dist(p, a) <= eps
    if abs(cross(a, b, p)) / ln > eps:
        return False
    t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1])) / ln**2
    return -eps <= t <= 1 + eps


def triangle_patch(a, b, c, tol: TolLike = None) -> PatchCertificate:
    """Three points at mutual distance <= 1 patch their convex hull."""
    eps = _eps(tol)
    a, b, c = Point(*a), Point(*b), Point(*c)
    for (u, v), name in (((a, b), "ab"), ((b, c), "bc"), ((a, c), "ac")):
        if dist(u, v) > 1 + eps:
            raise PreconditionViolated(f"dist {name} = {dist(u, v):.6g} exceeds 1")
    margin = 1 - max(dist(a, b), dist(b, c), dist(a, c))
    return PatchCertificate(TRIANGLE, (a, b, c), {"triangle": (a, b, c)}, 1.0, margin)


def thales_patch_applies(a, b, c, square: Square, tol: TolLike = None) -> bool:
    """Check the hypotheses of the Thales-circle patch for one unit square.

    Returns True when they hold; in that case the conclusion (``a`` or
    ``b`` lies in ``square``) is verified too and a failure raises
    :class:`LemmaViolation`.
    """
    eps = _eps(tol)
    a, b, c = Point(*a), Point(*b), Point(*c)
    ab = dist(a, b)
    if ab > 1 + eps:
        raise PreconditionViolated(f"dist(a, b) = {ab:.6g} exceeds 1")
    if abs(square.side - 1.0) > eps:
        raise PreconditionViolated("the Thales patch is stated for unit squares")
    if ab == 0 or abs(cross(a, b, c)) / ab <= eps:
        raise PreconditionViolated("c lies on the line through a and b")
    q = midpoint(a, b)
    # relative slack only to absorb rounding when c is placed on the circle
    if dist(q, c) < dist(q, a) * (1 - 1e-12):
        return False
    if not contains_point(square, c, tol):
        return False
    side_c = cross(a, b, c) / ab
    side_s = cross(a, b, square.centre) / ab
    if not (side_c * side_s < 0 and abs(side_s) > eps):
        return False
    if not segment_meets_square(a, b, square, tol):
        return False
    if not (contains_point(square, a, tol) or contains_point(square, b, tol)):
        raise LemmaViolation(f"Thales patch: {square} misses both {a} and {b}")
    return True


def circular_patch(a, b, tol: TolLike = None) -> PatchCertificate:
    eps = _eps(tol)
    a, b = Point(*a), Point(*b)
    ab = dist(a, b)
    if not (SQRT2 - 1 - eps <= ab <= 1 + eps):
        raise PreconditionViolated(f"dist(a, b) = {ab:.6g} outside [sqrt2 - 1, 1]")
    q = midpoint(a, b)
    radius = SQRT2 / 2 - ab / 2
    return PatchCertificate(CIRCULAR, (a, b), {"centre": q, "radius": radius}, 1.0, radius)


def _check_ring(ring: Sequence, eps: float) -> None:
    k = len(ring)
    if k < 3:
        raise MalformedPolygon("ring needs at least 3 vertices")
    area = 0.0
    for i in range(k):
        a, b = ring[i], ring[(i + 1) % k]
        area += a[0] * b[1] - a[1] * b[0]
        if dist(a, b) <= eps:
            raise MalformedPolygon(f"repeated vertex at index {i}")
    if area <= 0:
        raise MalformedPolygon("ring must be counter-clockwise with positive area")
    turning = 0.0
    for i in range(k):
        a, b, c = ring[i - 1], ring[i], ring[(i + 1) % k]
        if cross(a, b, c) < -eps:
            raise MalformedPolygon(f"reflex vertex at index {i}")
        ang1 = math.atan2(b[1] - a[1], b[0] - a[0])
        ang2 = math.atan2(c[1] - b[1], c[0] - b[0])
        turning += (ang2 - ang1 + math.pi) % (2 * math.pi) - math.pi
    if abs(turning - 2 * math.pi) > 1e-6:
        raise MalformedPolygon("ring winds more than once")


def _target_inside(target: Target, ring, eps: float) -> bool:
    if isinstance(target, Square):
        pts = vertices(target)
    else:
        pts = []
        n = 64
        for j in range(n + 1):
            ang = target.angle_lo + (target.angle_hi - target.angle_lo) * j / n
            pts.extend(vertices(target.at(ang)))
    return all(point_in_convex_polygon(p, ring, eps) for p in pts)


def _dist_to_target(q, target: Target, resolution: int) -> float:
    if isinstance(target, Square):
        return dist_point_square(q, target)
    return dist_point_swept(q, target, resolution)


def polygon_slacks(p0, ring: Sequence, target: Target, resolution: int = 4096) -> dict:
    """Slack of conditions (i), (ii), (iii) per ring index (positive = satisfied)."""
    k = len(ring)
    s1, s2, s3 = [], [], []
    for i in range(k):
        pi, pn = ring[i], ring[(i + 1) % k]
        q = midpoint(pi, pn)
        s1.append(1 - dist(p0, pi))
        s2.append(1 - dist(pi, pn))
        s3.append(_dist_to_target(q, target, resolution) - dist(pi, q))
    return {"i": s1, "ii": s2, "iii": s3}


def polygon_hitter_certify(
    p0,
    ring: Sequence,
    target: Target,
    mode: str = UNCONDITIONAL,
    tol: TolLike = None,
    resolution: int = 4096,
) -> Union[PatchCertificate, PolygonFailure]:
    """Certify that ``{p0} | ring`` hits every unit square meeting ``target``.

    ``ring`` is the convex counter-clockwise polygon p1..pk.  In
    unconditional mode every side must pass condition (iii).  In
    separated-only mode sides failing (iii) are recorded and the guarantee
    is limited to squares whose centre is not beyond those sides.
    """
    eps = _eps(tol)
    if mode not in (UNCONDITIONAL, SEPARATED_ONLY):
        raise PreconditionViolated(f"unknown mode {mode!r}")
    p0 = Point(*p0)
    ring = [Point(*p) for p in ring]
    _check_ring(ring, eps)
    if not point_in_convex_polygon(p0, ring, eps):
        raise PreconditionViolated("p0 must lie in the polygon")
    if not _target_inside(target, ring, eps):
        raise PreconditionViolated("target must lie inside the polygon")
    slacks = polygon_slacks(p0, ring, target, resolution)
    for cond in ("i", "ii"):
        for i, v in enumerate(slacks[cond]):
            if v < -eps:
                return PolygonFailure(cond, i, v, slacks)
    failing = tuple(i for i, v in enumerate(slacks["iii"]) if v < -eps)
    if failing and mode == UNCONDITIONAL:
        worst = min(failing, key=lambda i: slacks["iii"][i])
        return PolygonFailure("iii", worst, slacks["iii"][worst], slacks)
    passing_iii = [v for i, v in enumerate(slacks["iii"]) if i not in failing]
    margin = min(slacks["i"] + slacks["ii"] + passing_iii)
    return PatchCertificate(
        POLYGON,
        (p0, *ring),
        {"ring": tuple(ring), "p0": p0, "target": target},
        1.0,
        margin,
        slacks,
        mode,
        failing,
    )


def dist_point_swept(q, sw: SweptSquare, resolution: int = 1024) -> float:
    """Certified lower bound on the distance from ``q`` to the swept region.

    The angle interval is sampled on nested dyadic grids with 2**j
    intervals, j = 0..ceil(log2(resolution)).  Between neighbouring samples
    at spacing h, the distance moves by at most (h/2) * side * sqrt2/2, so
    each level yields a valid bound; the best one is returned.  The nested
    grids make the result non-decreasing in ``resolution``.
    """
    if resolution < 1:
        raise PreconditionViolated("resolution must be >= 1")
    lo, hi = sw.angle_lo, sw.angle_hi
    if hi == lo:
        return dist_point_square(q, sw.at(lo))
    levels = max(0, math.ceil(math.log2(resolution)))
    n = 2**levels
    width = hi - lo
    samples = [dist_point_square(q, sw.at(lo + width * j / n)) for j in range(n + 1)]
    raw = min(samples)
    if raw == 0.0:
        return 0.0
    best = -math.inf
    for lev in range(levels + 1):
        stride = 2 ** (levels - lev)
        level_min = min(samples[::stride])
        h = width / 2**lev
        best = max(best, level_min - h * sw.side * SQRT2 / 4)
    if best <= 0:
        raise ResolutionTooCoarse(
            f"drift correction swamps the sampled distance {raw:.3g}; raise resolution"
        )
    return best


def lemma_guarantee_holds(cert: PatchCertificate, s: Square, tol: TolLike = None) -> Optional[bool]:
    """None when the certificate does not speak about ``s``; otherwise whether it is hit."""
    if not cert.guarantees(s, tol):
        return None
    return any(contains_point(s, p, tol) for p in cert.anchor_points)
