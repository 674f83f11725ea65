"""Constant-size point sets that hit every neighbour of a pivot square,
plus the adversarial search used to stress them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import CoverageCheckFailed, Inconclusive, NotAxisParallel, PreconditionViolated, SearchFailed
from .geometry import (
    SQRT2,
    Point,
    Square,
    TolLike,
    _eps,
    batch_intersect,
    vertices,
)
from .patches import UNCONDITIONAL, PatchCertificate, polygon_hitter_certify

AXIS_PARALLEL_4 = "AxisParallel4"
AXIS_PARALLEL_LEFTMOST_2 = "AxisParallelLeftmost2"
TEN_POINT = "TenPoint"
SIX_POINT_LEFTMOST = "SixPointLeftmost"
TWELVE_POINT_COVER = "TwelvePointCover"

HITTER_KINDS = (AXIS_PARALLEL_4, AXIS_PARALLEL_LEFTMOST_2, TEN_POINT, SIX_POINT_LEFTMOST, TWELVE_POINT_COVER)
HITTER_SIZE = {
    AXIS_PARALLEL_4: 4,
    AXIS_PARALLEL_LEFTMOST_2: 2,
    TEN_POINT: 10,
    SIX_POINT_LEFTMOST: 6,
    TWELVE_POINT_COVER: 12,
}

# Output of derive_nine_gon(), frozen after verification (see tests).
NINE_GON_ANGLES = (
    0.7389778081610743,
    1.390999473885942,
    2.192279935131624,
    2.723949274099158,
    3.559236015805036,
    4.090905360772617,
    4.892185817881848,
    5.544207491995664,
    6.2831853011319385,
)

# Twelve disk centres of radius 1/2 covering the square of side sqrt2 + 1
# centred at the origin; found offline by a Voronoi minimax iteration.
TWELVE_COVER_CENTRES = (
    (0.920962, -0.802771),
    (-0.037658, 1.154796),
    (-0.255499, -0.312115),
    (-0.879239, 0.113749),
    (-0.047252, 0.524152),
    (0.34869, -0.802771),
    (-0.431128, -1.167079),
    (0.830039, 0.885895),
    (0.525425, 0.084666),
    (-1.065963, -0.732318),
    (-0.868373, 0.845714),
    (1.093803, 0.082864),
)

SIX_POINT_T = math.sqrt(4 * SQRT2 - 5) / 4
SIX_POINT_ANGLE_H1 = 0.82
SIX_POINT_ANGLE_H2 = 0.92


@dataclass(frozen=True)
class NineGonConfig:
    angles: tuple
    margin: float

    def __post_init__(self):
        a = self.angles
        if len(a) != 9:
            raise PreconditionViolated("need exactly 9 angles")
        if any(a[i + 1] <= a[i] for i in range(8)) or a[-1] - a[0] >= 2 * math.pi:
            raise PreconditionViolated("angles must increase strictly and span less than 2*pi")

    def gaps(self) -> list[float]:
        a = self.angles
        return [a[i + 1] - a[i] for i in range(8)] + [a[0] + 2 * math.pi - a[-1]]

    def points(self) -> list[Point]:
        return [Point(math.cos(t), math.sin(t)) for t in self.angles]


# ---------------------------------------------------------------- nine-gon search


def _unit_box_dist(q: np.ndarray) -> np.ndarray:
    dx = np.maximum(np.abs(q[:, 0]) - 0.5, 0.0)
    dy = np.maximum(np.abs(q[:, 1]) - 0.5, 0.0)
    return np.hypot(dx, dy)


def _nine_gon_slacks(theta: np.ndarray) -> np.ndarray:
    """Slacks of the side-length and Thales conditions for points on the unit circle.

    The distance-to-centre condition is an identity here and is left out.
    """
    th = np.sort(theta)
    p = np.column_stack([np.cos(th), np.sin(th)])
    pn = np.roll(p, -1, axis=0)
    q = (p + pn) / 2
    side = 1 - np.linalg.norm(p - pn, axis=1)
    thales = _unit_box_dist(q) - np.linalg.norm(p - q, axis=1)
    return np.concatenate([side, thales])


def _compass(theta: np.ndarray, step: float = 0.05, stop: float = 1e-7) -> np.ndarray:
    """Coordinate descent on single angles and angle pairs, maximising the worst slack."""
    best = _nine_gon_slacks(theta).min()
    n = len(theta)
    while step > stop:
        moves = []
        for i in range(n):
            for d in (step, -step):
                t = theta.copy()
                t[i] += d
                moves.append(t)
        for i in range(n):
            for j in range(i + 1, n):
                for d in (step, -step):
                    for e in (step, -step):
                        t = theta.copy()
                        t[i] += d
                        t[j] += e
                        moves.append(t)
        vals = [_nine_gon_slacks(t).min() for t in moves]
        k = int(np.argmax(vals))
        if vals[k] > best + 1e-15:
            theta, best = moves[k], vals[k]
        else:
            step /= 2
    return theta


def _polish(theta: np.ndarray) -> np.ndarray:
    # maximise m subject to every slack >= m
    x0 = np.append(theta, _nine_gon_slacks(theta).min())
    cons = {"type": "ineq", "fun": lambda x: _nine_gon_slacks(x[:-1]) - x[-1]}
    res = minimize(lambda x: -x[-1], x0, constraints=[cons], method="SLSQP",
                   options={"maxiter": 500, "ftol": 1e-13})
    if res.success and _nine_gon_slacks(res.x[:-1]).min() > _nine_gon_slacks(theta).min():
        return res.x[:-1]
    return theta


def _canonical(theta: np.ndarray) -> tuple:
    th = np.sort(np.mod(theta, 2 * math.pi))
    return tuple(float(t) for t in th)


def certify_nine_gon(angles: Sequence[float], tol: TolLike = None):
    ring = [Point(math.cos(t), math.sin(t)) for t in angles]
    target = Square(Point(0.0, 0.0), 1.0, 0.0)
    return polygon_hitter_certify(Point(0.0, 0.0), ring, target, UNCONDITIONAL, tol)


def derive_nine_gon(tol: TolLike = None) -> NineGonConfig:
    """Perturb a regular 9-gon on the unit circle until the polygon certificate
    holds against the axis-parallel unit square at the origin."""
    base = 2 * math.pi * np.arange(9) / 9
    offsets = np.linspace(0, 2 * math.pi / 9, 40, endpoint=False)
    start = max(offsets, key=lambda o: _nine_gon_slacks(base + o).min())
    theta = _compass(base + start)
    theta = _polish(theta)
    angles = _canonical(theta)
    cert = certify_nine_gon(angles, tol)
    # condition (i) has zero slack by construction (points on the unit circle)
    margin = min(cert.slacks["ii"] + cert.slacks["iii"])
    if not cert.ok or margin <= 0:
        raise SearchFailed(f"no positive-margin nine-gon found (best {margin:.3g})")
    return NineGonConfig(angles, margin)


@lru_cache(maxsize=1)
def nine_gon() -> NineGonConfig:
    if NINE_GON_ANGLES:
        cert = certify_nine_gon(NINE_GON_ANGLES)
        return NineGonConfig(NINE_GON_ANGLES, min(cert.slacks["ii"] + cert.slacks["iii"]))
    return derive_nine_gon()


# ---------------------------------------------------------------- hitters


def _to_world(pivot: Square, local: Sequence) -> list[Point]:
    return [pivot.to_world(pivot.side * x, pivot.side * y) for x, y in local]


def ten_point_hitter(pivot: Square) -> list[Point]:
    cfg = nine_gon()
    local = [(0.0, 0.0)] + [(math.cos(t), math.sin(t)) for t in cfg.angles]
    return _to_world(pivot, local)


def ten_point_certificate(tol: TolLike = None) -> PatchCertificate:
    return certify_nine_gon(nine_gon().angles, tol)


def six_point_local(vertex_angle: float) -> list[tuple[float, float]]:
    t = SIX_POINT_T
    p0, p1, p3, p5 = (t, 0.0), (t, 1.0), (t + 1.0, 0.0), (t, -1.0)
    if vertex_angle <= math.pi / 4:
        p2 = (t + math.cos(SIX_POINT_ANGLE_H1), math.sin(SIX_POINT_ANGLE_H1))
        p4 = (t + math.cos(SIX_POINT_ANGLE_H2), -math.sin(SIX_POINT_ANGLE_H2))
    else:
        p2 = (t + math.cos(SIX_POINT_ANGLE_H2), math.sin(SIX_POINT_ANGLE_H2))
        p4 = (t + math.cos(SIX_POINT_ANGLE_H1), -math.sin(SIX_POINT_ANGLE_H1))
    return [p0, p1, p2, p3, p4, p5]


def six_point_hitter(pivot: Square) -> list[Point]:
    """Six points hitting every neighbour of side ``pivot.side`` whose centre
    is not to the left of the pivot's centre.

    The frame is the world frame moved to the pivot centre and scaled by the
    side; it is not rotated with the pivot since "left" refers to world x.
    """
    local = six_point_local(pivot.vertex_angle)
    c, s = pivot.centre, pivot.side
    return [Point(c.x + s * x, c.y + s * y) for x, y in local]


def six_point_claim_inequalities(t: float = SIX_POINT_T) -> tuple[float, float]:
    """Slacks (rhs - lhs) of the two closed-form conditions that fix t."""
    lhs1 = t**2 + (0.5 - math.sqrt(0.25 - t**2)) ** 2
    rhs1 = ((SQRT2 - 1) / 2) ** 2
    lhs2 = t**2 + (SQRT2 - 1) ** 2
    return rhs1 - lhs1, 0.25 - lhs2


def axis_parallel_hitter(pivot: Square, leftmost: bool = False, tol: TolLike = None) -> list[Point]:
    eps = _eps(tol)
    if min(pivot.rot, math.pi / 2 - pivot.rot) > eps:
        raise NotAxisParallel(f"pivot rotation {pivot.rot} is not 0")
    c, h = pivot.centre, pivot.half
    right = [Point(c.x + h, c.y + h), Point(c.x + h, c.y - h)]
    if leftmost:
        return right
    return right + [Point(c.x - h, c.y + h), Point(c.x - h, c.y - h)]


# ---------------------------------------------------------------- disk covers


@dataclass(frozen=True)
class CoverCheck:
    ok: bool
    margin: float
    cells: int


def cover_check(centers: Sequence, r: float, side: float, tol: TolLike = None,
                pitch: Optional[float] = None, max_depth: int = 8) -> CoverCheck:
    """Decide whether disks of radius ``r`` cover the axis-parallel square of
    the given side centred at the origin.

    The square is cut into cells.  A cell is certified when one disk holds
    all four of its corners (disks are convex), and the certified slack of
    the cell is that disk's worst corner slack.  A cell whose centre lies in
    no disk disproves coverage.  Anything else is split, up to ``max_depth``
    times.  The returned margin is a lower bound on r minus the covering
    radius when ``ok``; when not ok it is the (negative) slack of an
    uncovered point.
    """
    eps = _eps(tol)
    if r <= 0 or side <= 0:
        raise PreconditionViolated("radius and side must be positive")
    C = np.asarray(centers, dtype=float).reshape(-1, 2)
    if len(C) == 0:
        return CoverCheck(False, -math.inf, 0)
    if pitch is None:
        pitch = side / 256
    n = max(1, math.ceil(side / pitch))
    h = side / n
    idx = (np.arange(n) + 0.5) * h - side / 2
    gx, gy = np.meshgrid(idx, idx)
    cells = np.column_stack([gx.ravel(), gy.ravel()])
    half = h / 2
    margin = math.inf
    total = 0
    for _depth in range(max_depth + 1):
        total += len(cells)
        # worst-corner distance to each centre is |dx|+half, |dy|+half combined
        dx = np.abs(cells[:, None, 0] - C[None, :, 0]) + half
        dy = np.abs(cells[:, None, 1] - C[None, :, 1]) + half
        corner_slack = (r - np.hypot(dx, dy)).max(axis=1)
        centre_slack = (r - np.hypot(cells[:, None, 0] - C[None, :, 0],
                                     cells[:, None, 1] - C[None, :, 1])).max(axis=1)
        bad = centre_slack < -eps
        if bad.any():
            return CoverCheck(False, float(centre_slack.min()), total)
        good = corner_slack >= -eps
        if good.any():
            margin = min(margin, float(corner_slack[good].min()))
        rest = cells[~good]
        if len(rest) == 0:
            return CoverCheck(True, margin, total)
        half /= 2
        offs = np.array([[-half, -half], [half, -half], [-half, half], [half, half]])
        cells = (rest[:, None, :] + offs[None, :, :]).reshape(-1, 2)
    raise Inconclusive(f"{len(cells)} cells undecided at pitch {2 * half:.3g}")


@lru_cache(maxsize=1)
def _twelve_cover_margin() -> float:
    res = cover_check(TWELVE_COVER_CENTRES, 0.5, SQRT2 + 1)
    if not res.ok:
        raise CoverageCheckFailed("stored twelve-disk configuration does not cover")
    return res.margin


def twelve_point_cover_hitter(pivot: Square) -> list[Point]:
    _twelve_cover_margin()
    return _to_world(pivot, TWELVE_COVER_CENTRES)


def hitter_points(kind: str, pivot: Square) -> list[Point]:
    if kind == TEN_POINT:
        return ten_point_hitter(pivot)
    if kind == SIX_POINT_LEFTMOST:
        return six_point_hitter(pivot)
    if kind == AXIS_PARALLEL_4:
        return axis_parallel_hitter(pivot, False)
    if kind == AXIS_PARALLEL_LEFTMOST_2:
        return axis_parallel_hitter(pivot, True)
    if kind == TWELVE_POINT_COVER:
        return twelve_point_cover_hitter(pivot)
    raise PreconditionViolated(f"unknown hitter kind {kind!r}")


# ---------------------------------------------------------------- falsifier


@dataclass(frozen=True)
class NeighbourClass:
    """Which neighbours of the pivot a hitter promises to hit.

    Sides are multiples of the pivot side; ``max_side_ratio`` equal to
    ``min_side_ratio`` means a single size.
    """

    min_side_ratio: float = 1.0
    max_side_ratio: float = 1.0
    right_half: bool = False
    axis_parallel: bool = False


NEIGHBOURS_FOR = {
    TEN_POINT: NeighbourClass(1.0, 3.0),
    SIX_POINT_LEFTMOST: NeighbourClass(1.0, 1.0, right_half=True),
    AXIS_PARALLEL_4: NeighbourClass(1.0, 3.0, axis_parallel=True),
    AXIS_PARALLEL_LEFTMOST_2: NeighbourClass(1.0, 1.0, right_half=True, axis_parallel=True),
    TWELVE_POINT_COVER: NeighbourClass(1.0, 1.0),
}


def right_halfdisk(pivot: Square) -> dict:
    """Region holding the centres of unit neighbours to the right of the pivot."""
    return {"kind": "halfdisk", "centre": (pivot.centre.x, pivot.centre.y),
            "radius": pivot.side * SQRT2, "direction": (1.0, 0.0)}


def _signed_dists(cx, cy, side, rot, pts: np.ndarray) -> np.ndarray:
    """Signed distance from every point to every square (negative inside): shape (N, K)."""
    c = np.cos(rot)[:, None]
    s = np.sin(rot)[:, None]
    dx = pts[None, :, 0] - cx[:, None]
    dy = pts[None, :, 1] - cy[:, None]
    lx = np.abs(c * dx + s * dy)
    ly = np.abs(-s * dx + c * dy)
    h = side[:, None] / 2
    out = np.hypot(np.maximum(lx - h, 0), np.maximum(ly - h, 0))
    inside = np.maximum(lx, ly) - h
    return np.where(out > 0, out, inside)


def _feasible(pivot: Square, cls: NeighbourClass, cx, cy, side, rot, eps) -> np.ndarray:
    ok = batch_intersect(np.column_stack([cx, cy]), side, rot, pivot, eps)
    if cls.right_half:
        ok &= cx >= pivot.centre.x
    lo = cls.min_side_ratio * pivot.side
    hi = cls.max_side_ratio * pivot.side
    ok &= (side >= lo - 1e-15) & (side <= hi + 1e-15)
    return ok


def _sample(rng: np.random.Generator, pivot: Square, cls: NeighbourClass, m: int):
    lo = cls.min_side_ratio * pivot.side
    hi = cls.max_side_ratio * pivot.side
    # bias towards the smallest admissible size, the hardest to hit
    side = lo + (hi - lo) * rng.random(m) ** 3
    reach = (pivot.side + side) * SQRT2 / 2
    ang = rng.uniform(0, 2 * math.pi, m)
    rad = reach * np.sqrt(rng.random(m))
    cx = pivot.centre.x + rad * np.cos(ang)
    cy = pivot.centre.y + rad * np.sin(ang)
    if cls.right_half:
        cx = pivot.centre.x + np.abs(cx - pivot.centre.x)
    rot = np.zeros(m) if cls.axis_parallel else rng.uniform(0, math.pi / 2, m)
    return cx, cy, side, rot


def falsify_hitter(
    pivot: Square,
    points: Sequence,
    constraints: NeighbourClass = NeighbourClass(),
    budget: int = 100_000,
    seed: int = 0,
    tol: TolLike = None,
    climb_starts: int = 16,
    climb_steps: int = 200,
) -> Optional[Square]:
    """Look for a neighbour of ``pivot`` in the given class that contains no point.

    Random sampling of ``budget`` candidates is followed by hill-climbing
    from the candidates that stay farthest from every point.  Returns a
    counterexample square, or None when none was found.
    """
    eps = _eps(tol)
    rng = np.random.default_rng(seed)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    chunk = 50_000
    pool = []
    done = 0
    while done < budget:
        m = min(chunk, budget - done)
        done += m
        cx, cy, side, rot = _sample(rng, pivot, constraints, m)
        keep = _feasible(pivot, constraints, cx, cy, side, rot, eps)
        cx, cy, side, rot = cx[keep], cy[keep], side[keep], rot[keep]
        if len(cx) == 0:
            continue
        if len(pts) == 0:
            return Square(Point(cx[0], cy[0]), side[0], rot[0])
        score = _signed_dists(cx, cy, side, rot, pts).min(axis=1)
        hit = score > eps
        if hit.any():
            i = int(np.argmax(score))
            return Square(Point(cx[i], cy[i]), side[i], rot[i])
        top = np.argsort(-score)[:climb_starts]
        pool.extend((score[i], cx[i], cy[i], side[i], rot[i]) for i in top)
    if not pool:
        return None
    pool.sort(key=lambda t: -t[0])
    for _, x, y, sd, r in pool[:climb_starts]:
        found = _climb(pivot, constraints, pts, x, y, sd, r, rng, climb_steps, eps)
        if found is not None:
            return found
    return None


def _climb(pivot, cls, pts, x, y, sd, r, rng, steps, eps) -> Optional[Square]:
    best = np.array([x, y, sd, r])
    f = _signed_dists(best[0:1], best[1:2], best[2:3], best[3:4], pts).min()
    step = 0.05 * pivot.side
    k = 32
    for _ in range(steps):
        cand = best[None, :] + rng.normal(size=(k, 4)) * np.array([step, step, step * 0.5, step])
        if cls.axis_parallel:
            cand[:, 3] = 0.0
        lo = cls.min_side_ratio * pivot.side
        hi = cls.max_side_ratio * pivot.side
        cand[:, 2] = np.clip(cand[:, 2], lo, hi)
        ok = _feasible(pivot, cls, cand[:, 0], cand[:, 1], cand[:, 2], cand[:, 3], eps)
        cand = cand[ok]
        if len(cand) == 0:
            step *= 0.7
            continue
        vals = _signed_dists(cand[:, 0], cand[:, 1], cand[:, 2], cand[:, 3], pts).min(axis=1)
        i = int(np.argmax(vals))
        if vals[i] > f:
            best, f = cand[i], vals[i]
            if f > eps:
                return Square(Point(best[0], best[1]), best[2], best[3])
        else:
            step *= 0.7
        if step < 1e-7:
            break
    return None


