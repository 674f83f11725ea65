"""Greedy hitting sets and degeneracy colourings with certified ratios."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import LemmaViolation, ModeInapplicable, NotUnitFamily
from .exact import _bits, build_graph, greedy_colouring, max_degree_Delta
from .geometry import Point, SquareFamily, contains_point, squares_intersect
from .hitters import (
    AXIS_PARALLEL_4,
    AXIS_PARALLEL_LEFTMOST_2,
    HITTER_SIZE,
    SIX_POINT_LEFTMOST,
    TEN_POINT,
    TWELVE_POINT_COVER,
    hitter_points,
)

MODE_ALIASES = {
    "ten-point": TEN_POINT,
    "six-point": SIX_POINT_LEFTMOST,
    "axis-4": AXIS_PARALLEL_4,
    "axis-leftmost-2": AXIS_PARALLEL_LEFTMOST_2,
    "twelve-point": TWELVE_POINT_COVER,
}


@dataclass(frozen=True)
class Round:
    pivot: int
    kind: str
    points: tuple
    removed: tuple


@dataclass
class HittingRun:
    points: list
    rounds: list
    k: int

    @property
    def nu_lower(self) -> int:
        # pivots are pairwise disjoint, so they form a packing
        return len(self.rounds)

    @property
    def guarantee(self) -> int:
        return self.k * self.nu_lower

    @property
    def pivots(self) -> list[int]:
        return [r.pivot for r in self.rounds]


@dataclass
class ColouringRun:
    colour_of: list
    order: list
    k_used: int
    bound: int
    delta: int
    back_degree: list = field(default_factory=list)


def resolve_mode(mode: str) -> str:
    return MODE_ALIASES.get(mode, mode)


def _is_axis(fam: SquareFamily) -> bool:
    return all(min(s.rot, math.pi / 2 - s.rot) <= fam.eps for s in fam)


def _check_mode(fam: SquareFamily, kind: str) -> None:
    if kind not in HITTER_SIZE:
        raise ModeInapplicable(f"unknown mode {kind!r}")
    if kind in (SIX_POINT_LEFTMOST, TWELVE_POINT_COVER, AXIS_PARALLEL_LEFTMOST_2) and not fam.is_unit():
        raise ModeInapplicable(f"{kind} needs squares of one size")
    if kind in (AXIS_PARALLEL_4, AXIS_PARALLEL_LEFTMOST_2) and not _is_axis(fam):
        raise ModeInapplicable(f"{kind} needs axis-parallel squares")


def _pivot(fam: SquareFamily, alive: list[int], kind: str) -> int:
    if kind in (SIX_POINT_LEFTMOST, AXIS_PARALLEL_LEFTMOST_2):
        return min(alive, key=lambda i: (fam[i].centre.x, fam[i].centre.y, i))
    return min(alive, key=lambda i: (fam[i].side, fam[i].centre.y, i))


def hit_greedy(fam: SquareFamily, mode: str) -> HittingRun:
    """Pick a pivot, hit its closed neighbourhood with a constant-size set,
    drop every square that got hit, repeat."""
    kind = resolve_mode(mode)
    _check_mode(fam, kind)
    alive = list(range(len(fam)))
    points: list[Point] = []
    rounds: list[Round] = []
    while alive:
        p = _pivot(fam, alive, kind)
        pivot = fam[p]
        pts = hitter_points(kind, pivot)
        removed = []
        for i in alive:
            s = fam[i]
            if any(contains_point(s, q, fam.tol) for q in pts):
                removed.append(i)
            elif squares_intersect(s, pivot, fam.tol):
                raise LemmaViolation(f"{kind} hitter of square {p} misses neighbour {i}")
            if kind == TEN_POINT and s.side < pivot.side - fam.eps:
                raise LemmaViolation("pivot is not the smallest remaining square")
        gone = set(removed)
        alive = [i for i in alive if i not in gone]
        points.extend(pts)
        rounds.append(Round(p, kind, tuple(pts), tuple(removed)))
    return HittingRun(points, rounds, HITTER_SIZE[kind])


def _reverse_greedy(adj: list[int], order: list[int]) -> tuple[dict, list[int]]:
    colouring_order = list(reversed(order))
    colour = greedy_colouring(adj, colouring_order)
    pos = {v: k for k, v in enumerate(colouring_order)}
    back = [sum(1 for u in _bits(adj[v]) if pos[u] < pos[v]) for v in range(len(adj))]
    return colour, back


def colour_unit_squares(fam: SquareFamily) -> ColouringRun:
    """Leftmost-first elimination; each square sees at most 6*Delta - 1 of the
    squares to its right, so reverse greedy uses at most 6*Delta colours."""
    if not fam.is_unit():
        raise NotUnitFamily("colour_unit_squares needs squares of one size")
    n = len(fam)
    if n == 0:
        return ColouringRun([], [], 0, 0, 0, [])
    g = build_graph(fam)
    order = sorted(range(n), key=lambda i: (fam[i].centre.x, fam[i].centre.y, i))
    colour, back = _reverse_greedy(list(g.adj), order)
    delta = max_degree_Delta(fam).value
    k = max(colour.values()) + 1
    bound = 6 * delta
    if max(back) > bound - 1 or k > bound:
        raise LemmaViolation(f"unit colouring used {k} colours with Delta = {delta}")
    return ColouringRun([colour[i] for i in range(n)], order, k, bound, delta, back)


def degeneracy(fam: SquareFamily) -> tuple[int, list[int]]:
    g = build_graph(fam)
    return _min_degree_order(list(g.adj))


def _min_degree_order(adj: list[int]) -> tuple[int, list[int]]:
    n = len(adj)
    alive = (1 << n) - 1
    order = []
    k = 0
    while alive:
        v = min(_bits(alive), key=lambda i: (bin(adj[i] & alive).count("1"), i))
        k = max(k, bin(adj[v] & alive).count("1"))
        order.append(v)
        alive &= ~(1 << v)
    return k, order


def colour_squares(fam: SquareFamily) -> ColouringRun:
    """Min-degree elimination; a crossing-pair counting argument keeps every
    minimum degree below 9(Delta - 1)."""
    n = len(fam)
    if n == 0:
        return ColouringRun([], [], 0, 0, 0, [])
    g = build_graph(fam)
    adj = list(g.adj)
    _, order = _min_degree_order(adj)
    colour, back = _reverse_greedy(adj, order)
    delta = max_degree_Delta(fam).value
    k = max(colour.values()) + 1
    bound = 1 if delta <= 1 else 9 * (delta - 1)
    if k > bound:
        raise LemmaViolation(f"colouring used {k} colours with Delta = {delta}")
    return ColouringRun([colour[i] for i in range(n)], order, k, bound, delta, back)
