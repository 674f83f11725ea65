"""Exact tau, nu, chi, omega and Delta for small square families.

Hitting sets only need candidate points: a non-empty intersection of
closed squares is a convex polygon whose vertices are square vertices or
crossings of two boundaries, and an isolated square is hit by its centre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

from .errors import InstanceTooLarge
from .geometry import (
    Point,
    SquareFamily,
    boundary_intersections,
    contains_point,
    dist,
    squares_intersect,
    vertices,
)

DEFAULT_TAU_LIMIT = 30
DEFAULT_CHI_LIMIT = 30
DEFAULT_NU_LIMIT = 40
DEFAULT_OMEGA_LIMIT = 40


@dataclass(frozen=True)
class IntersectionGraph:
    n: int
    adj: tuple  # adj[i] is a bitmask of neighbours of i

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def degree(self, i: int) -> int:
        return bin(self.adj[i]).count("1")

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n) if self.has_edge(i, j)]

    def neighbours(self, i: int) -> list[int]:
        return _bits(self.adj[i])


@dataclass(frozen=True)
class Candidate:
    point: Point
    mask: int

    @property
    def degree(self) -> int:
        return bin(self.mask).count("1")


@dataclass
class ExactResult:
    value: int
    witness: Any
    optimal: bool = True
    nodes_explored: int = 0


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _check_size(fam: SquareFamily, limit: Optional[int], what: str) -> None:
    if limit is not None and len(fam) > limit:
        raise InstanceTooLarge(f"{what}: {len(fam)} squares exceeds the limit {limit}")


def build_graph(fam: SquareFamily) -> IntersectionGraph:
    n = len(fam)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if squares_intersect(fam[i], fam[j], fam.tol):
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return IntersectionGraph(n, tuple(adj))


def candidate_points(fam: SquareFamily) -> list[Candidate]:
    eps = fam.eps
    raw: list[Point] = []
    for s in fam:
        raw.extend(vertices(s))
        raw.append(s.centre)
    for i in range(len(fam)):
        for j in range(i + 1, len(fam)):
            raw.extend(boundary_intersections(fam[i], fam[j], fam.tol))
    # grid-bucket dedup keeps this near-linear
    cell = max(eps * 4, 1e-12)
    buckets: dict = {}
    pts: list[Point] = []
    for p in raw:
        kx, ky = math.floor(p.x / cell), math.floor(p.y / cell)
        dup = False
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for k in buckets.get((kx + dx, ky + dy), ()):
                    if dist(pts[k], p) <= eps:
                        dup = True
                        break
                if dup:
                    break
            if dup:
                break
        if not dup:
            buckets.setdefault((kx, ky), []).append(len(pts))
            pts.append(p)
    out = []
    for p in pts:
        mask = 0
        for i, s in enumerate(fam):
            if contains_point(s, p, fam.tol):
                mask |= 1 << i
        out.append(Candidate(p, mask))
    return out


# ------------------------------------------------------------------ tau


class _SetCover:
    def __init__(self, masks: list[int], n: int):
        self.masks = masks
        self.n = n
        self.nodes = 0
        self.cover_of = [[k for k, m in enumerate(masks) if m >> i & 1] for i in range(n)]
        # squares i, j conflict when some candidate covers both
        conflict = [0] * n
        for m in masks:
            for i in _bits(m):
                conflict[i] |= m
        self.conflict = conflict

    def lower_bound(self, unc: int) -> int:
        if not unc:
            return 0
        # pairwise conflict-free uncovered squares each need their own point
        order = sorted(_bits(unc), key=lambda i: _popcount(self.conflict[i] & unc))
        used = 0
        blocked = 0
        for i in order:
            if not blocked >> i & 1:
                used += 1
                blocked |= self.conflict[i]
        best_cover = max(_popcount(m & unc) for m in self.masks)
        return max(used, -(-_popcount(unc) // best_cover))

    def greedy(self, unc: int) -> list[int]:
        chosen = []
        while unc:
            k = max(range(len(self.masks)), key=lambda k: _popcount(self.masks[k] & unc))
            chosen.append(k)
            unc &= ~self.masks[k]
        return chosen

    def solve(self, unc: int) -> list[int]:
        self.best = self.greedy(unc)
        self._search(unc, [])
        return self.best

    def _search(self, unc: int, chosen: list[int]) -> None:
        self.nodes += 1
        if not unc:
            if len(chosen) < len(self.best):
                self.best = list(chosen)
            return
        if len(chosen) + self.lower_bound(unc) >= len(self.best):
            return
        pivot = min(_bits(unc), key=lambda i: len(self.cover_of[i]))
        opts = sorted(self.cover_of[pivot], key=lambda k: -_popcount(self.masks[k] & unc))
        seen = []
        for k in opts:
            gain = self.masks[k] & unc
            if any(gain & ~g == 0 for g in seen):
                continue  # dominated by an option already explored
            seen.append(gain)
            chosen.append(k)
            self._search(unc & ~self.masks[k], chosen)
            chosen.pop()


def _reduce_masks(masks: list[int]) -> list[int]:
    uniq = sorted(set(m for m in masks if m), key=_popcount, reverse=True)
    kept: list[int] = []
    for m in uniq:
        if not any(m & ~k == 0 for k in kept):
            kept.append(m)
    return kept


def _components(n: int, masks: list[int]) -> list[int]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in masks:
        b = _bits(m)
        for i in b[1:]:
            parent[find(i)] = find(b[0])
    comps: dict = {}
    for i in range(n):
        comps[find(i)] = comps.get(find(i), 0) | 1 << i
    return list(comps.values())


def exact_tau(fam: SquareFamily, limit: Optional[int] = DEFAULT_TAU_LIMIT) -> ExactResult:
    _check_size(fam, limit, "exact_tau")
    n = len(fam)
    if n == 0:
        return ExactResult(0, [], True, 0)
    cands = candidate_points(fam)
    masks = _reduce_masks([c.mask for c in cands])
    point_of = {}
    for c in cands:
        point_of.setdefault(c.mask, c.point)
    points: list[Point] = []
    nodes = 0
    for comp in _components(n, masks):
        sub = _reduce_masks([m & comp for m in masks if m & comp])
        solver = _SetCover(sub, n)
        chosen = solver.solve(comp)
        nodes += solver.nodes
        for k in chosen:
            # any original candidate whose mask contains the reduced one
            m = next(c.mask for c in cands if sub[k] & ~c.mask == 0)
            points.append(point_of[m])
    return ExactResult(len(points), points, True, nodes)


# ------------------------------------------------------------------ cliques


def _max_clique(n: int, adj: list[int]) -> tuple[list[int], int]:
    best: list[int] = []
    nodes = 0

    def colour_bound(cand: int) -> list[tuple[int, int]]:
        # greedy colouring; returns (vertex, colour) sorted by colour
        out = []
        colour = 0
        rest = cand
        while rest:
            colour += 1
            avail = rest
            while avail:
                v = (avail & -avail).bit_length() - 1
                avail &= ~adj[v] & ~(1 << v)
                rest &= ~(1 << v)
                out.append((v, colour))
        return out

    def expand(clique: list[int], cand: int) -> None:
        nonlocal best, nodes
        nodes += 1
        order = colour_bound(cand)
        for v, c in reversed(order):
            if len(clique) + c <= len(best):
                return
            clique.append(v)
            new = cand & adj[v]
            if new:
                expand(clique, new)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            cand &= ~(1 << v)

    if n:
        expand([], (1 << n) - 1)
    return sorted(best), nodes


def exact_omega(fam: SquareFamily, limit: Optional[int] = DEFAULT_OMEGA_LIMIT) -> ExactResult:
    _check_size(fam, limit, "exact_omega")
    g = build_graph(fam)
    clique, nodes = _max_clique(g.n, list(g.adj))
    return ExactResult(len(clique), clique, True, nodes)


def exact_nu(fam: SquareFamily, limit: Optional[int] = DEFAULT_NU_LIMIT) -> ExactResult:
    _check_size(fam, limit, "exact_nu")
    g = build_graph(fam)
    full = (1 << g.n) - 1
    comp = [full & ~g.adj[i] & ~(1 << i) for i in range(g.n)]
    packing, nodes = _max_clique(g.n, comp)
    return ExactResult(len(packing), packing, True, nodes)


# ------------------------------------------------------------------ colouring


def greedy_colouring(adj: list[int], order: list[int]) -> dict[int, int]:
    colour: dict[int, int] = {}
    for v in order:
        used = {colour[u] for u in _bits(adj[v]) if u in colour}
        c = 0
        while c in used:
            c += 1
        colour[v] = c
    return colour


def _k_colour(n: int, adj: list[int], k: int, seed_clique: list[int], counter: list[int]) -> Optional[dict]:
    colour = {v: i for i, v in enumerate(seed_clique)}
    if len(seed_clique) > k:
        return None

    def pick() -> int:
        # DSATUR: most distinct neighbour colours, then highest degree
        best, key = -1, None
        for v in range(n):
            if v in colour:
                continue
            sat = len({colour[u] for u in _bits(adj[v]) if u in colour})
            kk = (sat, _popcount(adj[v]), -v)
            if key is None or kk > key:
                best, key = v, kk
        return best

    def rec() -> bool:
        counter[0] += 1
        if len(colour) == n:
            return True
        v = pick()
        used = {colour[u] for u in _bits(adj[v]) if u in colour}
        top = max(colour.values(), default=-1)
        for c in range(min(k, top + 2)):
            if c in used:
                continue
            colour[v] = c
            if rec():
                return True
            del colour[v]
        return False

    return dict(colour) if rec() else None


def exact_chi(fam: SquareFamily, limit: Optional[int] = DEFAULT_CHI_LIMIT) -> ExactResult:
    _check_size(fam, limit, "exact_chi")
    g = build_graph(fam)
    if g.n == 0:
        return ExactResult(0, {}, True, 0)
    adj = list(g.adj)
    clique, nodes = _max_clique(g.n, adj)
    order = sorted(range(g.n), key=lambda v: -_popcount(adj[v]))
    upper = greedy_colouring(adj, order)
    hi = max(upper.values()) + 1
    counter = [nodes]
    best = upper
    for k in range(max(1, len(clique)), hi):
        found = _k_colour(g.n, adj, k, clique, counter)
        if found is not None:
            best = found
            break
    value = max(best.values()) + 1
    return ExactResult(value, [best[i] for i in range(g.n)], True, counter[0])


def all_colourings(adj: Sequence[int], k: int):
    """Yield every proper colouring with colours 0..k-1 (labelled, not up to
    permutation) as a list indexed by vertex."""
    n = len(adj)
    if n == 0:
        yield []
        return
    # visit in BFS order so neighbours get fixed early
    order: list[int] = []
    seen = 0
    for root in range(n):
        if seen >> root & 1:
            continue
        queue = [root]
        seen |= 1 << root
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in _bits(adj[v] & ~seen):
                seen |= 1 << u
                queue.append(u)
    colour = [-1] * n

    def rec(pos: int):
        if pos == n:
            yield list(colour)
            return
        v = order[pos]
        used = {colour[u] for u in _bits(adj[v]) if colour[u] >= 0}
        for c in range(k):
            if c not in used:
                colour[v] = c
                yield from rec(pos + 1)
        colour[v] = -1

    yield from rec(0)


# ------------------------------------------------------------------ depth


def max_degree_Delta(fam: SquareFamily) -> ExactResult:
    if len(fam) == 0:
        return ExactResult(0, None, True, 0)
    cands = candidate_points(fam)
    best = max(cands, key=lambda c: c.degree)
    return ExactResult(best.degree, best.point, True, len(cands))


# ------------------------------------------------------------------ witness checks


def is_hitting_set(fam: SquareFamily, points) -> bool:
    return all(any(contains_point(s, p, fam.tol) for p in points) for s in fam)


def is_packing(fam: SquareFamily, idx) -> bool:
    idx = list(idx)
    return all(
        not squares_intersect(fam[a], fam[b], fam.tol) for k, a in enumerate(idx) for b in idx[k + 1:]
    )


def is_clique(fam: SquareFamily, idx) -> bool:
    idx = list(idx)
    return all(squares_intersect(fam[a], fam[b], fam.tol) for k, a in enumerate(idx) for b in idx[k + 1:])


def is_proper_colouring(fam: SquareFamily, colours) -> bool:
    n = len(fam)
    return all(
        colours[i] != colours[j] or not squares_intersect(fam[i], fam[j], fam.tol)
        for i in range(n)
        for j in range(i + 1, n)
    )
