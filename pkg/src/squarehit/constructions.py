"""Extremal square families, each checked by the exact solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConstructionInvalid, MalformedPath
from .exact import (
    all_colourings,
    build_graph,
    exact_chi,
    exact_nu,
    exact_omega,
    exact_tau,
    max_degree_Delta,
)
from .geometry import Point, Square, SquareFamily, family

SOLVERS = {
    "nu": exact_nu,
    "tau": exact_tau,
    "chi": exact_chi,
    "omega": exact_omega,
    "Delta": max_degree_Delta,
}


@dataclass(frozen=True)
class NamedConstruction:
    name: str
    family: SquareFamily
    expected: dict
    roles: dict = field(default_factory=dict)  # named square indices, e.g. chain endpoints


def measured(nc: NamedConstruction, keys: Optional[Sequence[str]] = None) -> dict:
    keys = list(nc.expected) if keys is None else list(keys)
    return {k: SOLVERS[k](nc.family).value for k in keys}


def verify(nc: NamedConstruction) -> NamedConstruction:
    got = measured(nc)
    if got != nc.expected:
        raise ConstructionInvalid(f"{nc.name}: expected {nc.expected}, solvers give {got}")
    return nc


# ------------------------------------------------------------------ pinwheels


def pinwheel(edge: float = 1.0, side: float = 1.0, overhang: float = 0.0) -> tuple[list[Point], list[Square], list]:
    """One square on the outer side of each edge of an equilateral triangle.

    Square k has a side on the line through edge k, starting `overhang`
    before vertex k. Returns (triangle vertices, squares, edge frames)."""
    r = edge / math.sqrt(3)
    verts = [Point(r * math.cos(math.pi / 2 + 2 * math.pi * k / 3), r * math.sin(math.pi / 2 + 2 * math.pi * k / 3))
             for k in range(3)]
    squares, frames = [], []
    for k in range(3):
        a, b = verts[k], verts[(k + 1) % 3]
        u = ((b.x - a.x) / edge, (b.y - a.y) / edge)
        n = (u[1], -u[0])  # outward normal of a counter-clockwise triangle
        sx, sy = a.x - overhang * u[0], a.y - overhang * u[1]
        c = (sx + (u[0] + n[0]) * side / 2, sy + (u[1] + n[1]) * side / 2)
        squares.append(Square(c, side, math.atan2(u[1], u[0])))
        frames.append((u, n))
    return verts, squares, frames


def three_pairwise_unit() -> NamedConstruction:
    _, sq, _ = pinwheel(0.9, 1.0, 0.05)
    return verify(NamedConstruction("three_pairwise_unit", family(sq), {"omega": 3, "Delta": 2, "nu": 1}))


def pinwheel_tau2() -> NamedConstruction:
    # squares only touch at the triangle vertices
    _, sq, _ = pinwheel(1.0, 1.0, 0.0)
    return verify(NamedConstruction("pinwheel_tau2", family(sq), {"tau": 2, "nu": 1}))


def pinwheel_vertices() -> list[Point]:
    return pinwheel(1.0, 1.0, 0.0)[0]


# shifts (a_A, b_A, a_B, b_B) of the two copies at each vertex, in edge frames,
# plus the overhang of the base pinwheel; found by a robustness search
NINE_SHIFT = (0.12403459261072451, -0.22573580524174716, -0.0786955835029213, 0.1287216292204053)
NINE_OVERHANG = 0.1734926224671999
NINE_EDGE = 0.5
# tau = 3 verified for every scale in this interval
NINE_SCALE_RANGE = (0.95, 1.05)


def nine_square_family(scale: float = 1.0, shift: Sequence[float] = NINE_SHIFT,
                       overhang: float = NINE_OVERHANG) -> SquareFamily:
    a_a, b_a, a_b, b_b = (scale * v for v in shift)
    _, base, frames = pinwheel(NINE_EDGE, 1.0, overhang)
    out = list(base)
    for k in range(3):
        # the two squares meeting near vertex k+1, each shifted in its own frame
        (ua, na), (ub, nb) = frames[k], frames[(k + 1) % 3]
        out.append(base[k].translated(a_a * ua[0] + b_a * na[0], a_a * ua[1] + b_a * na[1]))
        out.append(base[(k + 1) % 3].translated(a_b * ub[0] + b_b * nb[0], a_b * ub[1] + b_b * nb[1]))
    return family(out)


def nine_square_tau3(scale: float = 1.0) -> NamedConstruction:
    fam = nine_square_family(scale)
    nc = NamedConstruction("nine_square_tau3", fam, {"tau": 3, "nu": 1, "omega": 9})
    return _verified(nc, ("nine", scale))


# ------------------------------------------------------------------ thirteen squares

# Three-fold symmetric layout: pink, red, orange and green triples are orbits
# of one square (cx, cy, side, rot) under rotation by 120 degrees; X is the
# thirteenth square. Sufficient conditions for tau >= 4 are checked by
# thirteen_layer_margins.
THIRTEEN_ORBITS = {
    "pink": (0.97739795, 0.68062576, 1.66813398, 0.38033441),
    "red": (-0.01542903, -1.03565563, 1.51545744, 0.47209631),
    "orange": (-0.26335499, -0.56499697, 1.22485975, 1.31825171),
    "green": (0.02130045, 0.0292466, 0.50818252, 0.56055208),
}
THIRTEEN_LAST = (0.21140354, 0.15967743, 0.92133224, 1.55989776)
LAYERS = ("pink", "red", "orange", "green")


def _orbit(p: Sequence[float], scale: float = 1.0) -> list[Square]:
    cx, cy, s, r = p
    w = 2 * math.pi / 3
    out = []
    for k in range(3):
        c, sn = math.cos(k * w), math.sin(k * w)
        out.append(Square((scale * (c * cx - sn * cy), scale * (sn * cx + c * cy)), scale * s, r + k * w))
    return out


def thirteen_layers(scale: float = 1.0, jitter: float = 0.0) -> dict[str, list[Square]]:
    """Layers of the thirteen-square family. `jitter` moves the last square
    along its own x axis, a perturbation test of the contact placement."""
    layers = {name: _orbit(THIRTEEN_ORBITS[name], scale) for name in LAYERS}
    cx, cy, s, r = THIRTEEN_LAST
    cx += jitter * math.cos(r)
    cy += jitter * math.sin(r)
    layers["last"] = [Square((scale * cx, scale * cy), scale * s, r)]
    return layers


def thirteen_square_family(scale: float = 1.0, jitter: float = 0.0) -> SquareFamily:
    """Best layered thirteen-square family found (unverified; see
    thirteen_square_tau4)."""
    layers = thirteen_layers(scale, jitter)
    return family([s for name in (*LAYERS, "last") for s in layers[name]])


def thirteen_square_tau4(jitter: float = 0.0) -> NamedConstruction:
    """Verified thirteen-square family with nu=1 and tau=4.

    Raises ConstructionInvalid: in the stored layered layout some pairs
    miss each other by about 1.5e-9, and the solvers find a 3-point hitting
    set. The layered sufficient conditions of thirteen_layer_margins could
    not be met with positive slack, and no robust layout has been found."""
    fam = thirteen_square_family(1.0, jitter)
    if len({round(s.side, 9) for s in fam}) < 3:
        raise ConstructionInvalid("thirteen_square_tau4 needs at least 3 sizes")
    nc = NamedConstruction("thirteen_square_tau4", fam, {"tau": 4, "nu": 1},
                           roles={"pink": (0, 1, 2), "red": (3, 4, 5), "orange": (6, 7, 8),
                                  "green": (9, 10, 11), "last": (12,)})
    return _verified(nc, ("thirteen", jitter))


# Two orbits of 3 squares under rotation by 120 degrees, sides 3 and 2.214:
# pairwise intersecting, no common point within an orbit, and the overlap of
# two large squares misses every small one. Slack 0.0719 for all conditions.
SUBLAYER_ORBITS = (
    (1.501516461672022, -1.6791565372249817, 3.0, 0.7296050050496157),
    (-1.154010121741818, -0.24115438003851133, 2.214035571152214, 0.2060062294536622),
)


def two_size_sublayer(scale: float = 1.0) -> NamedConstruction:
    """Six pairwise intersecting squares of two sizes with tau=3."""
    fam = family(_orbit(SUBLAYER_ORBITS[0], scale) + _orbit(SUBLAYER_ORBITS[1], scale))
    nc = NamedConstruction("two_size_sublayer", fam, {"tau": 3, "nu": 1},
                           roles={"large": (0, 1, 2), "small": (3, 4, 5)})
    return _verified(nc, ("sublayer", scale))


def sublayer_margins(scale: float = 1.0) -> dict[str, float]:
    big, small = _orbit(SUBLAYER_ORBITS[0], scale), _orbit(SUBLAYER_ORBITS[1], scale)
    allsq = big + small
    return {
        "pairs": min(-_emptiness([allsq[i], allsq[j]]) for i in range(6) for j in range(i + 1, 6)),
        "triples": min(_emptiness(big), _emptiness(small)),
        "large_pairs": min(_emptiness([big[k], big[(k + 1) % 3], y]) for k in range(3) for y in small),
    }


def two_layer_sublayer(a: str = "pink", b: str = "red") -> SquareFamily:
    layers = thirteen_layers()
    return family(layers[a] + layers[b])


def _emptiness(squares: Sequence[Square]) -> float:
    """Smallest t such that the squares, each grown by t on every side, share
    a point. Negative means they share a point with slack -t."""
    from scipy.optimize import linprog

    a_ub, b_ub = [], []
    for s in squares:
        for ax in s.axes():
            for sg in (1.0, -1.0):
                a_ub.append([sg * ax[0], sg * ax[1], -1.0])
                b_ub.append(s.half + sg * (ax[0] * s.centre.x + ax[1] * s.centre.y))
    res = linprog([0.0, 0.0, 1.0], A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * 3, method="highs")
    return float(res.fun)


def thirteen_layer_margins(layers: Optional[dict] = None) -> dict[str, float]:
    """Slack of each sufficient condition for tau >= 4 (all must be positive).

    pairs: every two squares overlap. triples: no layer of pink, red or
    orange has a common point. pink_pairs / red_pairs: the overlap of two
    pinks (reds) avoids every smaller layer, so two of pink, red, orange
    need 3 points and any 3-point cover uses one point per pink outside the
    others. greens: no point of a pink sees two greens, so a 3-point cover
    puts one point on each green. last: no point of a pink sees a green and
    the last square together, so the last square stays unhit."""
    if layers is None:
        layers = thirteen_layers()
    p, r, o, g, x = (layers[k] for k in (*LAYERS, "last"))
    allsq = p + r + o + g + x
    out = {}
    out["pairs"] = min(-_emptiness([allsq[i], allsq[j]])
                       for i in range(len(allsq)) for j in range(i + 1, len(allsq)))
    out["triples"] = min(_emptiness(t) for t in (p, r, o))
    out["pink_pairs"] = min(_emptiness([p[k], p[(k + 1) % 3], y]) for k in range(3) for y in r + o)
    out["red_pairs"] = min(_emptiness([r[k], r[(k + 1) % 3], y]) for k in range(3) for y in o)
    out["greens"] = min(_emptiness([g[j], g[(j + 1) % 3], p[k]]) for j in range(3) for k in range(3))
    out["last"] = min(_emptiness([x[0], g[j], p[k]]) for j in range(3) for k in range(3))
    return out


# ------------------------------------------------------------------ colouring families


C5_RADIUS = 0.8


def c5_cycle(m: int = 1) -> NamedConstruction:
    if m < 1:
        raise ValueError("replication must be at least 1")
    base = [Square((C5_RADIUS * math.cos(math.pi / 2 + 2 * math.pi * k / 5),
                    C5_RADIUS * math.sin(math.pi / 2 + 2 * math.pi * k / 5)), 1.0, 0.0) for k in range(5)]
    fam = family([s for s in base for _ in range(m)])
    expected = {"omega": 2 * m, "chi": 3 if m == 1 else math.ceil(5 * m / 2)}
    if m == 1:
        expected.update({"nu": 2, "tau": 3})
    return _verified(NamedConstruction(f"c5_cycle_m{m}", fam, expected), ("c5", m))


# ------------------------------------------------------------------ seven neighbours

# rotated unit squares around the axis-parallel unit pivot at the origin;
# pairwise gaps and pivot overlaps are at least 0.028
SEVEN_NEIGHBOURS = (
    (0.028998, -0.149859, 0.838737),
    (1.069839, 0.852905, 1.346096),
    (0.028998, 1.099602, 1.261094),
    (-1.118951, 0.595555, 2.050383),
    (-0.994419, -0.835364, 2.832747),
    (0.489317, -1.177103, 0.838736),
    (1.177103, -0.411735, 0.838736),
)


def seven_disjoint_neighbors(trimmed: bool = False) -> NamedConstruction:
    """Pivot first, then its neighbours. `trimmed` drops the neighbours whose
    centre lies strictly left of the pivot centre, making the pivot leftmost."""
    pivot = Square((0.0, 0.0), 1.0, 0.0)
    nbrs = [Square((x, y), 1.0, r) for x, y, r in SEVEN_NEIGHBOURS]
    if trimmed:
        nbrs = [s for s in nbrs if s.centre.x >= pivot.centre.x]
    fam = family([pivot] + nbrs)
    k = len(nbrs)
    name = "seven_disjoint_neighbors" + ("_trimmed" if trimmed else "")
    nc = NamedConstruction(name, fam, {"tau": k}, roles={"pivot": (0,)})
    g = build_graph(fam)
    if any(g.has_edge(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)):
        raise ConstructionInvalid("neighbours are not pairwise disjoint")
    if g.degree(0) != k:
        raise ConstructionInvalid("a neighbour misses the pivot")
    return _verified(nc, ("seven", trimmed))


# ------------------------------------------------------------------ k-chains

CHAIN_STEP = 0.75  # centre spacing along a segment; one diamond spans two steps
CHAIN_SPREAD = 0.02  # offset between squares of one middle clique
CHAIN_CORNER = 0.3  # sideways push of middle cliques next to a bend


def _segments(path) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    segs = []
    for seg in path:
        try:
            (x0, y0), (x1, y1) = seg
        except (TypeError, ValueError) as exc:
            raise MalformedPath(f"segment {seg!r} is not a pair of points") from exc
        pts = []
        for v in (x0, y0, x1, y1):
            if not float(v).is_integer():
                raise MalformedPath("segment endpoints must be lattice points")
            pts.append(int(v))
        a, b = (pts[0], pts[1]), (pts[2], pts[3])
        if a == b or (a[0] != b[0] and a[1] != b[1]):
            raise MalformedPath(f"segment {seg!r} is not a non-degenerate axis-parallel segment")
        segs.append((a, b))
    if not segs:
        raise MalformedPath("empty path")
    for s, t in zip(segs, segs[1:]):
        if s[1] != t[0]:
            raise MalformedPath("consecutive segments must share endpoints")
        if (s[0][0] == s[1][0]) == (t[0][0] == t[1][0]):
            raise MalformedPath("segments must alternate between horizontal and vertical")
    return segs


def k_chain(path, k: int = 3, edge: bool = False) -> NamedConstruction:
    """Axis-parallel unit squares realising a chain of diamonds along a
    lattice path: hub squares sit on lattice points and every lattice unit
    of a segment holds one diamond whose middle is a (k-1)-clique. The first
    and last hubs are the roles x and y; in edge mode a square z touching
    only y is appended."""
    if k < 3:
        raise ValueError("k must be at least 3")
    segs = _segments(path)
    d = 2 * CHAIN_STEP
    hubs: list[tuple[float, float]] = []
    cliques: list[list[tuple[float, float]]] = []
    expected_edges: set = set()
    spread = [CHAIN_SPREAD * (j - (k - 2) / 2) for j in range(k - 1)]
    for si, (a, b) in enumerate(segs):
        dx, dy = np.sign(b[0] - a[0]), np.sign(b[1] - a[1])
        length = abs(b[0] - a[0]) + abs(b[1] - a[1])
        normal = (-dy, dx)
        # after a bend, push the first clique away from the previous segment
        push_in = 0.0
        if si > 0:
            pa, pb = segs[si - 1]
            prev_dir = (np.sign(pb[0] - pa[0]), np.sign(pb[1] - pa[1]))
            push_in = CHAIN_CORNER * (prev_dir[0] * normal[0] + prev_dir[1] * normal[1])
        if si == 0:
            hubs.append((a[0] * d, a[1] * d))
        for u in range(length):
            start = (a[0] * d + dx * u * d, a[1] * d + dy * u * d)
            off = push_in if u == 0 else 0.0
            members = [(start[0] + dx * CHAIN_STEP + normal[0] * (off + sp),
                        start[1] + dy * CHAIN_STEP + normal[1] * (off + sp)) for sp in spread]
            cliques.append(members)
            hubs.append((start[0] + dx * d, start[1] + dy * d))
    centres = list(hubs)
    hub_ids = list(range(len(hubs)))
    clique_ids = []
    for members in cliques:
        clique_ids.append(list(range(len(centres), len(centres) + len(members))))
        centres.extend(members)
    for i, ids in enumerate(clique_ids):
        for a_ in ids:
            expected_edges.update({frozenset((a_, hub_ids[i])), frozenset((a_, hub_ids[i + 1]))})
            expected_edges.update(frozenset((a_, b_)) for b_ in ids if b_ != a_)
    roles = {"x": hub_ids[0], "y": hub_ids[-1]}
    if edge:
        a, b = segs[-1]
        dx, dy = np.sign(b[0] - a[0]), np.sign(b[1] - a[1])
        y = hubs[-1]
        roles["z"] = len(centres)
        centres.append((y[0] + dx * CHAIN_STEP, y[1] + dy * CHAIN_STEP))
        expected_edges.add(frozenset((roles["z"], roles["y"])))
    fam = family([Square(c, 1.0, 0.0) for c in centres])
    got = set(frozenset(e) for e in build_graph(fam).edges())
    if got != expected_edges:
        raise MalformedPath("path comes too close to itself for a faithful chain")
    name = f"k_chain{'_edge' if edge else ''}_k{k}"
    return NamedConstruction(name, fam, {"chi": k}, roles=roles)


@dataclass(frozen=True)
class ForcingReport:
    colourings: int
    same_xy: bool
    differ_xz: Optional[bool]


def chain_forcing(nc: NamedConstruction, k: int) -> ForcingReport:
    """Enumerate every proper k-colouring of the chain's intersection graph."""
    adj = build_graph(nc.family).adj
    x, y, z = nc.roles["x"], nc.roles["y"], nc.roles.get("z")
    count, same, differ = 0, True, True
    for col in all_colourings(adj, k):
        count += 1
        same &= col[x] == col[y]
        if z is not None:
            differ &= col[x] != col[z]
    return ForcingReport(count, same and count > 0, (differ and count > 0) if z is not None else None)


# ------------------------------------------------------------------ copies and random


def disjoint_copies(nc: NamedConstruction, copies: int) -> NamedConstruction:
    if copies < 1:
        raise ValueError("copies must be at least 1")
    if copies == 1:
        return nc
    xs = [s.centre.x for s in nc.family]
    ext = max(s.side for s in nc.family) * math.sqrt(2)
    width = max(xs) - min(xs) + 2 * ext + 1.0
    squares = [s.translated(c * width, 0.0) for c in range(copies) for s in nc.family]
    scaled = {"nu": copies, "tau": copies}
    expected = {k: v * scaled[k] if k in scaled else v for k, v in nc.expected.items()}
    return NamedConstruction(f"{nc.name}_x{copies}", family(squares, nc.family.eps), expected)


ANGLE_MODES = ("axis", "unit-rotated", "free")


def random_family(n: int, side_range: tuple[float, float] = (1.0, 1.0), angle_mode: str = "free",
                  window: float = 4.0, seed: Optional[int] = 0) -> SquareFamily:
    """Centres uniform in [0, window]^2. 'axis' keeps rot 0, 'unit-rotated'
    forces side 1 with uniform rot, 'free' draws both."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if angle_mode not in ANGLE_MODES:
        raise ValueError(f"angle_mode must be one of {ANGLE_MODES}")
    lo, hi = side_range
    if not 0 < lo <= hi:
        raise ValueError("side_range must satisfy 0 < lo <= hi")
    rng = np.random.default_rng(seed)
    xy = rng.uniform(0.0, window, size=(n, 2))
    sides = np.ones(n) if angle_mode == "unit-rotated" else rng.uniform(lo, hi, size=n)
    rots = np.zeros(n) if angle_mode == "axis" else rng.uniform(0.0, math.pi / 2, size=n)
    return family([Square((float(x), float(y)), float(s), float(r)) for (x, y), s, r in zip(xy, sides, rots)])


# ------------------------------------------------------------------ registry


_VERIFIED: dict = {}


def _verified(nc: NamedConstruction, key) -> NamedConstruction:
    if key not in _VERIFIED:
        verify(nc)
        _VERIFIED[key] = True
    return nc


CONSTRUCTIONS = {
    "three_pairwise_unit": lambda m=1: three_pairwise_unit(),
    "pinwheel_tau2": lambda m=1: pinwheel_tau2(),
    "nine_square_tau3": lambda m=1: nine_square_tau3(),
    "thirteen_square_tau4": lambda m=1: thirteen_square_tau4(),
    "two_size_sublayer": lambda m=1: two_size_sublayer(),
    "c5_cycle": lambda m=1: c5_cycle(m),
    "seven_disjoint_neighbors": lambda m=1: seven_disjoint_neighbors(),
    "seven_disjoint_neighbors_trimmed": lambda m=1: seven_disjoint_neighbors(trimmed=True),
    "k_chain": lambda m=1: k_chain([((0, 0), (max(m, 1), 0))], 3),
    "k_chain_edge": lambda m=1: k_chain([((0, 0), (max(m, 1), 0))], 3, edge=True),
}


def build(name: str, m: int = 1) -> NamedConstruction:
    if name not in CONSTRUCTIONS:
        raise KeyError(f"unknown construction {name!r}; choose from {sorted(CONSTRUCTIONS)}")
    return CONSTRUCTIONS[name](m)
