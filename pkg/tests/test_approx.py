import itertools
import math

import numpy as np
import pytest

import oracles
from squarehit.approx import colour_squares, colour_unit_squares, degeneracy, hit_greedy, resolve_mode
from squarehit.constructions import c5_cycle, nine_square_tau3, random_family, seven_disjoint_neighbors
from squarehit.errors import ModeInapplicable, NotUnitFamily
from squarehit.exact import build_graph, exact_chi, exact_nu, max_degree_Delta
from squarehit.geometry import Square, family
from squarehit.hitters import HITTER_SIZE, SIX_POINT_LEFTMOST, TEN_POINT


def _check_run(fam, run):
    assert all(any(oracles.covers(s, p) for p in run.points) for s in fam)
    assert len(run.points) <= run.k * len(run.rounds)
    for a, b in itertools.combinations(run.pivots, 2):
        assert not oracles.intersects(fam[a], fam[b])


def test_disjoint_unit_squares_six_point():
    n = 7
    fam = family([Square((2.0 * i, 0.3 * i), 1.0, 0.2 * i) for i in range(n)])
    run = hit_greedy(fam, "six-point")
    assert len(run.rounds) == n
    assert len(run.points) <= 6 * n
    _check_run(fam, run)


def test_nine_square_ten_point_single_round():
    fam = nine_square_tau3().family
    run = hit_greedy(fam, TEN_POINT)
    assert len(run.rounds) == 1 and len(run.points) <= 10
    _check_run(fam, run)


def test_random_unit_family_six_point_vs_nu():
    for seed in range(5):
        fam = random_family(20, angle_mode="unit-rotated", window=4.0, seed=seed)
        run = hit_greedy(fam, "six-point")
        _check_run(fam, run)
        nu = exact_nu(fam).value
        assert len(run.rounds) <= nu
        assert len(run.points) <= 6 * nu


def test_all_modes_on_applicable_families():
    axis_unit = random_family(15, angle_mode="axis", window=4.0, seed=1)
    axis_free = random_family(15, (0.5, 2.0), "axis", window=4.0, seed=2)
    rot_unit = random_family(15, angle_mode="unit-rotated", window=4.0, seed=3)
    free = random_family(15, (0.5, 2.0), "free", window=4.0, seed=4)
    cases = [
        (axis_unit, ("axis-4", "axis-leftmost-2", "six-point", "ten-point", "twelve-point")),
        (axis_free, ("axis-4", "ten-point")),
        (rot_unit, ("six-point", "ten-point", "twelve-point")),
        (free, ("ten-point",)),
    ]
    for fam, modes in cases:
        nu = exact_nu(fam).value
        for mode in modes:
            run = hit_greedy(fam, mode)
            _check_run(fam, run)
            assert run.k == HITTER_SIZE[resolve_mode(mode)]
            assert len(run.points) <= run.k * nu


def test_mode_applicability():
    free = random_family(6, (0.5, 2.0), "free", seed=0)
    rot_unit = random_family(6, angle_mode="unit-rotated", seed=0)
    for fam, mode in ((free, "six-point"), (free, "twelve-point"), (rot_unit, "axis-4"),
                      (free, "axis-leftmost-2"), (free, "bogus")):
        with pytest.raises(ModeInapplicable):
            hit_greedy(fam, mode)


def test_six_point_pivot_tie_break():
    # equal x: the lower square is the leftmost pivot
    fam = family([Square((0.0, 5.0), 1.0), Square((0.0, 0.0), 1.0), Square((3.0, 0.0), 1.0)])
    assert hit_greedy(fam, SIX_POINT_LEFTMOST).pivots[0] == 1


def test_ten_point_picks_smallest_pivot():
    fam = family([Square((0.0, 0.0), 2.0), Square((0.5, 0.0), 1.0, 0.3), Square((9.0, 0.0), 1.5)])
    assert hit_greedy(fam, TEN_POINT).pivots[0] == 1


# ------------------------------------------------------------------ colouring


def test_c5_unit_colouring():
    run = colour_unit_squares(c5_cycle(1).family)
    assert run.k_used == 3 and run.bound == 12


def test_disjoint_unit_colouring():
    fam = family([Square((3.0 * i, 0.0), 1.0) for i in range(5)])
    run = colour_unit_squares(fam)
    assert run.k_used == 1


def test_unit_colouring_rejects_mixed_sides():
    with pytest.raises(NotUnitFamily):
        colour_unit_squares(family([Square((0, 0), 1.0), Square((3, 0), 2.0)]))


def test_random_unit_colouring():
    for seed in range(10):
        fam = random_family(30, angle_mode="unit-rotated", window=4.0, seed=seed)
        run = colour_unit_squares(fam)
        delta = max_degree_Delta(fam).value
        assert all(run.colour_of[a] != run.colour_of[b] for a, b in build_graph(fam).edges())
        assert run.k_used <= 6 * delta
        assert max(run.back_degree) <= 6 * delta - 1
        # elimination order runs left to right
        xs = [fam[i].centre.x for i in run.order]
        assert xs == sorted(xs)


def test_general_colouring_examples():
    assert colour_squares(family([Square((0, 0), 1.0)])).k_used == 1
    fam = c5_cycle(2).family
    run = colour_squares(fam)
    assert run.delta == 4
    assert run.k_used <= 9 * (run.delta - 1)
    assert exact_chi(fam).value == 5
    assert all(run.colour_of[a] != run.colour_of[b] for a, b in build_graph(fam).edges())


def test_general_colouring_delta_two():
    fam = c5_cycle(1).family
    run = colour_squares(fam)
    assert run.delta == 2 and run.k_used <= 9


def test_random_general_colouring():
    for seed in range(10):
        fam = random_family(30, (0.5, 2.0), "free", window=5.0, seed=seed)
        run = colour_squares(fam)
        assert all(run.colour_of[a] != run.colour_of[b] for a, b in build_graph(fam).edges())
        if run.delta >= 2:
            assert run.k_used <= 9 * (run.delta - 1)


def test_degeneracy_examples():
    assert degeneracy(c5_cycle(1).family)[0] == 2
    assert degeneracy(seven_disjoint_neighbors().family)[0] == 1
    assert degeneracy(family([Square((3.0 * i, 0.0), 1.0) for i in range(4)]))[0] == 0


def test_degeneracy_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(10):
        fam = random_family(int(rng.integers(3, 10)), (0.6, 1.6), "free", window=3.0,
                            seed=int(rng.integers(1 << 30)))
        adj = oracles.adjacency(fam)
        n = len(fam)
        # degeneracy = max over subsets of the min degree inside the subset
        best = 0
        for s in range(1, 1 << n):
            members = [i for i in range(n) if s >> i & 1]
            best = max(best, min(bin(adj[i] & s).count("1") for i in members))
        k, order = degeneracy(fam)
        assert k == best and sorted(order) == list(range(n))


def test_colourings_deterministic():
    fam = random_family(25, (0.5, 2.0), "free", window=4.0, seed=3)
    assert colour_squares(fam).colour_of == colour_squares(fam).colour_of
    assert math.isfinite(colour_squares(fam).bound)
