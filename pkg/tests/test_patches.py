import math

import numpy as np
import pytest

import lemmas
from squarehit.errors import LemmaViolation, MalformedPolygon, PreconditionViolated, ResolutionTooCoarse
from squarehit.geometry import SQRT2, Point, Square, dist_point_square
from squarehit.patches import (
    CIRCULAR,
    POLYGON,
    SEPARATED_ONLY,
    TRIANGLE,
    PatchCertificate,
    PolygonFailure,
    SweptSquare,
    circular_patch,
    dist_point_swept,
    lemma_guarantee_holds,
    polygon_hitter_certify,
    thales_patch_applies,
    triangle_patch,
)

UNIT = Square((0.0, 0.0), 1.0)


def _ring(angles, radius=1.0):
    return [Point(radius * math.cos(t), radius * math.sin(t)) for t in angles]


# ------------------------------------------------------------------ triangle


def test_triangle_degenerate():
    cert = triangle_patch((0, 0), (0, 0), (0, 0))
    assert cert.kind == TRIANGLE
    s = Square((0.0, 0.0), 1.0, 0.4)
    assert cert.guarantees(s)
    assert lemma_guarantee_holds(cert, s)


def test_triangle_rejects_long_side():
    with pytest.raises(PreconditionViolated):
        triangle_patch((0, 0), (1.2, 0), (0, 0.5))


def test_triangle_monte_carlo_through_certificate():
    cert = triangle_patch((0, 0), (1, 0), (0.5, math.sqrt(3) / 2))
    rng = np.random.default_rng(1)
    w = rng.dirichlet((1, 1, 1), 20_000)
    tri = np.array(cert.region["triangle"])
    centres = w @ tri
    for (x, y), r in zip(centres, rng.uniform(0, math.pi / 2, len(centres))):
        s = Square((x, y), 1.0, r)
        assert lemma_guarantee_holds(cert, s) is True


def test_triangle_certificate_ignores_small_squares():
    cert = triangle_patch((0, 0), (1, 0), (0.5, 0.5))
    assert lemma_guarantee_holds(cert, Square((0.5, 0.2), 0.5)) is None


def test_triangle_lemma_random():
    assert lemmas.triangle_trials(np.random.default_rng(2), 20_000) == (20_000, 0)


def test_triangle_harness_detects_small_squares():
    _, bad = lemmas.triangle_trials(np.random.default_rng(2), 20_000, min_side=0.8)
    assert bad > 0


# ------------------------------------------------------------------ thales


def test_thales_on_circle_holds():
    a, b = Point(-0.5, 0.0), Point(0.5, 0.0)
    ang = -1.1
    c = Point(0.5 * math.cos(ang), 0.5 * math.sin(ang))
    # unit square containing c with its centre above the line
    s = Square((0.35, 0.05), 1.0, 0.2)
    assert thales_patch_applies(a, b, c, s)


def test_thales_inside_circle_is_no_guarantee():
    a, b = Point(-0.5, 0.0), Point(0.5, 0.0)
    c = Point(0.0, -0.3)
    s = Square((0.0, 0.15), 1.0, 0.0)
    assert not thales_patch_applies(a, b, c, s)


def test_thales_preconditions():
    with pytest.raises(PreconditionViolated):
        thales_patch_applies((0, 0), (1.5, 0), (0, -1), UNIT)
    with pytest.raises(PreconditionViolated):
        thales_patch_applies((0, 0), (1, 0), (2, 0), UNIT)
    with pytest.raises(PreconditionViolated):
        thales_patch_applies((0, 0), (1, 0), (0, -1), Square((0, 0), 2.0))


def test_thales_random_through_library():
    """Sampled hypotheses agree with the library and the conclusion holds."""
    rng = np.random.default_rng(3)
    (ax, ay, bx, by, cx, cy, sx, sy, side, rot), hyp = lemmas.thales_samples(rng, 20_000)
    held = 0
    for i in range(len(ax)):
        s = Square((sx[i], sy[i]), 1.0, rot[i])
        try:
            got = thales_patch_applies((ax[i], ay[i]), (bx[i], by[i]), (cx[i], cy[i]), s)
        except PreconditionViolated:
            continue
        except LemmaViolation:  # pragma: no cover - a failure of the lemma itself
            pytest.fail(f"lemma violated at sample {i}")
        if hyp[i]:
            assert got
            held += 1
    assert held > 500


def test_thales_lemma_random():
    assert lemmas.thales_trials(np.random.default_rng(4), 20_000) == (20_000, 0)


# ------------------------------------------------------------------ circular


def test_circular_radius_examples():
    assert circular_patch((0, 0), (1, 0)).region["radius"] == pytest.approx((SQRT2 - 1) / 2)
    assert circular_patch((0, 0), (SQRT2 - 1, 0)).region["radius"] == pytest.approx(0.5)
    with pytest.raises(PreconditionViolated):
        circular_patch((0, 0), (1.5, 0))
    with pytest.raises(PreconditionViolated):
        circular_patch((0, 0), (0.3, 0))


def test_circular_certificate_guarantee():
    cert = circular_patch((0, 0), (0.8, 0))
    assert cert.kind == CIRCULAR
    rng = np.random.default_rng(5)
    r = cert.region["radius"]
    q = cert.region["centre"]
    for _ in range(5_000):
        ang, rad = rng.uniform(0, 2 * math.pi), r * math.sqrt(rng.random())
        s = Square((q.x + rad * math.cos(ang), q.y + rad * math.sin(ang)), 1 + rng.random(), rng.uniform(0, 1.5))
        assert lemma_guarantee_holds(cert, s) is True


def test_circular_lemma_random():
    assert lemmas.circular_trials(np.random.default_rng(6), 20_000) == (20_000, 0)


def test_circular_harness_detects_larger_disk():
    _, bad = lemmas.circular_trials(np.random.default_rng(6), 50_000, stretch=1.05)
    assert bad > 0


# ------------------------------------------------------------------ polygon certificate


def test_regular_nine_gon_fails_condition_iii():
    ring = _ring([2 * math.pi * k / 9 for k in range(9)])
    res = polygon_hitter_certify((0, 0), ring, UNIT)
    assert isinstance(res, PolygonFailure)
    assert res.condition == "iii"
    assert 0 <= res.index < 9


def test_long_side_fails_condition_ii():
    ring = [Point(0.6, -0.6), Point(0.6, 0.6), Point(-0.6, 0.6), Point(-0.6, -0.6)]
    res = polygon_hitter_certify((0, 0), ring, Square((0, 0), 0.5))
    assert isinstance(res, PolygonFailure)
    assert res.condition == "ii"
    assert res.slack == pytest.approx(1 - 1.2)


def test_polygon_rejects_non_convex_ring():
    ring = [Point(1, 0), Point(0.1, 0.1), Point(0, 1), Point(-1, 0), Point(0, -1)]
    with pytest.raises(MalformedPolygon):
        polygon_hitter_certify((0, 0), ring, Square((0, 0), 0.1))


def test_polygon_rejects_clockwise_ring():
    ring = list(reversed(_ring([2 * math.pi * k / 9 for k in range(9)])))
    with pytest.raises(MalformedPolygon):
        polygon_hitter_certify((0, 0), ring, UNIT)


def test_polygon_target_must_be_inside():
    ring = _ring([2 * math.pi * k / 9 for k in range(9)], 0.6)
    with pytest.raises(PreconditionViolated):
        polygon_hitter_certify((0, 0), ring, UNIT)


def test_separated_only_mode_records_failing_sides():
    ring = _ring([2 * math.pi * k / 9 for k in range(9)])
    cert = polygon_hitter_certify((0, 0), ring, UNIT, mode=SEPARATED_ONLY)
    assert isinstance(cert, PatchCertificate) and cert.kind == POLYGON
    assert cert.conditional_sides
    assert all(cert.slacks["iii"][i] < 0 for i in cert.conditional_sides)


def test_certified_polygon_hits_sampled_neighbours():
    """A small square target inside a certified ring: every sampled unit
    square meeting the target contains a ring point or p0."""
    ring = _ring([2 * math.pi * k / 8 for k in range(8)], 0.65)
    target = Square((0, 0), 0.2)
    cert = polygon_hitter_certify((0, 0), ring, target)
    assert cert.ok and cert.margin > 0
    rng = np.random.default_rng(7)
    for _ in range(5_000):
        ang, rad = rng.uniform(0, 2 * math.pi), rng.uniform(0, 0.85)
        s = Square((rad * math.cos(ang), rad * math.sin(ang)), 1.0, rng.uniform(0, math.pi / 2))
        if lemma_guarantee_holds(cert, s) is not None:
            assert lemma_guarantee_holds(cert, s)


# ------------------------------------------------------------------ swept squares


def test_swept_degenerate_interval_is_exact():
    sw = SweptSquare(0.3, 0.3, 1.0)
    q = (1.3, 0.4)
    assert dist_point_swept(q, sw) == dist_point_square(q, sw.at(0.3))


def test_swept_inside_is_zero():
    sw = SweptSquare(0.1, 0.9, 1.0)
    assert dist_point_swept((0.1, 0.05), sw) == 0.0


def _brute_swept(q, sw, count):
    ang = np.linspace(sw.angle_lo, sw.angle_hi, count) - math.pi / 4
    dx, dy = q[0] - sw.centre.x, q[1] - sw.centre.y
    lx = np.abs(np.cos(ang) * dx + np.sin(ang) * dy) - sw.side / 2
    ly = np.abs(-np.sin(ang) * dx + np.cos(ang) * dy) - sw.side / 2
    return float(np.hypot(np.maximum(lx, 0), np.maximum(ly, 0)).min())


def test_swept_bound_far_point():
    sw = SweptSquare(0.0, math.pi / 2 - 1e-9, 1.0)
    q = (2.0, 0.0)
    brute = _brute_swept(q, sw, 1_000_000)
    lo = dist_point_swept(q, sw, resolution=2**20)
    assert 2 - SQRT2 / 2 - 1e-6 <= lo <= 2 - 0.5
    assert lo <= brute
    assert brute - lo < 1e-6


def test_swept_monotone_in_resolution():
    sw = SweptSquare(0.2, 1.1, 1.0)
    q = (1.1, -0.9)
    vals = [dist_point_swept(q, sw, r) for r in (4, 16, 64, 256, 1024)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    sampled = min(dist_point_square(q, sw.at(a)) for a in np.linspace(0.2, 1.1, 1025))
    assert vals[-1] <= sampled


def test_swept_too_coarse():
    sw = SweptSquare(0.0, 1.5, 1.0)
    with pytest.raises(ResolutionTooCoarse):
        dist_point_swept((0.75, 0.0), sw, resolution=1)


def test_swept_square_validation():
    with pytest.raises(PreconditionViolated):
        SweptSquare(0.5, 0.2, 1.0)
    with pytest.raises(PreconditionViolated):
        SweptSquare(0.0, math.pi / 2, 1.0)
