import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from packlimit.motions import DimensionError, RigidMotion, random_rotation
from packlimit.shapes import (
    MOSER_RECTANGLES,
    MOSER_SQUARES,
    Ball,
    Brick,
    Funnel,
    Homothet,
    Piece,
    clearance,
    collection_area,
    containment_margin,
    contains_piece,
    homothet_exclusion_index,
    membership,
    moser_collection,
    moser_piece,
)

F = Fraction
UNIT = Brick((F(1), F(1)))
UNIT_SQ = Piece(1, (F(1), F(1)))


def test_moser_pieces():
    assert moser_piece(MOSER_RECTANGLES, 1).dims == (1, F(1, 2))
    assert moser_piece(MOSER_SQUARES, 2).dims == (F(1, 2), F(1, 2))
    assert moser_piece(MOSER_RECTANGLES, 10).dims == (F(1, 10), F(1, 11))
    with pytest.raises(ValueError):
        moser_piece(MOSER_SQUARES, 1)
    with pytest.raises(ValueError):
        moser_piece(MOSER_RECTANGLES, 0)


def test_moser_collection_ids():
    coll = moser_collection(MOSER_SQUARES, 5)
    assert [p.id for p in coll.pieces] == [2, 3, 4, 5]


def test_collection_area_small_cases():
    assert collection_area(MOSER_RECTANGLES, 3) == F(3, 4)
    assert collection_area(MOSER_SQUARES, 3) == F(1, 4) + F(1, 9)


@given(st.integers(1, 3000))
def test_rectangle_areas_telescope(n):
    assert collection_area(MOSER_RECTANGLES, n) + F(1, n + 1) == 1


def test_square_area_approaches_basel_tail():
    # sum_{i>N} 1/i^2 lies between 1/(N+1) and 1/N
    target = math.pi ** 2 / 6 - 1
    for n in (10, 100, 1000):
        gap = target - float(collection_area(MOSER_SQUARES, n))
        assert 1 / (n + 1) < gap < 1 / n


def test_piece_rejects_nonpositive_dims():
    with pytest.raises(ValueError):
        Piece(1, (F(1), F(0)))


# membership ----------------------------------------------------------------------


def test_membership_examples():
    assert membership(UNIT, (F(1, 2), F(1, 2)))
    assert membership(Funnel(), (2, F(1, 2)))
    assert not membership(Ball(1), (1, F(1, 10**9)))
    assert membership(Ball(1), (1, 0))


def test_membership_dimension_mismatch():
    with pytest.raises(DimensionError):
        membership(UNIT, (1, 2, 3))


def test_funnel_boundary_and_tip():
    assert membership(Funnel(), (1, 0))
    assert not membership(Funnel(), (1, F(1, 10**6)))
    assert not membership(Funnel(), (F(999, 1000), 0))
    assert membership(Funnel(), (4, F(3, 4)))
    assert not membership(Funnel(), (4, F(3, 4) + F(1, 10**12)))


def test_open_disk_counterexample_boundary():
    # the closed unit disk is not inside any open disk of radius 1; with closed targets the
    # boundary point counts as inside, so only radius < 1 excludes it
    assert membership(Ball(1), (1, 0))
    assert not membership(Ball(F(999999, 1000000)), (1, 0))


@given(st.fractions(-3, 3, max_denominator=20), st.fractions(-3, 3, max_denominator=20), st.integers(1, 60))
def test_homothet_membership_monotone(x, y, j):
    for base in (Brick((F(1), F(2))), Ball(1)):
        if membership(Homothet(base, 1 + F(1, j + 1)), (x, y)):
            assert membership(Homothet(base, 1 + F(1, j)), (x, y))


# clearance ----------------------------------------------------------------------------


def test_clearance_examples():
    assert clearance(Ball(1), (1.5, 0)) == (0.5, False)
    assert clearance(UNIT, (2, F(1, 2))) == (1.0, False)
    assert clearance(UNIT, (F(1, 2), F(1, 2))) == (0.0, True)


def test_clearance_of_homothet_scales():
    assert clearance(Homothet(UNIT, 2), (3, 1)).value == pytest.approx(1.0)


def test_funnel_clearance_matches_dense_sampling():
    # oracle: distance to a dense sampling of the two boundary curves
    t = np.concatenate([np.linspace(1, 3, 200001), np.linspace(3, 60, 200001)])
    f = 1 - 1 / t
    for p in [(0.0, 0.0), (2.0, 1.0), (3.0, -2.0), (10.0, 1.5), (1.2, 0.5)]:
        d = np.sqrt(np.minimum((t - p[0]) ** 2 + (f - p[1]) ** 2, (t - p[0]) ** 2 + (f + p[1]) ** 2)).min()
        c = clearance(Funnel(), p)
        assert not c.inside
        assert c.value == pytest.approx(d, abs=1e-6)


# containment ---------------------------------------------------------------------------


def test_contains_piece_examples():
    assert contains_piece(UNIT, RigidMotion.identity(2), UNIT_SQ)
    assert not contains_piece(Ball(1), RigidMotion.identity(2), UNIT_SQ)


def test_two_by_two_square_in_funnel_homothet():
    # a 2x2 square with left edge at x fits (1+e)F iff (1+e) - (1+e)^2/x >= 1
    sq = Piece(1, (F(2), F(2)))
    for j in (1, 2, 5, 10):
        eps = F(1, j)
        lam = 1 + eps
        x0 = lam * lam / eps
        target = Homothet(Funnel(), lam)
        assert contains_piece(target, RigidMotion.translation((x0, -1)), sq)
        assert not contains_piece(target, RigidMotion.translation((x0 - F(1, 10**6), -1)), sq)
        assert not contains_piece(Funnel(), RigidMotion.translation((x0, -1)), sq)


def _mc_contained(target, sigma, piece, rng, samples=10_000):
    u = rng.random((samples, piece.dim)) * np.array([float(d) for d in piece.dims])
    pts = u @ sigma.theta_array().T + sigma.xi_array()
    return all(membership(target, tuple(p)) for p in pts)


def test_contains_piece_agrees_with_monte_carlo():
    rng = np.random.default_rng(7)
    targets = [Brick((2.0, 1.5)), Ball(1.3), Homothet(Brick((1.0, 1.0)), 1.7)]
    checked = 0
    while checked < 60:
        target = targets[checked % 3]
        piece = Piece(1, tuple(rng.uniform(0.2, 1.0, 2)))
        sigma = RigidMotion.from_float(random_rotation(2, rng), rng.uniform(-1, 2, 2))
        verdict = contains_piece(target, sigma, piece)
        if abs(containment_margin(target, sigma, piece)) < 0.05:
            continue
        assert verdict == _mc_contained(target, sigma, piece, rng)
        checked += 1


def test_float_containment_is_three_valued():
    sigma = RigidMotion.from_float(np.eye(2), [0.0, 0.0])
    rot = RigidMotion.from_float([[math.cos(1e-13), -math.sin(1e-13)], [math.sin(1e-13), math.cos(1e-13)]],
                                 [0.5, 0.0])
    piece = Piece(1, (0.5, 1.0))
    assert contains_piece(UNIT, rot, piece) is None
    assert contains_piece(UNIT, sigma, Piece(1, (0.5, 0.5))) is True


# exclusion index ----------------------------------------------------------------------


def test_exclusion_index_examples():
    assert homothet_exclusion_index(Ball(1), (1.5, 0)) == 7
    assert homothet_exclusion_index(Ball(1), (3, 0)) == 4
    # every homothet from k on stays eps/2 = 1/4 away from (1.5, 0)
    assert all(1.5 - (1 + 1 / j) >= 0.25 for j in range(7, 1001))


def test_exclusion_index_errors():
    with pytest.raises(ValueError):
        homothet_exclusion_index(Ball(1), (0.5, 0))
    with pytest.raises(ValueError):
        homothet_exclusion_index(Funnel(), (0, 0))


def _oracle_distance(kind, size, lam, x):
    if kind == "ball":
        return max(0.0, np.linalg.norm(x) - lam * size[0])
    hi = lam * np.asarray(size)
    return float(np.linalg.norm(np.maximum(0, np.maximum(-x, x - hi))))


def test_exclusion_soundness_random():
    rng = np.random.default_rng(11)
    for _ in range(200):
        kind = rng.choice(["ball", "brick"])
        if kind == "ball":
            size = (rng.uniform(0.2, 3),)
            target = Ball(size[0], 2)
        else:
            size = tuple(rng.uniform(0.2, 3, 2))
            target = Brick(size)
        x = rng.uniform(-6, 6, 2)
        if membership(target, tuple(x)):
            continue
        eps = clearance(target, tuple(x)).value
        k = homothet_exclusion_index(target, tuple(x))
        for j in range(k, 1001):
            assert _oracle_distance(kind, size, 1 + 1 / j, x) >= eps / 2 - 1e-12
