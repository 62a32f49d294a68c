"""Box covers of the cube: exact orders, bricks, the exhaustive oracle, and
the fixed-point-freeness witness."""

from fractions import Fraction
from random import Random

import pytest

from meandim.cube import (
    Box,
    BoxCover,
    brick_cover,
    exact_order,
    exhaustive_min_order,
    face_condition,
    lebesgue_witness,
)
from meandim.errors import BudgetError, InputError, PreconditionError

F = Fraction


def interval_cover(*bounds):
    named = {}
    for i, (lo, hi) in enumerate(bounds):
        named[f"I{i}"] = {"lo": [str(lo)], "hi": [str(hi)]}
    return BoxCover.of(1, named)


class TestFaceCondition:
    def test_whole_cube_fails(self):
        c = BoxCover.of(1, {"X": {"lo": ["0"], "hi": ["1"]}})
        assert face_condition(c) is False

    def test_two_thirds_cover(self):
        c = interval_cover(("0", "2/3"), ("1/3", "1"))
        assert face_condition(c) is True

    def test_mesh_below_one_implies_face_condition(self):
        rng = Random(2)
        for _ in range(20):
            cuts = sorted({F(rng.randint(1, 7), 8) for _ in range(3)})
            pieces = list(zip([F(0)] + cuts, cuts + [F(1)]))
            named = {}
            for i, (lo, hi) in enumerate(pieces):
                grow = min(F(1, 16), lo, 1 - hi)
                named[f"I{i}"] = Box.of([lo - grow if lo > 0 else lo],
                                        [hi + grow if hi < 1 else hi])
            c = BoxCover.of(1, named)
            if c.mesh() < 1:
                assert face_condition(c)


class TestExactOrder:
    def test_touching_partition(self):
        c = interval_cover(("0", "1/4"), ("1/4", "1/2"), ("1/2", "3/4"), ("3/4", "1"))
        assert exact_order(c) == 1  # shared endpoints under closed boxes

    def test_single_box(self):
        c = BoxCover.of(2, {"X": {"lo": ["0", "0"], "hi": ["1", "1"]}})
        assert exact_order(c) == 0

    def test_brick_two_dim(self):
        assert exact_order(brick_cover(2, F(1, 4))) == 2

    def test_name_permutation_invariance(self):
        a = interval_cover(("0", "2/3"), ("1/3", "1"))
        b = BoxCover.of(1, {"Z": {"lo": ["1/3"], "hi": ["1"]}, "A": {"lo": ["0"], "hi": ["2/3"]}})
        assert exact_order(a) == exact_order(b)

    def test_coordinate_permutation_invariance(self):
        rng = Random(9)
        for _ in range(10):
            named = {}
            for i in range(3):
                lo = [F(rng.randint(0, 2), 4), F(rng.randint(0, 2), 4)]
                hi = [min(F(1), l + F(rng.randint(1, 2), 2)) for l in lo]
                named[f"B{i}"] = Box.of(lo, hi)
            named["full"] = Box.of([F(0), F(0)], [F(1), F(1)])
            c = BoxCover.of(2, named)
            swapped = BoxCover.of(2, {
                name: Box.of(list(reversed(b.lo)), list(reversed(b.hi)))
                for name, b in c.boxes
            })
            assert exact_order(c) == exact_order(swapped)

    def test_against_dense_lattice_scan(self):
        # independent oracle: max multiplicity over a lattice refining every
        # box endpoint denominator
        rng = Random(33)
        for _ in range(10):
            named = {"full": Box.of([F(0)], [F(1)])}
            for i in range(rng.randint(1, 3)):
                lo = F(rng.randint(0, 5), 6)
                hi = F(rng.randint(0, 5), 6)
                lo, hi = min(lo, hi), max(lo, hi)
                if lo < hi:
                    named[f"B{i}"] = Box.of([lo], [hi])
            c = BoxCover.of(1, named)
            denom = 24
            worst = 0
            for k in range(denom + 1):
                x = F(k, denom)
                mult = sum(1 for _, b in c.boxes if b.lo[0] <= x <= b.hi[0])
                worst = max(worst, mult)
            assert exact_order(c) == worst - 1


class TestBrickCover:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_required_properties(self, n):
        c = brick_cover(n, F(1, 4))
        assert exact_order(c) == n
        assert face_condition(c)
        assert c.mesh() <= F(1, 4)

    def test_one_dim_small(self):
        c = brick_cover(1, F(1, 2))
        assert exact_order(c) == 1

    def test_eps_bounds(self):
        with pytest.raises(InputError):
            brick_cover(2, F(3, 2))
        with pytest.raises(InputError):
            brick_cover(0, F(1, 4))


class TestUnionInvariant:
    def test_gap_rejected(self):
        with pytest.raises(InputError):
            interval_cover(("0", "1/3"), ("2/3", "1"))

    def test_quadrants_with_center_hole_rejected(self):
        named = {
            "Q1": {"lo": ["0", "0"], "hi": ["9/20", "9/20"]},
            "Q2": {"lo": ["11/20", "0"], "hi": ["1", "9/20"]},
            "Q3": {"lo": ["0", "11/20"], "hi": ["9/20", "1"]},
            "Q4": {"lo": ["11/20", "11/20"], "hi": ["1", "1"]},
        }
        with pytest.raises(InputError):
            BoxCover.of(2, named)

    def test_region_scoped_cover_accepted(self):
        region = Box.of(["0", "0"], ["1", "1/4"])
        c = BoxCover.of(2, {
            "U1": {"lo": ["0", "0"], "hi": ["2/3", "1/4"]},
            "U2": {"lo": ["1/3", "0"], "hi": ["1", "1/4"]},
        }, region=region)
        assert exact_order(c) == 1


class TestExhaustive:
    def test_one_dim_grid4(self):
        assert exhaustive_min_order(1, 4, 3) == 1

    def test_one_dim_grid2(self):
        assert exhaustive_min_order(1, 2, 2) == 1

    def test_two_dim_grid2(self):
        assert exhaustive_min_order(2, 2, 4) >= 2

    def test_oracle_never_below_dimension(self):
        for grid, max_sets in ((2, 2), (3, 3)):
            assert exhaustive_min_order(1, grid, max_sets) >= 1

    def test_single_set_has_no_admissible_cover(self):
        with pytest.raises(PreconditionError):
            exhaustive_min_order(1, 4, 1)

    def test_ceiling(self):
        with pytest.raises(BudgetError):
            exhaustive_min_order(2, 3, 4, ceiling=10)


def slab_fixture():
    region = Box.of(["0", "0"], ["1", "1/4"])
    return BoxCover.of(2, {
        "U1": {"lo": ["0", "0"], "hi": ["2/3", "1/4"]},
        "U2": {"lo": ["1/3", "0"], "hi": ["1", "1/4"]},
    }, region=region)


class TestWitness:
    def test_slab_witness_positive_displacement(self):
        rep = lebesgue_witness(slab_fixture(), grid=32, seed=5)
        assert rep.min_displacement > 0
        assert rep.min_hull_distance_sq > 0

    def test_full_order_cover_rejected(self):
        c = interval_cover(("0", "2/3"), ("1/3", "1"))
        with pytest.raises(PreconditionError):
            lebesgue_witness(c, grid=8, seed=1)

    def test_face_violation_rejected(self):
        c = BoxCover.of(1, {"X": {"lo": ["0"], "hi": ["1"]}})
        with pytest.raises(PreconditionError):
            lebesgue_witness(c, grid=8, seed=1)

    def test_nested_grid_displacement_never_drops(self):
        fixture = slab_fixture()
        d32 = lebesgue_witness(fixture, grid=32, seed=5).min_displacement
        d64 = lebesgue_witness(fixture, grid=64, seed=5).min_displacement
        assert d64 >= d32 > 0

    def test_vertex_assignment_matches_face_contacts(self):
        rep = lebesgue_witness(slab_fixture(), grid=16, seed=2)
        assert rep.vertex_assignment == {"U1": (1, 1), "U2": (0, 1)}


class TestBoxJson:
    def test_round_trip(self):
        c = slab_fixture()
        again = BoxCover.from_json(c.to_json())
        assert again.to_json() == c.to_json()

    def test_missing_fields(self):
        with pytest.raises(InputError):
            BoxCover.from_json({"boxes": {}})
