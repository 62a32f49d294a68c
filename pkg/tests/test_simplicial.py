"""Complexes, nerves, stars, and barycentric subdivision."""

from fractions import Fraction
from random import Random

import pytest

from meandim.covers import Cover, GroundSet, mesh, order
from meandim.errors import InputError, PreconditionError
from meandim.simplicial import (
    AbstractComplex,
    GeometricComplex,
    barycentric_subdivide,
    combinatorial_dimension,
    dim_upper_via_stars,
    geometric_from_json,
    geometric_to_json,
    mesh_sq,
    nerve,
    realize,
    star_cover,
)

F = Fraction


class TestCombinatorialDimension:
    def test_single_vertex(self):
        assert combinatorial_dimension(AbstractComplex.of(["v"], [["v"]])) == 0

    def test_hollow_triangle(self):
        cx = AbstractComplex.of([1, 2, 3], [[1, 2], [2, 3], [1, 3]])
        assert combinatorial_dimension(cx) == 1

    def test_four_vertex_complex(self):
        # dimension follows the size of the largest simplex, here {2,3,4}
        cx = AbstractComplex.of([1, 2, 3, 4], [[1, 2], [2, 3], [3, 4], [2, 4], [2, 3, 4]])
        assert combinatorial_dimension(cx) == 2

    def test_empty_rejected(self):
        with pytest.raises((PreconditionError, InputError)):
            combinatorial_dimension(AbstractComplex((), ()))

    def test_canonical_form_drops_dominated_facets(self):
        cx = AbstractComplex.of([1, 2, 3], [[1, 2], [1, 2, 3]])
        assert cx.facets == (frozenset({"1", "2", "3"}),)


class TestNerve:
    def test_single_set(self):
        g = GroundSet(("p",))
        c = Cover.of(g, {"A": ["p"]})
        nv = nerve(c)
        assert nv.vertices == ("A",)
        assert combinatorial_dimension(nv) == 0

    def test_three_arcs_on_cycle(self):
        # pairwise overlaps but no triple point: a hollow triangle
        g = GroundSet(tuple(str(i) for i in range(6)))
        c = Cover.of(g, {"A": ["0", "1", "2"], "B": ["2", "3", "4"], "C": ["4", "5", "0"]})
        nv = nerve(c)
        assert combinatorial_dimension(nv) == 1
        assert frozenset({"A", "B", "C"}) not in set(nv.facets)

    def test_common_point_gives_full_simplex(self):
        g = GroundSet(("x", "y"))
        c = Cover.of(g, {"A": ["x", "y"], "B": ["x"], "C": ["x", "y"], "D": ["x"]})
        assert combinatorial_dimension(nerve(c)) == order(c)

    def test_duality_randomized(self):
        rng = Random(7)
        for _ in range(60):
            n = rng.randint(2, 10)
            pts = tuple(f"p{i}" for i in range(n))
            named = {}
            for k in range(rng.randint(1, 6)):
                named[f"U{k}"] = rng.sample(pts, rng.randint(1, n))
            covered = set().union(*map(set, named.values()))
            rest = [p for p in pts if p not in covered]
            if rest:
                named["R"] = rest
            c = Cover.of(GroundSet(pts), named)
            assert combinatorial_dimension(nerve(c)) == order(c)


class TestRealize:
    def test_point(self):
        g = realize(AbstractComplex.of(["v"], [["v"]]))
        assert g.coord("v") == (F(1),)

    def test_edge(self):
        g = realize(AbstractComplex.of([1, 2], [[1, 2]]))
        assert g.coord("1") == (F(1), F(0))
        assert g.coord("2") == (F(0), F(1))

    def test_four_vertex_complex_in_r4(self):
        cx = AbstractComplex.of([1, 2, 3, 4], [[1, 2], [2, 3], [3, 4], [2, 4], [2, 3, 4]])
        g = realize(cx)
        assert all(len(c) == 4 for _, c in g.coords)
        assert combinatorial_dimension(g.abstract) == 2


class TestStarCover:
    def test_single_vertex(self):
        c = star_cover(AbstractComplex.of(["v"], [["v"]]))
        assert len(c.ground.points) == 1
        assert order(c) == 0

    def test_edge(self):
        c = star_cover(AbstractComplex.of([1, 2], [[1, 2]]))
        assert set(c.ground.points) == {"b(1)", "b(2)", "b(1,2)"}
        assert c.member("star_1") == frozenset({"b(1)", "b(1,2)"})
        assert c.member("star_2") == frozenset({"b(2)", "b(1,2)"})
        assert order(c) == 1

    def test_hollow_vs_filled_triangle(self):
        hollow = AbstractComplex.of([1, 2, 3], [[1, 2], [2, 3], [1, 3]])
        filled = AbstractComplex.of([1, 2, 3], [[1, 2, 3]])
        assert order(star_cover(hollow)) == 1
        assert order(star_cover(filled)) == 2

    def test_order_equals_dimension_randomized(self):
        rng = Random(17)
        for _ in range(40):
            nv = rng.randint(1, 8)
            verts = [f"v{i}" for i in range(nv)]
            facets = [rng.sample(verts, rng.randint(1, min(nv, 4)))
                      for _ in range(rng.randint(1, 6))]
            cx = AbstractComplex.of(verts, facets)
            assert order(star_cover(cx)) == combinatorial_dimension(cx)


def tiny_triangle():
    return GeometricComplex.of(
        AbstractComplex.of(["a", "b", "c"], [["a", "b", "c"]]),
        {"a": [F(0), F(0)], "b": [F(1, 4), F(0)], "c": [F(0), F(1, 4)]},
    )


class TestSubdivision:
    def test_point(self):
        g = GeometricComplex.of(AbstractComplex.of(["v"], [["v"]]), {"v": [F(0)]})
        sub = barycentric_subdivide(g)
        assert mesh_sq(sub) == 0

    def test_unit_segment_halves(self):
        g = GeometricComplex.of(AbstractComplex.of(["a", "b"], [["a", "b"]]),
                                {"a": [F(0)], "b": [F(1)]})
        sub = barycentric_subdivide(g)
        assert mesh_sq(sub) == F(1, 4)
        assert len(sub.abstract.facets) == 2

    def test_vertex_count_identity(self):
        g = tiny_triangle()
        sub = barycentric_subdivide(g)
        assert len(sub.abstract.vertices) == len(g.abstract.simplexes())

    def test_dimension_preserved(self):
        g = tiny_triangle()
        sub = barycentric_subdivide(g)
        assert combinatorial_dimension(sub.abstract) == combinatorial_dimension(g.abstract)

    def test_contraction_two_rounds(self):
        g = realize(AbstractComplex.of([1, 2, 3], [[1, 2, 3]]))
        sub2 = barycentric_subdivide(barycentric_subdivide(g))
        assert mesh_sq(sub2) <= (F(2, 3) ** 2) ** 2 * mesh_sq(g)

    def test_contraction_exact_squared(self):
        g = tiny_triangle()
        m = combinatorial_dimension(g.abstract)
        sub = barycentric_subdivide(g)
        assert mesh_sq(sub) <= F(m, m + 1) ** 2 * mesh_sq(g)


class TestMeshGeometric:
    def test_point(self):
        g = GeometricComplex.of(AbstractComplex.of(["v"], [["v"]]), {"v": [F(0)]})
        assert mesh_sq(g) == 0

    def test_unit_segment(self):
        g = GeometricComplex.of(AbstractComplex.of(["a", "b"], [["a", "b"]]),
                                {"a": [F(0)], "b": [F(1)]})
        assert mesh_sq(g) == 1

    def test_standard_two_simplex(self):
        g = realize(AbstractComplex.of([1, 2, 3], [[1, 2, 3]]))
        assert mesh_sq(g) == 2


class TestDimUpperViaStars:
    def test_point_any_eps(self):
        g = GeometricComplex.of(AbstractComplex.of(["v"], [["v"]]), {"v": [F(0)]})
        dim, cover = dim_upper_via_stars(g, F(1, 100))
        assert dim == 0 and len(cover.sets) == 1

    def test_segment(self):
        g = GeometricComplex.of(AbstractComplex.of(["a", "b"], [["a", "b"]]),
                                {"a": [F(0)], "b": [F(1)]})
        dim, cover = dim_upper_via_stars(g, F(1, 2))
        assert dim == 1
        # ground metric carries squared distances
        assert mesh(cover) <= F(1, 2) ** 2

    def test_small_triangle(self):
        dim, cover = dim_upper_via_stars(tiny_triangle(), F(1, 4))
        assert dim == 2
        if cover.ground.metric is not None:
            assert mesh(cover) <= F(1, 4) ** 2


class TestGeometricValidation:
    def test_degenerate_facet_rejected(self):
        with pytest.raises(InputError):
            GeometricComplex.of(
                AbstractComplex.of([1, 2, 3], [[1, 2, 3]]),
                {"1": [F(0), F(0)], "2": [F(1), F(1)], "3": [F(2), F(2)]},
            )

    def test_strict_rejects_crossing_edges(self):
        with pytest.raises(InputError):
            GeometricComplex.of(
                AbstractComplex.of([1, 2, 3, 4], [[1, 2], [3, 4]]),
                {"1": [F(0), F(0)], "2": [F(2), F(0)], "3": [F(1), F(-1)], "4": [F(1), F(1)]},
                strict=True,
            )

    def test_strict_accepts_shared_edge(self):
        GeometricComplex.of(
            AbstractComplex.of([1, 2, 3, 4], [[1, 2, 3], [2, 3, 4]]),
            {"1": [F(0), F(0)], "2": [F(1), F(0)], "3": [F(0), F(1)], "4": [F(1), F(1)]},
            strict=True,
        )

    def test_realize_always_affinely_independent(self):
        rng = Random(3)
        for _ in range(10):
            nv = rng.randint(1, 6)
            verts = [f"v{i}" for i in range(nv)]
            facets = [rng.sample(verts, rng.randint(1, nv)) for _ in range(3)]
            realize(AbstractComplex.of(verts, facets))  # constructor checks ranks


class TestJson:
    def test_abstract_round_trip(self):
        cx = AbstractComplex.of([1, 2, 3], [[1, 2], [2, 3]])
        assert AbstractComplex.from_json(cx.to_json()).to_json() == cx.to_json()

    def test_geometric_round_trip(self):
        g = tiny_triangle()
        again = geometric_from_json(geometric_to_json(g))
        assert geometric_to_json(again) == geometric_to_json(g)
