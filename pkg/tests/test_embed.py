"""Embedding toolkit: window maps, general position, cyclic operations,
patterned matrices, unity-weight map builders, the window-index finder, and
the sphere demo."""

from fractions import Fraction
from random import Random

import pytest

from meandim.covers import Cover, GroundSet
from meandim.embed import (
    CyclicVector,
    PartitionOfUnity,
    PatternMatrix,
    PointCloud,
    WindowSequence,
    cyclic_repeat,
    cyclic_shift,
    embedding_criterion,
    eps_injective_map,
    equator_reflection,
    find_window_index,
    generic_span_extension,
    is_general_position,
    pattern_generic_affine,
    pattern_generic_invertibility,
    perturb_general_position,
    pou_map_builder,
    sphere_demo,
    sphere_point,
    sphere_sequence,
    symbolic_pattern_det,
    v_subspace_membership,
    window_index_conditions,
    window_index_oracle,
    window_map,
)
from meandim.errors import InputError, PreconditionError

F = Fraction


class TestWindowMap:
    def three_cycle(self):
        t = {"a": "b", "b": "c", "c": "a"}
        f = {"a": (F(0),), "b": (F(1),), "c": (F(2),)}
        return f, t

    def test_constant_function(self):
        f = {p: (F(5),) for p in "abc"}
        t = {"a": "b", "b": "c", "c": "a"}
        assert window_map(f, t, "a", -2, 2) == [(F(5),)] * 5

    def test_identity_map(self):
        f, _ = self.three_cycle()
        t = {p: p for p in "abc"}
        assert window_map(f, t, "b", 0, 3) == [(F(1),)] * 4

    def test_cycle_labels_in_order(self):
        f, t = self.three_cycle()
        assert window_map(f, t, "a", 0, 2) == [(F(0),), (F(1),), (F(2),)]

    def test_orbit_data_exhausted(self):
        f = {"a": (F(0),), "b": (F(1),)}
        t = {"a": "b"}
        with pytest.raises(InputError):
            window_map(f, t, "a", 0, 2)


class TestEmbeddingCriterion:
    def test_injective_f_separates_at_zero(self):
        f = {"a": (F(0),), "b": (F(1),)}
        t = {"a": "b", "b": "a"}
        rep = embedding_criterion(f, t, [("a", "b")], 0, 3)
        assert rep.separated[("a", "b")] == 0

    def test_constant_on_swap_never_separates(self):
        f = {"a": (F(1),), "b": (F(1),)}
        t = {"a": "b", "b": "a"}
        rep = embedding_criterion(f, t, [("a", "b")], -4, 4)
        assert rep.separated[("a", "b")] is None
        assert not rep.all_separated

    def test_sphere_samples_separate_quickly(self):
        pts = {}
        fmap = {}
        tmap = {}
        rng = Random(3)
        for i in range(12):
            u = F(rng.randint(-40, 40), 16)
            v = F(rng.randint(-40, 40), 16)
            p = sphere_point(u, v)
            pts[f"p{i}"] = p
            pts[f"q{i}"] = equator_reflection(p)
        for name, p in pts.items():
            fmap[name] = sphere_sequence(p, 0)
        for name, p in pts.items():
            # the reflection swaps the two alternating values
            partner = f"q{name[1:]}" if name.startswith("p") else f"p{name[1:]}"
            tmap[name] = partner
        pairs = [("p0", "p1"), ("p2", "q2"), ("p3", "q4")]
        rep = embedding_criterion(fmap, tmap, pairs, 0, 1)
        assert rep.all_separated


class TestGeneralPosition:
    def test_single_point(self):
        assert is_general_position([(F(3), F(4))])

    def test_collinear_fails(self):
        pts = [(F(0), F(0)), (F(1), F(1)), (F(2), F(2))]
        assert not is_general_position(pts)

    def test_verified_random_quadruple(self):
        pts = [(F(0), F(0)), (F(1), F(0)), (F(0), F(1)), (F(3, 7), F(5, 11))]
        assert is_general_position(pts)

    def test_perturb_fixes_collinearity(self):
        pts = [(F(0), F(0)), (F(1), F(1)), (F(2), F(2))]
        out = perturb_general_position(pts, F(1, 50), seed=4)
        assert is_general_position(out)
        for p, q in zip(pts, out):
            assert max(abs(a - b) for a, b in zip(p, q)) < F(1, 50)

    def test_coincident_points_separate(self):
        pts = [(F(1, 2), F(1, 2))] * 4
        out = perturb_general_position(pts, F(1, 20), seed=5)
        assert is_general_position(out)

    def test_already_generic_family_unchanged(self):
        pts = [(F(0), F(0)), (F(1), F(0)), (F(0), F(1))]
        out = perturb_general_position(pts, F(1, 1000), seed=6)
        assert out == pts

    def test_seed_suite(self):
        rng = Random(10)
        for seed in range(8):
            pts = [(F(rng.randint(0, 4), 4), F(rng.randint(0, 4), 4)) for _ in range(5)]
            out = perturb_general_position(pts, F(1, 30), seed=seed)
            assert is_general_position(out)
            assert all(
                max(abs(a - b) for a, b in zip(p, q)) < F(1, 30)
                for p, q in zip(pts, out)
            )


class TestCyclicOps:
    def test_repeat_identity(self):
        v = CyclicVector.of([(F(1),), (F(2),)])
        assert cyclic_repeat(v, 2).blocks == v.blocks

    def test_repeat_pattern(self):
        v = CyclicVector.of([(F(1),), (F(2),)])
        assert [b[0] for b in cyclic_repeat(v, 4).blocks] == [1, 2, 1, 2]

    def test_repeat_single(self):
        v = CyclicVector.of([(F(7),)])
        assert [b[0] for b in cyclic_repeat(v, 3).blocks] == [7, 7, 7]

    def test_repeat_shrink_rejected(self):
        with pytest.raises(InputError):
            cyclic_repeat(CyclicVector.of([(F(1),), (F(2),)]), 1)

    def test_shift_zero_identity(self):
        v = CyclicVector.of([(F(1),), (F(2),), (F(3),)])
        assert cyclic_shift(v, 0).blocks == v.blocks

    def test_shift_one(self):
        v = CyclicVector.of([(F(1),), (F(2),), (F(3),)])
        assert [b[0] for b in cyclic_shift(v, 1).blocks] == [2, 3, 1]

    def test_shift_inverse_composition(self):
        rng = Random(2)
        for _ in range(10):
            n = rng.randint(1, 6)
            v = CyclicVector.of([(F(rng.randint(0, 9)),) for _ in range(n)])
            l = rng.randrange(n)
            assert cyclic_shift(cyclic_shift(v, l), n - l).blocks == v.blocks

    def test_shift_full_cycle_identity(self):
        v = CyclicVector.of([(F(1),), (F(2),), (F(3),)])
        out = v
        for _ in range(3):
            out = cyclic_shift(out, 1)
        assert out.blocks == v.blocks


class TestPatternMatrices:
    def test_two_by_two(self):
        m = PatternMatrix.of([[1, 2], [2, 1]])
        rep = pattern_generic_invertibility(m, 200, seed=1)
        assert rep.all_passed
        assert symbolic_pattern_det(m) == {(2, 0): 1, (0, 2): -1}

    def test_one_by_one(self):
        rep = pattern_generic_invertibility(PatternMatrix.of([[1]]), 50, seed=2)
        assert rep.all_passed

    def test_row_repeat_rejected(self):
        with pytest.raises(PreconditionError):
            pattern_generic_invertibility(PatternMatrix.of([[1, 1], [2, 3]]), 5, seed=3)

    def test_affine_one_by_two(self):
        rep = pattern_generic_affine(PatternMatrix.of([[1, 2]]), 100, seed=4)
        assert rep.all_passed

    def test_affine_adversarial_sampler_flagged(self):
        rep = pattern_generic_affine(
            PatternMatrix.of([[1, 2]]), 1, seed=5,
            t_sampler=lambda rng, syms: {s: 9 for s in syms},
        )
        assert len(rep.failures) == 1

    def test_affine_three_by_four(self):
        m = PatternMatrix.of([[1, 2, 3, 4], [5, 6, 7, 8], [9, 10, 11, 12]])
        rep = pattern_generic_affine(m, 100, seed=6)
        assert rep.all_passed

    def test_affine_symbol_thrice_rejected(self):
        m = PatternMatrix.of([[1, 2, 3, 1], [2, 1, 4, 5], [6, 7, 1, 8]])
        with pytest.raises(PreconditionError):
            pattern_generic_affine(m, 5, seed=7)

    def test_symbolic_det_nonzero_for_valid_small_patterns(self):
        rng = Random(8)
        for _ in range(30):
            size = rng.randint(1, 3)
            base = rng.sample(range(1, 12), size)
            rows = [[base[(i + j) % size] for j in range(size)] for i in range(size)]
            assert symbolic_pattern_det(PatternMatrix.of(rows))


class TestSpanExtension:
    def test_sample_a_basis(self):
        rep = generic_span_extension([], 4, "linear", 30, seed=1, ambient_dim=4)
        assert rep.all_passed

    def test_nothing_to_extend(self):
        base = [(F(1), F(0)), (F(0), F(1))]
        rep = generic_span_extension(base, 0, "linear", 10, seed=2)
        assert rep.all_passed and rep.trials == 1

    def test_dimension_precondition(self):
        base = [(F(1), F(0)), (F(0), F(1))]
        with pytest.raises(PreconditionError):
            generic_span_extension(base, 1, "linear", 5, seed=3)

    def test_affine_mode(self):
        base = [(F(0), F(0))]
        rep = generic_span_extension(base, 2, "affine", 30, seed=4)
        assert rep.all_passed


class TestVSubspace:
    def test_modulus_equals_length_always_member(self):
        z = [(F(1),), (F(5),), (F(9),)]
        member, dist = v_subspace_membership(z, 3)
        assert member and dist == 0

    def test_congruent_blocks_differ(self):
        z = [(F(1),), (F(2),), (F(5),), (F(2),)]
        member, dist = v_subspace_membership(z, 2)
        assert not member and dist == 2

    def test_periodic_vector_is_member(self):
        z = [(F(1), F(3)), (F(2), F(4))] * 3
        member, dist = v_subspace_membership(z, 2)
        assert member and dist == 0


def anchored_pou():
    g = GroundSet(("a", "b", "c"))
    cov = Cover.of(g, {"U": ["a", "b"], "V": ["b", "c"]})
    return PartitionOfUnity.subordinate(cov, anchors={"U": "a", "V": "c"})


class TestPartitionOfUnity:
    def test_anchored_weights(self):
        pou = anchored_pou()
        assert pou.weight("U", "a") == 1
        assert pou.weight("V", "a") == 0
        assert pou.weight("U", "b") == F(1, 2)

    def test_subordination_and_normalization(self):
        pou = anchored_pou()
        pou.validate()

    def test_shared_anchor_rejected(self):
        g = GroundSet(("a", "b"))
        cov = Cover.of(g, {"U": ["a", "b"], "V": ["a", "b"]})
        with pytest.raises(InputError):
            PartitionOfUnity.subordinate(cov, anchors={"U": "a", "V": "a"})


class TestPouBuilders:
    def targets(self, n, d=1):
        return {
            "U": CyclicVector.of([tuple([F(1, 2)] * d)] * n),
            "V": CyclicVector.of([tuple([F(1, 3)] * d)] * n),
        }

    def test_approx3_constraint_and_anchors(self):
        pou = anchored_pou()
        fmap, rep = pou_map_builder(
            {"main": pou}, {"main": self.targets(4, 3)},
            {"lemma": "approx3", "n": 4, "l": 1, "d": 3}, eps=F(1, 10), seed=1,
        )
        assert rep.anchor_deviation < F(1, 10)
        for x in "abc":
            for y in "abc":
                assert fmap[x].blocks != cyclic_shift(fmap[y], 1).blocks

    def test_approx3_l_zero_extension(self):
        pou = anchored_pou()
        fmap, rep = pou_map_builder(
            {"main": pou}, {"main": self.targets(4, 2)},
            {"lemma": "approx3", "n": 4, "l": 0, "d": 2}, eps=F(1, 10), seed=2,
        )
        assert any("extension" in note for note in rep.notes)
        for x in "abc":
            for y in "abc":
                if x != y:
                    assert fmap[x].blocks != fmap[y].blocks

    def test_approx3_order_precondition(self):
        pou = anchored_pou()
        with pytest.raises(PreconditionError):
            pou_map_builder(
                {"main": pou}, {"main": self.targets(2, 1)},
                {"lemma": "approx3", "n": 2, "l": 1, "d": 1}, eps=F(1, 10), seed=3,
            )

    def test_approx4_single_anchor_cover(self):
        g = GroundSet(("p",))
        cov = Cover.of(g, {"W": ["p"]})
        pou = PartitionOfUnity.subordinate(cov, anchors={"W": "p"})
        targets = {"W": CyclicVector.of([(F(1, 2), F(1, 2))] * 8)}
        fmap, rep = pou_map_builder(
            {"main": pou}, {"main": targets},
            {"lemma": "approx4", "N": 8, "n": 2, "d": 2}, eps=F(1, 10), seed=4,
        )
        member, dist = v_subspace_membership(fmap["p"].blocks[:7], 2)
        assert not member and dist > 0

    def test_approx2_disjoint_single_set_covers(self):
        g1, g2 = GroundSet(("p",)), GroundSet(("q",))
        pou1 = PartitionOfUnity.subordinate(Cover.of(g1, {"A": ["p"]}), anchors={"A": "p"})
        pou2 = PartitionOfUnity.subordinate(Cover.of(g2, {"B": ["q"]}), anchors={"B": "q"})
        t1 = {"A": CyclicVector.of([tuple([F(1, 2)] * 3)])}
        t2 = {"B": CyclicVector.of([tuple([F(1, 2)] * 3)])}
        fmap, rep = pou_map_builder(
            {"side1": pou1, "side2": pou2}, {"side1": t1, "side2": t2},
            {"lemma": "approx2", "n1": 1, "n2": 1, "d": 3}, eps=F(1, 10), seed=5,
        )
        assert fmap["side1"]["p"].blocks != cyclic_repeat(fmap["side2"]["q"], 1).blocks

    def test_approx1_quadruple_constraint(self):
        pou = anchored_pou()
        fmap, rep = pou_map_builder(
            {"main": pou}, {"main": self.targets(6, 2)},
            {"lemma": "approx1", "N": 6, "S": 1, "d": 2}, eps=F(1, 10), seed=6,
        )
        assert any("finite lambda grid" in n for n in rep.notes)

    def test_convex_hull_containment(self):
        pou = anchored_pou()
        fmap, _ = pou_map_builder(
            {"main": pou}, {"main": self.targets(4, 1)},
            {"lemma": "approx3", "n": 4, "l": 1, "d": 1}, eps=F(1, 10), seed=7,
        )
        # F(b) is the midpoint combination of the two anchor images
        for k in range(4):
            lo = min(fmap["a"].blocks[k][0], fmap["c"].blocks[k][0])
            hi = max(fmap["a"].blocks[k][0], fmap["c"].blocks[k][0])
            assert lo <= fmap["b"].blocks[k][0] <= hi


class TestEpsInjective:
    def cloud_and_cover(self, n_pts=60):
        pts = {f"x{i}": [F(i, n_pts - 1)] for i in range(n_pts)}
        cloud = PointCloud.of(pts, metric="sup")
        w = F(2, 25)
        named = {}
        lo, k = F(0), 0
        while lo < 1:
            members = [f"x{i}" for i in range(n_pts) if lo <= F(i, n_pts - 1) <= lo + w]
            if members:
                named[f"U{k}"] = members
            lo += w / 2
            k += 1
        cover = Cover.of(GroundSet(tuple(pts)), named)
        f = {name: (c[0] / 4, F(0), F(0)) for name, c in zip(cloud.names, cloud.coords)}
        return cloud, cover, f

    def test_pairwise_injectivity_and_deviation(self):
        cloud, cover, f = self.cloud_and_cover()
        g, rep = eps_injective_map(cloud, cover, f, F(1, 10), F(1, 20), m=3, seed=8)
        assert not rep["violations"]
        assert rep["deviation_within_delta"]

    def test_single_point_cloud(self):
        cloud = PointCloud.of({"p": [F(1, 2)]})
        cover = Cover.of(GroundSet(("p",)), {"U": ["p"]})
        g, rep = eps_injective_map(cloud, cover, {"p": (F(0), F(0), F(0))},
                                   F(1, 10), F(1, 20), m=3, seed=9)
        assert rep["pairs_checked"] == 0

    def test_mesh_precondition(self):
        cloud, cover, f = self.cloud_and_cover()
        with pytest.raises(PreconditionError):
            eps_injective_map(cloud, cover, f, F(1, 100), F(1, 20), m=3, seed=10)

    def test_dimension_precondition(self):
        cloud, cover, f = self.cloud_and_cover()
        with pytest.raises(PreconditionError):
            eps_injective_map(cloud, cover, f, F(1, 10), F(1, 20), m=2, seed=11)


class TestWindowIndex:
    def make_seq(self, m, start=0, break_at=None, jump=7):
        vals = []
        cur = start
        for i in range(-3 * m // 2, m // 2):
            vals.append(cur)
            cur += 1
            if break_at is not None and i == break_at:
                cur += jump
        return WindowSequence.of(m, vals)

    def test_break_free(self):
        seq = self.make_seq(8, start=0)
        r = find_window_index(seq)
        assert all(window_index_conditions(seq, r))
        assert r in window_index_oracle(seq)

    def test_break_far_left(self):
        seq = self.make_seq(4, start=-3, break_at=-6)
        r = find_window_index(seq)
        assert all(window_index_conditions(seq, r))

    def test_two_breaks_rejected(self):
        m = 8
        vals = []
        cur = 0
        for i in range(-3 * m // 2, m // 2):
            vals.append(cur)
            cur += 1
            if i in (-10, -2):
                cur += 3
        with pytest.raises(PreconditionError):
            find_window_index(WindowSequence.of(m, vals))

    def test_fractional_values(self):
        m = 8
        vals = [F(i) + F(1, 3) for i in range(-3 * m // 2, m // 2)]
        seq = WindowSequence.of(m, vals)
        r = find_window_index(seq)
        c1, c2, c3 = window_index_conditions(seq, r)
        assert c1 and c2 and c3

    def test_oracle_agreement_randomized(self):
        rng = Random(14)
        for _ in range(200):
            m = rng.choice([4, 8, 16])
            break_at = rng.choice([None, rng.randint(-3 * m // 2, m // 2 - 2)])
            seq = self.make_seq(m, start=rng.randint(-30, 30), break_at=break_at,
                                jump=rng.choice([-9, -3, 3, 11]))
            oracle = window_index_oracle(seq)
            r = find_window_index(seq)
            assert r in oracle


class TestSphere:
    def test_equator_point_constant(self):
        p = sphere_point(F(1, 2), F(0))
        # pick a genuine equator point instead: z = 0 needs u^2+v^2 = 1
        p = sphere_point(F(3, 5), F(4, 5))
        assert p[2] == 0
        assert sphere_sequence(p, 0) == sphere_sequence(p, 1)

    def test_poles_swap(self):
        north = (F(0), F(0), F(1))
        south = (F(0), F(0), F(-1))
        for k in range(-3, 3):
            assert sphere_sequence(south, k) == sphere_sequence(north, k + 1)

    def test_equivariance_exact(self):
        rng = Random(15)
        for _ in range(50):
            p = sphere_point(F(rng.randint(-32, 32), 16), F(rng.randint(-32, 32), 16))
            sp = equator_reflection(p)
            for k in range(-3, 3):
                assert sphere_sequence(sp, k) == sphere_sequence(p, k + 1)

    def test_demo_report(self):
        rep = sphere_demo(60, seed=16)
        assert rep.passed
        assert rep.pairs_checked == 60 * 59 // 2

    def test_values_in_unit_square(self):
        rng = Random(17)
        for _ in range(30):
            p = sphere_point(F(rng.randint(-64, 64), 32), F(rng.randint(-64, 64), 32))
            for k in (0, 1):
                a, b = sphere_sequence(p, k)
                assert 0 <= a <= 1 and 0 <= b <= 1
