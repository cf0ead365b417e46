import random

import pytest

from tate_tori.abelian import IntMatrix
from tate_tori.errors import BadSpec
from tate_tori.groups import Subgroup, group_from_permutations, subgroup_closure
from tate_tori.lattice import (
    CosetAction,
    DirectSum,
    Dual,
    ExplicitAction,
    GLattice,
    NormOne,
    Split,
    WeilRestriction,
    build_torus_lattice,
    restrict_lattice,
    spec_text,
    validate_lattice,
)

from _helpers import random_valid_lattice


@pytest.fixture(scope="module")
def c2():
    return group_from_permutations(["(1 2)"])


@pytest.fixture(scope="module")
def v4():
    return group_from_permutations(["(1 2)", "(3 4)"])


@pytest.fixture(scope="module")
def s3():
    return group_from_permutations(["(1 2 3)", "(1 2)"])


class TestBuilders:
    def test_split_has_trivial_action(self, s3):
        m = build_torus_lattice(s3, Split(2))
        assert m.rank == 2
        assert all(a == IntMatrix.identity(2) for a in m.action)

    def test_weil_is_regular_representation(self, c2):
        m = build_torus_lattice(c2, WeilRestriction())
        assert m.rank == 2
        assert m.action[1] == IntMatrix.from_rows([[0, 1], [1, 0]])

    def test_quadratic_norm_one_is_sign(self, c2):
        # e-bar = class of e_sigma; sigma . e-bar = class of e_1 = -e-bar
        m = build_torus_lattice(c2, NormOne())
        assert m.rank == 1
        assert m.action[1] == IntMatrix.from_rows([[-1]])

    def test_biquadratic_norm_one_matrices(self, v4):
        # apply the quotient recipe to the 4-element regular basis by hand
        m = build_torus_lattice(v4, NormOne())
        assert m.rank == 3
        assert m.action[1].to_rows() == [[-1, 0, 0], [-1, 0, 1], [-1, 1, 0]]
        assert m.action[2].to_rows() == [[0, -1, 1], [0, -1, 0], [1, -1, 0]]

    def test_coset_action(self, s3):
        a3 = subgroup_closure(s3, [1])
        m = build_torus_lattice(s3, CosetAction(a3, "A3"))
        assert m.rank == 2
        # a transposition swaps the two cosets, a 3-cycle fixes them
        assert m.action[2] == IntMatrix.from_rows([[0, 1], [1, 0]])
        assert m.action[1] == IntMatrix.identity(2)

    def test_weil_equals_coset_action_on_trivial_subgroup(self, v4):
        triv = Subgroup(v4, (0,))
        assert build_torus_lattice(v4, WeilRestriction()).action == \
            build_torus_lattice(v4, CosetAction(triv)).action

    def test_dual_transposes_inverse(self, c2):
        m = build_torus_lattice(c2, Dual(NormOne()))
        assert m.action[1] == IntMatrix.from_rows([[-1]])

    def test_sum_is_block_diagonal(self, c2):
        m = build_torus_lattice(c2, DirectSum(Split(1), NormOne()))
        assert m.rank == 2
        assert m.action[1] == IntMatrix.from_rows([[1, 0], [0, -1]])

    def test_rank_formulas(self, s3):
        assert build_torus_lattice(s3, NormOne()).rank == s3.order - 1
        a3 = subgroup_closure(s3, [1])
        assert build_torus_lattice(s3, CosetAction(a3)).rank == s3.order // a3.order
        both = DirectSum(NormOne(), Split(2))
        assert build_torus_lattice(s3, both).rank == 5 + 2

    def test_build_then_validate(self, s3, v4, c2):
        specs = [Split(0), Split(3), WeilRestriction(), NormOne(), Dual(NormOne()),
                 DirectSum(Split(1), NormOne())]
        for g in (c2, v4, s3):
            for spec in specs:
                assert validate_lattice(build_torus_lattice(g, spec)) == []


class TestExplicitAction:
    def test_completion_matches_weil(self, c2):
        swap = IntMatrix.from_rows([[0, 1], [1, 0]])
        m = build_torus_lattice(c2, ExplicitAction((swap,)))
        assert m.action == build_torus_lattice(c2, WeilRestriction()).action

    def test_word_evaluation_on_v4(self, v4):
        a = IntMatrix.from_rows([[-1, 0], [0, 1]])
        b = IntMatrix.from_rows([[1, 0], [0, -1]])
        m = build_torus_lattice(v4, ExplicitAction((a, b)))
        assert m.action[3] == IntMatrix.from_rows([[-1, 0], [0, -1]])
        assert validate_lattice(m) == []

    def test_inconsistent_matrices_rejected(self, c2):
        with pytest.raises(BadSpec):
            build_torus_lattice(c2, ExplicitAction((IntMatrix.from_rows([[2]]),)))

    def test_wrong_count_rejected(self, v4):
        with pytest.raises(BadSpec):
            build_torus_lattice(v4, ExplicitAction((IntMatrix.identity(1),)))


class TestSpecErrors:
    def test_unresolved_label(self, c2):
        with pytest.raises(BadSpec):
            build_torus_lattice(c2, CosetAction("H9"))

    def test_foreign_subgroup(self, c2, v4):
        h = subgroup_closure(v4, [1])
        with pytest.raises(BadSpec):
            build_torus_lattice(c2, CosetAction(h))

    def test_negative_split(self, c2):
        with pytest.raises(BadSpec):
            build_torus_lattice(c2, Split(-1))


class TestValidateLattice:
    def test_order_violation_is_reported(self, c2):
        broken = GLattice(c2, 1, (IntMatrix.identity(1), IntMatrix.from_rows([[2]])))
        violations = validate_lattice(broken)
        assert violations and any("rho(1)" in v for v in violations)

    def test_swapped_regular_matrices(self, s3):
        # swapping a 3-cycle's matrix with a transposition's breaks the table
        m = build_torus_lattice(s3, WeilRestriction())
        action = list(m.action)
        action[1], action[2] = action[2], action[1]
        violations = validate_lattice(GLattice(s3, 6, tuple(action)))
        assert violations and all("rho(" in v for v in violations)

    def test_wrong_identity(self, c2):
        broken = GLattice(c2, 1, (IntMatrix.from_rows([[-1]]), IntMatrix.identity(1)))
        assert any("identity" in v for v in validate_lattice(broken))


class TestRestriction:
    def test_trivial_subgroup(self, v4):
        m = build_torus_lattice(v4, NormOne())
        r = restrict_lattice(m, Subgroup(v4, (0,)))
        assert r.group.order == 1
        assert r.action == (IntMatrix.identity(3),)

    def test_whole_group_is_identity_reindexing(self, v4):
        m = build_torus_lattice(v4, NormOne())
        r = restrict_lattice(m, Subgroup(v4, (0, 1, 2, 3)))
        assert r.action == m.action
        assert r.rank == m.rank

    def test_regular_v4_restricts_to_two_regular_blocks(self, v4):
        # orbit decomposition of the basis: {e,a} and {b,c} both swapped by a
        m = build_torus_lattice(v4, WeilRestriction())
        r = restrict_lattice(m, subgroup_closure(v4, [1]))
        assert r.action[1] == IntMatrix.from_rows(
            [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
        )

    def test_restriction_commutes_with_sum_and_dual(self, s3):
        h = subgroup_closure(s3, [2])
        spec_sum = DirectSum(NormOne(), Split(1))
        direct = restrict_lattice(build_torus_lattice(s3, spec_sum), h)
        hgrp, _ = h.as_group()
        # restricting each summand then summing gives the same matrices
        left = restrict_lattice(build_torus_lattice(s3, NormOne()), h)
        right = restrict_lattice(build_torus_lattice(s3, Split(1)), h)
        for g in range(hgrp.order):
            block = [
                list(left.action[g].row(i)) + [0] * right.rank for i in range(left.rank)
            ] + [
                [0] * left.rank + list(right.action[g].row(i)) for i in range(right.rank)
            ]
            assert direct.action[g].to_rows() == block
        dual_then_restrict = restrict_lattice(build_torus_lattice(s3, Dual(NormOne())), h)
        restrict_then_dual = tuple(
            left.action[hgrp.inverse[g]].transpose() for g in range(hgrp.order)
        )
        assert dual_then_restrict.action == restrict_then_dual


class TestStructuralProperties:
    def test_dual_is_involutive(self):
        rng = random.Random(11)
        for gens in [["(1 2 3 4)"], ["(1 2)", "(3 4)"], ["(1 2 3)", "(1 2)"]]:
            g = group_from_permutations(gens)
            for _ in range(5):
                m = random_valid_lattice(rng, g, 4)
                dual = GLattice(g, m.rank, tuple(m.action[g2].transpose() for g2 in
                                                 (g.inverse[x] for x in range(g.order))))
                double = tuple(dual.action[g.inverse[x]].transpose() for x in range(g.order))
                assert double == m.action

    def test_random_lattices_validate(self):
        rng = random.Random(12)
        for gens in [["(1 2 3)(4 5)"], ["(1 2 3)", "(1 2)"]]:
            g = group_from_permutations(gens)
            for _ in range(5):
                assert validate_lattice(random_valid_lattice(rng, g, 4)) == []

    def test_spec_text_round_trip_forms(self, s3):
        a3 = subgroup_closure(s3, [1])
        assert spec_text(Split(2)) == "split(2)"
        assert spec_text(WeilRestriction()) == "weil"
        assert spec_text(DirectSum(Split(1), NormOne())) == "sum(split(1), norm1)"
        assert spec_text(Dual(NormOne())) == "dual(norm1)"
        assert spec_text(CosetAction(a3, "A3")) == "perm(A3)"
