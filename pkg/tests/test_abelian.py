import random

import pytest

from tate_tori.abelian import (
    AbMorphism,
    FinAbGroup,
    IntMatrix,
    cokernel_group,
    kernel_basis,
    morphism_analysis,
    smith_normal_form,
    solve_columns,
    subquotient_group,
)
from tate_tori.errors import ContainmentError

from _helpers import bareiss_det, random_int_matrix


def rank_of(a: IntMatrix) -> int:
    return sum(1 for d in smith_normal_form(a).diagonal if d)


class TestIntMatrix:
    def test_row_major_entries(self):
        m = IntMatrix(2, 3, [1, 2, 3, 4, 5, 6])
        assert m.row(0) == (1, 2, 3)
        assert m.column(2) == (3, 6)
        assert m[1, 0] == 4

    def test_empty_shapes(self):
        assert IntMatrix.zeros(0, 3).shape == (0, 3)
        assert IntMatrix.zeros(3, 0).shape == (3, 0)
        prod = IntMatrix.zeros(2, 0) @ IntMatrix.zeros(0, 4)
        assert prod == IntMatrix.zeros(2, 4)

    def test_immutability(self):
        m = IntMatrix.identity(2)
        with pytest.raises(AttributeError):
            m.rows = 5

    def test_matmul_matches_manual(self):
        a = IntMatrix.from_rows([[1, 2], [3, 4]])
        b = IntMatrix.from_rows([[0, 1], [1, 1]])
        assert (a @ b).to_rows() == [[2, 3], [4, 7]]


class TestSmithNormalForm:
    def test_identity(self):
        dec = smith_normal_form(IntMatrix.identity(3))
        assert dec.s == IntMatrix.identity(3)

    def test_zero_1x1(self):
        dec = smith_normal_form(IntMatrix.from_rows([[0]]))
        assert dec.s == IntMatrix.from_rows([[0]])

    def test_worked_2x2(self):
        # row/column reduction by hand: d1 = gcd of entries = 2, d1*d2 = |det| = 8
        a = IntMatrix.from_rows([[2, 4], [6, 8]])
        dec = smith_normal_form(a)
        assert dec.diagonal == (2, 4)
        assert dec.u @ a @ dec.v == dec.s

    @pytest.mark.parametrize("seed", range(8))
    def test_random_invariants(self, seed):
        rng = random.Random(1000 + seed)
        for _ in range(8):
            rows, cols = rng.randint(0, 5), rng.randint(0, 5)
            a = random_int_matrix(rng, rows, cols)
            dec = smith_normal_form(a)
            assert dec.u @ a @ dec.v == dec.s
            assert abs(bareiss_det(dec.u)) == 1
            assert abs(bareiss_det(dec.v)) == 1
            diag = dec.diagonal
            assert all(d >= 0 for d in diag)
            for x, y in zip(diag, diag[1:]):
                assert (x == 0 and y == 0) or (x != 0 and y % x == 0)
            # off-diagonal entries vanish
            for i in range(rows):
                for j in range(cols):
                    if i != j:
                        assert dec.s[i, j] == 0
            # deterministic
            assert smith_normal_form(a) == dec

    @pytest.mark.parametrize("seed", range(5))
    def test_square_nonsingular_diag_product_is_det(self, seed):
        rng = random.Random(2000 + seed)
        while True:
            a = random_int_matrix(rng, 4, 4, bound=5)
            d = bareiss_det(a)
            if d != 0:
                break
        dec = smith_normal_form(a)
        prod = 1
        for x in dec.diagonal:
            prod *= x
        assert prod == abs(d)


class TestKernelBasis:
    def test_rank_one_relation(self):
        k = kernel_basis(IntMatrix.from_rows([[1, 1]]))
        assert k.cols == 1
        assert tuple(k.column(0)) in {(1, -1), (-1, 1)}

    def test_injective(self):
        assert kernel_basis(IntMatrix.from_rows([[2]])).cols == 0

    def test_dependent_rows(self):
        # second row is twice the first; solve by substitution: +-(2, -1)
        k = kernel_basis(IntMatrix.from_rows([[1, 2], [2, 4]]))
        assert k.cols == 1
        assert tuple(k.column(0)) in {(2, -1), (-2, 1)}

    @pytest.mark.parametrize("seed", range(6))
    def test_random_kernel_properties(self, seed):
        rng = random.Random(3000 + seed)
        a = random_int_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        k = kernel_basis(a)
        assert (a @ k).is_zero()
        # saturated: the basis extends to a basis of the ambient lattice
        if k.cols:
            assert all(d == 1 for d in smith_normal_form(k).diagonal)
        # appending any vector outside the kernel strictly increases rank
        base_rank = rank_of(k)
        for j in range(a.cols):
            e = IntMatrix.from_columns(
                [[1 if i == j else 0 for i in range(a.cols)]], rows=a.cols
            )
            if not (a @ e).is_zero():
                assert rank_of(k.hstack(e)) == base_rank + 1

    def test_zero_rows_matrix(self):
        assert kernel_basis(IntMatrix.zeros(0, 3)) == IntMatrix.identity(3)


class TestCokernelGroup:
    def test_diag_2_3_is_z6(self):
        g = cokernel_group(IntMatrix.from_rows([[2, 0], [0, 3]]))
        assert g.invariant_factors == (6,)
        assert g.free_rank == 0
        assert g.order() == 6

    def test_identity_is_trivial(self):
        assert cokernel_group(IntMatrix.identity(4)).is_trivial

    def test_no_relations_is_free(self):
        g = cokernel_group(IntMatrix.zeros(2, 0))
        assert g.free_rank == 2 and g.invariant_factors == ()

    @pytest.mark.parametrize("seed", range(6))
    def test_order_matches_snf_diagonal(self, seed):
        rng = random.Random(4000 + seed)
        n = rng.randint(1, 4)
        a = random_int_matrix(rng, n, rng.randint(n, n + 2), bound=6)
        g = cokernel_group(a)
        diag = smith_normal_form(a).diagonal
        if all(diag) and len(diag) >= n:
            prod = 1
            for d in diag[:n]:
                prod *= d
            assert g.is_finite and g.order() == prod

    def test_generator_lift_classes_have_right_order(self):
        a = IntMatrix.from_rows([[2, 0], [0, 3]])
        g = cokernel_group(a)
        lift = g.generator_lift
        assert lift is not None and lift.cols == 1
        # d * lift must fall into the relation lattice, no smaller multiple
        d = g.invariant_factors[0]
        col = IntMatrix.from_columns([[d * e for e in lift.column(0)]], rows=2)
        solve_columns(a, col)  # no ContainmentError
        for smaller in range(1, d):
            scaled = IntMatrix.from_columns([[smaller * e for e in lift.column(0)]], rows=2)
            with pytest.raises(ContainmentError):
                solve_columns(a, scaled)


class TestSubquotientGroup:
    def test_square_lattice_mod_doubles(self):
        g = subquotient_group(IntMatrix.identity(2), IntMatrix.from_rows([[2, 0], [0, 2]]))
        assert g.invariant_factors == (2, 2)

    def test_coordinates_solved_exactly(self):
        b = IntMatrix.from_columns([[2, 0]], rows=2)
        c = IntMatrix.from_columns([[4, 0]], rows=2)
        g = subquotient_group(b, c)
        assert g.invariant_factors == (2,)

    def test_no_constraints_leaves_free_rank(self):
        g = subquotient_group(IntMatrix.identity(1), IntMatrix.zeros(1, 0))
        assert g.free_rank == 1 and g.invariant_factors == ()

    def test_containment_error(self):
        with pytest.raises(ContainmentError):
            subquotient_group(IntMatrix.from_rows([[2]]), IntMatrix.from_rows([[1]]))

    def test_dependent_basis_rejected(self):
        b = IntMatrix.from_columns([[1, 0], [2, 0]], rows=2)
        with pytest.raises(ValueError):
            subquotient_group(b, IntMatrix.zeros(2, 0))

    def test_generator_lift_in_ambient_coordinates(self):
        b = IntMatrix.from_columns([[2, 0]], rows=2)
        g = subquotient_group(b, IntMatrix.from_columns([[4, 0]], rows=2))
        assert g.generator_lift.column(0) in {(2, 0), (-2, 0)}


def _random_finite_group(rng: random.Random) -> FinAbGroup:
    choices = [(2,), (3,), (4,), (6,), (8,), (2, 2), (2, 4), (3, 3), (2, 2, 2), (4, 4)]
    return FinAbGroup(0, rng.choice(choices))


def _random_well_defined_matrix(rng, src: FinAbGroup, tgt: FinAbGroup) -> IntMatrix:
    import math

    rows = []
    for j, e in enumerate(tgt.invariant_factors):
        row = []
        for i, d in enumerate(src.invariant_factors):
            step = e // math.gcd(e, d)
            row.append(step * rng.randint(-2, 2))
        rows.append(row)
    return IntMatrix.from_rows(rows, cols=src.num_generators)


def _brute_force_kernel_image(src: FinAbGroup, tgt: FinAbGroup, m: IntMatrix):
    from itertools import product

    kernel = 0
    images = set()
    for x in product(*(range(d) for d in src.invariant_factors)):
        y = tuple(
            sum(m[j, i] * x[i] for i in range(len(x))) % tgt.invariant_factors[j]
            for j in range(len(tgt.invariant_factors))
        )
        images.add(y)
        if all(v == 0 for v in y):
            kernel += 1
    return kernel, len(images)


class TestAbMorphism:
    def test_identity_on_z4(self):
        z4 = FinAbGroup(0, (4,))
        parts = morphism_analysis(AbMorphism.identity(z4))
        assert parts.kernel.is_trivial
        assert parts.image.invariant_factors == (4,)
        assert parts.cokernel.is_trivial

    def test_zero_map_z2_to_z2(self):
        z2 = FinAbGroup(0, (2,))
        parts = morphism_analysis(AbMorphism(z2, z2, IntMatrix.from_rows([[0]])))
        assert parts.kernel.invariant_factors == (2,)
        assert parts.cokernel.invariant_factors == (2,)

    def test_multiplication_by_two_on_z4(self):
        # enumerate the 4 elements: kernel {0,2}, image {0,2}, cokernel of order 2
        z4 = FinAbGroup(0, (4,))
        parts = morphism_analysis(AbMorphism(z4, z4, IntMatrix.from_rows([[2]])))
        assert parts.kernel.invariant_factors == (2,)
        assert parts.image.invariant_factors == (2,)
        assert parts.cokernel.invariant_factors == (2,)

    def test_ill_defined_rejected(self):
        z2, z3 = FinAbGroup(0, (2,)), FinAbGroup(0, (3,))
        with pytest.raises(ValueError):
            AbMorphism(z2, z3, IntMatrix.from_rows([[1]]))

    def test_free_source_kernel(self):
        z = FinAbGroup(1, ())
        z2 = FinAbGroup(0, (2,))
        parts = morphism_analysis(AbMorphism(z, z2, IntMatrix.from_rows([[1]])))
        assert parts.kernel.free_rank == 1
        assert parts.image.invariant_factors == (2,)
        assert parts.cokernel.is_trivial

    @pytest.mark.parametrize("seed", range(10))
    def test_brute_force_kernel_image_counts(self, seed):
        # |kernel| * |image| = |source|, checked by enumeration up to order 64
        rng = random.Random(5000 + seed)
        for _ in range(4):
            src, tgt = _random_finite_group(rng), _random_finite_group(rng)
            if src.order() > 64:
                continue
            m = _random_well_defined_matrix(rng, src, tgt)
            f = AbMorphism(src, tgt, m)
            parts = morphism_analysis(f)
            bk, bi = _brute_force_kernel_image(src, tgt, m)
            assert parts.kernel.order() == bk
            assert parts.image.order() == bi
            assert parts.kernel.order() * parts.image.order() == src.order()
            assert parts.cokernel.order() * bi == tgt.order()


class TestFinAbGroup:
    def test_invariant_factor_validation(self):
        with pytest.raises(ValueError):
            FinAbGroup(0, (1, 2))
        with pytest.raises(ValueError):
            FinAbGroup(0, (4, 2))
        with pytest.raises(ValueError):
            FinAbGroup(0, (2, 3))

    def test_order_and_str(self):
        assert FinAbGroup(0, ()).order() == 1
        assert str(FinAbGroup(0, (2, 4))) == "Z/2 x Z/4"
        assert str(FinAbGroup(2, ())) == "Z^2"
        assert str(FinAbGroup(0, ())) == "trivial"
        with pytest.raises(ValueError):
            FinAbGroup(1, ()).order()
