"""Tate cohomology of G-lattices in degrees -1, 0, 1, 2.

Degrees -1 and 0 always use the norm recipes

    H^0  = fixed sublattice / image of the norm map
    H^-1 = kernel of the norm map / augmentation sublattice

and degrees 1 and 2 use normalized bar-resolution cochains, except on the
cyclic fast path where the 2-periodicity of cyclic Tate cohomology lets us
reuse the norm recipes (odd degrees via the -1 recipe, even via the 0
recipe) and carry representatives back to bar cochains.

Normalized cochains vanish whenever an argument is the identity, which
shrinks the degree-2 system from (n^2)r unknowns to ((n-1)^2)r.  Cochain
coordinates are ordered by (group element index, lattice coordinate) with
pairs lexicographic, so representatives are byte-identical across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from .abelian import (
    AbMorphism,
    FinAbGroup,
    IntMatrix,
    kernel_basis,
    solve_columns,
    subquotient_group,
)
from .errors import CochainSystemTooLarge, InfiniteCohomology, NotCyclic
from .lattice import GLattice
from .groups import Subgroup

DEGREES = (-1, 0, 1, 2)

# refuse degree-2 bar systems with more unknowns than this unless forced
DEGREE2_UNKNOWN_CAP = 20000


@dataclass(frozen=True)
class CochainShape:
    """Which cochain space a vector lives in.

    Degrees -1 and 0 use the module itself (length r); degree 1 uses
    normalized maps G \\ {1} -> Z^r (length (n-1)r); degree 2 uses
    normalized maps on pairs (length (n-1)^2 r).
    """

    degree: int
    group_order: int
    rank: int

    @property
    def length(self) -> int:
        n, r = self.group_order, self.rank
        if self.degree in (-1, 0):
            return r
        if self.degree == 1:
            return (n - 1) * r
        if self.degree == 2:
            return (n - 1) * (n - 1) * r
        raise ValueError(f"degree {self.degree} out of range")

    def block_1(self, g: int) -> int:
        """Start offset of the block of a non-identity element (degree 1)."""
        return (g - 1) * self.rank

    def block_2(self, g: int, h: int) -> int:
        """Start offset of the block of a pair of non-identity elements (degree 2)."""
        n = self.group_order
        return ((g - 1) * (n - 1) + (h - 1)) * self.rank


@dataclass(frozen=True)
class CohomologyGroup:
    """A computed Tate cohomology group with cocycle representatives.

    `structure` is always finite.  The columns of `cocycle_reps` are
    cochain vectors (in the space described by `cochain_shape`)
    representing the presentation generators of `structure`, and each
    satisfies its degree's cocycle condition exactly.
    """

    degree: int
    structure: FinAbGroup
    cocycle_reps: IntMatrix
    cochain_shape: CochainShape

    def order(self) -> int:
        return self.structure.order()


# ---------------------------------------------------------------------------
# basic module maps
# ---------------------------------------------------------------------------


def norm_matrix(m: GLattice) -> IntMatrix:
    """Sum of all action matrices."""
    total = IntMatrix.zeros(m.rank, m.rank)
    for g in range(m.group.order):
        total = total + m.action[g]
    return total


def fixed_sublattice(m: GLattice) -> IntMatrix:
    """Basis of the fixed sublattice: kernel of stacked (rho(g) - I)."""
    eye = IntMatrix.identity(m.rank)
    rows: list[list[int]] = []
    for g in range(m.group.order):
        if g == m.group.identity:
            continue
        diff = m.action[g] - eye
        rows.extend(diff.to_rows())
    return kernel_basis(IntMatrix.from_rows(rows, cols=m.rank))


def augmentation_columns(m: GLattice) -> IntMatrix:
    """Columns (rho(g) - I) e_j for all non-identity g and all j."""
    eye = IntMatrix.identity(m.rank)
    cols: list[tuple[int, ...]] = []
    for g in range(m.group.order):
        if g == m.group.identity:
            continue
        cols.extend((m.action[g] - eye).columns())
    return IntMatrix.from_columns(cols, rows=m.rank)


# ---------------------------------------------------------------------------
# bar-resolution systems on normalized cochains
# ---------------------------------------------------------------------------


def cocycle_matrix(m: GLattice, degree: int) -> IntMatrix:
    """Matrix of the cocycle condition on normalized degree-`degree` cochains.

    Equations involving the identity are automatically satisfied by
    normalized cochains, so only tuples of non-identity elements appear.
    """
    n, r = m.group.order, m.rank
    mul = m.group.mul
    shape = CochainShape(degree, n, r)
    width = shape.length
    rows: list[list[int]] = []
    nonid = [g for g in range(n) if g != m.group.identity]
    if degree == 1:
        # rho(g) c(h) - c(gh) + c(g) = 0
        for g in nonid:
            rho = m.action[g]
            for h in nonid:
                block = [[0] * width for _ in range(r)]
                _add_matrix(block, rho, shape.block_1(h))
                gh = mul[g][h]
                if gh != m.group.identity:
                    _add_identity(block, -1, shape.block_1(gh), r)
                _add_identity(block, 1, shape.block_1(g), r)
                rows.extend(block)
        return IntMatrix.from_rows(rows, cols=width)
    if degree == 2:
        # rho(g) c(h,k) - c(gh,k) + c(g,hk) - c(g,h) = 0
        for g in nonid:
            rho = m.action[g]
            for h in nonid:
                gh = mul[g][h]
                for k in nonid:
                    hk = mul[h][k]
                    block = [[0] * width for _ in range(r)]
                    _add_matrix(block, rho, shape.block_2(h, k))
                    if gh != m.group.identity:
                        _add_identity(block, -1, shape.block_2(gh, k), r)
                    if hk != m.group.identity:
                        _add_identity(block, 1, shape.block_2(g, hk), r)
                    _add_identity(block, -1, shape.block_2(g, h), r)
                    rows.extend(block)
        return IntMatrix.from_rows(rows, cols=width)
    raise ValueError("cocycle systems exist for degrees 1 and 2 only")


def _add_matrix(block: list[list[int]], mat: IntMatrix, offset: int) -> None:
    for i in range(mat.rows):
        row = block[i]
        for j, e in enumerate(mat.row(i)):
            if e:
                row[offset + j] += e


def _add_identity(block: list[list[int]], sign: int, offset: int, r: int) -> None:
    for i in range(r):
        block[i][offset + i] += sign


def coboundary_columns(m: GLattice, degree: int) -> IntMatrix:
    """Columns spanning the coboundary sublattice inside degree-`degree` cochains."""
    n, r = m.group.order, m.rank
    shape = CochainShape(degree, n, r)
    eye = IntMatrix.identity(r)
    nonid = [g for g in range(n) if g != m.group.identity]
    cols: list[list[int]] = []
    if degree == 1:
        # (d m)(g) = (rho(g) - I) m
        for j in range(r):
            col = [0] * shape.length
            for g in nonid:
                diff = m.action[g] - eye
                off = shape.block_1(g)
                for i in range(r):
                    col[off + i] = diff[i, j]
            cols.append(col)
        return IntMatrix.from_columns(cols, rows=shape.length)
    if degree == 2:
        # (d c)(g,h) = rho(g) c(h) - c(gh) + c(g) for the basis 1-cochains
        mul = m.group.mul
        for x in nonid:
            for j in range(r):
                col = [0] * shape.length
                for g in nonid:
                    rho = m.action[g]
                    for h in nonid:
                        off = shape.block_2(g, h)
                        if h == x:
                            for i in range(r):
                                if rho[i, j]:
                                    col[off + i] += rho[i, j]
                        if mul[g][h] == x:
                            col[off + j] -= 1
                        if g == x:
                            col[off + j] += 1
                cols.append(col)
        return IntMatrix.from_columns(cols, rows=shape.length)
    raise ValueError("coboundaries exist for degrees 1 and 2 only")


def cocycle_residual(m: GLattice, degree: int, vec: tuple[int, ...]) -> tuple[int, ...]:
    """Apply the degree-`degree` cocycle condition to a cochain vector.

    Zero everywhere iff the vector is a cocycle (for degrees -1/0: iff it
    is killed by the norm / fixed by the action).
    """
    n, r = m.group.order, m.rank
    shape = CochainShape(degree, n, r)
    if len(vec) != shape.length:
        raise ValueError(f"expected a vector of length {shape.length}")
    col = IntMatrix.column_vector(list(vec))
    if degree == -1:
        return tuple((norm_matrix(m) @ col).column(0))
    if degree == 0:
        eye = IntMatrix.identity(r)
        out: list[int] = []
        for g in range(n):
            out.extend(((m.action[g] - eye) @ col).column(0))
        return tuple(out)
    system = cocycle_matrix(m, degree)
    return tuple((system @ col).column(0))


# ---------------------------------------------------------------------------
# the main entry points
# ---------------------------------------------------------------------------


def tate_group(m: GLattice, degree: int, *, fast_path: bool = True, force: bool = False) -> CohomologyGroup:
    """The Tate cohomology group of a lattice in degree -1, 0, 1 or 2."""
    if degree not in DEGREES:
        raise ValueError(f"degree must be one of {DEGREES}")
    return _tate_cached(m, degree, bool(fast_path), bool(force))


@lru_cache(maxsize=256)
def _tate_cached(m: GLattice, degree: int, fast_path: bool, force: bool) -> CohomologyGroup:
    n, r = m.group.order, m.rank
    shape = CochainShape(degree, n, r)
    if degree == -1:
        q = subquotient_group(kernel_basis(norm_matrix(m)), augmentation_columns(m))
        return _finish(degree, q, shape)
    if degree == 0:
        q = subquotient_group(fixed_sublattice(m), norm_matrix(m))
        return _finish(degree, q, shape)

    if fast_path and m.group.is_cyclic():
        return _cyclic_fast(m, degree, shape)

    if degree == 2:
        unknowns = (n - 1) * (n - 1) * r
        if unknowns > DEGREE2_UNKNOWN_CAP and not force:
            raise CochainSystemTooLarge(
                f"degree-2 system has {unknowns} unknowns "
                f"(cap {DEGREE2_UNKNOWN_CAP}); pass force to compute anyway"
            )
    cocycles = kernel_basis(cocycle_matrix(m, degree))
    q = subquotient_group(cocycles, coboundary_columns(m, degree))
    return _finish(degree, q, shape)


def _finish(degree: int, q: FinAbGroup, shape: CochainShape) -> CohomologyGroup:
    if q.free_rank:
        raise InfiniteCohomology(
            f"degree {degree} came out with free rank {q.free_rank}; "
            "the lattice action is broken upstream"
        )
    reps = q.generator_lift
    if reps is None:
        reps = IntMatrix.zeros(shape.length, 0)
    structure = FinAbGroup(0, q.invariant_factors)
    return CohomologyGroup(degree, structure, reps, shape)


def _cyclic_fast(m: GLattice, degree: int, shape: CochainShape) -> CohomologyGroup:
    """Periodicity for cyclic groups: odd degrees from the -1 recipe, even
    from the 0 recipe, with representatives carried back to bar cochains."""
    n, r = m.group.order, m.rank
    sigma = _cyclic_generator(m.group)
    powers = [m.group.identity]
    for _ in range(n - 1):
        powers.append(m.group.mul[powers[-1]][sigma])
    if degree == 1:
        sigma_cols = (m.action[sigma] - IntMatrix.identity(r)).columns()
        q = subquotient_group(
            kernel_basis(norm_matrix(m)),
            IntMatrix.from_columns(sigma_cols, rows=r),
        )
        if q.free_rank:
            raise InfiniteCohomology("cyclic degree 1 came out infinite")
        reps = _carry_degree1(m, q.generator_lift, powers, shape)
        return CohomologyGroup(1, FinAbGroup(0, q.invariant_factors), reps, shape)
    q = subquotient_group(fixed_sublattice(m), norm_matrix(m))
    if q.free_rank:
        raise InfiniteCohomology("cyclic degree 2 came out infinite")
    reps = _carry_degree2(m, q.generator_lift, powers, shape)
    return CohomologyGroup(2, FinAbGroup(0, q.invariant_factors), reps, shape)


def _cyclic_generator(group) -> int:
    best = None
    for g in range(group.order):
        o = group.element_order(g)
        if best is None or o > best[0]:
            best = (o, g)
    if best[0] != group.order:
        raise NotCyclic("group has no generator")
    return best[1]


def _carry_degree1(m: GLattice, lifts: Optional[IntMatrix], powers: list[int],
                   shape: CochainShape) -> IntMatrix:
    """m in ker(norm) becomes the 1-cocycle sigma^k -> (1 + sigma + ... + sigma^{k-1}) m."""
    n, r = m.group.order, m.rank
    if lifts is None or lifts.cols == 0:
        return IntMatrix.zeros(shape.length, 0)
    partial = IntMatrix.zeros(r, r)
    partial_sums = []
    for k in range(n):
        partial_sums.append(partial)  # sum of rho(sigma^i) for i < k
        partial = partial + m.action[powers[k]]
    cols = []
    for t in range(lifts.cols):
        mcol = IntMatrix.column_vector(lifts.column(t))
        vec = [0] * shape.length
        for k in range(1, n):
            g = powers[k]
            block = (partial_sums[k] @ mcol).column(0)
            off = shape.block_1(g)
            for i in range(r):
                vec[off + i] = block[i]
        cols.append(vec)
    return IntMatrix.from_columns(cols, rows=shape.length)


def _carry_degree2(m: GLattice, lifts: Optional[IntMatrix], powers: list[int],
                   shape: CochainShape) -> IntMatrix:
    """m fixed becomes the carrying 2-cocycle (sigma^a, sigma^b) -> [a+b >= n] m."""
    n, r = m.group.order, m.rank
    if lifts is None or lifts.cols == 0:
        return IntMatrix.zeros(shape.length, 0)
    cols = []
    for t in range(lifts.cols):
        mvec = lifts.column(t)
        vec = [0] * shape.length
        for a in range(1, n):
            for b in range(1, n):
                if a + b >= n:
                    off = shape.block_2(powers[a], powers[b])
                    for i in range(r):
                        vec[off + i] = mvec[i]
        cols.append(vec)
    return IntMatrix.from_columns(cols, rows=shape.length)


def restriction_morphism(m: GLattice, sub: Subgroup, degree: int, *,
                         fast_path: bool = True, force: bool = False) -> AbMorphism:
    """The restriction map on cohomology induced by a subgroup inclusion.

    Cocycle representatives are restricted to arguments in the subgroup and
    re-expressed in the target presentation; the coordinates are canonical
    (reduced mod the target invariant factors), so restricting to the whole
    group yields the identity matrix on the nose.
    """
    from .lattice import restrict_lattice

    if degree not in (1, 2):
        raise ValueError("restriction maps are computed in degrees 1 and 2 only")
    source = tate_group(m, degree, fast_path=fast_path, force=force)
    mh = restrict_lattice(m, sub)
    target = tate_group(mh, degree, fast_path=fast_path, force=force)
    s_gens = source.structure.num_generators
    t_gens = target.structure.num_generators
    if s_gens == 0 or t_gens == 0:
        return AbMorphism(source.structure, target.structure, IntMatrix.zeros(t_gens, s_gens))

    mapping = sub.elements  # new index -> parent index; identity stays at 0
    tshape = target.cochain_shape
    sshape = source.cochain_shape
    restricted_cols = []
    for t in range(s_gens):
        vec = source.cocycle_reps.column(t)
        out = [0] * tshape.length
        if degree == 1:
            for a in range(1, sub.order):
                soff = sshape.block_1(mapping[a])
                toff = tshape.block_1(a)
                out[toff : toff + m.rank] = vec[soff : soff + m.rank]
            restricted_cols.append(out)
        else:
            for a in range(1, sub.order):
                for b in range(1, sub.order):
                    soff = sshape.block_2(mapping[a], mapping[b])
                    toff = tshape.block_2(a, b)
                    out[toff : toff + m.rank] = vec[soff : soff + m.rank]
            restricted_cols.append(out)
    restricted = IntMatrix.from_columns(restricted_cols, rows=tshape.length)
    system = target.cocycle_reps.hstack(coboundary_columns(mh, degree))
    solution = solve_columns(system, restricted, context="restricted cocycle expression")
    tfac = target.structure.invariant_factors
    rows = []
    for j in range(t_gens):
        row = solution.row(j)
        rows.append([e % tfac[j] for e in row])
    matrix = IntMatrix.from_rows(rows, cols=s_gens)
    return AbMorphism(source.structure, target.structure, matrix)


def herbrand_quotient(m: GLattice) -> Fraction:
    """|H^0| / |H^-1| as an exact rational; requires a cyclic group."""
    if not m.group.is_cyclic():
        raise NotCyclic("the Herbrand quotient needs a cyclic group")
    h0 = tate_group(m, 0)
    hm1 = tate_group(m, -1)
    return Fraction(h0.order(), hm1.order())
