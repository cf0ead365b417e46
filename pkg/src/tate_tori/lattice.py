"""Lattices with a finite group action, and the torus constructors.

A GLattice is a free Z-module of finite rank together with one integer
matrix per group element, multiplicative with respect to the group table
and invertible over Z.  These are exactly the character modules of
algebraic tori split by an extension with the given Galois group, so the
constructors below speak the torus language:

    split(d)   trivial action on Z^d            (split torus of dimension d)
    weil       regular representation Z[G]      (Weil restriction of G_m)
    norm1      Z[G] / (sum of basis vectors)    (norm-one torus)
    perm(H)    coset action on Z[G/H]
    dual(e)    contragredient: g -> transpose of rho(g^{-1})
    sum(a, b)  block-diagonal direct sum

plus an explicit form that takes matrices for the generators and completes
the table by word evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .abelian import IntMatrix, smith_normal_form
from .errors import BadSpec, TorsionQuotient
from .groups import FiniteGroup, Subgroup


class TorusSpec:
    """Base class for torus specification trees."""

    __slots__ = ()


@dataclass(frozen=True)
class Split(TorusSpec):
    dimension: int


@dataclass(frozen=True)
class WeilRestriction(TorusSpec):
    pass


@dataclass(frozen=True)
class NormOne(TorusSpec):
    pass


@dataclass(frozen=True)
class CosetAction(TorusSpec):
    # a resolved Subgroup, or a label to be resolved by the problem layer
    subgroup: Union[Subgroup, str]
    label: Optional[str] = None


@dataclass(frozen=True)
class Dual(TorusSpec):
    inner: TorusSpec


@dataclass(frozen=True)
class DirectSum(TorusSpec):
    left: TorusSpec
    right: TorusSpec


@dataclass(frozen=True)
class ExplicitAction(TorusSpec):
    generator_matrices: tuple[IntMatrix, ...]


def spec_text(spec: TorusSpec) -> str:
    """Surface syntax for a spec tree (matches the problem-file grammar)."""
    if isinstance(spec, Split):
        return f"split({spec.dimension})"
    if isinstance(spec, WeilRestriction):
        return "weil"
    if isinstance(spec, NormOne):
        return "norm1"
    if isinstance(spec, CosetAction):
        if spec.label:
            return f"perm({spec.label})"
        if isinstance(spec.subgroup, str):
            return f"perm({spec.subgroup})"
        return f"perm([{' '.join(map(str, spec.subgroup.elements))}])"
    if isinstance(spec, Dual):
        return f"dual({spec_text(spec.inner)})"
    if isinstance(spec, DirectSum):
        return f"sum({spec_text(spec.left)}, {spec_text(spec.right)})"
    if isinstance(spec, ExplicitAction):
        r = spec.generator_matrices[0].rows if spec.generator_matrices else 0
        return f"explicit(rank {r})"
    raise BadSpec(f"unknown spec node {type(spec).__name__}")


@dataclass(frozen=True)
class GLattice:
    """A Z-free module with an action of a finite group.

    `action[g]` is the matrix of element g; the identity acts as the
    identity matrix and action[g] @ action[h] == action[g*h].  `spec`
    records how the lattice was constructed, when known.
    """

    group: FiniteGroup
    rank: int
    action: tuple[IntMatrix, ...]
    spec: Optional[TorusSpec] = None

    def action_of(self, g: int) -> IntMatrix:
        return self.action[g]


def build_torus_lattice(group: FiniteGroup, spec: TorusSpec) -> GLattice:
    """Realize a torus specification as a lattice with group action."""
    n = group.order
    if isinstance(spec, Split):
        d = spec.dimension
        if d < 0:
            raise BadSpec("split dimension must be nonnegative")
        eye = IntMatrix.identity(d)
        return GLattice(group, d, tuple(eye for _ in range(n)), spec)

    if isinstance(spec, WeilRestriction):
        mats = []
        for g in range(n):
            cols = []
            for x in range(n):
                col = [0] * n
                col[group.mul[g][x]] = 1
                cols.append(col)
            mats.append(IntMatrix.from_columns(cols, rows=n))
        return GLattice(group, n, tuple(mats), spec)

    if isinstance(spec, NormOne):
        # quotient of the regular lattice by the norm vector; basis keeps
        # the non-identity elements, the identity class maps to -sum.
        # the quotient is torsion-free iff the norm vector is primitive
        norm_col = IntMatrix.column_vector([1] * n)
        diag = smith_normal_form(norm_col).diagonal
        if diag and diag[0] != 1:
            raise TorsionQuotient("norm vector is not primitive; quotient would have torsion")
        r = n - 1
        mats = []
        for g in range(n):
            cols = []
            for x in range(1, n):
                y = group.mul[g][x]
                if y == group.identity:
                    cols.append([-1] * r)
                else:
                    col = [0] * r
                    col[y - 1] = 1
                    cols.append(col)
            mats.append(IntMatrix.from_columns(cols, rows=r))
        return GLattice(group, r, tuple(mats), spec)

    if isinstance(spec, CosetAction):
        sub = spec.subgroup
        if isinstance(sub, str):
            raise BadSpec(f"unresolved subgroup label {sub!r}")
        if sub.parent != group:
            raise BadSpec("subgroup belongs to a different group")
        cosets = []
        seen: set[tuple[int, ...]] = set()
        for x in range(n):
            coset = tuple(sorted(group.mul[x][h] for h in sub.elements))
            if coset not in seen:
                seen.add(coset)
                cosets.append(coset)
        cosets.sort(key=lambda c: c[0])
        coset_of = {}
        for k, coset in enumerate(cosets):
            for x in coset:
                coset_of[x] = k
        r = len(cosets)
        mats = []
        for g in range(n):
            cols = []
            for k, coset in enumerate(cosets):
                col = [0] * r
                col[coset_of[group.mul[g][coset[0]]]] = 1
                cols.append(col)
            mats.append(IntMatrix.from_columns(cols, rows=r))
        return GLattice(group, r, tuple(mats), spec)

    if isinstance(spec, Dual):
        inner = build_torus_lattice(group, spec.inner)
        mats = tuple(inner.action[group.inverse[g]].transpose() for g in range(n))
        return GLattice(group, inner.rank, mats, spec)

    if isinstance(spec, DirectSum):
        left = build_torus_lattice(group, spec.left)
        right = build_torus_lattice(group, spec.right)
        r = left.rank + right.rank
        mats = []
        for g in range(n):
            a, b = left.action[g], right.action[g]
            rows = []
            for i in range(a.rows):
                rows.append(list(a.row(i)) + [0] * b.cols)
            for i in range(b.rows):
                rows.append([0] * a.cols + list(b.row(i)))
            mats.append(IntMatrix.from_rows(rows, cols=r))
        return GLattice(group, r, tuple(mats), spec)

    if isinstance(spec, ExplicitAction):
        gens = group.generator_indices
        if not gens and spec.generator_matrices:
            raise BadSpec("group has no generator provenance for an explicit action")
        if len(spec.generator_matrices) != len(gens):
            raise BadSpec(
                f"expected {len(gens)} generator matrices, got {len(spec.generator_matrices)}"
            )
        r = spec.generator_matrices[0].rows if spec.generator_matrices else 0
        for m in spec.generator_matrices:
            if m.shape != (r, r):
                raise BadSpec("generator matrices must be square and of equal size")
        mats: list[Optional[IntMatrix]] = [None] * n
        mats[group.identity] = IntMatrix.identity(r)
        for gpos, gidx in enumerate(gens):
            if gidx == group.identity:
                continue
            mats[gidx] = spec.generator_matrices[gpos]
        # BFS parents guarantee each element is parent * generator with the
        # parent discovered earlier, so one pass in index order completes the table
        for y in range(n):
            if mats[y] is not None:
                continue
            parent = group.bfs_parents[y]
            if parent is None:
                raise BadSpec("incomplete word data for explicit action")
            x, gpos = parent
            if mats[x] is None:
                raise BadSpec("word evaluation order broken")
            mats[y] = mats[x] @ spec.generator_matrices[gpos]
        lattice = GLattice(group, r, tuple(mats), spec)
        violations = validate_lattice(lattice)
        if violations:
            raise BadSpec(
                "generator matrices violate the group relations: " + "; ".join(violations[:3])
            )
        return lattice

    raise BadSpec(f"unknown spec node {type(spec).__name__}")


def validate_lattice(m: GLattice) -> list[str]:
    """All GLattice invariant violations, as readable strings; empty if valid."""
    out = []
    n = m.group.order
    if len(m.action) != n:
        return [f"expected {n} action matrices, found {len(m.action)}"]
    for g in range(n):
        if m.action[g].shape != (m.rank, m.rank):
            out.append(f"rho({g}) is not {m.rank}x{m.rank}")
    if out:
        return out
    if m.action[m.group.identity] != IntMatrix.identity(m.rank):
        out.append("rho(identity) != I")
    for g in range(n):
        for h in range(n):
            if m.action[g] @ m.action[h] != m.action[m.group.mul[g][h]]:
                out.append(f"rho({g}) * rho({h}) != rho({m.group.mul[g][h]})")
    return out


def restrict_lattice(m: GLattice, sub: Subgroup) -> GLattice:
    """The same lattice viewed as a module over a subgroup (re-indexed)."""
    if sub.parent != m.group:
        raise BadSpec("subgroup belongs to a different group")
    hgroup, mapping = sub.as_group()
    mats = tuple(m.action[p] for p in mapping)
    return GLattice(hgroup, m.rank, mats)
