"""Finite groups as multiplication tables built from permutation generators.

Element 0 is always the identity; the remaining elements are numbered in
BFS order from the generators, which makes every downstream computation
deterministic.  Groups are kept small on purpose (order cap, default 128):
the cohomology systems built on top, not storage, are the real cost.

Permutations are written in cycle notation on positive integers, e.g.
"(1 2)(3 4)".  Cycles inside one string are applied left to right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .abelian import FinAbGroup, IntMatrix, cokernel_group
from .errors import BadPermutation, OrderCapExceeded

# canonical permutation form: sorted (point, image) pairs, fixed points omitted
Perm = tuple[tuple[int, int], ...]

IDENTITY_PERM: Perm = ()

_CYCLE_TOKEN = re.compile(r"\s*(\(|\)|\d+)")


def parse_permutation(text: str) -> Perm:
    """Parse cycle notation like "(1 2 3)(4 5)" into canonical form.

    Cycles are applied left to right; "()" and the empty string denote the
    identity.  Raises BadPermutation for malformed input.
    """
    pos = 0
    cycles: list[list[int]] = []
    current: Optional[list[int]] = None
    while pos < len(text):
        m = _CYCLE_TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise BadPermutation(f"unexpected character {text[pos:].strip()[0]!r} in {text!r}")
            break
        tok = m.group(1)
        pos = m.end()
        if tok == "(":
            if current is not None:
                raise BadPermutation(f"nested parenthesis in {text!r}")
            current = []
        elif tok == ")":
            if current is None:
                raise BadPermutation(f"unbalanced ')' in {text!r}")
            if len(set(current)) != len(current):
                raise BadPermutation(f"repeated point in cycle in {text!r}")
            cycles.append(current)
            current = None
        else:
            if current is None:
                raise BadPermutation(f"number outside parentheses in {text!r}")
            value = int(tok)
            if value <= 0:
                raise BadPermutation(f"points must be positive integers: {text!r}")
            current.append(value)
    if current is not None:
        raise BadPermutation(f"unbalanced '(' in {text!r}")
    result: Perm = IDENTITY_PERM
    for cyc in cycles:
        mapping = {}
        for i, p in enumerate(cyc):
            mapping[p] = cyc[(i + 1) % len(cyc)]
        result = compose_permutations(result, _canonical(mapping))
    return result


def _canonical(mapping: dict[int, int]) -> Perm:
    return tuple(sorted((p, q) for p, q in mapping.items() if p != q))


def compose_permutations(p: Perm, q: Perm) -> Perm:
    """Apply p first, then q."""
    pd, qd = dict(p), dict(q)
    points = set(pd) | set(qd)
    return _canonical({x: qd.get(pd.get(x, x), pd.get(x, x)) for x in points})


def permutation_text(p: Perm) -> str:
    """Canonical cycle string; "()" for the identity."""
    mapping = dict(p)
    seen: set[int] = set()
    out = []
    for start in sorted(mapping):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        x = mapping[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = mapping[x]
        out.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(out) if out else "()"


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group as a full multiplication table.

    mul[i][j] is the index of element i followed by element j.  All group
    axioms are re-checked at construction.  `bfs_parents[k]` records how
    element k was first reached: (parent index, generator position), None
    for the identity; explicit lattice constructions use it for word
    evaluation.
    """

    order: int
    mul: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]
    provenance: tuple[str, ...]
    perms: Optional[tuple[Perm, ...]] = field(default=None, compare=False)
    generator_indices: tuple[int, ...] = ()
    bfs_parents: tuple[Optional[tuple[int, int]], ...] = field(default=(), compare=False)

    @classmethod
    def from_table(cls, mul: Sequence[Sequence[int]], *, provenance: Sequence[str] = (),
                   perms: Optional[Sequence[Perm]] = None,
                   generator_indices: Sequence[int] = (),
                   bfs_parents: Sequence[Optional[tuple[int, int]]] = ()) -> "FiniteGroup":
        n = len(mul)
        table = tuple(tuple(row) for row in mul)
        for row in table:
            if len(row) != n or any(not (0 <= e < n) for e in row):
                raise ValueError("multiplication table is not square over valid indices")
        if n == 0:
            raise ValueError("a group has at least the identity")
        for x in range(n):
            if table[0][x] != x or table[x][0] != x:
                raise ValueError("element 0 is not a two-sided identity")
        inverse = []
        for x in range(n):
            inv = [y for y in range(n) if table[x][y] == 0 and table[y][x] == 0]
            if len(inv) != 1:
                raise ValueError(f"element {x} has no unique inverse")
            inverse.append(inv[0])
        for x in range(n):
            for y in range(n):
                xy = table[x][y]
                for z in range(n):
                    if table[xy][z] != table[x][table[y][z]]:
                        raise ValueError(f"associativity fails at ({x}, {y}, {z})")
        return cls(
            order=n,
            mul=table,
            identity=0,
            inverse=tuple(inverse),
            provenance=tuple(provenance),
            perms=tuple(perms) if perms is not None else None,
            generator_indices=tuple(generator_indices),
            bfs_parents=tuple(bfs_parents),
        )

    def multiply(self, i: int, j: int) -> int:
        return self.mul[i][j]

    def inv(self, i: int) -> int:
        return self.inverse[i]

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = self.mul[x][i]
            k += 1
        return k

    def is_cyclic(self) -> bool:
        return any(self.element_order(i) == self.order for i in range(self.order))

    def is_abelian(self) -> bool:
        return all(
            self.mul[i][j] == self.mul[j][i]
            for i in range(self.order)
            for j in range(i + 1, self.order)
        )

    def element_index(self, perm: Perm) -> int:
        """Index of a permutation among this group's elements."""
        if self.perms is None:
            raise ValueError("group carries no permutation realization")
        try:
            return self.perms.index(perm)
        except ValueError:
            raise BadPermutation(
                f"permutation {permutation_text(perm)} is not an element of this group"
            ) from None

    def __repr__(self) -> str:
        gens = ", ".join(self.provenance) if self.provenance else "table"
        return f"FiniteGroup(order={self.order}, generators=[{gens}])"


def group_from_permutations(generators: Sequence[str], order_cap: int = 128) -> FiniteGroup:
    """Close a set of cycle-notation generators into a full group table.

    Raises OrderCapExceeded if the closure grows past `order_cap`; that is
    the desk-scale limit, not a bug.
    """
    gen_perms = [parse_permutation(g) for g in generators]
    elements: list[Perm] = [IDENTITY_PERM]
    lookup: dict[Perm, int] = {IDENTITY_PERM: 0}
    parents: list[Optional[tuple[int, int]]] = [None]
    i = 0
    while i < len(elements):
        for gpos, g in enumerate(gen_perms):
            y = compose_permutations(elements[i], g)
            if y not in lookup:
                if len(elements) + 1 > order_cap:
                    raise OrderCapExceeded(
                        f"group closure exceeds order cap {order_cap}"
                    )
                lookup[y] = len(elements)
                elements.append(y)
                parents.append((i, gpos))
        i += 1
    n = len(elements)
    table = [
        [lookup[compose_permutations(elements[i], elements[j])] for j in range(n)]
        for i in range(n)
    ]
    return FiniteGroup.from_table(
        table,
        provenance=tuple(generators),
        perms=elements,
        generator_indices=tuple(lookup[g] for g in gen_perms),
        bfs_parents=parents,
    )


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its sorted element indices in the parent group."""

    parent: FiniteGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", elems)
        if not elems or elems[0] != self.parent.identity:
            raise ValueError("a subgroup contains the identity")
        inside = set(elems)
        for a in elems:
            if self.parent.inverse[a] not in inside:
                raise ValueError(f"not closed under inversion at element {a}")
            for b in elems:
                if self.parent.mul[a][b] not in inside:
                    raise ValueError(f"not closed under multiplication at ({a}, {b})")

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_cyclic(self) -> bool:
        g, _ = self.as_group()
        return g.is_cyclic()

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """Re-index the subgroup as a standalone group.

        Returns (group, mapping) where mapping[new index] = parent index.
        The identity keeps index 0 because parent index 0 sorts first.
        """
        mapping = self.elements
        pos = {p: k for k, p in enumerate(mapping)}
        table = [[pos[self.parent.mul[a][b]] for b in mapping] for a in mapping]
        perms = None
        if self.parent.perms is not None:
            perms = [self.parent.perms[p] for p in mapping]
        grp = FiniteGroup.from_table(table, perms=perms)
        return grp, mapping

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, elements={list(self.elements)})"


def subgroup_closure(g: FiniteGroup, elements: Sequence[int]) -> Subgroup:
    """Smallest subgroup of g containing the given element indices."""
    for e in elements:
        if not (0 <= e < g.order):
            raise ValueError(f"element index {e} out of range")
    closure = {g.identity} | set(elements)
    while True:
        new = {g.mul[a][b] for a in closure for b in closure} - closure
        if not new:
            break
        closure |= new
    return Subgroup(g, tuple(sorted(closure)))


def cyclic_subgroups(g: FiniteGroup) -> list[Subgroup]:
    """All distinct cyclic subgroups <x>, sorted by (order, elements).

    Includes the trivial subgroup.  By Chebotarev density every one of
    these occurs as a decomposition group of infinitely many unramified
    places, which is why the place-profile machinery enumerates them.
    """
    seen: set[tuple[int, ...]] = set()
    out: list[Subgroup] = []
    for x in range(g.order):
        elems = [g.identity]
        y = x
        while y != g.identity:
            elems.append(y)
            y = g.mul[y][x]
        key = tuple(sorted(elems))
        if key not in seen:
            seen.add(key)
            out.append(Subgroup(g, key))
    out.sort(key=lambda s: (s.order, s.elements))
    return out


def abelianization(g: FiniteGroup) -> FinAbGroup:
    """g / [g, g] in invariant-factor form.

    The commutator subgroup is the closure of all [x, y]; the quotient
    table is then presented additively (one generator per coset, relations
    e_i + e_j = e_{ij}) and handed to cokernel_group.
    """
    commutators = {
        g.mul[g.mul[g.mul[g.inverse[x]][g.inverse[y]]][x]][y]
        for x in range(g.order)
        for y in range(g.order)
    }
    comm = subgroup_closure(g, sorted(commutators))
    rep_of = {}
    for x in range(g.order):
        coset = {g.mul[c][x] for c in comm.elements}
        rep_of[x] = min(coset)
    reps = sorted(set(rep_of.values()))
    idx = {r: k for k, r in enumerate(reps)}
    m = len(reps)
    columns = []
    for i in range(m):
        for j in range(i, m):
            prod_rep = idx[rep_of[g.mul[reps[i]][reps[j]]]]
            col = [0] * m
            col[i] += 1
            col[j] += 1
            col[prod_rep] -= 1
            columns.append(col)
    quotient = cokernel_group(IntMatrix.from_columns(columns, rows=m))
    # order bookkeeping only: drop the coordinate lift
    return FinAbGroup(quotient.free_rank, quotient.invariant_factors)
