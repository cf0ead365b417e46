"""Exact linear algebra over the integers.

Smith normal form, kernels, cokernels, subquotients, and morphisms of
finitely presented abelian groups.  Everything works with unbounded Python
integers: the elimination routines are overflow-free by construction, and
all results are exact.

The two workhorses are

* a column-echelon reduction (`kernel_basis`, `column_lattice_basis`) that
  only tracks the right transform, cheap enough for the large cochain
  systems produced by bar resolutions, and
* a full Smith elimination (`smith_normal_form`, `cokernel_group`,
  `solve_columns`) with deterministic pivoting: the pivot is the nonzero
  entry of minimal absolute value, ties broken by lowest (row, col).

Matrices of zero width or height are legal everywhere; they show up
constantly as trivial groups and empty relation sets.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import prod
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import ContainmentError


class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers.

    Entries are stored row-major.  Instances are hashable and safe to share
    between threads.
    """

    __slots__ = ("rows", "cols", "_cells")

    def __init__(self, rows: int, cols: int, entries: Iterable[int] = ()):
        entries = tuple(entries)
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if not entries:
            entries = (0,) * (rows * cols)
        if len(entries) != rows * cols:
            raise ValueError(
                f"expected {rows * cols} entries for a {rows}x{cols} matrix, "
                f"got {len(entries)}"
            )
        self_rows = []
        for i in range(rows):
            self_rows.append(tuple(entries[i * cols : (i + 1) * cols]))
        IntMatrix._init(self, rows, cols, tuple(self_rows))

    @staticmethod
    def _init(obj: "IntMatrix", rows: int, cols: int, cells) -> None:
        object.__setattr__(obj, "rows", rows)
        object.__setattr__(obj, "cols", cols)
        object.__setattr__(obj, "_cells", cells)

    def __setattr__(self, name, value):
        raise AttributeError("IntMatrix is immutable")

    @classmethod
    def _from_cells(cls, cells: tuple) -> "IntMatrix":
        obj = object.__new__(cls)
        rows = len(cells)
        cols = len(cells[0]) if cells else 0
        cls._init(obj, rows, cols, cells)
        return obj

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        """Build from a sequence of rows.  `cols` disambiguates empty input."""
        rows = [tuple(r) for r in rows]
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
            if cols is not None and cols != width:
                raise ValueError("cols does not match row width")
        else:
            width = 0 if cols is None else cols
        obj = object.__new__(cls)
        cls._init(obj, len(rows), width, tuple(rows))
        return obj

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        """Build from a sequence of columns.  `rows` disambiguates empty input."""
        columns = [tuple(c) for c in columns]
        if columns:
            height = len(columns[0])
            if any(len(c) != height for c in columns):
                raise ValueError("ragged columns")
            if rows is not None and rows != height:
                raise ValueError("rows does not match column height")
        else:
            height = 0 if rows is None else rows
        cells = tuple(tuple(c[i] for c in columns) for i in range(height))
        obj = object.__new__(cls)
        cls._init(obj, height, len(columns), cells)
        return obj

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls.from_rows([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def column_vector(cls, values: Sequence[int]) -> "IntMatrix":
        return cls.from_columns([tuple(values)], rows=len(values))

    # -- access -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        return self._cells[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._cells[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._cells)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def to_rows(self) -> list[list[int]]:
        return [list(r) for r in self._cells]

    def is_zero(self) -> bool:
        return all(all(e == 0 for e in r) for r in self._cells)

    # -- arithmetic -------------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.shape} @ {other.shape}")
        ocols = other.cols
        out = []
        for arow in self._cells:
            row = [0] * ocols
            for k, a in enumerate(arow):
                if a == 0:
                    continue
                brow = other._cells[k]
                for j in range(ocols):
                    b = brow[j]
                    if b:
                        row[j] += a * b
            out.append(tuple(row))
        obj = object.__new__(IntMatrix)
        IntMatrix._init(obj, self.rows, ocols, tuple(out))
        return obj

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        cells = tuple(tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self._cells, other._cells))
        obj = object.__new__(IntMatrix)
        IntMatrix._init(obj, self.rows, self.cols, cells)
        return obj

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        cells = tuple(tuple(-a for a in r) for r in self._cells)
        obj = object.__new__(IntMatrix)
        IntMatrix._init(obj, self.rows, self.cols, cells)
        return obj

    def transpose(self) -> "IntMatrix":
        cells = tuple(tuple(self._cells[i][j] for i in range(self.rows)) for j in range(self.cols))
        obj = object.__new__(IntMatrix)
        IntMatrix._init(obj, self.cols, self.rows, cells)
        return obj

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        cells = tuple(ra + rb for ra, rb in zip(self._cells, other._cells))
        if self.rows == 0:
            return IntMatrix.zeros(0, self.cols + other.cols)
        obj = object.__new__(IntMatrix)
        IntMatrix._init(obj, self.rows, self.cols + other.cols, cells)
        return obj

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch")
        obj = object.__new__(IntMatrix)
        IntMatrix._init(obj, self.rows + other.rows, self.cols, self._cells + other._cells)
        return obj

    def take_columns(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_columns([self.column(j) for j in indices], rows=self.rows)

    # -- dunder plumbing ---------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._cells == other._cells

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self._cells))

    def __repr__(self) -> str:
        return f"IntMatrix.from_rows({[list(r) for r in self._cells]!r})"

    def __str__(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return f"<empty {self.rows}x{self.cols}>"
        widths = [max(len(str(self._cells[i][j])) for i in range(self.rows)) for j in range(self.cols)]
        lines = []
        for r in self._cells:
            lines.append("[ " + "  ".join(str(e).rjust(w) for e, w in zip(r, widths)) + " ]")
        return "\n".join(lines)


class SmithDecomposition(NamedTuple):
    """U @ A @ V == S with U, V unimodular and S diagonal.

    Diagonal entries are nonnegative, each divides the next, and zeros
    trail.
    """

    u: IntMatrix
    s: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        n = min(self.s.rows, self.s.cols)
        return tuple(self.s[i, i] for i in range(n))


# ---------------------------------------------------------------------------
# column echelon reduction (kernels, column-span bases)
# ---------------------------------------------------------------------------


def _column_echelon(acols: list[list[int]], nrows: int, vcols: Optional[list[list[int]]]) -> set[int]:
    """Reduce columns by unimodular column operations, in place.

    For each row in order, the surviving columns with a nonzero entry in
    that row are combined until a single pivot remains; the pivot column is
    then retired.  Returns the set of column indices that were never used
    as pivots; those columns end up identically zero.

    Pivot choice: minimal absolute value, ties broken by lowest column
    index.  Pivots are normalized to positive sign.
    """
    active = set(range(len(acols)))
    for r in range(nrows):
        live = sorted(j for j in active if acols[j][r] != 0)
        if not live:
            continue
        while len(live) > 1:
            p = min(live, key=lambda j: (abs(acols[j][r]), j))
            pcol = acols[p]
            for j in live:
                if j == p:
                    continue
                q = acols[j][r] // pcol[r]
                if q:
                    col = acols[j]
                    for i in range(r, nrows):
                        col[i] -= q * pcol[i]
                    if vcols is not None:
                        vcol, vp = vcols[j], vcols[p]
                        for i in range(len(vcol)):
                            vcol[i] -= q * vp[i]
            live = [j for j in live if acols[j][r] != 0]
        p = live[0]
        if acols[p][r] < 0:
            acols[p] = [-e for e in acols[p]]
            if vcols is not None:
                vcols[p] = [-e for e in vcols[p]]
        active.discard(p)
    return active


def kernel_basis(a: IntMatrix) -> IntMatrix:
    """A matrix whose columns are a basis of the lattice {x : a @ x = 0}.

    The kernel of an integer matrix is a saturated sublattice, so the
    returned basis is automatically saturated.  Zero columns means the map
    is injective.
    """
    acols = [list(c) for c in a.columns()]
    vcols = [[1 if i == j else 0 for i in range(a.cols)] for j in range(a.cols)]
    free = _column_echelon(acols, a.rows, vcols)
    return IntMatrix.from_columns([vcols[j] for j in sorted(free)], rows=a.cols)


def column_lattice_basis(a: IntMatrix) -> IntMatrix:
    """A matrix with independent columns spanning the same column lattice as `a`."""
    acols = [list(c) for c in a.columns()]
    free = _column_echelon(acols, a.rows, None)
    keep = [j for j in range(a.cols) if j not in free]
    return IntMatrix.from_columns([acols[j] for j in keep], rows=a.rows)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------


class _SmithWork:
    """Row-major Smith elimination with optional mirrored transforms.

    a        : the matrix being reduced (mutated)
    u, v     : accumulate the row / column transforms when requested
    uinv     : accumulates the inverse of u (as column operations)
    payload  : extra columns glued to `a`: receives row operations only,
               so it ends up holding u @ payload_original
    """

    def __init__(self, a: IntMatrix, *, want_u=False, want_uinv=False, want_v=False,
                 payload: Optional[IntMatrix] = None):
        self.nrows, self.ncols = a.rows, a.cols
        self.a = a.to_rows()
        self.u = IntMatrix.identity(a.rows).to_rows() if want_u else None
        self.uinv = IntMatrix.identity(a.rows).to_rows() if want_uinv else None
        self.v = IntMatrix.identity(a.cols).to_rows() if want_v else None
        self.payload = payload.to_rows() if payload is not None else None

    # row operations ------------------------------------------------------

    def row_swap(self, i, k):
        if i == k:
            return
        self.a[i], self.a[k] = self.a[k], self.a[i]
        if self.u is not None:
            self.u[i], self.u[k] = self.u[k], self.u[i]
        if self.payload is not None:
            self.payload[i], self.payload[k] = self.payload[k], self.payload[i]
        if self.uinv is not None:
            for row in self.uinv:
                row[i], row[k] = row[k], row[i]

    def row_axpy(self, i, k, q):
        """row_i += q * row_k"""
        if q == 0:
            return
        ai, ak = self.a[i], self.a[k]
        for j in range(self.ncols):
            if ak[j]:
                ai[j] += q * ak[j]
        if self.u is not None:
            ui, uk = self.u[i], self.u[k]
            for j in range(len(ui)):
                if uk[j]:
                    ui[j] += q * uk[j]
        if self.payload is not None:
            pi, pk = self.payload[i], self.payload[k]
            for j in range(len(pi)):
                if pk[j]:
                    pi[j] += q * pk[j]
        if self.uinv is not None:
            for row in self.uinv:
                if row[i]:
                    row[k] -= q * row[i]

    def row_negate(self, i):
        self.a[i] = [-e for e in self.a[i]]
        if self.u is not None:
            self.u[i] = [-e for e in self.u[i]]
        if self.payload is not None:
            self.payload[i] = [-e for e in self.payload[i]]
        if self.uinv is not None:
            for row in self.uinv:
                row[i] = -row[i]

    # column operations ----------------------------------------------------

    def col_swap(self, j, k):
        if j == k:
            return
        for row in self.a:
            row[j], row[k] = row[k], row[j]
        if self.v is not None:
            for row in self.v:
                row[j], row[k] = row[k], row[j]

    def col_axpy(self, j, k, q):
        """col_j += q * col_k"""
        if q == 0:
            return
        for row in self.a:
            if row[k]:
                row[j] += q * row[k]
        if self.v is not None:
            for row in self.v:
                if row[k]:
                    row[j] += q * row[k]

    # the elimination ------------------------------------------------------

    def run(self) -> tuple[int, ...]:
        """Reduce to Smith form; returns the diagonal."""
        a = self.a
        nrows, ncols = self.nrows, self.ncols
        for k in range(min(nrows, ncols)):
            # deterministic pivot: minimal |entry|, ties at lowest (row, col)
            best = None
            for i in range(k, nrows):
                arow = a[i]
                for j in range(k, ncols):
                    e = arow[j]
                    if e and (best is None or abs(e) < best[0]):
                        best = (abs(e), i, j)
            if best is None:
                break
            self.row_swap(best[1], k)
            self.col_swap(best[2], k)
            while True:
                dirty = False
                for i in range(nrows):
                    if i == k or a[i][k] == 0:
                        continue
                    q = a[i][k] // a[k][k]
                    self.row_axpy(i, k, -q)
                    if a[i][k]:
                        self.row_swap(i, k)
                        dirty = True
                for j in range(ncols):
                    if j == k or a[k][j] == 0:
                        continue
                    q = a[k][j] // a[k][k]
                    self.col_axpy(j, k, -q)
                    if a[k][j]:
                        self.col_swap(j, k)
                        dirty = True
                if dirty:
                    continue
                if a[k][k] < 0:
                    self.row_negate(k)
                d = a[k][k]
                offender = None
                for i in range(k + 1, nrows):
                    arow = a[i]
                    for j in range(k + 1, ncols):
                        if arow[j] % d:
                            offender = i
                            break
                    if offender is not None:
                        break
                if offender is None:
                    break
                # pull the offending row into row k so the pivot shrinks to a gcd
                self.row_axpy(k, offender, 1)
        return tuple(a[i][i] for i in range(min(nrows, ncols)))


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    """Smith decomposition U @ a @ V = S, deterministic for equal inputs."""
    work = _SmithWork(a, want_u=True, want_v=True)
    work.run()
    return SmithDecomposition(
        u=IntMatrix.from_rows(work.u, cols=a.rows),
        s=IntMatrix.from_rows(work.a, cols=a.cols),
        v=IntMatrix.from_rows(work.v, cols=a.cols),
    )


def solve_columns(a: IntMatrix, b: IntMatrix, *, context: str = "") -> IntMatrix:
    """Solve a @ X = b for an integer matrix X, column by column.

    Raises ContainmentError when some column of `b` is not in the integer
    column span of `a`.  When the system is underdetermined the returned
    solution is the deterministic one with zero coordinates along the free
    directions of the eliminated system.
    """
    if a.rows != b.rows:
        raise ValueError("row count mismatch between system and right-hand side")
    work = _SmithWork(a, want_v=True, payload=b)
    diag = work.run()
    rank = sum(1 for d in diag if d)
    ub = work.payload
    xcols = []
    for j in range(b.cols):
        z = [0] * a.cols
        for i in range(a.rows):
            val = ub[i][j]
            if i < rank:
                d = diag[i]
                if val % d:
                    raise ContainmentError(
                        f"column {j} is not in the integer span"
                        + (f" ({context})" if context else "")
                    )
                z[i] = val // d
            elif val:
                raise ContainmentError(
                    f"column {j} is not in the span at all"
                    + (f" ({context})" if context else "")
                )
        xcols.append([sum(vrow[i] * z[i] for i in range(a.cols) if z[i]) for vrow in work.v])
    return IntMatrix.from_columns(xcols, rows=a.cols)


# ---------------------------------------------------------------------------
# finitely generated abelian groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinAbGroup:
    """A finitely generated abelian group in invariant-factor form.

    Presentation generators are ordered torsion-first: one generator per
    invariant factor (in divisibility order d1 | d2 | ...), followed by
    `free_rank` free generators.  `generator_lift`, when present, expresses
    those generators as columns in whatever ambient coordinates the group
    was computed in (for cohomology: cochain vectors).
    """

    free_rank: int
    invariant_factors: tuple[int, ...]
    generator_lift: Optional[IntMatrix] = None

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free_rank must be nonnegative")
        facs = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, "invariant_factors", facs)
        for d in facs:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
        for d, e in zip(facs, facs[1:]):
            if e % d:
                raise ValueError(f"invariant factors must form a divisor chain, got {facs}")
        if self.generator_lift is not None and self.generator_lift.cols != self.num_generators:
            raise ValueError("generator_lift has the wrong number of columns")

    @property
    def num_generators(self) -> int:
        return len(self.invariant_factors) + self.free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def order(self) -> int:
        if not self.is_finite:
            raise ValueError("group is infinite")
        return prod(self.invariant_factors) if self.invariant_factors else 1

    def relations(self) -> IntMatrix:
        """Relation matrix of the presentation: one column d_i * e_i per factor."""
        n, t = self.num_generators, len(self.invariant_factors)
        return IntMatrix.from_columns(
            [[self.invariant_factors[i] if r == i else 0 for r in range(n)] for i in range(t)],
            rows=n,
        )

    def same_structure(self, other: "FinAbGroup") -> bool:
        return (self.free_rank, self.invariant_factors) == (other.free_rank, other.invariant_factors)

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.invariant_factors)
        return " x ".join(parts) if parts else "trivial"


def cokernel_group(a: IntMatrix) -> FinAbGroup:
    """Z^rows / (column span of a), with generator lifts in Z^rows."""
    n = a.rows
    if a.cols == 0:
        return FinAbGroup(n, (), IntMatrix.identity(n))
    work = _SmithWork(a, want_uinv=True)
    diag = work.run()
    uinv = work.uinv
    torsion = [i for i, d in enumerate(diag) if d >= 2]
    free = [i for i in range(n) if i >= len(diag) or diag[i] == 0]
    lift = IntMatrix.from_columns(
        [[uinv[r][i] for r in range(n)] for i in torsion + free], rows=n
    )
    return FinAbGroup(len(free), tuple(diag[i] for i in torsion), lift)


def subquotient_group(b: IntMatrix, c: IntMatrix) -> FinAbGroup:
    """(span of b) / (span of c) for a sublattice pair c <= b.

    `b` must have independent columns (a lattice basis); every column of
    `c` must lie in the integer span of `b`, else ContainmentError.  The
    generator lift is expressed in the ambient coordinates of `b`'s rows.
    """
    x = solve_columns(b, c, context="subquotient inclusion")
    # independence check: b @ x = c must determine x uniquely
    if b.cols:
        diag = _SmithWork(b).run()
        if sum(1 for d in diag if d) != b.cols:
            raise ValueError("columns of b are not independent")
    q = cokernel_group(x)
    lift = b @ q.generator_lift if q.generator_lift is not None else None
    return replace(q, generator_lift=lift)


@dataclass(frozen=True)
class AbMorphism:
    """A homomorphism of finitely presented abelian groups.

    `matrix` maps presentation generators of `source` to coordinate vectors
    in the presentation generators of `target`.  Well-definedness (source
    relations land in target relations) is checked at construction.
    """

    source: FinAbGroup
    target: FinAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        m = self.matrix
        if m.shape != (self.target.num_generators, self.source.num_generators):
            raise ValueError(
                f"morphism matrix must be {self.target.num_generators}x"
                f"{self.source.num_generators}, got {m.rows}x{m.cols}"
            )
        tfac = self.target.invariant_factors
        ttor = len(tfac)
        for i, d in enumerate(self.source.invariant_factors):
            for j in range(self.target.num_generators):
                val = d * m[j, i]
                if j < ttor:
                    if val % tfac[j]:
                        raise ValueError(
                            f"not well defined: generator {i} of order {d} maps outside "
                            f"target relations at coordinate {j}"
                        )
                elif val:
                    raise ValueError(
                        f"not well defined: torsion generator {i} hits a free target "
                        f"coordinate {j}"
                    )

    @classmethod
    def identity(cls, g: FinAbGroup) -> "AbMorphism":
        return cls(g, g, IntMatrix.identity(g.num_generators))

    def reduced_matrix(self) -> IntMatrix:
        """Canonical matrix: torsion rows reduced mod their invariant factor."""
        tfac = self.target.invariant_factors
        rows = []
        for j in range(self.target.num_generators):
            row = self.matrix.row(j)
            if j < len(tfac):
                rows.append([e % tfac[j] for e in row])
            else:
                rows.append(list(row))
        return IntMatrix.from_rows(rows, cols=self.source.num_generators)

    @property
    def is_zero(self) -> bool:
        return self.reduced_matrix().is_zero()


class MorphismParts(NamedTuple):
    kernel: FinAbGroup
    image: FinAbGroup
    cokernel: FinAbGroup


def morphism_analysis(f: AbMorphism) -> MorphismParts:
    """Kernel, image and cokernel of a morphism, by lifting to free covers.

    Writing the source as Z^a / R_s and the target as Z^b / R_t, the
    preimage lattice K = {x in Z^a : f(x) in span R_t} is the projection of
    ker [F | R_t] to the first a coordinates.  Then

        kernel   = K / span R_s      image = Z^a / K
        cokernel = Z^b / span [F | R_t]

    Kernel generators come with lifts in source-presentation coordinates,
    image and cokernel generators with lifts in target coordinates.
    """
    src, tgt = f.source, f.target
    a = src.num_generators
    stacked = f.matrix.hstack(tgt.relations())
    ker_stacked = kernel_basis(stacked)
    projected = IntMatrix.from_rows([ker_stacked.row(i) for i in range(a)], cols=ker_stacked.cols)
    preimage = column_lattice_basis(projected)
    kernel = subquotient_group(preimage, src.relations())
    image = cokernel_group(preimage)
    if image.generator_lift is not None:
        image = replace(image, generator_lift=f.matrix @ image.generator_lift)
    cokernel = cokernel_group(stacked)
    return MorphismParts(kernel, image, cokernel)
